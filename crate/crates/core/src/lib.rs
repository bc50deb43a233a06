//! Numerical toolkit for the total destruction of invariant Lagrangian graphs
//! of integrable symplectic twist maps.
//!
//! The crate is organized bottom-up:
//!
//! * [`grid`]: periodic grid functions, trigonometric polynomials, spectral
//!   derivatives and norm estimates;
//! * [`approx`]: Fejer and de la Vallee Poussin operators and certification
//!   of the Jackson-type error bound;
//! * [`construct`]: the perturbation families (toy model, smooth two-lobe
//!   bumps, their trigonometric approximations) and the periodic Poisson solve;
//! * [`twist`]: exact symplectic twist maps built from a potential, orbits and
//!   graph-transform search for invariant graphs;
//! * [`criterion`]: Herman's sufficient criterion for non-existence of
//!   invariant graphs;
//! * [`pipeline`]: end-to-end constructions and scaling sweeps with log-log
//!   slope fits.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`.

pub mod approx;
pub mod construct;
pub mod criterion;
mod error;
mod fft;
pub mod grid;
pub mod pipeline;
mod scalar;
pub mod twist;

pub use error::{Error, Result};
pub use rustfft::num_complex::Complex;
pub use scalar::{wrap_angle, Real};

pub use grid::{GridFunction, NormReport, TrigPoly};

pub type GridFunction64 = grid::GridFunction<f64>;
pub type GridFunction32 = grid::GridFunction<f32>;
pub type TrigPoly64 = grid::TrigPoly<f64>;
pub type TrigPoly32 = grid::TrigPoly<f32>;
pub type GeneratingMap64 = twist::GeneratingMap<f64>;
pub type CriterionReport64 = criterion::CriterionReport<f64>;
