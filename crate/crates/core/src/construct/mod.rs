//! Perturbation objects: the one-dimensional toy model, the two-lobe bump
//! families, their polynomial approximation and normalization, and the
//! spectral Poisson solve producing the potential.

mod bump;
mod poisson;
mod scaling;
mod toy;

pub use bump::{analytic_bump, herman_bump, Bump, BumpProfile, BumpSpec};
pub use poisson::{poisson_solve, poisson_solve_poly, MEAN_TOLERANCE};
pub use scaling::{approximate_and_normalize, Approximation, ScalingParams};
pub use toy::{measure_toy_extrema, toy_derivative_extrema, toy_generating, toy_phi, toy_phi_poly, toy_potential_poly, ToyExtrema};
