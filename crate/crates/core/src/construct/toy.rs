use rustfft::num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{spectral_derivative, GridFunction, TrigPoly};
use crate::scalar::Real;
use crate::twist::GeneratingMap;

fn check_n(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidParameter { name: "n", reason: "n must be >= 1".into() });
    }
    Ok(())
}

fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

/// `phi_n(x) = -(5/(4n)) cos(nx) + (1/(8n)) sin(2nx)`.
pub fn toy_phi_poly<T: Real>(n: usize) -> Result<TrigPoly<T>> {
    check_n(n)?;
    let (k, nf) = (n as i64, n as f64);
    let a = -5.0 / (8.0 * nf);
    let b = 1.0 / (16.0 * nf);
    TrigPoly::from_terms(
        1,
        &[
            (vec![k], c(a, 0.0)),
            (vec![-k], c(a, 0.0)),
            (vec![2 * k], c(0.0, -b)),
            (vec![-2 * k], c(0.0, b)),
        ],
    )
}

/// `Psi_n(x) = -(5/(4n^2)) sin(nx) - (1/(16n^2)) cos(2nx)`, so `Psi_n' = phi_n`.
pub fn toy_potential_poly<T: Real>(n: usize) -> Result<TrigPoly<T>> {
    check_n(n)?;
    let (k, nf) = (n as i64, n as f64);
    let a = 5.0 / (8.0 * nf * nf);
    let b = -1.0 / (32.0 * nf * nf);
    TrigPoly::from_terms(
        1,
        &[
            (vec![k], c(0.0, a)),
            (vec![-k], c(0.0, -a)),
            (vec![2 * k], c(b, 0.0)),
            (vec![-2 * k], c(b, 0.0)),
        ],
    )
}

pub fn toy_phi<T: Real>(n: usize, resolution: usize) -> Result<GridFunction<T>> {
    check_n(n)?;
    let nf = T::of_usize(n);
    let a = T::lit(5.0 / 4.0) / nf;
    let b = T::lit(1.0 / 8.0) / nf;
    GridFunction::from_fn(1, resolution, |x| -a * (nf * x[0]).cos() + b * (T::lit(2.0) * nf * x[0]).sin())
}

/// The map `(x, y) -> (x + y, y + phi_n(x + y))`.
pub fn toy_generating<T: Real>(n: usize) -> Result<GeneratingMap<T>> {
    GeneratingMap::from_potential(toy_potential_poly(n)?)
}

/// Extrema of `D phi_n` and one location of each.
#[derive(Clone, Debug, Serialize)]
pub struct ToyExtrema<T: Real> {
    pub n: usize,
    pub min: T,
    pub argmin: T,
    pub max: T,
    pub argmax: T,
}

/// Closed form: minimum `-3/2` at `3pi/(2n)`, maximum `1` at `pi/(2n)`,
/// both repeating with period `2pi/n`.
pub fn toy_derivative_extrema<T: Real>(n: usize) -> Result<ToyExtrema<T>> {
    check_n(n)?;
    let nf = T::of_usize(n);
    Ok(ToyExtrema {
        n,
        min: T::lit(-1.5),
        argmin: T::lit(1.5) * T::PI() / nf,
        max: T::one(),
        argmax: T::FRAC_PI_2() / nf,
    })
}

/// Grid extrema of the spectral derivative of sampled `phi_n`. Exact at
/// the nodes when `M` is a multiple of `4n`.
pub fn measure_toy_extrema<T: Real>(n: usize, resolution: usize) -> Result<ToyExtrema<T>> {
    let d = spectral_derivative(&toy_phi::<T>(n, resolution)?, 0, 1)?;
    Ok(ToyExtrema {
        n,
        min: d.min(),
        argmin: GridFunction::<T>::node(resolution, d.argmin()),
        max: d.max(),
        argmax: GridFunction::<T>::node(resolution, d.argmax()),
    })
}
