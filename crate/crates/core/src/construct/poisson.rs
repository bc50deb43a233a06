use rustfft::num_complex::Complex;

use crate::error::{Error, Result};
use crate::fft::Spectrum;
use crate::grid::{c0_norm, GridFunction, TrigPoly};
use crate::scalar::Real;

/// Relative mean tolerance for solvability, scaled by `max(1, ||T||_{C^0})`.
/// Single precision uses `64 eps` instead when that is larger.
pub const MEAN_TOLERANCE: f64 = 1e-10;

pub(crate) fn check_mean<T: Real>(mean: T, scale: T) -> Result<()> {
    let tol = T::lit(MEAN_TOLERANCE).max(T::lit(64.0) * T::epsilon());
    if mean.abs() > tol * scale.max(T::one()) {
        return Err(Error::NonZeroMean { mean: mean.to_f64_lossy() });
    }
    Ok(())
}

fn inverse_symbol<T: Real>(xi: &[i64]) -> Complex<T> {
    let k2: i64 = xi.iter().map(|x| x * x).sum();
    if k2 == 0 {
        return Complex::new(T::zero(), T::zero());
    }
    Complex::new(-T::of_usize(xi.len()) / T::of_i64(k2), T::zero())
}

/// Mean-zero `Psi` with `(1/d) Laplacian(Psi) = T`.
pub fn poisson_solve<T: Real>(t: &GridFunction<T>) -> Result<GridFunction<T>> {
    check_mean(t.mean(), c0_norm(t))?;
    Ok(Spectrum::forward(t).mapped(inverse_symbol).to_grid())
}

/// Coefficient form of [`poisson_solve`].
pub fn poisson_solve_poly<T: Real>(p: &TrigPoly<T>) -> Result<TrigPoly<T>> {
    let scale = p.coeffs().iter().map(|c| c.norm()).sum::<T>();
    check_mean(p.mean(), scale)?;
    Ok(p.map_symbol(inverse_symbol))
}
