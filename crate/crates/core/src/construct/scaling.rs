use serde::Serialize;

use crate::approx::{minimal_degree, vallee_poussin_tensor, ApproxParams, DegreeSearch};
use crate::error::{Error, Result};
use crate::grid::{c0_norm, from_spectrum, GridFunction, TrigPoly};
use crate::scalar::Real;

use super::poisson::check_mean;

/// Exponent bookkeeping for the analytic construction.
#[derive(Clone, Debug, Serialize)]
pub struct ScalingParams<T: Real> {
    pub dims: usize,
    pub n: usize,
    pub eps: T,
    /// `round(d / (2 eps))`.
    pub k: usize,
    /// `4 eps d / (1 + 2 eps)`.
    pub delta: T,
}

impl<T: Real> ScalingParams<T> {
    pub fn new(dims: usize, n: usize, eps: T) -> Result<Self> {
        if !(eps > T::zero() && eps < T::lit(0.25)) {
            return Err(Error::InvalidParameter { name: "eps", reason: format!("{eps} outside (0, 1/4)") });
        }
        if dims == 0 || n == 0 {
            return Err(Error::InvalidParameter { name: "n", reason: "d and n must be positive".into() });
        }
        let d = T::of_usize(dims);
        let k = (d / (T::lit(2.0) * eps)).round().to_f64_lossy() as usize;
        let delta = T::lit(4.0) * eps * d / (T::one() + T::lit(2.0) * eps);
        Ok(ScalingParams { dims, n, eps, k: k.max(1), delta })
    }

    /// Growth exponent of `||T~_n||_{C^k}`: `k/d + 1`.
    pub fn ck_exponent(&self) -> T {
        T::of_usize(self.k) / T::of_usize(self.dims) + T::one()
    }

    /// Growth exponent of the polynomial degree: `1/d + 1/k`.
    pub fn degree_exponent(&self) -> T {
        T::of_usize(self.dims).recip() + T::of_usize(self.k).recip()
    }

    /// Exponent of `max p~_N`: `-(2 - eps)`.
    pub fn max_exponent(&self) -> T {
        -(T::lit(2.0) - self.eps)
    }

    /// Exponent of `-min p~_N`: `-(1 - eps)`.
    pub fn min_exponent(&self) -> T {
        -(T::one() - self.eps)
    }

    /// Integer orders `r <= d - 1 - delta` at which `p~_N` decays.
    pub fn decaying_orders_poly(&self) -> Vec<usize> {
        orders_below(T::of_usize(self.dims) - T::one() - self.delta)
    }

    /// Integer orders `r <= d + 1 - delta` at which the potential decays.
    pub fn decaying_orders_potential(&self) -> Vec<usize> {
        orders_below(T::of_usize(self.dims) + T::one() - self.delta)
    }

    fn normalizer(&self) -> T {
        T::of_usize(self.n).powf(T::one() - self.eps)
    }
}

fn orders_below<T: Real>(bound: T) -> Vec<usize> {
    if bound < T::zero() {
        return Vec::new();
    }
    (0..=bound.floor().to_f64_lossy() as usize).collect()
}

/// `p_N` and its normalization `p~_N = p_N / (n^{1-eps} max|p_N|)`.
#[derive(Clone, Debug)]
pub struct Approximation<T: Real> {
    pub search: DegreeSearch<T>,
    pub p: TrigPoly<T>,
    pub p_tilde: TrigPoly<T>,
    /// `p~_N` sampled on the input grid.
    pub p_tilde_grid: GridFunction<T>,
    /// Grid maximum of `|p_N|`.
    pub p_sup: T,
}

pub fn approximate_and_normalize<T: Real>(
    t: &GridFunction<T>,
    sp: &ScalingParams<T>,
    sigma: T,
) -> Result<Approximation<T>> {
    if t.dims() != sp.dims {
        return Err(Error::DimensionMismatch { expected: sp.dims, actual: t.dims() });
    }
    check_mean(t.mean(), c0_norm(t))?;
    let search = minimal_degree(t, sigma)?;
    let mut params = ApproxParams::uniform(t.dims(), search.m, sp.k);
    params.sigma = sigma;
    let p = vallee_poussin_tensor(t, &params)?;
    let p_grid = from_spectrum(&p, t.resolution())?;
    let p_sup = c0_norm(&p_grid);
    if p_sup == T::zero() {
        return Err(Error::Infeasible("approximating polynomial vanishes".into()));
    }
    let scale = (sp.normalizer() * p_sup).recip();
    Ok(Approximation { search, p_tilde: p.scaled(scale), p, p_tilde_grid: p_grid.scaled(scale), p_sup })
}
