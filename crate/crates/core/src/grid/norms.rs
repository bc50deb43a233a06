//! Sup-norm, integer `C^r` and interpolated Hoelder norm estimates.
//!
//! Conventions:
//! * `||f||_{C^0}` is the grid maximum of `|f|`, a lower bound for the true
//!   supremum that converges as the resolution grows.
//! * `||f||_{C^r} = max_{|beta| <= r} ||d^beta f||_{C^0}` over all mixed
//!   partials, each computed spectrally.
//! * The Hoelder value is the interpolation upper bound
//!   `2 ||f||_{C^r}^{1-alpha} ||f||_{C^{r+1}}^alpha`, not an exact seminorm.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::spectrum::derivative_symbol;
use super::GridFunction;
use crate::error::{Error, Result};
use crate::fft::Spectrum;
use crate::scalar::Real;

/// All multi-indices in `N^dims` with total order `<= r`, lowest order first.
pub fn multi_indices(dims: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, dims: usize, budget: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == dims {
            out.push(prefix.clone());
            return;
        }
        for b in 0..=budget {
            prefix.push(b);
            rec(prefix, dims, budget - b, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(dims), dims, r, &mut out);
    out.sort_by_key(|b| (b.iter().sum::<usize>(), b.clone()));
    out
}

pub fn c0_norm<T: Real>(f: &GridFunction<T>) -> T {
    f.values().iter().map(|v| v.abs()).fold(T::zero(), T::max)
}

fn partial_sup<T: Real>(spec: &Spectrum<T>, beta: &[usize]) -> T {
    let g = spec.mapped(|xi| derivative_symbol(xi, beta)).to_grid();
    c0_norm(&g)
}

/// Per-order sup norms `max_{|beta| = j} ||d^beta f||` for `j = 0..=r`.
pub(crate) fn order_sups<T: Real>(f: &GridFunction<T>, r: usize) -> Vec<T> {
    let spec = Spectrum::forward(f);
    let betas = multi_indices(f.dims(), r);
    let sups: Vec<(usize, T)> = betas
        .par_iter()
        .map(|beta| {
            let order = beta.iter().sum::<usize>();
            let s = if order == 0 { c0_norm(f) } else { partial_sup(&spec, beta) };
            (order, s)
        })
        .collect();
    let mut per_order = vec![T::zero(); r + 1];
    for (order, s) in sups {
        per_order[order] = per_order[order].max(s);
    }
    per_order
}

pub fn cr_norm<T: Real>(f: &GridFunction<T>, r: usize) -> T {
    order_sups(f, r).into_iter().fold(T::zero(), T::max)
}

/// Interpolation bound for the `C^{r+alpha}` norm, `0 < alpha < 1`.
pub fn holder_norm<T: Real>(f: &GridFunction<T>, r: usize, alpha: T) -> Result<T> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: format!("Hoelder exponent must lie in (0, 1), got {alpha}"),
        });
    }
    let per_order = order_sups(f, r + 1);
    Ok(interpolate(&per_order, r, alpha))
}

fn interpolate<T: Real>(per_order: &[T], r: usize, alpha: T) -> T {
    let lower = per_order[..=r].iter().copied().fold(T::zero(), T::max);
    let upper = lower.max(per_order[r + 1]);
    if lower == T::zero() {
        return T::zero();
    }
    T::lit(2.0) * lower.powf(T::one() - alpha) * upper.powf(alpha)
}

#[derive(Clone, Debug, Serialize)]
pub struct NormReport<T: Real> {
    pub c0: T,
    pub cr: BTreeMap<usize, T>,
    /// `(r, alpha, bound)` triples.
    pub holder: Vec<(usize, T, T)>,
}

impl<T: Real> NormReport<T> {
    /// Measures `C^0..C^max_r` and the interpolation bounds for every
    /// `(r, alpha)` with `r < max_r`, from a single set of spectral partials.
    pub fn measure(f: &GridFunction<T>, max_r: usize, alphas: &[T]) -> Result<Self> {
        for &a in alphas {
            if !(a > T::zero() && a < T::one()) {
                return Err(Error::InvalidParameter { name: "alpha", reason: format!("{a} not in (0, 1)") });
            }
        }
        let per_order = order_sups(f, max_r);
        let mut cr = BTreeMap::new();
        let mut running = T::zero();
        for (r, &s) in per_order.iter().enumerate() {
            running = running.max(s);
            cr.insert(r, running);
        }
        let mut holder = Vec::new();
        for r in 0..max_r {
            for &a in alphas {
                holder.push((r, a, interpolate(&per_order, r, a)));
            }
        }
        Ok(NormReport { c0: per_order[0], cr, holder })
    }
}
