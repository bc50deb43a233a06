use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::GeneratingMap;
use crate::error::{Error, Result};
use crate::grid::{to_spectrum, GridFunction, TrigPoly};
use crate::scalar::Real;

/// `G <= 1 + M/2 + sqrt(M + M^2/4)`, the Lipschitz bound on `g = Id + psi`
/// for an invariant graph when `M` bounds the perturbation derivative.
pub fn lipschitz_bound<T: Real>(m: T) -> Result<T> {
    if !(m > T::lit(-2.0)) {
        return Err(Error::Domain(format!("M = {m} must exceed -2")));
    }
    let radicand = m + m * m / T::lit(4.0);
    if radicand < T::zero() {
        return Err(Error::Domain(format!("M + M^2/4 = {radicand} is negative")));
    }
    Ok(T::one() + m / T::lit(2.0) + radicand.sqrt())
}

/// A graph `y = psi(x)` over the torus, one grid function per component.
#[derive(Clone, Debug)]
pub struct GraphCandidate<T: Real> {
    pub components: Vec<GridFunction<T>>,
    /// `max(sup |g'|, 1/inf |g'|)` from grid finite differences of
    /// `g = Id + psi`; infinite once `g` folds.
    pub lipschitz_estimate: T,
}

/// Spectral interpolant of a candidate and of its Jacobian.
struct Interpolant<T: Real> {
    psi: Vec<TrigPoly<T>>,
    jac: Vec<TrigPoly<T>>,
}

impl<T: Real> Interpolant<T> {
    fn new(components: &[GridFunction<T>]) -> Result<Self> {
        let d = components.len();
        let psi = components.iter().map(to_spectrum).collect::<Result<Vec<_>>>()?;
        let mut jac = Vec::with_capacity(d * d);
        for p in &psi {
            for a in 0..d {
                let mut beta = vec![0; d];
                beta[a] = 1;
                jac.push(p.derivative(&beta)?);
            }
        }
        Ok(Interpolant { psi, jac })
    }

    fn psi(&self, x: &[T]) -> Vec<T> {
        self.psi.iter().map(|p| p.eval(x)).collect()
    }

    /// Row-major `I + D psi`.
    fn dg(&self, x: &[T]) -> Vec<T> {
        let d = self.psi.len();
        let mut j: Vec<T> = self.jac.iter().map(|p| p.eval(x)).collect();
        for a in 0..d {
            j[a * d + a] += T::one();
        }
        j
    }

    /// Solves `x + psi(x) = z` by Newton's method.
    fn invert(&self, z: &[T]) -> Option<Vec<T>> {
        let d = z.len();
        let mut x: Vec<T> = z.iter().zip(self.psi(z)).map(|(&a, b)| a - b).collect();
        let scale = z.iter().fold(T::one(), |acc, v| acc.max(v.abs()));
        let tol = T::epsilon() * T::lit(64.0) * scale;
        for _ in 0..60 {
            let p = self.psi(&x);
            let f: Vec<f64> = (0..d).map(|a| (x[a] + p[a] - z[a]).to_f64_lossy()).collect();
            let jm = DMatrix::from_row_iterator(d, d, self.dg(&x).iter().map(|v| v.to_f64_lossy()));
            let step = jm.lu().solve(&DVector::from_vec(f))?;
            let mut size = T::zero();
            for a in 0..d {
                let s = T::lit(step[a]);
                x[a] -= s;
                size = size.max(s.abs());
            }
            if !size.is_finite() {
                return None;
            }
            if size <= tol {
                return Some(x);
            }
        }
        None
    }
}

fn det_f64(m: &[f64], d: usize) -> f64 {
    DMatrix::from_row_slice(d, d, m).determinant()
}

impl<T: Real> GraphCandidate<T> {
    pub fn new(components: Vec<GridFunction<T>>) -> Result<Self> {
        let first = components.first().ok_or_else(|| Error::NotEvaluable("no components".into()))?;
        let (d, m) = (first.dims(), first.resolution());
        if components.len() != d {
            return Err(Error::NotEvaluable(format!("{} components for a graph over T^{d}", components.len())));
        }
        if components.iter().any(|c| c.dims() != d || c.resolution() != m) {
            return Err(Error::NotEvaluable("components on different grids".into()));
        }
        let mut cand = GraphCandidate { components, lipschitz_estimate: T::zero() };
        cand.lipschitz_estimate = cand.estimate_lipschitz()?;
        Ok(cand)
    }

    /// The flat graph `y = omega`.
    pub fn constant(omega: &[T], resolution: usize) -> Result<Self> {
        let d = omega.len();
        Self::new(omega.iter().map(|&w| GridFunction::constant(d, resolution, w)).collect::<Result<Vec<_>>>()?)
    }

    pub fn dims(&self) -> usize {
        self.components.len()
    }

    pub fn resolution(&self) -> usize {
        self.components[0].resolution()
    }

    /// Whether `det(I + D psi) <= 0` at some node.
    pub fn folds(&self) -> Result<bool> {
        let interp = Interpolant::new(&self.components)?;
        let d = self.dims();
        let probe = &self.components[0];
        Ok((0..probe.len()).into_par_iter().any(|i| {
            let x = probe.point(i);
            let j: Vec<f64> = interp.dg(&x).iter().map(|v| v.to_f64_lossy()).collect();
            !(det_f64(&j, d) > 0.0)
        }))
    }

    fn estimate_lipschitz(&self) -> Result<T> {
        if self.folds()? {
            return Ok(T::infinity());
        }
        let d = self.dims();
        let m = self.resolution();
        let h = T::TAU() / T::of_usize(m);
        let probe = &self.components[0];
        let ratios: Vec<(T, T)> = (0..probe.len())
            .into_par_iter()
            .map(|i| {
                let mut hi = T::zero();
                let mut lo = T::infinity();
                for a in 0..d {
                    let stride = m.pow((d - 1 - a) as u32);
                    let coord = (i / stride) % m;
                    let next = i - coord * stride + ((coord + 1) % m) * stride;
                    let mut norm2 = T::zero();
                    for (c, comp) in self.components.iter().enumerate() {
                        let diff = comp.values()[next] - comp.values()[i];
                        let v = if c == a { h + diff } else { diff };
                        norm2 += v * v;
                    }
                    let r = norm2.sqrt() / h;
                    hi = hi.max(r);
                    lo = lo.min(r);
                }
                (hi, lo)
            })
            .collect();
        let hi = ratios.iter().fold(T::zero(), |acc, r| acc.max(r.0));
        let lo = ratios.iter().fold(T::infinity(), |acc, r| acc.min(r.1));
        if !(lo > T::zero()) {
            return Ok(T::infinity());
        }
        Ok(hi.max(lo.recip()))
    }
}

fn check_pair<T: Real>(map: &GeneratingMap<T>, cand: &GraphCandidate<T>) -> Result<()> {
    if map.dims() != cand.dims() {
        return Err(Error::NotEvaluable(format!("map on T^{} but graph over T^{}", map.dims(), cand.dims())));
    }
    if cand.components.iter().any(|c| c.values().iter().any(|v| !v.is_finite())) {
        return Err(Error::NotEvaluable("non-finite graph values".into()));
    }
    Ok(())
}

/// `sup |psi(x + psi(x)) - psi(x) - grad Psi(x + psi(x))|` over the nodes.
pub fn graph_residual<T: Real>(map: &GeneratingMap<T>, cand: &GraphCandidate<T>) -> Result<T> {
    check_pair(map, cand)?;
    let interp = Interpolant::new(&cand.components)?;
    let probe = &cand.components[0];
    let d = cand.dims();
    let per_node: Vec<T> = (0..probe.len())
        .into_par_iter()
        .map(|i| {
            let x = probe.point(i);
            let z: Vec<T> = (0..d).map(|a| x[a] + cand.components[a].values()[i]).collect();
            let pz = interp.psi(&z);
            let gz = map.gradient_at(&z);
            (0..d)
                .map(|a| (pz[a] - cand.components[a].values()[i] - gz[a]).abs())
                .fold(T::zero(), T::max)
        })
        .collect();
    Ok(per_node.into_iter().fold(T::zero(), T::max))
}

fn check_gg<T: Real>(map: &GeneratingMap<T>, cand: &GraphCandidate<T>) -> Result<Interpolant<T>> {
    check_pair(map, cand)?;
    if cand.dims() != 1 {
        return Err(Error::NotEvaluable("the conjugacy form needs d = 1".into()));
    }
    if cand.lipschitz_estimate.is_infinite() {
        return Err(Error::NotEvaluable("g = Id + psi is not invertible".into()));
    }
    Interpolant::new(&cand.components)
}

/// `(g(z) + g^{-1}(z))/2 - z - phi(z)/2` with `g = Id + psi` and `phi = Psi'`.
pub fn gg_residual_at<T: Real>(map: &GeneratingMap<T>, cand: &GraphCandidate<T>, z: T) -> Result<T> {
    let interp = check_gg(map, cand)?;
    gg_point(map, &interp, z)
}

fn gg_point<T: Real>(map: &GeneratingMap<T>, interp: &Interpolant<T>, z: T) -> Result<T> {
    let x = interp.invert(&[z]).ok_or_else(|| Error::NotEvaluable(format!("no preimage of {z} under g")))?[0];
    let g = z + interp.psi(&[z])[0];
    let phi = map.gradient_at(&[z])[0];
    Ok((g + x) / T::lit(2.0) - z - phi / T::lit(2.0))
}

/// Sup of [`gg_residual_at`] over the grid nodes.
pub fn gg_residual<T: Real>(map: &GeneratingMap<T>, cand: &GraphCandidate<T>) -> Result<T> {
    let interp = check_gg(map, cand)?;
    let m = cand.resolution();
    let vals = (0..m)
        .into_par_iter()
        .map(|j| gg_point(map, &interp, GridFunction::<T>::node(m, j)).map(|v| v.abs()))
        .collect::<Result<Vec<T>>>()?;
    Ok(vals.into_iter().fold(T::zero(), T::max))
}

#[derive(Clone, Debug)]
pub struct GraphOptions<T: Real> {
    pub resolution: usize,
    pub max_iter: usize,
    pub tol: T,
    /// Relaxation used after the first stalled iteration.
    pub relaxation: T,
}

impl<T: Real> Default for GraphOptions<T> {
    fn default() -> Self {
        GraphOptions { resolution: 256, max_iter: 200, tol: T::lit(1e-8), relaxation: T::lit(0.5) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    /// `g = Id + psi` stopped being invertible.
    Fold,
    MaxIterations,
    NonFinite,
}

/// Diagnostics of one graph-transform run. A failed run is evidence only;
/// it does not show that no invariant graph exists.
#[derive(Clone, Debug, Serialize)]
pub struct GraphReport<T: Real> {
    pub omega: Vec<T>,
    pub iterations: usize,
    pub final_residual: T,
    pub lipschitz_estimate: T,
    pub mm_bound: T,
    pub converged: bool,
    pub reason: Termination,
}

#[derive(Clone, Debug)]
pub struct GraphOutcome<T: Real> {
    pub report: GraphReport<T>,
    pub candidate: GraphCandidate<T>,
}

/// Pushes `y = psi(x)` forward by the map: `psi_new(z) = z - g^{-1}(z) + grad Psi(z)`.
fn push_forward<T: Real>(map: &GeneratingMap<T>, cand: &GraphCandidate<T>) -> Option<Vec<GridFunction<T>>> {
    let interp = Interpolant::new(&cand.components).ok()?;
    let probe = &cand.components[0];
    let d = cand.dims();
    let rows: Vec<Option<Vec<T>>> = (0..probe.len())
        .into_par_iter()
        .map(|i| {
            let z = probe.point(i);
            let x = interp.invert(&z)?;
            let g = map.gradient_at(&z);
            Some((0..d).map(|a| z[a] - x[a] + g[a]).collect())
        })
        .collect();
    let rows: Vec<Vec<T>> = rows.into_iter().collect::<Option<_>>()?;
    (0..d)
        .map(|a| GridFunction::new(d, probe.resolution(), rows.iter().map(|r| r[a]).collect()).ok())
        .collect()
}

/// Fixed-point iteration on the invariance equation starting from `y = omega`.
///
/// Undamped at first; after an iteration that fails to reduce the residual,
/// switches to the relaxation in `opts`. Stops at a fold of `g = Id + psi`.
pub fn graph_transform<T: Real>(map: &GeneratingMap<T>, omega: &[T], opts: &GraphOptions<T>) -> Result<GraphOutcome<T>> {
    if omega.len() != map.dims() {
        return Err(Error::DimensionMismatch { expected: map.dims(), actual: omega.len() });
    }
    let mm_bound = lipschitz_bound(map.trace_field(opts.resolution)?.max())?;
    let mut cand = GraphCandidate::constant(omega, opts.resolution)?;
    let mut lambda = T::one();
    let mut previous = T::infinity();
    let mut residual = T::infinity();
    let mut reason = Termination::MaxIterations;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let Some(next) = push_forward(map, &cand) else {
            reason = Termination::Fold;
            break;
        };
        let mixed = next
            .iter()
            .zip(&cand.components)
            .map(|(n, o)| o.combine(T::one() - lambda, n, lambda))
            .collect::<Result<Vec<_>>>();
        let Ok(mixed) = mixed else {
            reason = Termination::NonFinite;
            break;
        };
        cand = GraphCandidate::new(mixed)?;
        residual = graph_residual(map, &cand)?;
        if !residual.is_finite() {
            reason = Termination::NonFinite;
            break;
        }
        if cand.lipschitz_estimate.is_infinite() {
            reason = Termination::Fold;
            break;
        }
        if residual < opts.tol {
            reason = Termination::Converged;
            break;
        }
        if residual >= T::lit(0.99) * previous {
            lambda = opts.relaxation;
        }
        previous = residual;
    }
    let report = GraphReport {
        omega: omega.to_vec(),
        iterations,
        final_residual: residual,
        lipschitz_estimate: cand.lipschitz_estimate,
        mm_bound,
        converged: reason == Termination::Converged,
        reason,
    };
    Ok(GraphOutcome { report, candidate: cand })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_values() {
        assert_eq!(lipschitz_bound(0.0f64).unwrap(), 1.0);
        assert!((lipschitz_bound(1.0f64).unwrap() - (1.5 + 5f64.sqrt() / 2.0)).abs() < 1e-15);
        assert!(lipschitz_bound(-0.5f64).is_err());
        assert!(lipschitz_bound(-3.0f64).is_err());
    }

    #[test]
    fn flat_graph_of_shear() {
        let f = GeneratingMap::<f64>::integrable(1).unwrap();
        let c = GraphCandidate::constant(&[0.7], 32).unwrap();
        assert_eq!(graph_residual(&f, &c).unwrap(), 0.0);
        assert!((c.lipschitz_estimate - 1.0).abs() < 1e-12);
        let out = graph_transform(&f, &[0.7], &GraphOptions { resolution: 32, ..Default::default() }).unwrap();
        assert!(out.report.converged);
        assert_eq!(out.report.iterations, 1);
    }

    #[test]
    fn dimension_mismatch_is_not_evaluable() {
        let f = GeneratingMap::<f64>::integrable(2).unwrap();
        let c = GraphCandidate::constant(&[0.7], 32).unwrap();
        assert!(matches!(graph_residual(&f, &c), Err(Error::NotEvaluable(_))));
    }
}
