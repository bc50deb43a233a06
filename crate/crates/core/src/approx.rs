//! Fejer and generalized de la Vallee Poussin operators on periodic grid
//! functions, and empirical certification of the Jackson-type bound
//! `||f - P f||_{C^0} <= A N^{-k} ||f||_{C^k}`.
//!
//! The Fejer mean `F_m` acts on the frequency `xi` along its axis by the
//! triangular weight `max(0, 1 - |xi|/m)`, which is the Fourier transform of
//! the normalized kernel `(sin(m t) / sin t)^2 / (m pi)` on `[-pi/2, pi/2]`
//! evaluated along `x + 2t`. The operators are applied in that spectral form.

use rustfft::num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fft::Spectrum;
use crate::grid::{c0_norm, cr_norm, spectral_derivative, GridFunction, TrigPoly};
use crate::scalar::Real;

pub fn fejer_weight<T: Real>(xi: i64, m: usize) -> T {
    let w = T::one() - T::of_i64(xi.abs()) / T::of_usize(m);
    w.max(T::zero())
}

/// Weight of `P_m = 2 F_{2m} - F_m`: one up to `|xi| = m`, linear down to zero at `2m`.
pub fn vallee_poussin_weight<T: Real>(xi: i64, m: usize) -> T {
    T::lit(2.0) * fejer_weight::<T>(xi, 2 * m) - fejer_weight::<T>(xi, m)
}

fn check_axis<T: Real>(f: &GridFunction<T>, axis: usize, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter { name: "m", reason: "degree parameter must be >= 1".into() });
    }
    if axis >= f.dims() {
        return Err(Error::InvalidParameter { name: "axis", reason: format!("{axis} >= dims {}", f.dims()) });
    }
    Ok(())
}

fn axis_filter<T: Real, W>(f: &GridFunction<T>, axis: usize, weight: W) -> GridFunction<T>
where
    W: Fn(i64) -> T + Sync,
{
    let spec = Spectrum::forward(f);
    spec.mapped(|xi| Complex::new(weight(xi[axis]), T::zero())).to_grid()
}

/// `F_m^{[axis]} f`, a trigonometric polynomial of degree `<= m - 1` in `x_axis`.
pub fn fejer<T: Real>(f: &GridFunction<T>, axis: usize, m: usize) -> Result<GridFunction<T>> {
    check_axis(f, axis, m)?;
    Ok(axis_filter(f, axis, |xi| fejer_weight(xi, m)))
}

/// `P_m^{[axis]} f = 2 F_{2m} f - F_m f`, of degree `<= 2m - 1` in `x_axis`.
pub fn vallee_poussin<T: Real>(f: &GridFunction<T>, axis: usize, m: usize) -> Result<GridFunction<T>> {
    check_axis(f, axis, m)?;
    Ok(axis_filter(f, axis, |xi| vallee_poussin_weight(xi, m)))
}

#[derive(Clone, Debug, Serialize)]
pub struct ApproxParams<T: Real> {
    /// Per-axis degree parameters `m_j >= 1`.
    pub degrees: Vec<usize>,
    /// Per-axis smoothness orders `r_j >= 1`.
    pub orders: Vec<usize>,
    /// Target accuracy for degree selection.
    pub sigma: T,
    /// Calibrated Jackson constant, once known.
    pub constant: Option<T>,
}

impl<T: Real> ApproxParams<T> {
    pub fn uniform(dims: usize, m: usize, k: usize) -> Self {
        ApproxParams { degrees: vec![m; dims], orders: vec![k; dims], sigma: T::lit(0.01), constant: None }
    }

    pub fn with_constant(mut self, a: T) -> Self {
        self.constant = Some(a);
        self
    }

    fn validate(&self, f: &GridFunction<T>) -> Result<()> {
        let d = f.dims();
        if self.degrees.len() != d || self.orders.len() != d {
            return Err(Error::DimensionMismatch { expected: d, actual: self.degrees.len().min(self.orders.len()) });
        }
        if self.degrees.iter().any(|&m| m == 0) {
            return Err(Error::InvalidParameter { name: "degrees", reason: "every m_j must be >= 1".into() });
        }
        if self.orders.iter().any(|&r| r == 0) {
            return Err(Error::InvalidParameter { name: "orders", reason: "every r_j must be >= 1".into() });
        }
        if !(self.sigma > T::zero()) {
            return Err(Error::InvalidParameter { name: "sigma", reason: "must be positive".into() });
        }
        if let Some(a) = self.constant {
            if !(a > T::zero()) {
                return Err(Error::InvalidParameter { name: "constant", reason: "must be positive".into() });
            }
        }
        for (axis, &m) in self.degrees.iter().enumerate() {
            if 4 * m > f.resolution() {
                return Err(Error::Aliasing { axis, degree: 2 * m - 1, resolution: f.resolution() });
            }
        }
        Ok(())
    }
}

fn tensor_symbol<T: Real>(xi: &[i64], degrees: &[usize], order: &[usize]) -> T {
    order.iter().fold(T::one(), |acc, &a| acc * vallee_poussin_weight::<T>(xi[a], degrees[a]))
}

/// Generalized de la Vallee Poussin polynomial `P_{m_1..m_d}^{[1..d]} f`,
/// applying the axis operators in the order `0, 1, ..., d-1`.
pub fn vallee_poussin_tensor<T: Real>(f: &GridFunction<T>, params: &ApproxParams<T>) -> Result<TrigPoly<T>> {
    let order: Vec<usize> = (0..f.dims()).collect();
    vallee_poussin_tensor_ordered(f, params, &order)
}

/// Same as [`vallee_poussin_tensor`] with an explicit axis application order.
pub fn vallee_poussin_tensor_ordered<T: Real>(
    f: &GridFunction<T>,
    params: &ApproxParams<T>,
    axis_order: &[usize],
) -> Result<TrigPoly<T>> {
    params.validate(f)?;
    let mut seen = vec![false; f.dims()];
    for &a in axis_order {
        if a >= f.dims() || std::mem::replace(&mut seen[a], true) {
            return Err(Error::InvalidParameter { name: "axis_order", reason: format!("{axis_order:?} is not a permutation") });
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::InvalidParameter { name: "axis_order", reason: format!("{axis_order:?} is not a permutation") });
    }
    let spec = Spectrum::forward(f);
    let filtered = spec.mapped(|xi| Complex::new(tensor_symbol(xi, &params.degrees, axis_order), T::zero()));
    let degrees: Vec<usize> = params.degrees.iter().map(|&m| 2 * m - 1).collect();
    crate::grid::spectrum_to_poly(&filtered, &degrees)
}

fn residual_sup<T: Real>(spec: &Spectrum<T>, degrees: &[usize]) -> T {
    let order: Vec<usize> = (0..spec.dims).collect();
    let r = spec.mapped(|xi| Complex::new(T::one() - tensor_symbol::<T>(xi, degrees, &order), T::zero()));
    c0_norm(&r.to_grid())
}

/// `||f - P f||_{C^0}` on the grid for per-axis degree parameters.
pub fn approximation_error<T: Real>(f: &GridFunction<T>, degrees: &[usize]) -> Result<T> {
    let params = ApproxParams { degrees: degrees.to_vec(), orders: vec![1; degrees.len()], sigma: T::one(), constant: None };
    params.validate(f)?;
    Ok(residual_sup(&Spectrum::forward(f), degrees))
}

/// Measured approximation error alongside the Jackson bound
/// `A N^{-k} ||f||_{C^k}`.
///
/// `k` and `N = 2 m - 1` come from the axis maximizing
/// `m_j^{-r_j} ||d^{r_j} f / dx_j^{r_j}||_{C^0}`.
#[derive(Clone, Debug, Serialize)]
pub struct JacksonCertificate<T: Real> {
    #[serde(rename = "N")]
    pub degree: usize,
    pub k: usize,
    pub axis: usize,
    pub error: T,
    pub ck_norm: T,
    pub bound: Option<T>,
    pub pass: Option<bool>,
}

impl<T: Real> JacksonCertificate<T> {
    /// `error * N^k / ||f||_{C^k}`, the smallest constant this case allows.
    pub fn ratio(&self) -> T {
        if self.ck_norm == T::zero() {
            return T::zero();
        }
        self.error * T::of_usize(self.degree).powi(self.k as i32) / self.ck_norm
    }

    pub fn certify(mut self, constant: T) -> Self {
        let bound = constant * T::of_usize(self.degree).powi(-(self.k as i32)) * self.ck_norm;
        self.bound = Some(bound);
        self.pass = Some(self.error <= bound);
        self
    }
}

pub fn jackson_error<T: Real>(f: &GridFunction<T>, params: &ApproxParams<T>) -> Result<JacksonCertificate<T>> {
    params.validate(f)?;
    let mut axis = 0;
    let mut best = T::neg_infinity();
    for j in 0..f.dims() {
        let dj = c0_norm(&spectral_derivative(f, j, params.orders[j])?);
        let q = dj * T::of_usize(params.degrees[j]).powi(-(params.orders[j] as i32));
        if q > best {
            best = q;
            axis = j;
        }
    }
    let k = params.orders[axis];
    let cert = JacksonCertificate {
        degree: 2 * params.degrees[axis] - 1,
        k,
        axis,
        error: residual_sup(&Spectrum::forward(f), &params.degrees),
        ck_norm: cr_norm(f, k),
        bound: None,
        pass: None,
    };
    Ok(match params.constant {
        Some(a) => cert.certify(a),
        None => cert,
    })
}

/// Largest `error * N^k / ||f||_{C^k}` per family member over the uniform
/// degree parameters in `degrees`.
pub fn calibration_ratios<T: Real>(family: &[GridFunction<T>], k: usize, degrees: &[usize]) -> Result<Vec<T>> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if degrees.is_empty() {
        return Err(Error::InvalidParameter { name: "degrees", reason: "empty degree list".into() });
    }
    family
        .iter()
        .map(|f| {
            let ck = cr_norm(f, k);
            let spec = Spectrum::forward(f);
            let mut worst = T::zero();
            for &m in degrees {
                ApproxParams::<T>::uniform(f.dims(), m, k).validate(f)?;
                if ck == T::zero() {
                    continue;
                }
                let err = residual_sup(&spec, &vec![m; f.dims()]);
                let n = T::of_usize(2 * m - 1);
                worst = worst.max(err * n.powi(k as i32) / ck);
            }
            Ok(worst)
        })
        .collect()
}

/// Safety factor applied to the largest observed ratio.
pub const CALIBRATION_SAFETY: f64 = 1.1;
/// Lower floor for the calibrated constant.
pub const CALIBRATION_FLOOR: f64 = 1e-6;

/// Smallest constant `A` with `error <= A N^{-k} ||f||_{C^k}` over the family
/// and degree list, times [`CALIBRATION_SAFETY`], floored at [`CALIBRATION_FLOOR`].
pub fn calibrate_constant<T: Real>(family: &[GridFunction<T>], k: usize, degrees: &[usize]) -> Result<T> {
    let worst = calibration_ratios(family, k, degrees)?.into_iter().fold(T::zero(), T::max);
    Ok((worst * T::lit(CALIBRATION_SAFETY)).max(T::lit(CALIBRATION_FLOOR)))
}

/// Outcome of the uniform-degree search.
#[derive(Clone, Debug, Serialize)]
pub struct DegreeSearch<T: Real> {
    /// Per-axis degree parameter `m`.
    pub m: usize,
    /// Resulting polynomial degree `N = 2m - 1`.
    #[serde(rename = "N")]
    pub degree: usize,
    pub error: T,
    /// Number of error evaluations performed.
    pub evaluations: usize,
}

/// Finds a small uniform `m` with `||f - P_m f||_{C^0} <= sigma`.
///
/// Doubles `m` from 1 until the tolerance holds, then bisects between the last
/// failing and first passing value. `m` is capped at `M/4`, the largest value
/// whose polynomial the grid still resolves.
pub fn minimal_degree<T: Real>(f: &GridFunction<T>, sigma: T) -> Result<DegreeSearch<T>> {
    if !(sigma > T::zero()) {
        return Err(Error::InvalidParameter { name: "sigma", reason: "must be positive".into() });
    }
    let cap = f.resolution() / 4;
    if cap == 0 {
        return Err(Error::InvalidResolution { resolution: f.resolution(), reason: "need at least 4 samples per axis" });
    }
    let spec = Spectrum::forward(f);
    let dims = f.dims();
    let mut evaluations = 0;
    let mut err_at = |m: usize| {
        evaluations += 1;
        residual_sup(&spec, &vec![m; dims])
    };
    let mut lo = 0usize;
    let mut hi = 1usize;
    let mut hi_err = err_at(hi);
    while hi_err > sigma {
        if hi == cap {
            return Err(Error::ToleranceUnreachable {
                sigma: sigma.to_f64_lossy(),
                best_error: hi_err.to_f64_lossy(),
                max_degree: cap,
                resolution: f.resolution(),
            });
        }
        lo = hi;
        hi = (2 * hi).min(cap);
        hi_err = err_at(hi);
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        let e = err_at(mid);
        if e <= sigma {
            hi = mid;
            hi_err = e;
        } else {
            lo = mid;
        }
    }
    Ok(DegreeSearch { m: hi, degree: 2 * hi - 1, error: hi_err, evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mode(m: usize, k: f64) -> GridFunction<f64> {
        GridFunction::from_fn(1, m, move |x: &[f64]| (k * x[0]).cos()).unwrap()
    }

    #[test]
    fn weights_match_closed_forms() {
        assert_eq!(fejer_weight::<f64>(5, 10), 0.5);
        assert_eq!(fejer_weight::<f64>(-5, 5), 0.0);
        assert_eq!(vallee_poussin_weight::<f64>(3, 4), 1.0);
        assert_eq!(vallee_poussin_weight::<f64>(6, 4), 0.5);
        assert_eq!(vallee_poussin_weight::<f64>(8, 4), 0.0);
    }

    #[test]
    fn fejer_halves_mode_five_at_m_ten() {
        let f = mode(64, 5.0);
        let g = fejer(&f, 0, 10).unwrap();
        assert!(g.max_abs_diff(&f.scaled(0.5)).unwrap() < 1e-13);
        let z = fejer(&f, 0, 5).unwrap();
        assert!(c0_norm(&z) < 1e-13);
    }

    #[test]
    fn rejects_zero_degree_and_bad_axis() {
        let f = mode(16, 1.0);
        assert!(fejer(&f, 0, 0).is_err());
        assert!(vallee_poussin(&f, 1, 2).is_err());
    }

    #[test]
    fn tensor_needs_resolution() {
        let f = GridFunction::<f64>::zeros(2, 16).unwrap();
        assert!(vallee_poussin_tensor(&f, &ApproxParams::uniform(2, 4, 2)).is_ok());
        assert!(matches!(
            vallee_poussin_tensor(&f, &ApproxParams::uniform(2, 5, 2)),
            Err(Error::Aliasing { .. })
        ));
    }

    #[test]
    fn sin_eight_is_annihilated_at_m_four() {
        let f = GridFunction::<f64>::from_fn(1, 64, |x| (8.0 * x[0]).sin()).unwrap();
        let c = jackson_error(&f, &ApproxParams::uniform(1, 4, 3)).unwrap();
        assert!((c.error - 1.0).abs() < 1e-12);
        assert_eq!(c.degree, 7);
        assert_eq!(c.k, 3);
        assert!(c.pass.is_none());
    }

    #[test]
    fn calibration_of_exact_family_hits_floor() {
        let fam = vec![mode(64, 2.0), mode(64, 3.0)];
        let a = calibrate_constant(&fam, 2, &[4, 8]).unwrap();
        assert_eq!(a, CALIBRATION_FLOOR);
        assert!(matches!(calibrate_constant::<f64>(&[], 2, &[4]), Err(Error::EmptyFamily)));
    }

    #[test]
    fn minimal_degree_finds_smallest_reproducing_m() {
        // cos(5x) is reproduced exactly once m >= 5, and partially for 3 <= m < 5.
        let f = mode(64, 5.0);
        let s = minimal_degree(&f, 1e-9).unwrap();
        assert_eq!(s.m, 5);
        assert_eq!(s.degree, 9);
        let unreachable = minimal_degree(&mode(16, 7.0), 1e-9);
        assert!(matches!(unreachable, Err(Error::ToleranceUnreachable { .. })));
    }
}
