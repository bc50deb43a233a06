use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::scalar::Real;

/// Compactly supported profile `exp(c (1 - 1/(1 - t^2)))` on `|t| < 1`, zero
/// outside. Equal to 1 at the origin; larger `c` concentrates the mass near
/// the center, which keeps high derivatives resolvable on moderate grids.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BumpProfile {
    pub concentration: f64,
}

impl Default for BumpProfile {
    fn default() -> Self {
        BumpProfile { concentration: Self::DEFAULT_CONCENTRATION }
    }
}

const QUADRATURE_INTERVALS: usize = 200_000;

impl BumpProfile {
    pub const DEFAULT_CONCENTRATION: f64 = 32.0;

    pub fn new(concentration: f64) -> Result<Self> {
        if !(concentration > 0.0 && concentration.is_finite()) {
            return Err(Error::InvalidParameter { name: "profile_sharpness", reason: format!("{concentration} is not positive") });
        }
        Ok(BumpProfile { concentration })
    }

    pub fn eval<T: Real>(&self, t: T) -> T {
        let s = T::one() - t * t;
        if s <= T::zero() {
            return T::zero();
        }
        (T::lit(self.concentration) * (T::one() - s.recip())).exp()
    }

    /// `int_0^1 phi(t) t^{d-1} dt` by composite Simpson.
    pub fn radial_moment(&self, d: usize) -> f64 {
        let n = QUADRATURE_INTERVALS;
        let h = 1.0 / n as f64;
        let g = |t: f64| self.eval(t) * t.powi(d as i32 - 1);
        let mut acc = g(0.0) + g(1.0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * g(i as f64 * h);
        }
        acc * h / 3.0
    }

    /// `int_{-1}^{1} phi(t) dt`.
    pub fn line_integral(&self) -> f64 {
        2.0 * self.radial_moment(1)
    }
}

/// Surface area of the unit sphere in `R^d`.
fn sphere_area(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => std::f64::consts::TAU,
        _ => std::f64::consts::TAU / (d as f64 - 2.0) * sphere_area(d - 2),
    }
}

/// Two-lobe zero-mean field: a positive box-product lobe on `[0, pi]^d` and a
/// negative radial lobe on the ball `B_R(x0)`, `x0 = (-pi/2, ..., -pi/2)`.
#[derive(Clone, Debug, Serialize)]
pub struct BumpSpec<T: Real> {
    pub dims: usize,
    pub n: usize,
    pub plus_amplitude: T,
    pub minus_amplitude: T,
    pub minus_radius: T,
    pub minus_center: Vec<T>,
    pub profile_sharpness: T,
}

impl<T: Real> BumpSpec<T> {
    /// Plus amplitude `1/(9n)`, minus amplitude `1/sqrt(n)`.
    pub fn herman(d: usize, n: usize) -> Result<Self> {
        check_family(d, n, 1)?;
        let nf = n as f64;
        Self::balanced(d, n, 1.0 / (9.0 * nf), 1.0 / nf.sqrt(), BumpProfile::default())
    }

    /// Plus amplitude 1, minus amplitude `n`.
    pub fn analytic(d: usize, n: usize) -> Result<Self> {
        check_family(d, n, 2)?;
        Self::balanced(d, n, 1.0, n as f64, BumpProfile::default())
    }

    /// Same amplitudes with another profile; the radius is rebalanced.
    pub fn with_profile(&self, profile: BumpProfile) -> Result<Self> {
        Self::balanced(
            self.dims,
            self.n,
            self.plus_amplitude.to_f64_lossy(),
            self.minus_amplitude.to_f64_lossy(),
            profile,
        )
    }

    pub fn profile(&self) -> BumpProfile {
        BumpProfile { concentration: self.profile_sharpness.to_f64_lossy() }
    }

    /// Radius for which the two lobes have equal continuous mass.
    fn balanced(d: usize, n: usize, plus: f64, minus: f64, profile: BumpProfile) -> Result<Self> {
        let half_pi = std::f64::consts::FRAC_PI_2;
        let plus_mass = plus * (half_pi * profile.line_integral()).powi(d as i32);
        let unit_ball_mass = sphere_area(d) * profile.radial_moment(d);
        let radius = (plus_mass / (minus * unit_ball_mass)).powf(1.0 / d as f64);
        if !(radius < half_pi) {
            return Err(Error::Infeasible(format!(
                "minus lobe radius {radius:.4} does not fit inside [-pi, 0]^{d} (d={d}, n={n})"
            )));
        }
        Ok(BumpSpec {
            dims: d,
            n,
            plus_amplitude: T::lit(plus),
            minus_amplitude: T::lit(minus),
            minus_radius: T::lit(radius),
            minus_center: vec![-T::FRAC_PI_2(); d],
            profile_sharpness: T::lit(profile.concentration),
        })
    }

    fn plus_shape(&self, profile: &BumpProfile, x: &[T]) -> T {
        let h = T::FRAC_PI_2();
        x.iter().fold(T::one(), |acc, &xj| acc * profile.eval((xj - h) / h))
    }

    fn minus_shape(&self, profile: &BumpProfile, x: &[T]) -> T {
        let r2 = x.iter().zip(&self.minus_center).map(|(&a, &c)| (a - c) * (a - c)).sum::<T>();
        profile.eval(r2.sqrt() / self.minus_radius)
    }

    /// Samples the field. The minus amplitude is rescaled so the grid mean is
    /// zero; the rescaled amplitude must stay within 1% of the target.
    pub fn realize(&self, resolution: usize) -> Result<Bump<T>> {
        if resolution % 4 != 0 {
            return Err(Error::InvalidResolution { resolution, reason: "lobe centers need M divisible by 4" });
        }
        let profile = self.profile();
        let plus = GridFunction::from_fn(self.dims, resolution, |x| self.plus_shape(&profile, x))?;
        let minus = GridFunction::from_fn(self.dims, resolution, |x| self.minus_shape(&profile, x))?;
        let plus_sum: T = plus.values().iter().copied().sum();
        let minus_sum: T = minus.values().iter().copied().sum();
        if minus_sum <= T::zero() {
            return Err(Error::Infeasible(format!("minus lobe not resolved at M={resolution}")));
        }
        let amplitude = self.plus_amplitude * plus_sum / minus_sum;
        let drift = (amplitude / self.minus_amplitude - T::one()).abs();
        if drift > T::lit(0.01) {
            return Err(Error::Infeasible(format!(
                "balanced minus amplitude {amplitude:e} is {:.2}% off target {:e} at M={resolution}",
                drift.to_f64_lossy() * 100.0,
                self.minus_amplitude
            )));
        }
        let field = plus.combine(self.plus_amplitude, &minus, -amplitude)?;
        let mut spec = self.clone();
        spec.minus_amplitude = amplitude;
        Ok(Bump { spec, target_minus_amplitude: self.minus_amplitude, field })
    }

    /// Whether `x` lies in the closed support of either lobe.
    pub fn in_support(&self, x: &[T]) -> bool {
        let pi = T::PI();
        let in_box = x.iter().all(|&xj| xj >= T::zero() && xj <= pi);
        let r2 = x.iter().zip(&self.minus_center).map(|(&a, &c)| (a - c) * (a - c)).sum::<T>();
        in_box || r2 <= self.minus_radius * self.minus_radius
    }
}

fn check_family(d: usize, n: usize, min_d: usize) -> Result<()> {
    if d < min_d || d > crate::fft::MAX_DIMS {
        return Err(Error::InvalidParameter { name: "d", reason: format!("{d} outside {min_d}..={}", crate::fft::MAX_DIMS) });
    }
    if n < 2 {
        return Err(Error::InvalidParameter { name: "n", reason: format!("{n} < 2") });
    }
    Ok(())
}

/// A realized bump with its balanced parameters.
#[derive(Clone, Debug)]
pub struct Bump<T: Real> {
    /// Parameters after balancing; `minus_amplitude` is the realized value.
    pub spec: BumpSpec<T>,
    pub target_minus_amplitude: T,
    pub field: GridFunction<T>,
}

/// Herman's `C^infty` bump `T_n` with amplitudes `1/(9n)` and `1/sqrt(n)`.
pub fn herman_bump<T: Real>(d: usize, n: usize, resolution: usize) -> Result<GridFunction<T>> {
    Ok(BumpSpec::herman(d, n)?.realize(resolution)?.field)
}

/// The bump `T~_n` with amplitudes 1 and `n`.
pub fn analytic_bump<T: Real>(d: usize, n: usize, resolution: usize) -> Result<GridFunction<T>> {
    Ok(BumpSpec::analytic(d, n)?.realize(resolution)?.field)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_is_one_at_center_and_vanishes_outside() {
        let p = BumpProfile::default();
        assert_eq!(p.eval(0.0f64), 1.0);
        assert_eq!(p.eval(1.0f64), 0.0);
        assert_eq!(p.eval(-1.5f64), 0.0);
        assert!(p.eval(0.99f64) < 1e-100);
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(3) - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!((sphere_area(4) - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn analytic_radius_shrinks_like_inverse_sqrt() {
        let r8 = BumpSpec::<f64>::analytic(2, 8).unwrap().minus_radius;
        let r32 = BumpSpec::<f64>::analytic(2, 32).unwrap().minus_radius;
        assert!((r8 / r32 - 2.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_small_n_and_low_dimension() {
        assert!(BumpSpec::<f64>::analytic(1, 8).is_err());
        assert!(BumpSpec::<f64>::herman(2, 1).is_err());
    }

    #[test]
    fn coarse_grid_is_infeasible() {
        let spec = BumpSpec::<f64>::analytic(2, 64).unwrap();
        assert!(matches!(spec.realize(16), Err(Error::Infeasible(_))));
    }
}
