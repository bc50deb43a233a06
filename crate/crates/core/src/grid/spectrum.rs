use rustfft::num_complex::Complex;

use super::{check_shape, GridFunction};
use crate::error::{Error, Result};
use crate::fft::{signed_frequency, unravel, Spectrum, MAX_DIMS};
use crate::scalar::Real;

/// Real trigonometric polynomial stored as complex coefficients on the
/// lattice `{-D_1..D_1} x ... x {-D_d..D_d}` (row-major, axis 0 slowest).
///
/// The represented function is `sum_xi c(xi) exp(i xi . x)`. Real functions
/// have Hermitian coefficients, `c(-xi) = conj(c(xi))`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly<T: Real> {
    dims: usize,
    degrees: Vec<usize>,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> TrigPoly<T> {
    pub fn zeros(dims: usize, degrees: Vec<usize>) -> Result<Self> {
        if dims == 0 || dims > MAX_DIMS || degrees.len() != dims {
            return Err(Error::DimensionMismatch { expected: dims, actual: degrees.len() });
        }
        let len = degrees.iter().map(|&d| 2 * d + 1).product();
        Ok(TrigPoly { dims, degrees, coeffs: vec![Complex::new(T::zero(), T::zero()); len] })
    }

    /// Builds a polynomial from `(frequency, coefficient)` pairs; repeated
    /// frequencies accumulate. The lattice is the smallest one holding every term.
    pub fn from_terms(dims: usize, terms: &[(Vec<i64>, Complex<T>)]) -> Result<Self> {
        let mut degrees = vec![0usize; dims];
        for (xi, _) in terms {
            if xi.len() != dims {
                return Err(Error::DimensionMismatch { expected: dims, actual: xi.len() });
            }
            for (d, &x) in degrees.iter_mut().zip(xi) {
                *d = (*d).max(x.unsigned_abs() as usize);
            }
        }
        let mut p = Self::zeros(dims, degrees)?;
        for (xi, c) in terms {
            let idx = p.index_of(xi).expect("lattice sized to fit");
            p.coeffs[idx] = p.coeffs[idx] + *c;
        }
        Ok(p)
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    fn index_of(&self, xi: &[i64]) -> Option<usize> {
        if xi.len() != self.dims {
            return None;
        }
        let mut idx = 0usize;
        for (&x, &d) in xi.iter().zip(&self.degrees) {
            if x.unsigned_abs() as usize > d {
                return None;
            }
            idx = idx * (2 * d + 1) + (x + d as i64) as usize;
        }
        Some(idx)
    }

    fn frequency_at(&self, mut idx: usize, out: &mut [i64]) {
        for a in (0..self.dims).rev() {
            let w = 2 * self.degrees[a] + 1;
            out[a] = (idx % w) as i64 - self.degrees[a] as i64;
            idx /= w;
        }
    }

    /// Coefficient of `exp(i xi . x)`; zero outside the stored lattice.
    pub fn coeff(&self, xi: &[i64]) -> Complex<T> {
        self.index_of(xi)
            .map(|i| self.coeffs[i])
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn set_coeff(&mut self, xi: &[i64], c: Complex<T>) -> Result<()> {
        let idx = self.index_of(xi).ok_or_else(|| Error::InvalidParameter {
            name: "xi",
            reason: format!("{xi:?} outside lattice of degrees {:?}", self.degrees),
        })?;
        self.coeffs[idx] = c;
        Ok(())
    }

    /// Iterates over `(frequency, coefficient)` pairs in lattice order.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<i64>, Complex<T>)> + '_ {
        self.coeffs.iter().enumerate().map(move |(i, &c)| {
            let mut xi = vec![0i64; self.dims];
            self.frequency_at(i, &mut xi);
            (xi, c)
        })
    }

    /// Mean over the torus, i.e. the real part of the zero coefficient.
    pub fn mean(&self) -> T {
        self.coeff(&vec![0; self.dims]).re
    }

    /// Largest `|c(-xi) - conj(c(xi))|` over the lattice.
    pub fn hermitian_defect(&self) -> T {
        let mut worst = T::zero();
        let mut xi = vec![0i64; self.dims];
        for i in 0..self.coeffs.len() {
            self.frequency_at(i, &mut xi);
            let neg: Vec<i64> = xi.iter().map(|x| -x).collect();
            worst = worst.max((self.coeff(&neg) - self.coeffs[i].conj()).norm());
        }
        worst
    }

    /// Sum of squared coefficient magnitudes (the mean square of the function).
    pub fn energy(&self) -> T {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn scaled(&self, a: T) -> Self {
        TrigPoly {
            dims: self.dims,
            degrees: self.degrees.clone(),
            coeffs: self.coeffs.iter().map(|&c| c * a).collect(),
        }
    }

    /// Multiplies each coefficient by `symbol(xi)`.
    pub fn map_symbol<F: Fn(&[i64]) -> Complex<T>>(&self, symbol: F) -> Self {
        let mut out = self.clone();
        let mut xi = vec![0i64; self.dims];
        for i in 0..out.coeffs.len() {
            self.frequency_at(i, &mut xi);
            out.coeffs[i] = out.coeffs[i] * symbol(&xi);
        }
        out
    }

    /// Mixed partial derivative `d^beta` computed exactly on the coefficients.
    pub fn derivative(&self, beta: &[usize]) -> Result<Self> {
        if beta.len() != self.dims {
            return Err(Error::DimensionMismatch { expected: self.dims, actual: beta.len() });
        }
        Ok(self.map_symbol(|xi| derivative_symbol(xi, beta)))
    }

    /// Largest coefficient difference over the union of both lattices.
    pub fn max_coeff_diff(&self, other: &Self) -> Result<T> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch { expected: self.dims, actual: other.dims });
        }
        let mut worst = T::zero();
        for (xi, c) in self.terms() {
            worst = worst.max((c - other.coeff(&xi)).norm());
        }
        for (xi, c) in other.terms() {
            if self.index_of(&xi).is_none() {
                worst = worst.max(c.norm());
            }
        }
        Ok(worst)
    }

    /// Evaluates the real part of the polynomial at an arbitrary point.
    ///
    /// Contracts one axis at a time against precomputed phase vectors, so the
    /// cost is linear in the number of stored coefficients.
    pub fn eval(&self, x: &[T]) -> T {
        assert_eq!(x.len(), self.dims, "point dimension");
        let mut current = self.coeffs.clone();
        for a in (0..self.dims).rev() {
            let d = self.degrees[a] as i64;
            let w = (2 * d + 1) as usize;
            let phases: Vec<Complex<T>> = (-d..=d)
                .map(|k| {
                    let ang = T::of_i64(k) * x[a];
                    Complex::new(ang.cos(), ang.sin())
                })
                .collect();
            current = current
                .chunks(w)
                .map(|row| row.iter().zip(&phases).fold(Complex::new(T::zero(), T::zero()), |acc, (c, p)| acc + c * p))
                .collect();
        }
        current[0].re
    }
}

/// `(i xi)^beta`.
pub(crate) fn derivative_symbol<T: Real>(xi: &[i64], beta: &[usize]) -> Complex<T> {
    let mut s = Complex::new(T::one(), T::zero());
    for (&x, &b) in xi.iter().zip(beta) {
        if b > 0 {
            let ik = Complex::new(T::zero(), T::of_i64(x));
            s = s * ik.powu(b as u32);
        }
    }
    s
}

fn phase_sign(xi: &[i64]) -> i64 {
    // exp(-i xi pi) over all axes
    if xi.iter().map(|x| x.rem_euclid(2)).sum::<i64>() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Discrete Fourier coefficients of the samples.
///
/// The result has degree `M/2` on every axis. The Nyquist coefficient of each
/// axis is split evenly between `+M/2` and `-M/2`, which keeps the spectrum
/// Hermitian and makes [`from_spectrum`] at the same resolution an exact inverse.
pub fn to_spectrum<T: Real>(f: &GridFunction<T>) -> Result<TrigPoly<T>> {
    let (dims, m) = (f.dims(), f.resolution());
    if m < 4 {
        return Err(Error::InvalidResolution { resolution: m, reason: "spectral analysis needs at least 4 samples per axis" });
    }
    let spec = Spectrum::forward(f);
    let half = m / 2;
    let mut p = TrigPoly::zeros(dims, vec![half; dims])?;
    let mut bins = [0usize; MAX_DIMS];
    let mut xi = [0i64; MAX_DIMS];
    for (flat, &b) in spec.data.iter().enumerate() {
        unravel(flat, dims, m, &mut bins[..dims]);
        let mut nyq = Vec::new();
        for a in 0..dims {
            xi[a] = signed_frequency(bins[a], m);
            if bins[a] == half {
                nyq.push(a);
            }
        }
        let share = b / T::of_usize(1 << nyq.len());
        for mask in 0..(1usize << nyq.len()) {
            for (bit, &a) in nyq.iter().enumerate() {
                xi[a] = if mask & (1 << bit) != 0 { half as i64 } else { -(half as i64) };
            }
            let c = share * T::of_i64(phase_sign(&xi[..dims]));
            let idx = p.index_of(&xi[..dims]).expect("degree M/2 lattice");
            p.coeffs[idx] = c;
        }
    }
    Ok(p)
}

/// Samples a trigonometric polynomial on the grid of the given resolution.
///
/// Requires `M >= 2 D_j` on every axis. At `M = 2 D_j` the pair `+-D_j`
/// collapses onto the Nyquist bin, which is exact for the split convention of
/// [`to_spectrum`]; anything coarser would alias distinct frequencies.
pub fn from_spectrum<T: Real>(p: &TrigPoly<T>, resolution: usize) -> Result<GridFunction<T>> {
    check_shape(p.dims(), resolution)?;
    for (axis, &degree) in p.degrees().iter().enumerate() {
        if resolution < 2 * degree {
            return Err(Error::Aliasing { axis, degree, resolution });
        }
    }
    let dims = p.dims();
    let m = resolution as i64;
    let mut spec = Spectrum::zeros(dims, resolution);
    for (xi, c) in p.terms() {
        let mut flat = 0usize;
        for &x in &xi {
            flat = flat * resolution + x.rem_euclid(m) as usize;
        }
        spec.data[flat] = spec.data[flat] + c * T::of_i64(phase_sign(&xi));
    }
    Ok(spec.to_grid())
}

/// Spectral mixed partial `d^beta f`, multiplying the spectrum by `(i xi)^beta`.
///
/// Accurate only for functions that are resolved by the grid; nothing is
/// filtered. Odd derivatives annihilate the Nyquist mode.
pub fn partial_derivative<T: Real>(f: &GridFunction<T>, beta: &[usize]) -> Result<GridFunction<T>> {
    if beta.len() != f.dims() {
        return Err(Error::DimensionMismatch { expected: f.dims(), actual: beta.len() });
    }
    if beta.iter().all(|&b| b == 0) {
        return Ok(f.clone());
    }
    let spec = Spectrum::forward(f);
    Ok(spec.mapped(|xi| derivative_symbol(xi, beta)).to_grid())
}

/// `d^order f / dx_axis^order`.
pub fn spectral_derivative<T: Real>(f: &GridFunction<T>, axis: usize, order: usize) -> Result<GridFunction<T>> {
    if axis >= f.dims() {
        return Err(Error::InvalidParameter { name: "axis", reason: format!("{axis} >= dims {}", f.dims()) });
    }
    let mut beta = vec![0; f.dims()];
    beta[axis] = order;
    partial_derivative(f, &beta)
}

/// Spectral Laplacian.
pub fn laplacian<T: Real>(f: &GridFunction<T>) -> GridFunction<T> {
    let spec = Spectrum::forward(f);
    spec.mapped(|xi| {
        let k2: i64 = xi.iter().map(|x| x * x).sum();
        Complex::new(-T::of_i64(k2), T::zero())
    })
    .to_grid()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_has_only_the_mean_coefficient() {
        let f = GridFunction::constant(2, 8, 3.0f64).unwrap();
        let p = to_spectrum(&f).unwrap();
        for (xi, c) in p.terms() {
            let expect = if xi.iter().all(|&x| x == 0) { 3.0 } else { 0.0 };
            assert!((c.re - expect).abs() < 1e-14 && c.im.abs() < 1e-14, "{xi:?} {c}");
        }
    }

    #[test]
    fn cosine_has_half_coefficients() {
        let f = GridFunction::<f64>::from_fn(2, 8, |x| x[0].cos()).unwrap();
        let p = to_spectrum(&f).unwrap();
        for (xi, c) in p.terms() {
            let expect = if xi == vec![1, 0] || xi == vec![-1, 0] { 0.5 } else { 0.0 };
            assert!((c - Complex::new(expect, 0.0)).norm() < 1e-14, "{xi:?} {c}");
        }
    }

    #[test]
    fn from_spectrum_rejects_aliasing() {
        let p = TrigPoly::<f64>::zeros(1, vec![5]).unwrap();
        assert!(matches!(from_spectrum(&p, 8), Err(Error::Aliasing { degree: 5, resolution: 8, .. })));
        assert!(from_spectrum(&p, 16).is_ok());
    }

    #[test]
    fn eval_matches_closed_form() {
        let p = TrigPoly::from_terms(
            2,
            &[
                (vec![1, 0], Complex::new(0.5, 0.0)),
                (vec![-1, 0], Complex::new(0.5, 0.0)),
                (vec![0, 2], Complex::new(0.0, -0.5)),
                (vec![0, -2], Complex::new(0.0, 0.5)),
            ],
        )
        .unwrap();
        for &(a, b) in &[(0.3, -1.2), (PI, 2.0), (-2.5, 0.1)] {
            let expect = f64::cos(a) + f64::sin(2.0 * b);
            assert!((p.eval(&[a, b]) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn nyquist_mode_survives_round_trip_and_odd_derivative_kills_it() {
        let f = GridFunction::<f64>::from_fn(1, 8, |x| (4.0 * x[0]).cos()).unwrap();
        let p = to_spectrum(&f).unwrap();
        assert!((p.coeff(&[4]).re - 0.5).abs() < 1e-14);
        let g = from_spectrum(&p, 8).unwrap();
        assert!(g.max_abs_diff(&f).unwrap() < 1e-14);
        let d = spectral_derivative(&f, 0, 1).unwrap();
        assert!(d.values().iter().all(|v| v.abs() < 1e-12));
        let d2 = spectral_derivative(&f, 0, 2).unwrap();
        assert!(d2.max_abs_diff(&f.scaled(-16.0)).unwrap() < 1e-12);
    }

    #[test]
    fn laplacian_of_mixed_mode() {
        let f = GridFunction::<f64>::from_fn(2, 16, |x| (2.0 * x[0]).sin() * (3.0 * x[1]).cos()).unwrap();
        let l = laplacian(&f);
        assert!(l.max_abs_diff(&f.scaled(-13.0)).unwrap() < 1e-11);
    }
}

/// Exports the low-frequency part of a raw spectrum as a polynomial with the
/// given per-axis degrees. Every degree must stay below the Nyquist frequency.
pub(crate) fn spectrum_to_poly<T: Real>(spec: &Spectrum<T>, degrees: &[usize]) -> Result<TrigPoly<T>> {
    let m = spec.resolution;
    for (axis, &degree) in degrees.iter().enumerate() {
        if 2 * degree >= m {
            return Err(Error::Aliasing { axis, degree, resolution: m });
        }
    }
    let mut p = TrigPoly::zeros(spec.dims, degrees.to_vec())?;
    let mut xi = vec![0i64; spec.dims];
    for i in 0..p.coeffs.len() {
        p.frequency_at(i, &mut xi);
        let mut flat = 0usize;
        for &x in &xi {
            flat = flat * m + x.rem_euclid(m as i64) as usize;
        }
        p.coeffs[i] = spec.data[flat] * T::of_i64(phase_sign(&xi));
    }
    Ok(p)
}
