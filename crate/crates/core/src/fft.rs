//! Multi-dimensional FFT on row-major tensor grids and the raw spectrum
//! representation used internally by the spectral operators.

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::sync::Arc;

use crate::grid::GridFunction;
use crate::scalar::Real;

fn transform_axis<T: Real>(
    data: &mut [Complex<T>],
    dims: usize,
    m: usize,
    axis: usize,
    fft: &Arc<dyn Fft<T>>,
) {
    let inner = m.pow((dims - 1 - axis) as u32);
    if inner == 1 {
        data.par_chunks_mut(m).for_each(|line| fft.process(line));
        return;
    }
    let mut lines = vec![Complex::new(T::zero(), T::zero()); data.len()];
    {
        let src: &[Complex<T>] = data;
        lines.par_chunks_mut(m).enumerate().for_each(|(l, line)| {
            let outer = l / inner;
            let i = l % inner;
            let base = outer * m * inner + i;
            for (t, v) in line.iter_mut().enumerate() {
                *v = src[base + t * inner];
            }
            fft.process(line);
        });
    }
    data.par_chunks_mut(m * inner)
        .enumerate()
        .for_each(|(outer, block)| {
            for i in 0..inner {
                let line = &lines[(outer * inner + i) * m..(outer * inner + i + 1) * m];
                for (t, v) in line.iter().enumerate() {
                    block[t * inner + i] = *v;
                }
            }
        });
}

/// Unnormalized d-dimensional DFT over a row-major `m^dims` tensor.
pub(crate) fn fft_nd<T: Real>(data: &mut [Complex<T>], dims: usize, m: usize, direction: FftDirection) {
    debug_assert_eq!(data.len(), m.pow(dims as u32));
    let fft = FftPlanner::new().plan_fft(m, direction);
    for axis in 0..dims {
        transform_axis(data, dims, m, axis, &fft);
    }
}

/// Signed frequency of FFT bin `k`; the Nyquist bin maps to `-m/2`.
#[inline]
pub(crate) fn signed_frequency(k: usize, m: usize) -> i64 {
    if k < m / 2 {
        k as i64
    } else {
        k as i64 - m as i64
    }
}

/// Unravels a row-major flat index into per-axis bins.
#[inline]
pub(crate) fn unravel(mut flat: usize, dims: usize, m: usize, out: &mut [usize]) {
    for a in (0..dims).rev() {
        out[a] = flat % m;
        flat /= m;
    }
}

/// DFT coefficients of a grid function in FFT bin order, normalized by `1/m^d`.
///
/// Bin `k` carries the frequency `signed_frequency(k)`. The phase induced by the
/// grid starting at `-pi` is not applied here; it only matters when coefficients
/// are exported as a [`crate::grid::TrigPoly`].
#[derive(Clone, Debug)]
pub(crate) struct Spectrum<T: Real> {
    pub dims: usize,
    pub resolution: usize,
    pub data: Vec<Complex<T>>,
}

impl<T: Real> Spectrum<T> {
    pub fn forward(f: &GridFunction<T>) -> Self {
        let (dims, m) = (f.dims(), f.resolution());
        let mut data: Vec<Complex<T>> = f.values().iter().map(|&v| Complex::new(v, T::zero())).collect();
        fft_nd(&mut data, dims, m, FftDirection::Forward);
        let scale = T::one() / T::of_usize(data.len());
        data.iter_mut().for_each(|c| *c = *c * scale);
        Spectrum { dims, resolution: m, data }
    }

    pub fn zeros(dims: usize, resolution: usize) -> Self {
        Spectrum {
            dims,
            resolution,
            data: vec![Complex::new(T::zero(), T::zero()); resolution.pow(dims as u32)],
        }
    }

    /// Real part of the inverse transform, as grid samples.
    pub fn to_grid(&self) -> GridFunction<T> {
        let mut data = self.data.clone();
        fft_nd(&mut data, self.dims, self.resolution, FftDirection::Inverse);
        let values = data.into_iter().map(|c| c.re).collect();
        GridFunction::from_parts_unchecked(self.dims, self.resolution, values)
    }

    /// Multiplies each coefficient by `symbol(xi)`.
    ///
    /// Bins on a Nyquist axis stand for the split pair `+-m/2`; the symbol is
    /// averaged over both signs so real symbols of Hermitian type keep the
    /// output real.
    pub fn apply<F>(&mut self, symbol: F)
    where
        F: Fn(&[i64]) -> Complex<T> + Sync,
    {
        let (dims, m) = (self.dims, self.resolution);
        self.data.par_iter_mut().enumerate().for_each(|(flat, c)| {
            *c = *c * evaluate_symbol(&symbol, flat, dims, m);
        });
    }

    pub fn mapped<F>(&self, symbol: F) -> Self
    where
        F: Fn(&[i64]) -> Complex<T> + Sync,
    {
        let mut out = self.clone();
        out.apply(symbol);
        out
    }
}

fn evaluate_symbol<T: Real, F>(symbol: &F, flat: usize, dims: usize, m: usize) -> Complex<T>
where
    F: Fn(&[i64]) -> Complex<T>,
{
    let mut bins = [0usize; 8];
    let mut xi = [0i64; 8];
    let bins = &mut bins[..dims];
    let xi = &mut xi[..dims];
    unravel(flat, dims, m, bins);
    let mut nyquist_axes = [0usize; 8];
    let mut q = 0;
    for a in 0..dims {
        xi[a] = signed_frequency(bins[a], m);
        if bins[a] == m / 2 {
            nyquist_axes[q] = a;
            q += 1;
        }
    }
    if q == 0 {
        return symbol(xi);
    }
    let mut acc = Complex::new(T::zero(), T::zero());
    for mask in 0..(1usize << q) {
        for (bit, &a) in nyquist_axes[..q].iter().enumerate() {
            let half = (m / 2) as i64;
            xi[a] = if mask & (1 << bit) != 0 { half } else { -half };
        }
        acc = acc + symbol(xi);
    }
    acc / T::of_usize(1 << q)
}

/// Maximum supported number of dimensions for the fixed-size scratch arrays.
pub(crate) const MAX_DIMS: usize = 8;
