//! Periodic functions sampled on uniform tensor grids over `[-pi, pi)^d`.
//!
//! Sample `j` on each axis sits at `-pi + 2 pi j / M`; the endpoint `pi` is not
//! duplicated. Spectral transforms, derivatives and norm estimates live in the
//! submodules and are re-exported here.

mod io;
mod norms;
mod spectrum;

pub use io::{read_binary, write_binary, write_csv, BINARY_MAGIC};
pub use norms::{c0_norm, cr_norm, holder_norm, multi_indices, NormReport};
pub(crate) use spectrum::spectrum_to_poly;
pub use spectrum::{
    from_spectrum, laplacian, partial_derivative, spectral_derivative, to_spectrum, TrigPoly,
};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::{unravel, MAX_DIMS};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction<T: Real> {
    dims: usize,
    resolution: usize,
    values: Vec<T>,
}

pub(crate) fn check_shape(dims: usize, resolution: usize) -> Result<()> {
    if dims == 0 || dims > MAX_DIMS {
        return Err(Error::InvalidParameter {
            name: "dims",
            reason: format!("must be in 1..={MAX_DIMS}, got {dims}"),
        });
    }
    if resolution < 2 || !resolution.is_power_of_two() {
        return Err(Error::InvalidResolution { resolution, reason: "must be a power of two >= 2" });
    }
    Ok(())
}

impl<T: Real> GridFunction<T> {
    pub fn new(dims: usize, resolution: usize, values: Vec<T>) -> Result<Self> {
        check_shape(dims, resolution)?;
        let expected = resolution.pow(dims as u32);
        if values.len() != expected {
            return Err(Error::DimensionMismatch { expected, actual: values.len() });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(GridFunction { dims, resolution, values })
    }

    /// Samples `f` at every grid node. Evaluation runs in parallel.
    pub fn from_fn<F>(dims: usize, resolution: usize, f: F) -> Result<Self>
    where
        F: Fn(&[T]) -> T + Sync,
    {
        check_shape(dims, resolution)?;
        let len = resolution.pow(dims as u32);
        let values: Vec<T> = (0..len)
            .into_par_iter()
            .map(|flat| {
                let mut bins = [0usize; MAX_DIMS];
                let mut x = [T::zero(); MAX_DIMS];
                unravel(flat, dims, resolution, &mut bins[..dims]);
                for a in 0..dims {
                    x[a] = Self::node(resolution, bins[a]);
                }
                f(&x[..dims])
            })
            .collect();
        Self::new(dims, resolution, values)
    }

    pub fn zeros(dims: usize, resolution: usize) -> Result<Self> {
        Self::constant(dims, resolution, T::zero())
    }

    pub fn constant(dims: usize, resolution: usize, c: T) -> Result<Self> {
        check_shape(dims, resolution)?;
        Self::new(dims, resolution, vec![c; resolution.pow(dims as u32)])
    }

    pub(crate) fn from_parts_unchecked(dims: usize, resolution: usize, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), resolution.pow(dims as u32));
        GridFunction { dims, resolution, values }
    }

    /// Coordinate of node `j` on an axis with `resolution` samples.
    #[inline]
    pub fn node(resolution: usize, j: usize) -> T {
        -T::PI() + T::TAU() * T::of_usize(j) / T::of_usize(resolution)
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Coordinates of the node with row-major index `flat`.
    pub fn point(&self, flat: usize) -> Vec<T> {
        let mut bins = vec![0; self.dims];
        unravel(flat, self.dims, self.resolution, &mut bins);
        bins.into_iter().map(|j| Self::node(self.resolution, j)).collect()
    }

    /// Grid-average of the samples, equal to the zero Fourier coefficient.
    pub fn mean(&self) -> T {
        // sequential sum: independent of the rayon pool size
        self.values.iter().copied().sum::<T>() / T::of_usize(self.values.len())
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    /// Flat index of the largest sample (first occurrence).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = i;
            }
        }
        best
    }

    pub fn argmin(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v < self.values[best] {
                best = i;
            }
        }
        best
    }

    pub fn scaled(&self, a: T) -> Self {
        self.map(|v| a * v)
    }

    pub fn map<F: Fn(T) -> T>(&self, f: F) -> Self {
        GridFunction {
            dims: self.dims,
            resolution: self.resolution,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch { expected: self.dims, actual: other.dims });
        }
        if self.resolution != other.resolution {
            return Err(Error::DimensionMismatch { expected: self.resolution, actual: other.resolution });
        }
        Ok(())
    }

    /// `a * self + b * other` on a shared grid.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&x, &y)| a * x + b * y).collect();
        Ok(GridFunction { dims: self.dims, resolution: self.resolution, values })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(T::one(), other, -T::one())
    }

    /// Largest pointwise difference `max |self - other|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&x, &y)| (x - y).abs())
            .fold(T::zero(), T::max))
    }
}
