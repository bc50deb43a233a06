//! Independent oracles shared by the integration tests. Nothing here calls the
//! crate's spectral machinery.

#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twistmap::{Complex, GridFunction64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn node(m: usize, j: usize) -> f64 {
    -PI + TAU * j as f64 / m as f64
}

/// Coefficient of `e^{i xi x}` by direct summation over a 1-D grid.
pub fn direct_dft_1d(samples: &[f64], xi: i64) -> Complex<f64> {
    let m = samples.len();
    let mut acc = Complex::new(0.0, 0.0);
    for (j, &v) in samples.iter().enumerate() {
        let a = -(xi as f64) * node(m, j);
        acc += Complex::new(a.cos(), a.sin()) * v;
    }
    acc / m as f64
}

/// Coefficient of `e^{i xi . x}` by direct summation over a row-major 2-D grid.
pub fn direct_dft_2d(samples: &[f64], m: usize, xi: [i64; 2]) -> Complex<f64> {
    let mut acc = Complex::new(0.0, 0.0);
    for j0 in 0..m {
        for j1 in 0..m {
            let a = -(xi[0] as f64 * node(m, j0) + xi[1] as f64 * node(m, j1));
            acc += Complex::new(a.cos(), a.sin()) * samples[j0 * m + j1];
        }
    }
    acc / (m * m) as f64
}

/// `(sin(m t) / sin t)^2`, with its limit `m^2` at `t = 0`.
pub fn fejer_kernel(m: usize, t: f64) -> f64 {
    let s = t.sin();
    if s.abs() < 1e-12 {
        return (m * m) as f64;
    }
    let r = (m as f64 * t).sin() / s;
    r * r
}

/// Trapezoid rule over `[-pi/2, pi/2]`, one period of every integrand used here.
pub fn trapezoid_half_period<F: Fn(f64) -> f64>(f: F, nodes: usize) -> f64 {
    let h = PI / nodes as f64;
    (0..nodes).map(|i| f(-PI / 2.0 + i as f64 * h)).sum::<f64>() * h
}

/// `(1/(m pi)) int_{-pi/2}^{pi/2} (sin(m t)/sin t)^2 dt`.
pub fn fejer_mass(m: usize, nodes: usize) -> f64 {
    trapezoid_half_period(|t| fejer_kernel(m, t), nodes) / (m as f64 * PI)
}

/// `F_m f(x) = (1/(m pi)) int_{-pi/2}^{pi/2} f(x + 2t) (sin(m t)/sin t)^2 dt`.
pub fn fejer_quadrature<F: Fn(f64) -> f64>(f: F, x: f64, m: usize, nodes: usize) -> f64 {
    trapezoid_half_period(|t| f(x + 2.0 * t) * fejer_kernel(m, t), nodes) / (m as f64 * PI)
}

/// Largest `|f|` over `points` equispaced samples of `[-pi, pi)`.
pub fn dense_sup<F: Fn(f64) -> f64>(f: F, points: usize) -> f64 {
    (0..points).map(|j| f(node(points, j)).abs()).fold(0.0, f64::max)
}

/// Real trigonometric series `sum a_k cos(k x) + b_k sin(k x)`, `k = 0..=degree`.
#[derive(Clone, Debug)]
pub struct Series1d {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl Series1d {
    pub fn random(r: &mut ChaCha8Rng, degree: usize) -> Self {
        let mut a: Vec<f64> = (0..=degree).map(|_| r.gen_range(-1.0..1.0)).collect();
        let mut b: Vec<f64> = (0..=degree).map(|_| r.gen_range(-1.0..1.0)).collect();
        a[0] *= 0.5;
        b[0] = 0.0;
        if let Some(last) = a.last_mut() {
            *last *= 0.5;
        }
        if let Some(last) = b.last_mut() {
            *last *= 0.5;
        }
        Series1d { a, b }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.a.iter().zip(&self.b).enumerate().map(|(k, (a, b))| a * (k as f64 * x).cos() + b * (k as f64 * x).sin()).sum()
    }

    /// Multiplies the frequency-`k` terms by `w(k)`.
    pub fn weighted<W: Fn(usize) -> f64>(&self, w: W) -> Self {
        Series1d {
            a: self.a.iter().enumerate().map(|(k, a)| a * w(k)).collect(),
            b: self.b.iter().enumerate().map(|(k, b)| b * w(k)).collect(),
        }
    }

    pub fn grid(&self, m: usize) -> GridFunction64 {
        GridFunction64::new(1, m, (0..m).map(|j| self.eval(node(m, j))).collect()).unwrap()
    }
}

/// Random band-limited function on the 2-D grid: a sum of separable modes.
pub fn random_band_limited_2d(r: &mut ChaCha8Rng, m: usize, degree: usize, terms: usize) -> GridFunction64 {
    let modes: Vec<(f64, f64, f64, f64, f64)> = (0..terms)
        .map(|_| {
            (
                r.gen_range(-1.0..1.0),
                r.gen_range(0..=degree) as f64,
                r.gen_range(0..=degree) as f64,
                r.gen_range(0.0..TAU),
                r.gen_range(0.0..TAU),
            )
        })
        .collect();
    let values = (0..m * m)
        .map(|i| {
            let (x, y) = (node(m, i / m), node(m, i % m));
            modes.iter().map(|(c, k1, k2, p1, p2)| c * (k1 * x + p1).cos() * (k2 * y + p2).cos()).sum()
        })
        .collect();
    GridFunction64::new(2, m, values).unwrap()
}
