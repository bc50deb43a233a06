//! Exact symplectic twist maps `(x, y) -> (x + y, y + grad Psi(x + y))`
//! generated by `h(x, x') = |x - x'|^2 / 2 + Psi(x')`, and the graph
//! transform used to search for invariant graphs.

mod graph;

use std::io::Write;

use nalgebra::DMatrix;
use rustfft::num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{from_spectrum, to_spectrum, GridFunction, TrigPoly};
use crate::scalar::{wrap_angle, Real};

pub use graph::{
    gg_residual, gg_residual_at, graph_residual, graph_transform, lipschitz_bound, GraphCandidate, GraphOptions,
    GraphOutcome, GraphReport, Termination,
};

#[derive(Clone, Debug)]
pub struct GeneratingMap<T: Real> {
    potential: TrigPoly<T>,
    gradient: Vec<TrigPoly<T>>,
    hessian: Vec<TrigPoly<T>>,
}

fn unit(dims: usize, a: usize) -> Vec<usize> {
    let mut e = vec![0; dims];
    e[a] = 1;
    e
}

impl<T: Real> GeneratingMap<T> {
    /// Builds the map from the coefficients of `Psi`. The constant term does
    /// not affect the map and is dropped.
    pub fn from_potential(mut potential: TrigPoly<T>) -> Result<Self> {
        let d = potential.dims();
        let scale = potential.coeffs().iter().map(|c| c.norm()).fold(T::one(), T::max);
        if potential.hermitian_defect() > T::epsilon() * T::lit(64.0) * scale {
            return Err(Error::InvalidParameter { name: "potential", reason: "coefficients are not Hermitian".into() });
        }
        potential.set_coeff(&vec![0; d], Complex::new(T::zero(), T::zero()))?;
        let gradient = (0..d).map(|a| potential.derivative(&unit(d, a))).collect::<Result<Vec<_>>>()?;
        let mut hessian = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut beta = unit(d, i);
                beta[j] += 1;
                hessian.push(potential.derivative(&beta)?);
            }
        }
        Ok(GeneratingMap { potential, gradient, hessian })
    }

    /// Uses the trigonometric interpolant of the samples as `Psi`.
    pub fn from_grid(psi: &GridFunction<T>) -> Result<Self> {
        Self::from_potential(to_spectrum(psi)?)
    }

    /// The shear `(x, y) -> (x + y, y)`.
    pub fn integrable(dims: usize) -> Result<Self> {
        Self::from_potential(TrigPoly::zeros(dims, vec![0; dims])?)
    }

    pub fn dims(&self) -> usize {
        self.potential.dims()
    }

    pub fn potential(&self) -> &TrigPoly<T> {
        &self.potential
    }

    pub fn gradient_at(&self, x: &[T]) -> Vec<T> {
        self.gradient.iter().map(|p| p.eval(x)).collect()
    }

    /// Row-major Hessian of `Psi` at `x`.
    pub fn hessian_at(&self, x: &[T]) -> Vec<T> {
        self.hessian.iter().map(|p| p.eval(x)).collect()
    }

    /// `(1/d) Laplacian(Psi)` sampled on a grid.
    pub fn trace_field(&self, resolution: usize) -> Result<GridFunction<T>> {
        let d = self.dims();
        let mut trace = TrigPoly::zeros(d, self.potential.degrees().to_vec())?;
        for a in 0..d {
            for (xi, c) in self.hessian[a * d + a].terms() {
                let cur = trace.coeff(&xi);
                trace.set_coeff(&xi, cur + c / T::of_usize(d))?;
            }
        }
        if resolution >= 2 * trace.max_degree() {
            from_spectrum(&trace, resolution)
        } else {
            GridFunction::from_fn(d, resolution, |x| trace.eval(x))
        }
    }

    fn check_state(&self, x: &[T], y: &[T]) -> Result<()> {
        let d = self.dims();
        if x.len() != d || y.len() != d {
            return Err(Error::DimensionMismatch { expected: d, actual: x.len().min(y.len()) });
        }
        if x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite state".into()));
        }
        Ok(())
    }

    /// One iteration without reducing `x'`.
    pub fn step_lifted(&self, x: &[T], y: &[T]) -> Result<(Vec<T>, Vec<T>)> {
        self.check_state(x, y)?;
        let xp: Vec<T> = x.iter().zip(y).map(|(&a, &b)| a + b).collect();
        let g = self.gradient_at(&xp);
        let yp = y.iter().zip(&g).map(|(&b, &s)| b + s).collect();
        Ok((xp, yp))
    }

    /// One iteration with `x'` reduced to `[-pi, pi)`.
    pub fn step(&self, x: &[T], y: &[T]) -> Result<(Vec<T>, Vec<T>)> {
        let (xp, yp) = self.step_lifted(x, y)?;
        Ok((xp.into_iter().map(wrap_angle).collect(), yp))
    }

    /// Row-major `2d x 2d` Jacobian `[[I, I], [H, I + H]]` with `H` the Hessian at `x + y`.
    pub fn jacobian(&self, x: &[T], y: &[T]) -> Result<Vec<T>> {
        self.check_state(x, y)?;
        let d = self.dims();
        let xp: Vec<T> = x.iter().zip(y).map(|(&a, &b)| a + b).collect();
        let h = self.hessian_at(&xp);
        let n = 2 * d;
        let mut j = vec![T::zero(); n * n];
        for r in 0..d {
            j[r * n + r] = T::one();
            j[r * n + d + r] = T::one();
            j[(d + r) * n + d + r] = T::one();
            for c in 0..d {
                j[(d + r) * n + c] = h[r * d + c];
                j[(d + r) * n + d + c] += h[r * d + c];
            }
        }
        Ok(j)
    }

    pub fn jacobian_determinant(&self, x: &[T], y: &[T]) -> Result<T> {
        let j = self.jacobian(x, y)?;
        let n = 2 * self.dims();
        let m = DMatrix::from_row_iterator(n, n, j.iter().map(|v| v.to_f64_lossy()));
        Ok(T::lit(m.lu().determinant()))
    }

    /// `dx'/dy`, the identity for this family.
    pub fn twist_block(&self) -> Vec<T> {
        let d = self.dims();
        (0..d * d).map(|i| if i / d == i % d { T::one() } else { T::zero() }).collect()
    }

    /// `h(x, x') = |x - x'|^2 / 2 + Psi(x')` on lifted coordinates.
    pub fn generating_function(&self, x: &[T], xp: &[T]) -> T {
        let q: T = x.iter().zip(xp).map(|(&a, &b)| (b - a) * (b - a)).sum();
        q / T::lit(2.0) + self.potential.eval(xp)
    }

    /// Momenta `(y, y') = (-d_1 h, d_2 h)` of the lifted pair `(x, x')`.
    pub fn momenta(&self, x: &[T], xp: &[T]) -> (Vec<T>, Vec<T>) {
        let y: Vec<T> = x.iter().zip(xp).map(|(&a, &b)| b - a).collect();
        let g = self.gradient_at(xp);
        let yp = y.iter().zip(&g).map(|(&a, &b)| a + b).collect();
        (y, yp)
    }

    /// Largest mismatch between a lifted step and the momenta recovered from `h`.
    pub fn exactness_defect(&self, x: &[T], y: &[T]) -> Result<T> {
        let (xp, yp) = self.step_lifted(x, y)?;
        let (y0, y1) = self.momenta(x, &xp);
        Ok(y.iter().zip(&y0).chain(yp.iter().zip(&y1)).map(|(&a, &b)| (a - b).abs()).fold(T::zero(), T::max))
    }

    /// `steps + 1` states starting from `(x, y)`, with `x` wrapped.
    pub fn orbit(&self, x: &[T], y: &[T], steps: usize) -> Result<Orbit<T>> {
        let mut states = Vec::with_capacity(steps + 1);
        let mut cur = (x.iter().map(|&v| wrap_angle(v)).collect::<Vec<_>>(), y.to_vec());
        self.check_state(&cur.0, &cur.1)?;
        states.push(cur.clone());
        for _ in 0..steps {
            cur = self.step(&cur.0, &cur.1)?;
            states.push(cur.clone());
        }
        Ok(Orbit { states })
    }
}

#[derive(Clone, Debug)]
pub struct Orbit<T: Real> {
    pub states: Vec<(Vec<T>, Vec<T>)>,
}

impl<T: Real> Orbit<T> {
    /// CSV with header `step,x1..xd,y1..yd`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let d = self.states.first().map_or(0, |s| s.0.len());
        let mut header = vec!["step".to_string()];
        header.extend((1..=d).map(|i| format!("x{i}")));
        header.extend((1..=d).map(|i| format!("y{i}")));
        writeln!(w, "{}", header.join(","))?;
        for (i, (x, y)) in self.states.iter().enumerate() {
            write!(w, "{i}")?;
            for v in x.iter().chain(y) {
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}
