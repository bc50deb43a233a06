//! End-to-end runs: the analytic construction for one `n`, family sweeps with
//! fitted scaling exponents, the toy-model table and the graph search.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::construct::{
    approximate_and_normalize, measure_toy_extrema, poisson_solve, toy_generating, toy_phi, Approximation, Bump,
    BumpProfile, BumpSpec, ScalingParams,
};
use crate::criterion::{check_1d, verdict_pipeline, CriterionReport};
use crate::error::{Error, Result};
use crate::grid::{c0_norm, cr_norm, holder_norm, GridFunction};
use crate::scalar::Real;
use crate::twist::{graph_transform, GraphOptions, GraphReport};

/// Per-axis resolution used when none is given: 256 for `d = 1`, 512 for
/// `d = 2`, 64 above.
pub fn default_resolution(dims: usize) -> usize {
    match dims {
        1 => 256,
        2 => 512,
        _ => 64,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstructConfig<T: Real> {
    pub dims: usize,
    pub n: usize,
    pub eps: T,
    pub sigma: T,
    pub resolution: usize,
    pub profile: BumpProfile,
}

impl<T: Real> ConstructConfig<T> {
    pub fn new(dims: usize, n: usize, eps: T, sigma: T) -> Self {
        ConstructConfig { dims, n, eps, sigma, resolution: default_resolution(dims), profile: BumpProfile::default() }
    }

    pub fn with_resolution(mut self, resolution: usize) -> Self {
        self.resolution = resolution;
        self
    }

    pub fn with_n(&self, n: usize) -> Self {
        ConstructConfig { n, ..self.clone() }
    }
}

/// Every intermediate of the analytic construction.
#[derive(Clone, Debug)]
pub struct Construction<T: Real> {
    pub config: ConstructConfig<T>,
    pub scaling: ScalingParams<T>,
    pub bump: Bump<T>,
    pub approx: Approximation<T>,
    /// `Psi~_n` with `(1/d) Laplacian(Psi~_n) = p~_N`.
    pub potential: GridFunction<T>,
    pub report: CriterionReport<T>,
}

pub fn construct<T: Real>(cfg: &ConstructConfig<T>) -> Result<Construction<T>> {
    let scaling = ScalingParams::new(cfg.dims, cfg.n, cfg.eps)?;
    let bump = BumpSpec::analytic(cfg.dims, cfg.n)?.with_profile(cfg.profile)?.realize(cfg.resolution)?;
    let approx = approximate_and_normalize(&bump.field, &scaling, cfg.sigma)?;
    let potential = poisson_solve(&approx.p_tilde_grid)?;
    let report = verdict_pipeline(&potential)?;
    Ok(Construction { config: cfg.clone(), scaling, bump, approx, potential, report })
}

/// Least-squares slope of `ln y` against `ln x`; NaN with fewer than two
/// points or any nonpositive value.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    fit_loglog(xs, ys).map_or(f64::NAN, |(s, _)| s)
}

fn fit_loglog(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 || xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Tolerance on fitted exponents.
pub const SLOPE_TOLERANCE: f64 = 0.15;

#[derive(Clone, Debug, Serialize)]
pub struct SlopeCheck {
    pub label: String,
    pub measured: f64,
    /// Target exponent; `None` means the quantity only has to decay.
    pub target: Option<f64>,
    pub pass: bool,
}

impl SlopeCheck {
    fn exponent(label: String, measured: f64, target: f64) -> Self {
        let pass = (measured - target).abs() <= SLOPE_TOLERANCE;
        SlopeCheck { label, measured, target: Some(target), pass }
    }

    fn decay(label: String, measured: f64) -> Self {
        SlopeCheck { label, measured, target: None, pass: measured < 0.0 }
    }

    fn footer(&self) -> String {
        let target = self.target.map_or("decay".to_string(), |t| format!("{t:.6}"));
        let status = if self.pass { "pass" } else { "fail" };
        format!("# slope,{},{:.6},{},{}", self.label, self.measured, target, status)
    }
}

/// Measurements for one member of a sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "N")]
    pub degree: usize,
    pub resolution: usize,
    pub radius: f64,
    pub minus_amplitude: f64,
    pub approx_error: f64,
    /// `||T~_n||_{C^k}`.
    pub ck_norm: f64,
    pub max_p: f64,
    pub min_p: f64,
    /// `||p~_N||_{C^r}` for `r = 0..=d+1`.
    pub p_cr: Vec<f64>,
    /// `||Psi~_n||_{C^r}` for `r = 0..=d+1`.
    pub psi_cr: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin_ratio: f64,
    pub satisfied: bool,
    pub asymptotic_satisfied: bool,
}

impl SweepRow {
    pub fn measure<T: Real>(c: &Construction<T>) -> Self {
        let d = c.config.dims;
        let f = |v: T| v.to_f64_lossy();
        let p = &c.approx.p_tilde_grid;
        SweepRow {
            n: c.config.n,
            m: c.approx.search.m,
            degree: c.approx.search.degree,
            resolution: c.config.resolution,
            radius: f(c.bump.spec.minus_radius),
            minus_amplitude: f(c.bump.spec.minus_amplitude),
            approx_error: f(c.approx.search.error),
            ck_norm: f(cr_norm(&c.bump.field, c.scaling.k)),
            max_p: f(p.max()),
            min_p: f(p.min()),
            p_cr: (0..=d + 1).map(|r| f(cr_norm(p, r))).collect(),
            psi_cr: (0..=d + 1).map(|r| f(cr_norm(&c.potential, r))).collect(),
            lhs: f(c.report.lhs),
            rhs: f(c.report.rhs),
            margin_ratio: f(c.report.margin_ratio()),
            satisfied: c.report.satisfied,
            asymptotic_satisfied: c.report.asymptotic_satisfied,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Sweep {
    pub dims: usize,
    pub eps: f64,
    pub sigma: f64,
    pub k: usize,
    pub rows: Vec<SweepRow>,
    pub slopes: Vec<SlopeCheck>,
    /// `n` at which the fitted margin ratio reaches 1, when it is increasing.
    pub projected_crossover: Option<f64>,
}

/// Runs the construction for every `n` (ascending, deduplicated) in parallel.
pub fn sweep<T: Real>(template: &ConstructConfig<T>, ns: &[usize]) -> Result<Sweep> {
    if ns.is_empty() {
        return Err(Error::InvalidParameter { name: "n-list", reason: "empty".into() });
    }
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let rows = ns
        .par_iter()
        .map(|&n| construct(&template.with_n(n)).map(|c| SweepRow::measure(&c)))
        .collect::<Result<Vec<_>>>()?;
    let scaling = ScalingParams::new(template.dims, ns[0], template.eps)?;
    let x: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let col = |g: &dyn Fn(&SweepRow) -> f64| fit_loglog_slope(&x, &rows.iter().map(g).collect::<Vec<_>>());
    let mut slopes = vec![
        SlopeCheck::exponent(format!("C^{} norm of T~", scaling.k), col(&|r| r.ck_norm), scaling.ck_exponent().to_f64_lossy()),
        SlopeCheck::exponent("N".into(), col(&|r| r.degree as f64), scaling.degree_exponent().to_f64_lossy()),
        SlopeCheck::exponent("max p~".into(), col(&|r| r.max_p), scaling.max_exponent().to_f64_lossy()),
        SlopeCheck::exponent("-min p~".into(), col(&|r| -r.min_p), scaling.min_exponent().to_f64_lossy()),
    ];
    for r in scaling.decaying_orders_poly() {
        slopes.push(SlopeCheck::decay(format!("C^{r} norm of p~"), col(&|row| row.p_cr[r])));
    }
    for r in scaling.decaying_orders_potential() {
        slopes.push(SlopeCheck::decay(format!("C^{r} norm of Psi~"), col(&|row| row.psi_cr[r])));
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r.margin_ratio).collect();
    let projected_crossover = match fit_loglog(&x, &ratios) {
        Some((s, b)) if s > 0.0 => Some((-b / s).exp()),
        _ => None,
    };
    Ok(Sweep {
        dims: template.dims,
        eps: template.eps.to_f64_lossy(),
        sigma: template.sigma.to_f64_lossy(),
        k: scaling.k,
        rows,
        slopes,
        projected_crossover,
    })
}

impl Sweep {
    pub fn csv_header(&self) -> String {
        let mut cols: Vec<String> = [
            "n", "m", "N", "resolution", "radius", "minus_amplitude", "approx_error", "ck_norm_T", "max_p", "min_p",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        cols.extend((0..=self.dims + 1).map(|r| format!("p_c{r}")));
        cols.extend((0..=self.dims + 1).map(|r| format!("psi_c{r}")));
        cols.extend(["lhs", "rhs", "margin_ratio", "satisfied", "asymptotic_satisfied"].iter().map(|s| s.to_string()));
        cols.join(",")
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.csv_header())?;
        for r in &self.rows {
            let mut cells = vec![
                r.n.to_string(),
                r.m.to_string(),
                r.degree.to_string(),
                r.resolution.to_string(),
                format!("{:e}", r.radius),
                format!("{:e}", r.minus_amplitude),
                format!("{:e}", r.approx_error),
                format!("{:e}", r.ck_norm),
                format!("{:e}", r.max_p),
                format!("{:e}", r.min_p),
            ];
            cells.extend(r.p_cr.iter().chain(&r.psi_cr).map(|v| format!("{v:e}")));
            cells.extend([
                format!("{:e}", r.lhs),
                format!("{:e}", r.rhs),
                format!("{:e}", r.margin_ratio),
                r.satisfied.to_string(),
                r.asymptotic_satisfied.to_string(),
            ]);
            writeln!(w, "{}", cells.join(","))?;
        }
        for s in &self.slopes {
            writeln!(w, "{}", s.footer())?;
        }
        match self.projected_crossover {
            Some(n) => writeln!(w, "# projected_crossover,{n:.6e}")?,
            None => writeln!(w, "# projected_crossover,none")?,
        }
        Ok(())
    }
}

/// One line of the toy-model table.
#[derive(Clone, Debug, Serialize)]
pub struct ToyRow {
    pub n: usize,
    pub resolution: usize,
    pub min_d: f64,
    pub argmin: f64,
    pub max_d: f64,
    pub argmax: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    pub c0: f64,
    /// Interpolation bound for the `C^{1-delta}` norm of `phi_n`.
    pub holder: f64,
}

/// Smallest power of two that is at least 256 and `8n`: the harmonic `2n`
/// stays below Nyquist, and for `n` a power of two every extremum of
/// `D phi_n` is a node.
pub fn toy_resolution(n: usize) -> usize {
    (8 * n).next_power_of_two().max(256)
}

pub fn toy_row(n: usize, delta: f64) -> Result<ToyRow> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter { name: "delta", reason: format!("{delta} outside (0, 1)") });
    }
    let m = toy_resolution(n);
    let e = measure_toy_extrema::<f64>(n, m)?;
    let r = check_1d(e.min, e.max)?;
    let phi = toy_phi::<f64>(n, m)?;
    Ok(ToyRow {
        n,
        resolution: m,
        min_d: e.min,
        argmin: e.argmin,
        max_d: e.max,
        argmax: e.argmax,
        lhs: r.lhs,
        rhs: r.rhs,
        satisfied: r.satisfied,
        c0: c0_norm(&phi),
        holder: holder_norm(&phi, 0, 1.0 - delta)?,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ToyTable {
    pub delta: f64,
    pub rows: Vec<ToyRow>,
    pub slopes: Vec<SlopeCheck>,
}

pub fn toy_table(ns: &[usize], delta: f64) -> Result<ToyTable> {
    if ns.is_empty() {
        return Err(Error::InvalidParameter { name: "n-list", reason: "empty".into() });
    }
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let rows = ns.iter().map(|&n| toy_row(n, delta)).collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let c0: Vec<f64> = rows.iter().map(|r| r.c0).collect();
    let holder: Vec<f64> = rows.iter().map(|r| r.holder).collect();
    let slopes = vec![
        SlopeCheck::exponent("C^0 norm of phi".into(), fit_loglog_slope(&x, &c0), -1.0),
        SlopeCheck::decay("C^{1-delta} bound of phi".into(), fit_loglog_slope(&x, &holder)),
    ];
    Ok(ToyTable { delta, rows, slopes })
}

impl ToyTable {
    pub const CSV_HEADER: &'static str = "n,resolution,min_d,argmin,max_d,argmax,lhs,rhs,satisfied,c0,holder";

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{:e},{:e},{:e},{:e},{:e},{:e},{},{:e},{:e}",
                r.n, r.resolution, r.min_d, r.argmin, r.max_d, r.argmax, r.lhs, r.rhs, r.satisfied, r.c0, r.holder
            )?;
        }
        for s in &self.slopes {
            writeln!(w, "{}", s.footer())?;
        }
        Ok(())
    }
}

/// Rotation numbers `2 pi j / count`, `j = 0..count`.
pub fn omega_grid(count: usize) -> Vec<f64> {
    (0..count).map(|j| std::f64::consts::TAU * j as f64 / count as f64).collect()
}

/// Graph transform on the toy map for every rotation number, in input order.
pub fn graph_search(n: usize, omegas: &[f64], opts: &GraphOptions<f64>) -> Result<Vec<GraphReport<f64>>> {
    let map = toy_generating::<f64>(n)?;
    omegas
        .par_iter()
        .map(|&w| graph_transform(&map, &[w], opts).map(|o| o.report))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let x = [2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-1.5)).collect();
        assert!((fit_loglog_slope(&x, &y) + 1.5).abs() < 1e-12);
        assert!(fit_loglog_slope(&[2.0], &[1.0]).is_nan());
        assert!(fit_loglog_slope(&[2.0, 4.0], &[1.0, 0.0]).is_nan());
    }

    #[test]
    fn toy_table_rows_sorted() {
        let t = toy_table(&[4, 1, 2, 2], 0.5).unwrap();
        assert_eq!(t.rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![1, 2, 4]);
        assert!(t.rows[0].satisfied);
    }
}
