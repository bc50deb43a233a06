//! `twistmap`: constructions, criterion checks, scaling sweeps and graph
//! searches from the command line.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use twistmap::construct::poisson_solve_poly;
use twistmap::criterion::REPORT_CSV_HEADER;
use twistmap::grid::{write_binary, write_csv};
use twistmap::pipeline::{construct, graph_search, omega_grid, sweep, toy_table, ConstructConfig};
use twistmap::twist::{GraphOptions, GraphReport};
use twistmap::{Error, GeneratingMap64, GridFunction64};

const EXIT_UNSATISFIED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "twistmap", version, about = "Destruction of invariant graphs of integrable twist maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extrema, criterion verdict and norms of the one-dimensional toy family.
    Toy {
        #[arg(long = "n-list", value_delimiter = ',', required = true, num_args = 0..)]
        n_list: Vec<usize>,
        /// Holder deficit of the `C^{1-delta}` bound.
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Builds T~_n, p~_N and Psi~_n for one n and checks the criterion.
    Construct {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0.01)]
        sigma: f64,
        /// Samples per axis (power of two, multiple of 4).
        #[arg(long)]
        res: Option<usize>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Format of the criterion report.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Seed for the random spot-checks of the generated map.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Runs the construction over a list of n and fits scaling exponents.
    Sweep {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long = "n-list", value_delimiter = ',', required = true, num_args = 0..)]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0.01)]
        sigma: f64,
        #[arg(long)]
        res: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Graph-transform search for invariant graphs of the toy map.
    Graphsearch {
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long)]
        n: usize,
        /// Number of equispaced rotation numbers in [0, 2 pi).
        #[arg(long, default_value_t = 64)]
        omegas: usize,
        #[arg(long, default_value_t = 256)]
        res: usize,
        #[arg(long = "max-iter", default_value_t = 200)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Core(Error::Json(e))
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Core(Error::InvalidParameter { .. })
            | Failure::Core(Error::InvalidResolution { .. })
            | Failure::Core(Error::DimensionMismatch { .. }) => EXIT_USAGE,
            Failure::Core(Error::Io(_)) | Failure::Core(Error::Json(_)) => EXIT_IO,
            Failure::Core(_) => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(s) => write!(f, "usage error: {s}"),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn sink(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn nonempty(ns: &[usize]) -> Result<(), Failure> {
    if ns.is_empty() {
        return Err(Failure::Usage("--n-list must name at least one n".into()));
    }
    Ok(())
}

fn run_toy(n_list: &[usize], delta: f64, out: &Option<PathBuf>, format: Format) -> CmdResult {
    nonempty(n_list)?;
    let table = toy_table(n_list, delta)?;
    let mut w = sink(out)?;
    match format {
        Format::Csv => table.write_csv(&mut w)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &table)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(if table.rows.iter().all(|r| r.satisfied) { 0 } else { EXIT_UNSATISFIED })
}

fn write_grid(dir: &Path, stem: &str, f: &GridFunction64) -> Result<(), Failure> {
    let mut b = BufWriter::new(File::create(dir.join(format!("{stem}.bin")))?);
    write_binary(f, &mut b)?;
    b.flush()?;
    let mut c = BufWriter::new(File::create(dir.join(format!("{stem}.csv")))?);
    write_csv(f, &mut c)?;
    c.flush()?;
    Ok(())
}

/// Largest `|det J - 1|` and exactness defect over `count` random states.
fn spot_check(map: &GeneratingMap64, seed: u64, count: usize) -> Result<(f64, f64), Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = map.dims();
    let (mut det, mut exact) = (0.0f64, 0.0f64);
    for _ in 0..count {
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)).collect();
        let y: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        det = det.max((map.jacobian_determinant(&x, &y)? - 1.0).abs());
        exact = exact.max(map.exactness_defect(&x, &y)?);
    }
    Ok((det, exact))
}

#[allow(clippy::too_many_arguments)]
fn run_construct(
    d: usize,
    n: usize,
    eps: f64,
    sigma: f64,
    res: Option<usize>,
    out: &Path,
    format: Format,
    seed: u64,
) -> CmdResult {
    let mut cfg = ConstructConfig::new(d, n, eps, sigma);
    if let Some(m) = res {
        cfg = cfg.with_resolution(m);
    }
    let c = construct(&cfg)?;
    fs::create_dir_all(out)?;
    write_grid(out, "T", &c.bump.field)?;
    write_grid(out, "p_tilde", &c.approx.p_tilde_grid)?;
    write_grid(out, "psi", &c.potential)?;

    match format {
        Format::Json => {
            let mut w = BufWriter::new(File::create(out.join("report.json"))?);
            c.report.write_json(&mut w)?;
            writeln!(w)?;
            w.flush()?;
        }
        Format::Csv => {
            let mut w = BufWriter::new(File::create(out.join("report.csv"))?);
            writeln!(w, "{REPORT_CSV_HEADER}")?;
            writeln!(w, "{}", c.report.csv_row())?;
            w.flush()?;
        }
    }

    let map = GeneratingMap64::from_potential(poisson_solve_poly(&c.approx.p_tilde)?)?;
    let samples = 256;
    let (det_defect, exact_defect) = spot_check(&map, seed, samples)?;
    let summary = json!({
        "config": c.config,
        "scaling": c.scaling,
        "bump": c.bump.spec,
        "target_minus_amplitude": c.bump.target_minus_amplitude,
        "search": c.approx.search,
        "p_sup": c.approx.p_sup,
        "report": c.report,
        "map_checks": {
            "seed": seed,
            "samples": samples,
            "max_det_defect": det_defect,
            "max_exactness_defect": exact_defect,
        },
    });
    let mut w = BufWriter::new(File::create(out.join("construction.json"))?);
    serde_json::to_writer_pretty(&mut w, &summary)?;
    writeln!(w)?;
    w.flush()?;

    let r = &c.report;
    println!(
        "n={} N={} lhs={:.6e} rhs={:.6e} satisfied={} asymptotic_satisfied={}",
        n, c.approx.search.degree, r.lhs, r.rhs, r.satisfied, r.asymptotic_satisfied
    );
    Ok(if r.satisfied { 0 } else { EXIT_UNSATISFIED })
}

#[allow(clippy::too_many_arguments)]
fn run_sweep(
    d: usize,
    n_list: &[usize],
    eps: f64,
    sigma: f64,
    res: Option<usize>,
    out: &Option<PathBuf>,
    format: Format,
) -> CmdResult {
    nonempty(n_list)?;
    let mut cfg = ConstructConfig::new(d, n_list[0], eps, sigma);
    if let Some(m) = res {
        cfg = cfg.with_resolution(m);
    }
    let s = sweep(&cfg, n_list)?;
    if s.rows.len() < 2 {
        eprintln!("warning: a single n cannot fit a slope; slopes are reported as NaN");
    }
    let mut w = sink(out)?;
    match format {
        Format::Csv => s.write_csv(&mut w)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &s)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(0)
}

fn graph_csv<W: Write>(mut w: W, reports: &[GraphReport<f64>]) -> io::Result<()> {
    writeln!(w, "omega,iterations,final_residual,lipschitz_estimate,mm_bound,converged,reason")?;
    for r in reports {
        let reason = serde_json::to_value(r.reason).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        writeln!(
            w,
            "{:e},{},{:e},{:e},{:e},{},{}",
            r.omega[0], r.iterations, r.final_residual, r.lipschitz_estimate, r.mm_bound, r.converged, reason
        )?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_graphsearch(
    d: usize,
    n: usize,
    omegas: usize,
    res: usize,
    max_iter: usize,
    tol: f64,
    out: &Option<PathBuf>,
    format: Format,
) -> CmdResult {
    if d != 1 {
        return Err(Failure::Usage(format!("graphsearch runs on the toy map, which needs --d 1 (got {d})")));
    }
    if omegas == 0 {
        return Err(Failure::Usage("--omegas must be positive".into()));
    }
    let opts = GraphOptions { resolution: res, max_iter, tol, ..GraphOptions::default() };
    let reports = graph_search(n, &omega_grid(omegas), &opts)?;
    let converged = reports.iter().filter(|r| r.converged).count();
    let above = reports.iter().filter(|r| !r.converged && r.lipschitz_estimate > r.mm_bound).count();
    let mut w = sink(out)?;
    match format {
        Format::Json => {
            let doc = json!({
                "n": n,
                "resolution": res,
                "reports": reports,
                "summary": {
                    "total": reports.len(),
                    "converged": converged,
                    "failed": reports.len() - converged,
                    "failed_above_mm_bound": above,
                },
            });
            serde_json::to_writer_pretty(&mut w, &doc)?;
            writeln!(w)?;
        }
        Format::Csv => graph_csv(&mut w, &reports)?,
    }
    w.flush()?;
    eprintln!("{} of {} rotation numbers converged", converged, reports.len());
    Ok(0)
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Toy { n_list, delta, out, format } => run_toy(&n_list, delta, &out, format),
        Command::Construct { d, n, eps, sigma, res, out, format, seed } => {
            run_construct(d, n, eps, sigma, res, &out, format, seed)
        }
        Command::Sweep { d, n_list, eps, sigma, res, out, format } => {
            run_sweep(d, &n_list, eps, sigma, res, &out, format)
        }
        Command::Graphsearch { d, n, omegas, res, max_iter, tol, out, format } => {
            run_graphsearch(d, n, omegas, res, max_iter, tol, &out, format)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("twistmap: {e}");
            ExitCode::from(e.code())
        }
    }
}
