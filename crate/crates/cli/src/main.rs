//! `fejer-lab`: runs the numerical experiments and writes CSV.
//!
//! Exit codes: 0 when every in-run check holds, 1 for configuration
//! errors, 2 when a check fails.

mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use fejer_lab::approx::{
    density_curve, fejer_error_curve, gliding_hump_witness, quarter_root_pole, write_error_curve_csv, IrlsConfig,
    WitnessConfig,
};
use fejer_lab::blowup::{blowup_grid, fejer_blowup};
use fejer_lab::circle::{CircleGrid, FourierCoefficients, KernelSpec, PiecewiseConstant, SampledFunction};
use fejer_lab::hardy::taylor_fourier_check;
use fejer_lab::maximal::{weight_maximal_ratio, write_ratio_csv};
use fejer_lab::operator::{duality_gap, random_even_kernel};
use fejer_lab::weighted::make_weight;
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use config::Settings;

#[derive(Debug, Parser)]
#[command(name = "fejer-lab", version, about = "Fejér means in weighted L1 spaces on the circle")]
struct Cli {
    #[command(flatten)]
    shared: SharedArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SharedArgs {
    /// Weight truncation order M.
    #[arg(long = "grid-M", global = true)]
    grid_m: Option<usize>,
    /// Grid cells per breakpoint interval.
    #[arg(long, global = true)]
    ppi: Option<usize>,
    /// CSV output path (stdout if absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML file of key = value defaults; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare operator norms on L1(w) and its associate space.
    Duality {
        #[arg(long)]
        trials: Option<usize>,
        /// Largest Fejér order in the sweep.
        #[arg(long = "n-max")]
        n_max: Option<usize>,
    },
    /// Lower bounds for Fejér operator norms on the spiked weight.
    Blowup {
        /// Spike indices.
        #[arg(long, value_delimiter = ',')]
        m: Option<Vec<usize>>,
    },
    /// Unweighted L1 error of Fejér means of an arc indicator.
    FejerConverge {
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
        /// Arc endpoints `a,b`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        arc: Option<Vec<f64>>,
        /// Required error at the largest order.
        #[arg(long = "final-tol")]
        final_tol: Option<f64>,
    },
    /// Gliding-hump function with non-convergent Fejér means in L1(w).
    Witness {
        #[arg(long)]
        stages: Option<usize>,
        #[arg(long)]
        target: Option<f64>,
    },
    /// Best L1(w) polynomial approximation over increasing degrees.
    Density {
        #[arg(long, value_delimiter = ',')]
        degrees: Option<Vec<usize>>,
        /// `t3` or `quarter-pole`.
        #[arg(long)]
        function: Option<String>,
    },
    /// Growth of sup (Mw)/w in the truncation order.
    Maximal {
        #[arg(long, value_delimiter = ',')]
        orders: Option<Vec<usize>>,
    },
    /// Taylor coefficients of the disk extension against Fourier coefficients.
    TaylorFourier {
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
        #[arg(long)]
        degree: Option<usize>,
    },
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Contract(String),
}

impl From<fejer_lab::Error> for Failure {
    fn from(e: fejer_lab::Error) -> Self {
        match e {
            fejer_lab::Error::StageFailure { .. } => Failure::Contract(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Config(format!("output: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Config(format!("output: {e}"))
    }
}

type Outcome = Result<(), Failure>;

fn contract(holds: bool, invariant: impl FnOnce() -> String) -> Outcome {
    if holds {
        Ok(())
    } else {
        Err(Failure::Contract(invariant()))
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_rows<T: Serialize>(rows: &[T], out: Box<dyn Write>) -> Outcome {
    let mut wtr = csv::Writer::from_writer(out);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct DualityRow {
    kernel: String,
    #[serde(rename = "M")]
    order: usize,
    norm_l1w: f64,
    norm_linfw: f64,
    relative_gap: f64,
}

const DUALITY_TOL: f64 = 1e-10;

fn duality(s: &Settings, trials: Option<usize>, n_max: Option<usize>) -> Outcome {
    let trials = s.usize(trials, "trials", 100)?;
    let n_max = s.usize(n_max, "n-max", 64)?;
    let order = s.usize(s.shared_grid_m, "grid-M", 8)?;
    let ppi = s.usize(s.shared_ppi, "ppi", 8)?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.u64(s.shared_seed, "seed", 7)?);
    let w = make_weight(order)?;
    let mut rows = Vec::new();

    let step_grid = Arc::new(CircleGrid::builder(order).points_per_interval(ppi).build()?);
    for t in 0..trials {
        let pieces = rng.random_range(1..40);
        let k = KernelSpec::Piecewise(random_even_kernel(&mut rng, pieces));
        let g = duality_gap(&k, &w, &step_grid)?;
        rows.push(DualityRow {
            kernel: format!("random-{t}"),
            order,
            norm_l1w: g.norm_l1w,
            norm_linfw: g.norm_linfw,
            relative_gap: g.relative(),
        });
    }
    let fejer_grid = Arc::new(CircleGrid::builder(order).points_per_interval(ppi).resolve_fejer(n_max).build()?);
    for n in std::iter::successors(Some(1usize), |n| Some(2 * n)).take_while(|&n| n <= n_max) {
        let g = duality_gap(&KernelSpec::fejer(n), &w, &fejer_grid)?;
        rows.push(DualityRow {
            kernel: format!("fejer-{n}"),
            order,
            norm_l1w: g.norm_l1w,
            norm_linfw: g.norm_linfw,
            relative_gap: g.relative(),
        });
    }
    write_rows(&rows, open_out(s.out())?)?;
    let worst = rows.iter().map(|r| r.relative_gap).fold(0.0, f64::max);
    eprintln!("max relative duality gap: {worst:.3e}");
    contract(worst <= DUALITY_TOL, || format!("duality gap {worst:.3e} exceeds {DUALITY_TOL:e}"))
}

fn blowup(s: &Settings, m: Option<Vec<usize>>) -> Outcome {
    let m_list = s.usize_list(m, "m", &[1, 4, 9, 16, 25])?;
    if m_list.is_empty() || m_list.contains(&0) {
        return Err(Failure::Config("m must be a non-empty list of positive integers".into()));
    }
    let m_max = *m_list.iter().max().unwrap();
    let order = s.usize(s.shared_grid_m, "grid-M", m_max)?;
    let ppi = s.usize(s.shared_ppi, "ppi", 8)?;
    let w = make_weight(order)?;
    let grid = Arc::new(blowup_grid(&m_list, order, ppi)?);
    let rows = fejer_blowup(&m_list, &w, &grid)?;
    write_rows(&rows, open_out(s.out())?)?;
    if let Some(r) = rows.iter().find(|r| !r.pointwise_ok()) {
        return contract(false, || format!("m = {}: pointwise minimum {} below √m/(8π) = {}", r.m, r.pointwise_min, r.bound));
    }
    if let Some(r) = rows.iter().find(|r| !r.norm_ok()) {
        return contract(false, || format!("m = {}: operator norm {} below √m/(8π) = {}", r.m, r.norm_linfw, r.bound));
    }
    if let Some(r) = rows.iter().find(|r| !r.upper_ok()) {
        return contract(false, || format!("m = {}: operator norm {} above the trivial bound {}", r.m, r.norm_l1w, r.upper_bound));
    }
    let mut sorted = rows.clone();
    sorted.sort_by_key(|r| r.m);
    sorted.dedup_by_key(|r| r.m);
    contract(sorted.windows(2).all(|p| p[1].norm_linfw > p[0].norm_linfw), || {
        "operator norms are not strictly increasing in m".into()
    })
}

fn fejer_converge(s: &Settings, n: Option<Vec<usize>>, arc: Option<Vec<f64>>, final_tol: Option<f64>) -> Outcome {
    let n_list = s.usize_list(n, "n", &[16, 64, 256, 1024])?;
    let arc = s.f64_list(arc, "arc", &[-1.0, 0.5])?;
    let final_tol = s.f64(final_tol, "final-tol", 1e-2)?;
    let ppi = s.usize(s.shared_ppi, "ppi", 8)?;
    let [a, b] = arc[..] else {
        return Err(Failure::Config("arc needs exactly two endpoints".into()));
    };
    if n_list.is_empty() {
        return Err(Failure::Config("n must be non-empty".into()));
    }
    let f = PiecewiseConstant::indicator(a, b)?;
    let n_max = *n_list.iter().max().unwrap();
    let grid = Arc::new(CircleGrid::builder(1).points_per_interval(ppi).resolve_fejer(n_max).breakpoints([a, b]).build()?);
    let rows = fejer_error_curve(&f, &grid, None, &n_list)?;
    write_error_curve_csv(&rows, open_out(s.out())?)?;
    let mut by_n = rows.clone();
    by_n.sort_by_key(|r| r.n);
    contract(by_n.windows(2).all(|p| p[1].error <= p[0].error + 1e-12), || "errors are not decreasing in n".into())?;
    let last = by_n.last().unwrap();
    contract(last.error < final_tol, || format!("error {} at n = {} is not below {final_tol}", last.error, last.n))
}

fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("txt")
}

fn witness(s: &Settings, stages: Option<usize>, target: Option<f64>) -> Outcome {
    let cfg = WitnessConfig {
        stages: s.usize(stages, "stages", 3)?,
        target: s.f64(target, "target", 1.0)?,
        ..Default::default()
    };
    let order = s.usize(s.shared_grid_m, "grid-M", 64)?;
    let ppi = s.usize(s.shared_ppi, "ppi", 8)?;
    let w = make_weight(order)?;
    let grid = Arc::new(CircleGrid::builder(order).points_per_interval(ppi).build()?);
    let report = gliding_hump_witness(&w, &grid, &cfg)?;
    report.write_csv(open_out(s.out())?)?;
    match s.out() {
        Some(p) => std::fs::write(sidecar_path(p), report.summary())?,
        None => eprint!("{}", report.summary()),
    }
    contract(report.meets_target(), || "a stage error fell below the target".into())?;
    contract(report.coherence <= 1e-10, || format!("direct and spectral errors differ by {:.2e}", report.coherence))
}

fn density(s: &Settings, degrees: Option<Vec<usize>>, function: Option<String>) -> Outcome {
    let degrees = s.usize_list(degrees, "degrees", &[4, 8, 16, 32, 64])?;
    let function = s.string(function, "function", "quarter-pole")?;
    let order = s.usize(s.shared_grid_m, "grid-M", 16)?;
    let ppi = s.usize(s.shared_ppi, "ppi", 8)?;
    if degrees.is_empty() {
        return Err(Failure::Config("degrees must be non-empty".into()));
    }
    let w = make_weight(order)?;
    let n_max = *degrees.iter().max().unwrap();
    let grid = Arc::new(CircleGrid::builder(order).points_per_interval(ppi).resolve_fejer(n_max).build()?);
    let f = match function.as_str() {
        "t3" => SampledFunction::from_fn(&grid, |t| Complex64::cis(3.0 * t)),
        "quarter-pole" => SampledFunction::from_fn(&grid, quarter_root_pole),
        other => return Err(Failure::Config(format!("unknown function `{other}` (expected t3 or quarter-pole)"))),
    };
    let curve = density_curve(&f, &w, &degrees, &IrlsConfig::default())?;
    curve.write_csv(open_out(s.out())?)?;
    contract(curve.is_nonincreasing(), || "errors increase with degree".into())?;
    contract(curve.beats_fejer(), || "a fit is worse than the Fejér mean of the same order".into())?;
    contract(curve.shrinks_by(0.2, 1e-12), || "final error is not below 0.2 times the first".into())
}

fn maximal(s: &Settings, orders: Option<Vec<usize>>) -> Outcome {
    let orders = s.usize_list(orders, "orders", &[4, 16, 64])?;
    let ppi = s.usize(s.shared_ppi, "ppi", 8)?;
    if orders.is_empty() {
        return Err(Failure::Config("orders must be non-empty".into()));
    }
    let rows = weight_maximal_ratio(&orders, ppi)?;
    write_ratio_csv(&rows, open_out(s.out())?)?;
    let mut sorted = rows.clone();
    sorted.sort_by_key(|r| r.order);
    contract(sorted.windows(2).all(|p| p[1].ratio > p[0].ratio), || "ratio is not strictly increasing in M".into())?;
    let (first, last) = (sorted.first().unwrap(), sorted.last().unwrap());
    contract(sorted.len() < 2 || last.ratio >= 2.0 * first.ratio, || {
        format!("ratio at M = {} is less than twice the ratio at M = {}", last.order, first.order)
    })
}

#[derive(Serialize)]
struct MismatchRow {
    trial: usize,
    degree: usize,
    r: f64,
    mismatch: f64,
}

fn taylor_fourier(s: &Settings, trials: Option<usize>, radii: Option<Vec<f64>>, degree: Option<usize>) -> Outcome {
    let trials = s.usize(trials, "trials", 20)?;
    let radii = s.f64_list(radii, "radii", &[0.5, 0.9])?;
    let max_degree = s.usize(degree, "degree", 16)?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.u64(s.shared_seed, "seed", 34)?);
    let mut rows = Vec::new();
    for trial in 0..trials {
        let degree = rng.random_range(0..=max_degree);
        let a: Vec<Complex64> =
            (0..=degree).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let f = FourierCoefficients::analytic(&a);
        for &r in &radii {
            rows.push(MismatchRow { trial, degree, r, mismatch: taylor_fourier_check(&f, r)? });
        }
    }
    write_rows(&rows, open_out(s.out())?)?;
    let worst = rows.iter().map(|r| r.mismatch).fold(0.0, f64::max);
    eprintln!("max mismatch: {worst:.3e}");
    contract(worst <= 1e-8, || format!("Taylor/Fourier mismatch {worst:.3e} exceeds 1e-8"))
}

fn run(cli: Cli) -> Outcome {
    let settings = Settings::load(&cli.shared, &cli.command)?;
    let s = &settings;
    match cli.command {
        Command::Duality { trials, n_max } => duality(s, trials, n_max),
        Command::Blowup { m } => blowup(s, m),
        Command::FejerConverge { n, arc, final_tol } => fejer_converge(s, n, arc, final_tol),
        Command::Witness { stages, target } => witness(s, stages, target),
        Command::Density { degrees, function } => density(s, degrees, function),
        Command::Maximal { orders } => maximal(s, orders),
        Command::TaylorFourier { trials, radii, degree } => taylor_fourier(s, trials, radii, degree),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Contract(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(2)
        }
    }
}
