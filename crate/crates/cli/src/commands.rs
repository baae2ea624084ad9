//! The five subcommands.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::path::Path;

use clap::{Args, Parser, Subcommand};
use fibwalk::observables::{linear_fit, DEFAULT_EXPONENT_WINDOW};
use fibwalk::stencil::OFFSETS;
use fibwalk::{
    analytic_velocity, closed_form_coefficients, density, dirac_reference, front_velocity, moments,
    moments_about, oracle_coefficients, run, spreading_exponent, AnglePair, BasisKind,
    ContinuumParams, SpinorField, SpreadEntry, SpreadSeries, WalkModel, WalkRun,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{CommonArgs, InitSpec, ModelKind, RunConfig};
use crate::error::CliError;
use crate::output::{self, num};

pub const STENCIL_TOL: f64 = 1e-9;
pub const FRONT_QUANTILE: f64 = 0.99;
pub const PRESET_PAIRS: [(&str, &str); 5] = [
    ("pi/2", "pi/4"),
    ("pi/3", "pi/6"),
    ("pi/4", "pi/8"),
    ("pi/8", "pi/16"),
    ("pi/12", "pi/24"),
];

const SWEEP_SIZE: usize = 512;
const SWEEP_STEPS: usize = 120;
const SWEEP_WIDTH: f64 = 5.0;

#[derive(Debug, Parser)]
#[command(name = "fibwalk", version, about = "Fibonacci quantum walk simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one walk and write density.csv, spread.csv and summary.json
    Simulate(SimulateArgs),
    /// Analytic (and optionally empirical) velocity over [0, π/2]²
    VelocitySweep(SweepArgs),
    /// Compare closed-form six-step coefficients with explicit stepping
    Stencil(StencilArgs),
    /// Fit the spreading exponent of σ_j
    Exponent(ExponentArgs),
    /// L1 distance between walk and Dirac transport across lattice sizes
    DiracCompare(DiracArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Run the five preset angle pairs into subdirectories
    #[arg(long)]
    pub preset_pairs: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Grid points per axis
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Add front velocities measured on short runs
    #[arg(long)]
    pub empirical: bool,
}

#[derive(Debug, Args)]
pub struct StencilArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct ExponentArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub window_start: Option<usize>,
    #[arg(long)]
    pub window_end: Option<usize>,
    #[arg(long)]
    pub band_low: Option<f64>,
    #[arg(long)]
    pub band_high: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DiracArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated lattice sizes
    #[arg(long, value_delimiter = ',')]
    pub resolutions: Option<Vec<usize>>,
}

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::VelocitySweep(a) => velocity_sweep(a),
        Command::Stencil(a) => stencil(a),
        Command::Exponent(a) => exponent(a),
        Command::DiracCompare(a) => dirac_compare(a),
    }
}

fn extra_bool(table: &toml::Table, key: &str) -> Result<Option<bool>, CliError> {
    match table.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_bool()
            .map(Some)
            .ok_or_else(|| CliError::Config(format!("'{key}' must be a boolean"))),
    }
}

fn extra_int(table: &toml::Table, key: &str) -> Result<Option<usize>, CliError> {
    match table.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_integer()
            .and_then(|i| usize::try_from(i).ok())
            .map(Some)
            .ok_or_else(|| CliError::Config(format!("'{key}' must be a non-negative integer"))),
    }
}

fn extra_float(table: &toml::Table, key: &str) -> Result<Option<f64>, CliError> {
    match table.get(key) {
        None => Ok(None),
        Some(toml::Value::Float(x)) => Ok(Some(*x)),
        Some(toml::Value::Integer(i)) => Ok(Some(*i as f64)),
        Some(_) => Err(CliError::Config(format!("'{key}' must be a number"))),
    }
}

fn fib_params(cfg: &RunConfig) -> Result<Option<ContinuumParams>, CliError> {
    Ok(match cfg.model.fib() {
        Some(kind) => Some(ContinuumParams::new(kind, cfg.angles()?)),
        None => None,
    })
}

fn run_walk(cfg: &RunConfig) -> Result<WalkRun, CliError> {
    let (field, initial) = cfg.initial_field()?;
    Ok(run(&cfg.walk_model()?, &field, cfg.steps, cfg.snapshot_stride)?.with_initial(initial))
}

/// Spread entries, each snapshot cut opposite the previous mean. Snapshots
/// whose moments are undefined get NaN and a warning instead of aborting
/// the run.
fn spread_entries(walk: &WalkRun, warnings: &mut Vec<String>) -> Vec<SpreadEntry> {
    let mut flagged = false;
    let mut reference: Option<f64> = None;
    walk.snapshots
        .iter()
        .map(|s| {
            let rho = density(&s.field);
            let norm: f64 = rho.iter().sum();
            let m = match reference {
                None => moments(&rho, s.field.dx()),
                Some(r) => moments_about(&rho, s.field.dx(), r),
            };
            let (mean, sigma) = match m {
                Ok(m) => {
                    reference = Some(m.mean);
                    (m.mean, m.sigma)
                }
                Err(e) => {
                    if !flagged {
                        warnings.push(format!("moments undefined from j = {}: {e}", s.step));
                        flagged = true;
                    }
                    (f64::NAN, f64::NAN)
                }
            };
            SpreadEntry {
                j: s.step,
                norm,
                mean,
                sigma,
            }
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct EtaSummary {
    eta: f64,
    window: (usize, usize),
    residual: f64,
    points: usize,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    config: &'a RunConfig,
    walk: String,
    v_analytic: Option<f64>,
    p1: Option<f64>,
    p2: Option<f64>,
    omega: Option<f64>,
    basis_kind: Option<&'static str>,
    basis_degenerate: Option<bool>,
    front_velocity: Option<f64>,
    front_quantile: f64,
    eta_fit: Option<EtaSummary>,
    norm_drift: f64,
    coin_word_prefix: &'a [String],
    warnings: Vec<String>,
}

fn basis_name(kind: BasisKind) -> &'static str {
    match kind {
        BasisKind::Regular => "regular",
        BasisKind::Diagonal => "diagonal",
        BasisKind::VelocityZero => "velocity-zero",
    }
}

fn exponent_window(steps: usize) -> (usize, usize) {
    (
        DEFAULT_EXPONENT_WINDOW.0,
        DEFAULT_EXPONENT_WINDOW.1.min(steps),
    )
}

fn simulate_one(cfg: &RunConfig, dir: &Path) -> Result<(), CliError> {
    let walk = run_walk(cfg)?;
    let params = fib_params(cfg)?;
    let mut warnings = Vec::new();
    let entries = spread_entries(&walk, &mut warnings);

    let front = match front_velocity(&walk, FRONT_QUANTILE) {
        Ok(v) => Some(v),
        Err(e) => {
            warnings.push(format!("front velocity: {e}"));
            None
        }
    };
    let series = SpreadSeries {
        model: walk.model,
        entries: entries.clone(),
    };
    let eta_fit = match spreading_exponent(&series, exponent_window(cfg.steps)) {
        Ok(f) if f.eta.is_finite() => Some(EtaSummary {
            eta: f.eta,
            window: f.fit_window,
            residual: f.residual,
            points: f.points,
        }),
        Ok(_) => {
            warnings.push("exponent fit is not finite".into());
            None
        }
        Err(e) => {
            warnings.push(format!("exponent fit: {e}"));
            None
        }
    };

    let summary = Summary {
        config: cfg,
        walk: walk.model.to_string(),
        v_analytic: params.map(|p| p.v),
        p1: params.map(|p| p.p1),
        p2: params.map(|p| p.p2),
        omega: params.map(|p| p.omega),
        basis_kind: params.map(|p| basis_name(p.basis.kind)),
        basis_degenerate: params.map(|p| p.basis.kind != BasisKind::Regular),
        front_velocity: front,
        front_quantile: FRONT_QUANTILE,
        eta_fit,
        norm_drift: walk.norm_drift(),
        coin_word_prefix: &walk.word_prefix,
        warnings,
    };
    output::write_text(dir, "density.csv", &output::density_csv(walk.final_field()))?;
    output::write_text(dir, "spread.csv", &output::spread_csv(&entries))?;
    output::write_json(dir, "summary.json", &summary)?;
    for w in &summary.warnings {
        eprintln!("warning: {w}");
    }
    println!("wrote {}", dir.display());
    Ok(())
}

fn pair_dir_name(alpha: &str, beta: &str) -> String {
    format!("{}_{}", alpha, beta).replace('/', "-")
}

pub fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let (cfg, extra) = RunConfig::resolve(args.common, &["preset-pairs"])?;
    let presets = args.preset_pairs || extra_bool(&extra, "preset-pairs")?.unwrap_or(false);
    if !presets {
        return simulate_one(&cfg, &cfg.output_dir);
    }
    for (a, b) in PRESET_PAIRS {
        let mut pair = cfg.clone();
        pair.alpha_literal = a.to_string();
        pair.beta_literal = b.to_string();
        pair.alpha = crate::angle::parse_angle(a)?;
        pair.beta = crate::angle::parse_angle(b)?;
        let dir = cfg.output_dir.join(pair_dir_name(a, b));
        simulate_one(&pair, &dir)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub alpha: f64,
    pub beta: f64,
    pub v_analytic: f64,
    pub v_empirical: Option<f64>,
}

/// Short-run front velocity used by the empirical sweep.
pub fn empirical_velocity(model: &WalkModel) -> Result<f64, CliError> {
    let init = SpinorField::default_gaussian(SWEEP_SIZE, SWEEP_WIDTH)?;
    let walk = run(model, &init, SWEEP_STEPS, 4)?;
    Ok(front_velocity(&walk, FRONT_QUANTILE)?)
}

pub fn sweep_rows(
    kind: ModelKind,
    resolution: usize,
    empirical: bool,
) -> Result<Vec<SweepRow>, CliError> {
    let fib = kind
        .fib()
        .ok_or_else(|| CliError::Usage("velocity-sweep needs fib-coin or fib-step".into()))?;
    if resolution < 2 {
        return Err(CliError::Usage("resolution must be at least 2".into()));
    }
    let step = FRAC_PI_2 / (resolution - 1) as f64;
    let grid: Vec<(f64, f64)> = (0..resolution)
        .flat_map(|i| (0..resolution).map(move |k| (i as f64 * step, k as f64 * step)))
        .collect();
    grid.par_iter()
        .map(|&(alpha, beta)| {
            let angles = AnglePair::new(alpha, beta)?;
            let v_empirical = if empirical {
                Some(empirical_velocity(&fib.with_angles(angles))?)
            } else {
                None
            };
            Ok(SweepRow {
                alpha,
                beta,
                v_analytic: analytic_velocity(fib, angles),
                v_empirical,
            })
        })
        .collect()
}

pub fn velocity_sweep(args: SweepArgs) -> Result<(), CliError> {
    let (cfg, extra) = RunConfig::resolve(args.common, &["resolution", "empirical"])?;
    let resolution = args
        .resolution
        .or(extra_int(&extra, "resolution")?)
        .unwrap_or(50);
    let empirical = args.empirical || extra_bool(&extra, "empirical")?.unwrap_or(false);
    let rows = sweep_rows(cfg.model, resolution, empirical)?;

    let mut csv = String::from("alpha,beta,v_analytic");
    if empirical {
        csv.push_str(",v_empirical,abs_error");
    }
    csv.push('\n');
    for r in &rows {
        write!(
            csv,
            "{},{},{}",
            num(r.alpha),
            num(r.beta),
            num(r.v_analytic)
        )
        .unwrap();
        if let Some(ve) = r.v_empirical {
            write!(csv, ",{},{}", num(ve), num((r.v_analytic - ve).abs())).unwrap();
        }
        csv.push('\n');
    }
    output::write_text(&cfg.output_dir, "contour.csv", &csv)?;
    println!("wrote {}", cfg.output_dir.join("contour.csv").display());
    Ok(())
}

pub fn stencil_report(kind: ModelKind, angles: AnglePair) -> Result<(String, f64), CliError> {
    let fib = kind
        .fib()
        .ok_or_else(|| CliError::Usage("stencil needs fib-coin or fib-step".into()))?;
    let closed = closed_form_coefficients(fib, angles);
    let oracle = oracle_coefficients(fib, angles, 32)?;
    let diff = closed.max_abs_diff(&oracle);
    let mut out = String::new();
    writeln!(
        out,
        "{} alpha={} beta={}",
        kind.name(),
        num(angles.alpha()),
        num(angles.beta())
    )
    .unwrap();
    writeln!(
        out,
        "{:>6} {:>24} {:>24} {:>24} {:>24}",
        "offset", "A closed", "A oracle", "B closed", "B oracle"
    )
    .unwrap();
    for o in OFFSETS {
        writeln!(
            out,
            "{:>6} {:>24.16e} {:>24.16e} {:>24.16e} {:>24.16e}",
            o,
            closed.a(o),
            oracle.a(o),
            closed.b(o),
            oracle.b(o)
        )
        .unwrap();
    }
    writeln!(out, "max discrepancy {diff:e}").unwrap();
    Ok((out, diff))
}

pub fn stencil(args: StencilArgs) -> Result<(), CliError> {
    let (cfg, _) = RunConfig::resolve(args.common, &[])?;
    let (report, diff) = stencil_report(cfg.model, cfg.angles()?)?;
    print!("{report}");
    if diff.is_nan() || diff > STENCIL_TOL {
        return Err(CliError::Verification(format!(
            "stencil discrepancy {diff:e} exceeds {STENCIL_TOL:e}"
        )));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct ExponentReport<'a> {
    config: &'a RunConfig,
    eta: Option<f64>,
    window: (usize, usize),
    residual: Option<f64>,
    points: Option<usize>,
    band: (f64, f64),
    passed: bool,
    error: Option<String>,
}

pub fn exponent(args: ExponentArgs) -> Result<(), CliError> {
    let keys = ["window-start", "window-end", "band-low", "band-high"];
    let (cfg, extra) = RunConfig::resolve(args.common, &keys)?;
    let window = (
        args.window_start
            .or(extra_int(&extra, "window-start")?)
            .unwrap_or(DEFAULT_EXPONENT_WINDOW.0),
        args.window_end
            .or(extra_int(&extra, "window-end")?)
            .unwrap_or(DEFAULT_EXPONENT_WINDOW.1),
    );
    let band = (
        args.band_low
            .or(extra_float(&extra, "band-low")?)
            .unwrap_or(0.95),
        args.band_high
            .or(extra_float(&extra, "band-high")?)
            .unwrap_or(1.05),
    );
    if window.0 >= window.1 || band.0.is_nan() || band.1.is_nan() || band.0 >= band.1 {
        return Err(CliError::Usage("empty exponent window or band".into()));
    }
    let walk = run_walk(&cfg)?;
    let mut warnings = Vec::new();
    let entries = spread_entries(&walk, &mut warnings);
    output::write_text(&cfg.output_dir, "spread.csv", &output::spread_csv(&entries))?;
    let series = SpreadSeries {
        model: walk.model,
        entries,
    };
    let fit = spreading_exponent(&series, window);
    let report = match &fit {
        Ok(f) => ExponentReport {
            config: &cfg,
            eta: Some(f.eta),
            window: f.fit_window,
            residual: Some(f.residual),
            points: Some(f.points),
            band,
            passed: f.eta >= band.0 && f.eta <= band.1,
            error: None,
        },
        Err(e) => ExponentReport {
            config: &cfg,
            eta: None,
            window,
            residual: None,
            points: None,
            band,
            passed: false,
            error: Some(e.to_string()),
        },
    };
    output::write_json(&cfg.output_dir, "exponent.json", &report)?;
    match (&fit, report.passed) {
        (Ok(f), true) => {
            println!(
                "eta = {} (band {}..{})",
                num(f.eta),
                num(band.0),
                num(band.1)
            );
            Ok(())
        }
        (Ok(f), false) => Err(CliError::Verification(format!(
            "eta = {} outside [{}, {}]",
            num(f.eta),
            num(band.0),
            num(band.1)
        ))),
        (Err(e), _) => Err(CliError::Verification(format!("exponent fit failed: {e}"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub steps: usize,
    pub l1: f64,
}

/// Steps at lattice size `n` that reach physical time `t` (dt = dx = 2π/n),
/// rounded down to whole six-step blocks.
pub fn aligned_steps(t: f64, n: usize) -> usize {
    let dt = std::f64::consts::TAU / n as f64;
    let raw = (t / dt + 1e-9).floor() as usize;
    raw / 6 * 6
}

fn l1_distance(a: &SpinorField, b: &SpinorField) -> f64 {
    density(a)
        .iter()
        .zip(density(b))
        .map(|(x, y)| (x - y).abs())
        .sum()
}

/// Walk against Dirac transport at the physical time `cfg.steps · 2π / cfg.n`
/// on every lattice in `resolutions`, with the Gaussian width held fixed in
/// physical units.
pub fn convergence_table(
    cfg: &RunConfig,
    resolutions: &[usize],
) -> Result<Vec<ConvergenceRow>, CliError> {
    let params = fib_params(cfg)?
        .ok_or_else(|| CliError::Usage("dirac-compare needs fib-coin or fib-step".into()))?;
    let width = match cfg.init {
        InitSpec::Gaussian { width_sites } => width_sites,
        InitSpec::Delta { .. } => {
            return Err(CliError::Usage(
                "dirac-compare needs a gaussian init".into(),
            ))
        }
    };
    if resolutions.len() < 2 {
        return Err(CliError::Usage(
            "dirac-compare needs at least two resolutions".into(),
        ));
    }
    let t = cfg.steps as f64 * std::f64::consts::TAU / cfg.n as f64;
    let model = cfg.walk_model()?;
    resolutions
        .par_iter()
        .map(|&n| {
            if n < 16 {
                return Err(CliError::Usage(format!("resolution {n} below 16")));
            }
            let init = SpinorField::default_gaussian(n, width * n as f64 / cfg.n as f64)?;
            let steps = aligned_steps(t, n);
            let walked = if steps == 0 {
                init.clone()
            } else {
                run(&model, &init, steps, steps)?.final_field().clone()
            };
            let reference = dirac_reference(&init, &params, steps as f64 * init.dx());
            Ok(ConvergenceRow {
                n,
                steps,
                l1: l1_distance(&walked, &reference),
            })
        })
        .collect()
}

/// Strictly decreasing, or identically (numerically) zero.
pub fn convergence_passes(rows: &[ConvergenceRow]) -> bool {
    rows.iter().all(|r| r.l1 < 1e-12) || rows.windows(2).all(|w| w[1].l1 < w[0].l1)
}

/// Log-log slope of L1 against n, for reporting.
pub fn convergence_order(rows: &[ConvergenceRow]) -> Option<f64> {
    if rows.len() < 2 || rows.iter().any(|r| r.l1.is_nan() || r.l1 <= 0.0) {
        return None;
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.l1.ln()).collect();
    Some(-linear_fit(&xs, &ys).0)
}

pub fn dirac_compare(args: DiracArgs) -> Result<(), CliError> {
    let (cfg, extra) = RunConfig::resolve(args.common, &["resolutions"])?;
    let resolutions = match (args.resolutions, extra.get("resolutions")) {
        (Some(r), _) => r,
        (None, Some(v)) => v
            .as_array()
            .and_then(|a| {
                a.iter()
                    .map(|x| x.as_integer().and_then(|i| usize::try_from(i).ok()))
                    .collect::<Option<Vec<_>>>()
            })
            .ok_or_else(|| CliError::Config("'resolutions' must be a list of sizes".into()))?,
        (None, None) => vec![512, 1024, 2048, 4096],
    };
    let rows = convergence_table(&cfg, &resolutions)?;
    let mut csv = String::from(output::CONVERGENCE_HEADER);
    csv.push('\n');
    for r in &rows {
        writeln!(csv, "{},{}", r.n, num(r.l1)).unwrap();
        println!("n = {:>6}  steps = {:>6}  L1 = {:e}", r.n, r.steps, r.l1);
    }
    output::write_text(&cfg.output_dir, "convergence.csv", &csv)?;
    if let Some(order) = convergence_order(&rows) {
        println!("observed order {order:.3}");
    }
    let params = fib_params(&cfg)?.expect("checked in convergence_table");
    if params.basis.kind == BasisKind::VelocityZero {
        println!("velocity-zero point: L1 is residual spreading, not checked");
        return Ok(());
    }
    if convergence_passes(&rows) {
        println!("PASS: L1 decreases with n");
        Ok(())
    } else {
        Err(CliError::Verification(
            "L1 distance does not decrease monotonically".into(),
        ))
    }
}
