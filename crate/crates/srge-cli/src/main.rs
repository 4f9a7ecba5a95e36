//! Sweep driver for the moment engines: field-theory charged moments,
//! exact chain determinants, side-by-side comparisons, resolved-entropy
//! series, and dense small-chain references, emitted as CSV or JSON.

mod config;
mod failure;
mod report;
mod states;

use clap::{Args, Parser, Subcommand};
use config::{parse_grid, parse_range, ConfigMap};
use failure::Failure;
use num_complex::Complex64;
use rayon::prelude::*;
use report::{polynomial_json, OutputFormat, Report};
use serde_json::json;
use srge::lattice::{diagonal_charged_moment, excess_moment, MomentumState};
use srge::moments1::{delta_z1_polynomial, f1_full, N1Request};
use srge::moments2::{delta_z2_polynomial, f2_full, N2Request};
use srge::oracle::{charged_moment_ed, srre_projected, DenseState};
use srge::resolved::{
    charge_distribution_from_moment, delta_s2_excited, prel_series, s2_compact, s2_series,
    MomentCoefficients,
};
use srge::statespec::parse_state;
use srge::types::{BosonState, Geometry, ModelParams};
use std::path::PathBuf;
use std::process::ExitCode;

const GROUND_SPEC: &str = "L=[];R=[];n=0;m=0";

#[derive(Parser)]
#[command(
    name = "srge",
    version,
    about = "Generalized charged moments and symmetry-resolved entropies \
             for excited states, with exact chain cross-checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// First charged moment of excited states in the continuum
    CftF1(CftF1Args),
    /// Second charged moment of excited states in the continuum
    CftF2(CftF2Args),
    /// Exact chain charged moments from determinants
    Lattice(LatticeArgs),
    /// Continuum vs chain excess-moment comparison table
    Compare(CompareArgs),
    /// Resolved entropies and subsystem charge distributions
    Resolved(ResolvedArgs),
    /// Dense small-chain reference computations
    Oracle(OracleArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Output format (default csv)
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Write the table to this file instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
    /// Key=value config file; command-line flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CommonArgs {
    fn resolve(&self, cfg: &ConfigMap) -> Result<(OutputFormat, Option<PathBuf>), Failure> {
        let format = match (self.format, cfg.string("format")) {
            (Some(f), _) => f,
            (None, None) => OutputFormat::Csv,
            (None, Some(raw)) => match raw.as_str() {
                "csv" => OutputFormat::Csv,
                "json" => OutputFormat::Json,
                other => {
                    return Err(Failure::Usage(format!(
                        "config key \"format\": expected csv or json, found {other:?}"
                    )))
                }
            },
        };
        let output = self
            .output
            .clone()
            .or_else(|| cfg.string("output").map(PathBuf::from));
        Ok((format, output))
    }
}

#[derive(Args)]
struct CftF1Args {
    /// Compactification parameter
    #[arg(long)]
    beta: Option<f64>,
    /// Interval fraction r in (0, 1)
    #[arg(long, conflicts_with = "r_grid")]
    r: Option<f64>,
    /// Interval fraction grid start:stop:step
    #[arg(long, value_name = "A:B:STEP")]
    r_grid: Option<String>,
    /// Flux value
    #[arg(long, conflicts_with = "theta_grid", allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Flux grid start:stop:step
    #[arg(long, value_name = "A:B:STEP", allow_hyphen_values = true)]
    theta_grid: Option<String>,
    /// Ket state spec, e.g. "L=[1,1];R=[];n=0;m=0"
    #[arg(long = "in")]
    in_spec: Option<String>,
    /// Bra state spec (default: same as the ket)
    #[arg(long = "out")]
    out_spec: Option<String>,
    /// Interval endpoint in units of the system size
    #[arg(long, allow_hyphen_values = true)]
    v_over_l: Option<f64>,
    /// Excess moment of the equal-weight level-two superposition
    #[arg(long)]
    level2_combo: bool,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CftF2Args {
    /// Compactification parameter
    #[arg(long)]
    beta: Option<f64>,
    /// Interval fraction r in (0, 1)
    #[arg(long, conflicts_with = "r_grid")]
    r: Option<f64>,
    /// Interval fraction grid start:stop:step
    #[arg(long, value_name = "A:B:STEP")]
    r_grid: Option<String>,
    /// Flux value
    #[arg(long, conflicts_with = "theta_grid", allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Flux grid start:stop:step
    #[arg(long, value_name = "A:B:STEP", allow_hyphen_values = true)]
    theta_grid: Option<String>,
    /// One state spec (diagonal) or four pipe-separated specs in replica
    /// trace order
    #[arg(long)]
    states: Option<String>,
    /// Interval endpoint in units of the system size
    #[arg(long, allow_hyphen_values = true)]
    v_over_l: Option<f64>,
    /// Excess moment of the equal-weight level-two superposition
    #[arg(long)]
    level2_combo: bool,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct LatticeArgs {
    /// Chain length (even; dictionary states need a multiple of four)
    #[arg(long = "N")]
    n_sites: Option<usize>,
    /// Subsystem size
    #[arg(long, conflicts_with = "ell_range")]
    ell: Option<usize>,
    /// Subsystem size range start:stop (inclusive)
    #[arg(long, value_name = "A:B")]
    ell_range: Option<String>,
    /// Flux value
    #[arg(long, conflicts_with = "theta_grid", allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Flux grid start:stop:step
    #[arg(long, value_name = "A:B:STEP", allow_hyphen_values = true)]
    theta_grid: Option<String>,
    /// State name (ground, particle-hole, vertex, level2-a, level2-b) or a
    /// doubled-momentum list like [-3,-1,1,5]
    #[arg(long)]
    state: Option<String>,
    /// Number of replicas n in Tr(rho^n e^{i theta Q})
    #[arg(long)]
    replicas: Option<u32>,
    /// Emit the excess over the half-filled sea instead of the raw moment
    #[arg(long)]
    excess: bool,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CompareArgs {
    /// Chain length (multiple of four)
    #[arg(long = "N")]
    n_sites: Option<usize>,
    /// Flux value
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Observable: level-two excess of the first or second moment
    #[arg(long, value_enum)]
    observable: Option<Observable>,
    /// Subsystem size range start:stop (default 0.15 N to 0.85 N)
    #[arg(long, value_name = "A:B")]
    ell_range: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Observable {
    /// Excess first moment of the level-two superposition
    Dz1,
    /// Excess second moment of the level-two superposition
    Dz2,
}

#[derive(Args)]
struct ResolvedArgs {
    /// Quantity to tabulate
    #[arg(long, value_enum)]
    observable: Option<ResolvedObservable>,
    /// State spec
    #[arg(long)]
    state: Option<String>,
    /// Compactification parameter
    #[arg(long)]
    beta: Option<f64>,
    /// Interval fraction feeding the moment coefficients
    #[arg(long)]
    r: Option<f64>,
    /// Logarithm of the chord length over the cutoff
    #[arg(long)]
    log_chord: Option<f64>,
    /// Rescaled charge grid start:stop:step (series observables)
    #[arg(long, value_name = "A:B:STEP", allow_hyphen_values = true)]
    q_grid: Option<String>,
    /// Integer charge window start:stop (distribution observable)
    #[arg(long, value_name = "A:B", allow_hyphen_values = true)]
    q_range: Option<String>,
    /// Degeneracy factor of the compactified tail estimate
    #[arg(long)]
    g_a: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum ResolvedObservable {
    /// Subsystem charge distribution P(q)
    Distribution,
    /// Relative charge probability of the excited state
    Prel,
    /// Resolved second Renyi entropy series
    S2,
    /// Excess resolved second Renyi entropy over the ground state
    DeltaS2,
    /// Compactified resolved second Renyi entropy estimate
    Compact,
}

#[derive(Args)]
struct OracleArgs {
    /// Chain length (at most 14)
    #[arg(long = "N")]
    n_sites: Option<usize>,
    /// Subsystem size
    #[arg(long)]
    ell: Option<usize>,
    /// Flux value
    #[arg(long, conflicts_with = "theta_grid", allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Flux grid start:stop:step
    #[arg(long, value_name = "A:B:STEP", allow_hyphen_values = true)]
    theta_grid: Option<String>,
    /// One, two, or four pipe-separated states (names or
    /// doubled-momentum lists)
    #[arg(long)]
    states: Option<String>,
    /// Replica count for a single diagonal state
    #[arg(long)]
    replicas: Option<u32>,
    /// Emit resolved entropies per charge sector instead of moments
    #[arg(long)]
    resolve: bool,
    #[command(flatten)]
    common: CommonArgs,
}

fn main() -> ExitCode {
    if let Err(failure) = run() {
        eprintln!("error: {failure}");
        return ExitCode::from(failure.exit_code());
    }
    ExitCode::SUCCESS
}

fn run() -> Result<(), Failure> {
    if let Ok(raw) = std::env::var("SRGE_THREADS") {
        let threads: usize = raw.parse().map_err(|e| {
            Failure::Usage(format!("SRGE_THREADS: cannot parse {raw:?}: {e}"))
        })?;
        if threads == 0 {
            return Err(Failure::Usage("SRGE_THREADS must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }
    let cli = Cli::parse();
    let (report, format, output) = match cli.command {
        Command::CftF1(args) => run_cft_f1(args)?,
        Command::CftF2(args) => run_cft_f2(args)?,
        Command::Lattice(args) => run_lattice(args)?,
        Command::Compare(args) => run_compare(args)?,
        Command::Resolved(args) => run_resolved(args)?,
        Command::Oracle(args) => run_oracle(args)?,
    };
    report.emit(format, output.as_ref())
}

type Outcome = (Report, OutputFormat, Option<PathBuf>);

fn resolve_values(
    single_cli: Option<f64>,
    grid_cli: Option<&str>,
    cfg: &ConfigMap,
    single_key: &str,
    grid_key: &str,
    default: f64,
) -> Result<Vec<f64>, Failure> {
    if let Some(g) = grid_cli {
        return parse_grid(g);
    }
    if let Some(v) = single_cli {
        return Ok(vec![v]);
    }
    if let Some(g) = cfg.string(grid_key) {
        return parse_grid(&g);
    }
    if let Some(v) = cfg.f64(single_key)? {
        return Ok(vec![v]);
    }
    Ok(vec![default])
}

fn parse_boson_state(spec: &str) -> Result<BosonState, Failure> {
    Ok(parse_state(spec)?)
}

fn lattice_failure(err: srge::Error) -> Failure {
    match err {
        srge::Error::BranchTracking { .. } => Failure::Domain(format!(
            "{err}; the flux path could not be resolved, reduce theta or split \
             the sweep into smaller flux values"
        )),
        other => other.into(),
    }
}

fn run_cft_f1(args: CftF1Args) -> Result<Outcome, Failure> {
    let cfg = ConfigMap::load(args.common.config.as_deref())?;
    cfg.ensure_known(&[
        "beta",
        "r",
        "r-grid",
        "theta",
        "theta-grid",
        "in",
        "out",
        "v-over-l",
        "level2-combo",
        "format",
        "output",
    ])?;
    let beta = args.beta.or(cfg.f64("beta")?).unwrap_or(1.0);
    let params = ModelParams::new(beta)?;
    let rs = resolve_values(args.r, args.r_grid.as_deref(), &cfg, "r", "r-grid", 0.5)?;
    let thetas = resolve_values(
        args.theta,
        args.theta_grid.as_deref(),
        &cfg,
        "theta",
        "theta-grid",
        0.5,
    )?;
    let v_over_l = args.v_over_l.or(cfg.f64("v-over-l")?);
    let combo = args.level2_combo || cfg.flag("level2-combo")?.unwrap_or(false);
    let in_spec = args
        .in_spec
        .or_else(|| cfg.string("in"))
        .unwrap_or_else(|| GROUND_SPEC.to_string());
    let out_spec = args
        .out_spec
        .or_else(|| cfg.string("out"))
        .unwrap_or_else(|| in_spec.clone());
    let (psi_in, psi_out) = if combo {
        (BosonState::ground(), BosonState::ground())
    } else {
        (parse_boson_state(&in_spec)?, parse_boson_state(&out_spec)?)
    };

    let mut rows = Vec::new();
    let mut coefficients = Vec::new();
    for &r in &rs {
        let poly = if combo {
            delta_z1_polynomial(&params, r)?
        } else {
            f1_full(&N1Request {
                params: params.clone(),
                ratio: r,
                psi_in: &psi_in,
                psi_out: &psi_out,
                v_over_l,
            })?
        };
        coefficients.push(polynomial_json("r", r, &poly));
        for &theta in &thetas {
            let v = poly.eval(theta);
            rows.push(vec![r, theta, v.re, v.im]);
        }
    }
    let (format, output) = args.common.resolve(&cfg)?;
    Ok((
        Report {
            command: "cft-f1",
            config: json!({
                "beta": beta,
                "r": rs,
                "theta": thetas,
                "in": in_spec,
                "out": out_spec,
                "v_over_l": v_over_l,
                "level2_combo": combo,
            }),
            columns: vec!["r", "theta", "re", "im"],
            rows,
            coefficients: Some(serde_json::Value::Array(coefficients)),
            summary: None,
        },
        format,
        output,
    ))
}

fn run_cft_f2(args: CftF2Args) -> Result<Outcome, Failure> {
    let cfg = ConfigMap::load(args.common.config.as_deref())?;
    cfg.ensure_known(&[
        "beta",
        "r",
        "r-grid",
        "theta",
        "theta-grid",
        "states",
        "v-over-l",
        "level2-combo",
        "format",
        "output",
    ])?;
    let beta = args.beta.or(cfg.f64("beta")?).unwrap_or(1.0);
    let params = ModelParams::new(beta)?;
    let rs = resolve_values(args.r, args.r_grid.as_deref(), &cfg, "r", "r-grid", 0.5)?;
    let thetas = resolve_values(
        args.theta,
        args.theta_grid.as_deref(),
        &cfg,
        "theta",
        "theta-grid",
        0.5,
    )?;
    let v_over_l = args.v_over_l.or(cfg.f64("v-over-l")?);
    let combo = args.level2_combo || cfg.flag("level2-combo")?.unwrap_or(false);
    let states_raw = args
        .states
        .or_else(|| cfg.string("states"))
        .unwrap_or_else(|| GROUND_SPEC.to_string());
    let specs = states::split_states(&states_raw);
    let parsed: Vec<BosonState> = if combo {
        Vec::new()
    } else {
        match specs.len() {
            1 => vec![parse_boson_state(&specs[0])?; 4],
            4 => specs
                .iter()
                .map(|s| parse_boson_state(s))
                .collect::<Result<_, _>>()?,
            other => {
                return Err(Failure::Usage(format!(
                    "--states takes one spec (diagonal) or four, found {other}"
                )))
            }
        }
    };

    let mut rows = Vec::new();
    let mut coefficients = Vec::new();
    for &r in &rs {
        let poly = if combo {
            delta_z2_polynomial(&params, r)?
        } else {
            f2_full(&N2Request {
                params: params.clone(),
                ratio: r,
                states: [&parsed[0], &parsed[1], &parsed[2], &parsed[3]],
                v_over_l,
            })?
        };
        coefficients.push(polynomial_json("r", r, &poly));
        for &theta in &thetas {
            let v = poly.eval(theta);
            rows.push(vec![r, theta, v.re, v.im]);
        }
    }
    let (format, output) = args.common.resolve(&cfg)?;
    Ok((
        Report {
            command: "cft-f2",
            config: json!({
                "beta": beta,
                "r": rs,
                "theta": thetas,
                "states": specs,
                "v_over_l": v_over_l,
                "level2_combo": combo,
            }),
            columns: vec!["r", "theta", "re", "im"],
            rows,
            coefficients: Some(serde_json::Value::Array(coefficients)),
            summary: None,
        },
        format,
        output,
    ))
}

fn run_lattice(args: LatticeArgs) -> Result<Outcome, Failure> {
    let cfg = ConfigMap::load(args.common.config.as_deref())?;
    cfg.ensure_known(&[
        "N",
        "ell",
        "ell-range",
        "theta",
        "theta-grid",
        "state",
        "replicas",
        "excess",
        "format",
        "output",
    ])?;
    let n_sites = args.n_sites.or(cfg.usize("N")?).unwrap_or(64);
    let ells: Vec<usize> = if let Some(range) = args
        .ell_range
        .as_deref()
        .map(str::to_string)
        .or_else(|| cfg.string("ell-range"))
    {
        let (lo, hi) = parse_range(&range)?;
        (lo..=hi).collect()
    } else if let Some(ell) = args.ell.or(cfg.usize("ell")?) {
        vec![ell]
    } else {
        vec![n_sites / 2]
    };
    let thetas = resolve_values(
        args.theta,
        args.theta_grid.as_deref(),
        &cfg,
        "theta",
        "theta-grid",
        0.5,
    )?;
    let replicas = args.replicas.or(cfg.u32("replicas")?).unwrap_or(1);
    let excess = args.excess || cfg.flag("excess")?.unwrap_or(false);
    let state_name = args
        .state
        .or_else(|| cfg.string("state"))
        .unwrap_or_else(|| "ground".to_string());
    let state = states::lattice_state(&state_name, n_sites)?;

    let mut jobs: Vec<(usize, f64)> = Vec::new();
    for &ell in &ells {
        for &theta in &thetas {
            jobs.push((ell, theta));
        }
    }
    let mut rows = jobs
        .par_iter()
        .map(|&(ell, theta)| -> Result<Vec<f64>, Failure> {
            let v = if excess {
                excess_moment(&state, ell, theta, replicas).map_err(lattice_failure)?
            } else {
                diagonal_charged_moment(&state, ell, theta, replicas)
                    .map_err(lattice_failure)?
            };
            Ok(vec![
                n_sites as f64,
                ell as f64,
                theta,
                f64::from(replicas),
                v.re,
                v.im,
            ])
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    rows.sort_by(|a, b| a.partial_cmp(b).expect("finite sort keys"));

    let (format, output) = args.common.resolve(&cfg)?;
    Ok((
        Report {
            command: "lattice",
            config: json!({
                "N": n_sites,
                "ell": ells,
                "theta": thetas,
                "state": state_name,
                "replicas": replicas,
                "excess": excess,
            }),
            columns: vec!["N", "ell", "theta", "n", "re", "im"],
            rows,
            coefficients: None,
            summary: None,
        },
        format,
        output,
    ))
}

fn run_compare(args: CompareArgs) -> Result<Outcome, Failure> {
    let cfg = ConfigMap::load(args.common.config.as_deref())?;
    cfg.ensure_known(&["N", "theta", "observable", "ell-range", "format", "output"])?;
    let n_sites = args.n_sites.or(cfg.usize("N")?).unwrap_or(64);
    let theta = args.theta.or(cfg.f64("theta")?).unwrap_or(0.5);
    let observable = match (args.observable, cfg.string("observable")) {
        (Some(o), _) => o,
        (None, None) => Observable::Dz1,
        (None, Some(raw)) => match raw.as_str() {
            "dz1" => Observable::Dz1,
            "dz2" => Observable::Dz2,
            other => {
                return Err(Failure::Usage(format!(
                    "config key \"observable\": expected dz1 or dz2, found {other:?}"
                )))
            }
        },
    };
    let (lo, hi) = if let Some(range) = args
        .ell_range
        .as_deref()
        .map(str::to_string)
        .or_else(|| cfg.string("ell-range"))
    {
        parse_range(&range)?
    } else {
        (
            (0.15 * n_sites as f64).ceil() as usize,
            (0.85 * n_sites as f64).floor() as usize,
        )
    };
    if lo < 1 || hi + 1 >= n_sites {
        return Err(Failure::Usage(format!(
            "ell range {lo}:{hi} leaves no room for the parity partner on {n_sites} sites"
        )));
    }
    let replicas = match observable {
        Observable::Dz1 => 1,
        Observable::Dz2 => 2,
    };
    let params = ModelParams::new(1.0)?;
    // The two degenerate realizations share real parts and carry conjugate
    // imaginary parts; the first one is the one whose imaginary part
    // matches the continuum combination.
    let state_a = MomentumState::level2_a(n_sites)?;

    // Raw lattice values at every cut in [lo, hi + 1].
    let raws = (lo..=hi + 1)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&ell| -> Result<Complex64, Failure> {
            excess_moment(&state_a, ell, theta, replicas).map_err(lattice_failure)
        })
        .collect::<Result<Vec<_>, Failure>>()?;

    let cfts = (lo..=hi)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&ell| -> Result<Complex64, Failure> {
            let r = (ell as f64 + 0.5) / n_sites as f64;
            let poly = match observable {
                Observable::Dz1 => delta_z1_polynomial(&params, r)?,
                Observable::Dz2 => delta_z2_polynomial(&params, r)?,
            };
            Ok(poly.eval(theta))
        })
        .collect::<Result<Vec<_>, Failure>>()?;

    let mut rows = Vec::new();
    let mut devs = Vec::new();
    let mut gaps = Vec::new();
    for (idx, ell) in (lo..=hi).enumerate() {
        let r = (ell as f64 + 0.5) / n_sites as f64;
        let raw = raws[idx];
        let avg = (raws[idx] + raws[idx + 1]) / 2.0;
        let cft = cfts[idx];
        let abs_dev = (avg - cft).norm();
        let rel_dev = abs_dev / cft.norm().max(1e-15);
        devs.push(abs_dev);
        gaps.push((raws[idx] - raws[idx + 1]).norm());
        rows.push(vec![
            r, theta, cft.re, cft.im, raw.re, raw.im, avg.re, avg.im, abs_dev, rel_dev,
        ]);
    }
    let max_dev = devs.iter().copied().fold(0.0_f64, f64::max);
    let mean_dev = devs.iter().sum::<f64>() / devs.len().max(1) as f64;
    let osc_amp = 0.5 * gaps.iter().sum::<f64>() / gaps.len().max(1) as f64;

    let (format, output) = args.common.resolve(&cfg)?;
    Ok((
        Report {
            command: "compare",
            config: json!({
                "N": n_sites,
                "theta": theta,
                "observable": match observable { Observable::Dz1 => "dz1", Observable::Dz2 => "dz2" },
                "ell_range": [lo, hi],
            }),
            columns: vec![
                "r", "theta", "cft_re", "cft_im", "lat_re", "lat_im", "avg_re", "avg_im",
                "abs_dev", "rel_dev",
            ],
            rows,
            coefficients: None,
            summary: Some(json!({
                "max_abs_dev": max_dev,
                "mean_abs_dev": mean_dev,
                "osc_amp": osc_amp,
            })),
        },
        format,
        output,
    ))
}

fn run_resolved(args: ResolvedArgs) -> Result<Outcome, Failure> {
    let cfg = ConfigMap::load(args.common.config.as_deref())?;
    cfg.ensure_known(&[
        "observable",
        "state",
        "beta",
        "r",
        "log-chord",
        "q-grid",
        "q-range",
        "g-a",
        "format",
        "output",
    ])?;
    let observable = match (args.observable, cfg.string("observable")) {
        (Some(o), _) => o,
        (None, None) => ResolvedObservable::Distribution,
        (None, Some(raw)) => match raw.as_str() {
            "distribution" => ResolvedObservable::Distribution,
            "prel" => ResolvedObservable::Prel,
            "s2" => ResolvedObservable::S2,
            "delta-s2" => ResolvedObservable::DeltaS2,
            "compact" => ResolvedObservable::Compact,
            other => {
                return Err(Failure::Usage(format!(
                    "config key \"observable\": expected distribution, prel, s2, \
                     delta-s2, or compact; found {other:?}"
                )))
            }
        },
    };
    let beta = args.beta.or(cfg.f64("beta")?).unwrap_or(1.0);
    let params = ModelParams::new(beta)?;
    let r = args.r.or(cfg.f64("r")?).unwrap_or(0.5);
    let log_chord = args.log_chord.or(cfg.f64("log-chord")?).unwrap_or(20.0);
    let geometry = Geometry::from_log_chord(log_chord)?;
    let g_a = args.g_a.or(cfg.f64("g-a")?).unwrap_or(1.0);
    let spec = args
        .state
        .or_else(|| cfg.string("state"))
        .unwrap_or_else(|| GROUND_SPEC.to_string());
    let state = parse_boson_state(&spec)?;

    let first = f1_full(&N1Request {
        params: params.clone(),
        ratio: r,
        psi_in: &state,
        psi_out: &state,
        v_over_l: None,
    })?;
    // Series observables need even moments; the distribution observable
    // goes through the exact Gaussian-moment Fourier transform and handles
    // every power, so point there on parity failures.
    let resolve_even = |poly: &srge::types::ModulatedPolynomial| -> Result<MomentCoefficients, Failure> {
        MomentCoefficients::from_polynomial_shifted(poly, &params).map_err(|e| match e {
            srge::Error::ParityViolation { .. } => Failure::Domain(format!(
                "{e}; series observables need an even moment polynomial, \
                 rerun with --observable distribution (numeric Fourier fallback)"
            )),
            other => other.into(),
        })
    };

    let q_reals: Vec<f64> = if let Some(g) = args
        .q_grid
        .as_deref()
        .map(str::to_string)
        .or_else(|| cfg.string("q-grid"))
    {
        parse_grid(&g)?
    } else {
        parse_grid("-3:3:0.5")?
    };

    let mut coefficients = vec![polynomial_json("r", r, &first)];
    let rows: Vec<Vec<f64>> = match observable {
        ResolvedObservable::Distribution => {
            let window = if let Some(range) = args
                .q_range
                .as_deref()
                .map(str::to_string)
                .or_else(|| cfg.string("q-range"))
            {
                let Some((a, b)) = range.split_once(':') else {
                    return Err(Failure::Usage(format!(
                        "range {range:?}: expected start:stop"
                    )));
                };
                let lo: i64 = a.trim().parse().map_err(|e| {
                    Failure::Usage(format!("range {range:?}: {e}"))
                })?;
                let hi: i64 = b.trim().parse().map_err(|e| {
                    Failure::Usage(format!("range {range:?}: {e}"))
                })?;
                if hi < lo {
                    return Err(Failure::Usage(format!("range {range:?}: stop below start")));
                }
                lo..=hi
            } else {
                -6..=6
            };
            let dist = charge_distribution_from_moment(&first, &params, &geometry, window)?;
            dist.charges
                .iter()
                .zip(&dist.probabilities)
                .map(|(&q, &p)| vec![q as f64, p])
                .collect()
        }
        ResolvedObservable::Prel => {
            let h = resolve_even(&first)?;
            q_reals
                .iter()
                .map(|&q| Ok(vec![q, prel_series(h.f2, h.f4, &params, &geometry, q)?]))
                .collect::<Result<_, Failure>>()?
        }
        ResolvedObservable::S2 | ResolvedObservable::DeltaS2 | ResolvedObservable::Compact => {
            let h = resolve_even(&first)?;
            let second = f2_full(&N2Request {
                params: params.clone(),
                ratio: r,
                states: [&state, &state, &state, &state],
                v_over_l: None,
            })?;
            let f = resolve_even(&second)?;
            coefficients.push(polynomial_json("r", r, &second));
            q_reals
                .iter()
                .map(|&q| {
                    let value = match observable {
                        ResolvedObservable::S2 => {
                            s2_series(f.f0, f.f2, f.f4, &params, &geometry, q)?
                        }
                        ResolvedObservable::DeltaS2 => {
                            delta_s2_excited(f.f0, f.f2, f.f4, h.f2, h.f4, &params, &geometry, q)?
                        }
                        _ => s2_compact(f.f0, f.f2, h.f2, g_a, &params, &geometry, q)?,
                    };
                    Ok(vec![q, value])
                })
                .collect::<Result<_, Failure>>()?
        }
    };

    let (format, output) = args.common.resolve(&cfg)?;
    Ok((
        Report {
            command: "resolved",
            config: json!({
                "observable": format!("{observable:?}"),
                "state": spec,
                "beta": beta,
                "r": r,
                "log_chord": log_chord,
                "g_a": g_a,
                "truncation": "second order in pi^2 over the log chord",
            }),
            columns: vec!["q", "value"],
            rows,
            coefficients: Some(serde_json::Value::Array(coefficients)),
            summary: None,
        },
        format,
        output,
    ))
}

fn run_oracle(args: OracleArgs) -> Result<Outcome, Failure> {
    let cfg = ConfigMap::load(args.common.config.as_deref())?;
    cfg.ensure_known(&[
        "N",
        "ell",
        "theta",
        "theta-grid",
        "states",
        "replicas",
        "resolve",
        "format",
        "output",
    ])?;
    let n_sites = args.n_sites.or(cfg.usize("N")?).unwrap_or(8);
    let ell = args.ell.or(cfg.usize("ell")?).unwrap_or(n_sites / 2);
    let thetas = resolve_values(
        args.theta,
        args.theta_grid.as_deref(),
        &cfg,
        "theta",
        "theta-grid",
        0.0,
    )?;
    let replicas = args.replicas.or(cfg.u32("replicas")?).unwrap_or(1);
    let resolve = args.resolve || cfg.flag("resolve")?.unwrap_or(false);
    let states_raw = args
        .states
        .or_else(|| cfg.string("states"))
        .unwrap_or_else(|| "ground".to_string());
    let names = states::split_states(&states_raw);
    let momentum_states: Vec<MomentumState> = names
        .iter()
        .map(|n| states::lattice_state(n, n_sites))
        .collect::<Result<_, _>>()?;
    let dense: Vec<DenseState> = momentum_states
        .iter()
        .map(|s| s.to_dense().map_err(Failure::from))
        .collect::<Result<_, _>>()?;
    let trace_list: Vec<&DenseState> = match dense.len() {
        1 => std::iter::repeat_n(&dense[0], 2 * replicas as usize).collect(),
        2 | 4 => dense.iter().collect(),
        other => {
            return Err(Failure::Usage(format!(
                "--states takes one, two, or four states, found {other}"
            )))
        }
    };
    let n_replicas = trace_list.len() / 2;

    let (columns, rows): (Vec<&'static str>, Vec<Vec<f64>>) = if resolve {
        let ground = MomentumState::ground(n_sites)?.to_dense()?;
        let mut rows = Vec::new();
        for q in 0..=ell {
            match srre_projected(&trace_list, &ground, ell, q) {
                Ok(v) => rows.push(vec![q as f64, v.re, v.im]),
                Err(srge::Error::EmptySector { .. }) => continue,
                Err(e) => return Err(e.into()),
            }
        }
        (vec!["q", "re", "im"], rows)
    } else {
        let mut rows = Vec::new();
        for &theta in &thetas {
            let v = charged_moment_ed(&trace_list, ell, theta)?;
            rows.push(vec![
                n_sites as f64,
                ell as f64,
                theta,
                n_replicas as f64,
                v.re,
                v.im,
            ]);
        }
        (vec!["N", "ell", "theta", "n", "re", "im"], rows)
    };

    let (format, output) = args.common.resolve(&cfg)?;
    Ok((
        Report {
            command: "oracle",
            config: json!({
                "N": n_sites,
                "ell": ell,
                "theta": thetas,
                "states": names,
                "replicas": n_replicas,
                "resolve": resolve,
            }),
            columns,
            rows,
            coefficients: None,
            summary: None,
        },
        format,
        output,
    ))
}
