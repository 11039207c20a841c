// `!(x > 0.0)` is deliberate: NaN must fail the parameter checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use shear_spectrum::dispersion::{growth_lower_bound, solve_dispersion_with, DEFAULT_N_MAX, DEFAULT_TOL};
use shear_spectrum::orthopoly::negative_root;
use shear_spectrum::{evolve, oracle, DispersionPoint, FlowParams, JacobiCoefficients, Profile};

mod config;
mod output;

use config::{ConfigError, FileConfig, Format};
use output::{ConvergenceRow, DispersionRow};

const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;

/// Root bracket width for individual convergence-table entries.
const ROOT_TOL: f64 = 1e-16;
/// Allowed backsliding in the `r_n` column before it counts as an anomaly.
const MONOTONE_SLACK: f64 = 1e-14;
const VERIFY_LIMIT: f64 = 1e-3;
/// Growth rates below this are reported as 0 when the point is stable.
const STABLE_SNAP: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "shear-spectrum", version, about = "Growth rates of the modified Rayleigh equation with a cosine jet")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Growth rate over a (k, 1/Bu) grid.
    Dispersion(DispersionArgs),
    /// Negative root r_n of p_n for a list of truncation orders.
    Convergence(ConvergenceArgs),
    /// Compare polynomial, truncated-spectrum and time-evolution growth rates.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct DispersionArgs {
    /// TOML file with any of the flag names (underscores) as keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    k_start: Option<f64>,
    #[arg(long)]
    k_stop: Option<f64>,
    #[arg(long)]
    k_count: Option<usize>,
    /// Explicit wave numbers, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["k_start", "k_stop", "k_count"])]
    k_list: Option<Vec<f64>>,
    /// Inverse Burger number; repeat or comma-separate for several.
    #[arg(long, value_delimiter = ',')]
    inv_bu: Vec<f64>,
    /// Convergence tolerance on r_{2n} - r_n [default: 1e-10]
    #[arg(long)]
    tol: Option<f64>,
    /// Largest truncation order [default: 16384]
    #[arg(long)]
    n_max: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct ConvergenceArgs {
    #[arg(long)]
    k: f64,
    #[arg(long, default_value_t = 0.0)]
    inv_bu: f64,
    /// Ascending truncation orders, comma separated.
    #[arg(long = "n", value_delimiter = ',', default_values_t = [1usize, 2, 4, 8, 16, 32, 64, 128, 256])]
    n_list: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    k: f64,
    #[arg(long, default_value_t = 0.0)]
    inv_bu: f64,
    /// Fourier truncation N of the dense operator (modes -N..=N).
    #[arg(long = "truncation", short = 'N', default_value_t = 256)]
    truncation: usize,
    /// Fourier truncation for the time integration [default: max(N, 64)]
    #[arg(long)]
    evolve_truncation: Option<usize>,
    #[arg(long, default_value_t = 200.0)]
    t_final: f64,
    #[arg(long, default_value_t = 0.05)]
    dt: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    n_max: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Dispersion(args) => cmd_dispersion(args),
        Command::Convergence(args) => cmd_convergence(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn io_error(e: std::io::Error) -> ConfigError {
    ConfigError {
        message: format!("writing output: {e}"),
    }
}

fn cmd_dispersion(args: DispersionArgs) -> Result<u8, ConfigError> {
    let file = match &args.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let flags = FileConfig {
        k_start: args.k_start,
        k_stop: args.k_stop,
        k_count: args.k_count,
        k_list: args.k_list,
        inv_bu: Some(args.inv_bu),
        tol: args.tol,
        n_max: args.n_max,
        out: args.out,
        format: args.format,
    };
    let config = file.merge(flags)?;
    let grid = config.grid()?;

    let pool = {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = config::thread_limit()? {
            builder = builder.num_threads(n);
        }
        builder.build().map_err(|e| ConfigError {
            message: format!("thread pool: {e}"),
        })?
    };
    let rows: Vec<DispersionRow> = pool.install(|| {
        use rayon::prelude::*;
        grid.par_iter().map(|&p| dispersion_row(p, config.tol, config.n_max)).collect()
    });

    output::emit(&rows, config.format, config.output_path.as_deref()).map_err(io_error)?;
    let anomalies = rows.iter().filter(|r| r.error.is_some()).count();
    if anomalies > 0 {
        eprintln!("{anomalies} of {} points failed; see the error column", rows.len());
        return Ok(EXIT_NUMERICAL);
    }
    Ok(0)
}

fn dispersion_row(params: FlowParams, tol: f64, n_max: usize) -> DispersionRow {
    let mut row = DispersionRow {
        k: params.k(),
        inv_bu: params.inv_bu(),
        stable: None,
        r: None,
        growth_rate: None,
        n_used: None,
        lower_bound_at_n8: None,
        error: None,
    };
    let mut coeffs = JacobiCoefficients::new(params);
    let solved: shear_spectrum::Result<(DispersionPoint, Option<f64>)> = solve_dispersion_with(&mut coeffs, tol, n_max)
        .and_then(|point| {
            let bound = if point.stable { None } else { growth_lower_bound(&coeffs, 8)? };
            Ok((point, bound))
        });
    match solved {
        Ok((point, bound)) => {
            row.stable = Some(point.stable);
            row.r = point.r();
            row.growth_rate = Some(point.growth_rate);
            row.n_used = Some(point.n_used);
            row.lower_bound_at_n8 = bound;
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

fn cmd_convergence(args: ConvergenceArgs) -> Result<u8, ConfigError> {
    let params = FlowParams::new(args.k, args.inv_bu).map_err(|e| ConfigError::field("k/inv_bu", e))?;
    if args.n_list.is_empty() {
        return Err(ConfigError::field("n", "must not be empty"));
    }
    if args.n_list.contains(&0) {
        return Err(ConfigError::field("n", "orders must be >= 1"));
    }
    if args.n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ConfigError::field("n", "must be strictly ascending"));
    }

    let mut coeffs = JacobiCoefficients::new(params);
    coeffs.extend_to(*args.n_list.last().unwrap());
    let mut rows = Vec::with_capacity(args.n_list.len());
    let mut failure = None;
    for &n in &args.n_list {
        match negative_root(&coeffs, n, ROOT_TOL) {
            Ok(r) => rows.push(ConvergenceRow {
                n,
                r_n: r,
                growth_bound: r.map(|r| params.k() * r.sqrt()),
            }),
            Err(e) => {
                failure = Some(format!("n = {n}: {e}"));
                break;
            }
        }
    }
    output::emit(&rows, args.format, args.out.as_deref()).map_err(io_error)?;

    if let Some(msg) = failure {
        eprintln!("{msg}");
        return Ok(EXIT_NUMERICAL);
    }
    let present: Vec<(usize, f64)> = rows.iter().filter_map(|r| r.r_n.map(|v| (r.n, v))).collect();
    if let Some(w) = present.windows(2).find(|w| w[1].1 < w[0].1 - MONOTONE_SLACK) {
        eprintln!("r_n decreased from n = {} to n = {}: {} -> {}", w[0].0, w[1].0, w[0].1, w[1].1);
        return Ok(EXIT_NUMERICAL);
    }
    Ok(0)
}

fn relative_delta(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, ConfigError> {
    let params = FlowParams::new(args.k, args.inv_bu).map_err(|e| ConfigError::field("k/inv_bu", e))?;
    let evolve_n = args.evolve_truncation.unwrap_or(args.truncation.max(64));

    let mut coeffs = JacobiCoefficients::new(params);
    let polynomial = solve_dispersion_with(&mut coeffs, args.tol, args.n_max);
    let spectrum = oracle::truncated_spectrum(&Profile::cosine(), &params, args.truncation);
    let evolution = evolve::integrate(params, evolve_n, args.dt, args.t_final, args.seed);

    let stable = polynomial.as_ref().map(|p| p.stable).unwrap_or(false);
    let snap = |x: f64| if stable && x.abs() < STABLE_SNAP { 0.0 } else { x };

    let methods: [(&str, shear_spectrum::Result<f64>); 3] = [
        ("polynomial", polynomial.map(|p| p.growth_rate)),
        (
            "truncated-spectrum",
            spectrum.map(|s| snap(params.k() * s.max_imag().max(0.0))),
        ),
        ("time-evolution", evolution.map(|run| snap(run.fitted_rate))),
    ];

    println!("k = {}, inv_bu = {}, N = {}, evolve N = {evolve_n}, t_final = {}", args.k, args.inv_bu, args.truncation, args.t_final);
    println!("{:<20} {:>24}", "method", "growth_rate");
    let mut values = Vec::new();
    let mut code = 0;
    for (name, value) in &methods {
        match value {
            Ok(v) => {
                println!("{name:<20} {:>24}", output::fmt_float(*v));
                values.push((*name, *v));
            }
            Err(e) => {
                println!("{name:<20} {:>24}", "FAILED");
                eprintln!("{name}: {e}");
                code = EXIT_NUMERICAL;
            }
        }
    }

    println!();
    println!("{:<42} {:>24}", "pair", "relative_delta");
    let mut worst: Option<(String, f64)> = None;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            let pair = format!("{} vs {}", values[i].0, values[j].0);
            let d = relative_delta(values[i].1, values[j].1);
            println!("{pair:<42} {:>24}", output::fmt_float(d));
            if worst.as_ref().is_none_or(|(_, w)| d > *w) {
                worst = Some((pair, d));
            }
        }
    }
    if let Some((pair, d)) = worst {
        if d >= VERIFY_LIMIT {
            eprintln!("disagreement above {VERIFY_LIMIT}: {pair} ({d:.3e})");
            code = EXIT_NUMERICAL;
        }
    }
    Ok(code)
}
