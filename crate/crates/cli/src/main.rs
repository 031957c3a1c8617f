use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use betagerm::arith::IntPoly;
use betagerm::checks::verify;
use betagerm::report::{self, emit_svg, unresolved_report, Pipeline, RunConfig};
use betagerm::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::{Integer, Rational};
use serde::Serialize;
use serde_json::Value;

/// Beta-expansions, Parry polynomials, germs of curves and dynamical zeta
/// functions for an algebraic base β > 1.
#[derive(Parser, Debug)]
#[command(name = "betagerm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Greedy expansion of 1 in base β.
    Expand(Opts),
    /// Simple / eventually periodic / unresolved.
    Classify(Opts),
    /// Parry polynomial, its height and its factorization.
    Parry(Opts),
    /// Galois conjugates and beta-conjugates.
    Conjugates(Opts),
    /// The germ G(U, Z) and its defining identity.
    Germ(Opts),
    /// Newton polygon, Puiseux classes and the product formulas.
    Puiseux(Opts),
    /// Dynamical zeta function and fixed-point counts.
    Zeta(Opts),
    /// Run every cross-check; exits 1 if any fails.
    Verify(Opts),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CoeffOrder {
    High,
    Low,
}

#[derive(Args, Debug)]
struct Opts {
    /// Minimal polynomial of β, highest degree first: X^3 - X - 1 is
    /// `--minpoly 1,0,-1,-1`.
    #[arg(long, allow_hyphen_values = true, value_name = "c_d,...,c_0")]
    minpoly: String,
    /// Order of the --minpoly coefficients.
    #[arg(long, value_enum, default_value = "high")]
    coeff_order: CoeffOrder,
    /// Isolating interval for β, as decimals or fractions (`1.3,1.4`).
    /// Defaults to the largest real root.
    #[arg(long, allow_hyphen_values = true, value_name = "lo,hi")]
    root_interval: Option<String>,
    /// Steps of the greedy algorithm before giving up.
    #[arg(long, default_value_t = betagerm::dynamics::DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Truncation order N_U of the germ coefficients.
    #[arg(long, default_value_t = betagerm::germ::DEFAULT_ORDER)]
    order: usize,
    /// Highest power H of the reduction table.
    #[arg(long, default_value_t = betagerm::germ::DEFAULT_MAX_POWER)]
    max_power: usize,
    /// Working precision in bits.
    #[arg(long, default_value_t = betagerm::arith::roots::DEFAULT_BITS)]
    bits: u32,
    /// Largest period in the fixed-point table.
    #[arg(long, default_value_t = betagerm::zeta::DEFAULT_N_MAX)]
    n_max: usize,
    /// JSON output (the default).
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// CSV output: one `path,value` row per leaf of the JSON report.
    #[arg(long)]
    csv: bool,
    /// Write a scatter plot of the conjugates to this file.
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
    /// Seed for every random choice.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Polynomial root finder.
    #[arg(long, default_value = "aberth")]
    root_finder: String,
    /// Germ construction.
    #[arg(long, default_value = "closed-form")]
    germ_builder: String,
}

fn parse_rational(s: &str) -> anyhow::Result<Rational> {
    let s = s.trim();
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let num: Integer = digits.parse().with_context(|| format!("bad number '{s}'"))?;
        let den = Integer::from(Integer::u_pow_u(10, frac.len() as u32));
        let r = Rational::from((num, den));
        Ok(if neg { -r } else { r })
    } else {
        s.parse::<Rational>().map_err(|e| anyhow!("bad number '{s}': {e}"))
    }
}

fn config(o: &Opts) -> anyhow::Result<RunConfig> {
    let mut coeffs = o
        .minpoly
        .split(',')
        .map(|c| c.trim().parse::<Integer>().with_context(|| format!("bad coefficient '{c}' in --minpoly")))
        .collect::<anyhow::Result<Vec<Integer>>>()?;
    if coeffs.len() < 2 {
        bail!("--minpoly needs at least two coefficients, e.g. 1,-1,-1 for X^2 - X - 1");
    }
    if let CoeffOrder::High = o.coeff_order {
        coeffs.reverse();
    }
    let mut cfg = RunConfig::new(IntPoly::new(coeffs));
    if let Some(iv) = &o.root_interval {
        let (lo, hi) = iv
            .split_once(',')
            .ok_or_else(|| anyhow!("--root-interval expects lo,hi"))?;
        cfg.root_interval = Some((parse_rational(lo)?, parse_rational(hi)?));
    }
    cfg.max_iter = o.max_iter;
    cfg.order = o.order;
    cfg.max_power = o.max_power;
    cfg.bits = o.bits;
    cfg.n_max = o.n_max;
    cfg.seed = o.seed;
    cfg.finder = o.root_finder.clone();
    cfg.germ_builder = o.germ_builder.clone();
    Ok(cfg)
}

fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidInput(_) | Error::Reducible(_) | Error::NotGreaterThanOne(_) | Error::UnknownStrategy { .. }
    )
}

/// Flatten a JSON value into `path,value` rows.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(&join(k), v, out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| flatten(&join(&i.to_string()), v, out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn emit<T: Serialize>(report: &T, csv: bool) -> anyhow::Result<()> {
    let v = serde_json::to_value(report)?;
    let mut text = String::new();
    if csv {
        let mut rows = Vec::new();
        flatten("", &v, &mut rows);
        text.push_str("path,value\n");
        for (k, v) in rows {
            text.push_str(&format!("{},{}\n", csv_field(&k), csv_field(&v)));
        }
    } else {
        text = serde_json::to_string_pretty(&v)?;
        text.push('\n');
    }
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

enum Outcome {
    Ok,
    Failed,
}

fn run(name: &str, o: &Opts, pipeline: &Pipeline) -> Result<Outcome, Error> {
    let parry_only = !matches!(name, "expand" | "classify" | "verify");
    if parry_only && !pipeline.expansion.classification.is_parry() {
        let err = pipeline.parry().err().unwrap_or(Error::NotParryResolved(o.max_iter));
        let r = unresolved_report(pipeline, name, &err);
        eprintln!("warning: {}", r.warning);
        emit(&r, o.csv).map_err(|e| Error::InvalidInput(e.to_string()))?;
        return Ok(Outcome::Ok);
    }
    let out = |r: anyhow::Result<()>| r.map_err(|e| Error::InvalidInput(e.to_string()));
    let mut status = Outcome::Ok;
    match name {
        "expand" => out(emit(&report::expand_report(pipeline), o.csv))?,
        "classify" => out(emit(&report::classify_report(pipeline), o.csv))?,
        "parry" => out(emit(&report::parry_report(pipeline)?, o.csv))?,
        "conjugates" => out(emit(&report::conjugates_report(pipeline)?, o.csv))?,
        "germ" => out(emit(&report::germ_report(pipeline)?, o.csv))?,
        "puiseux" => out(emit(&report::puiseux_report(pipeline)?, o.csv))?,
        "zeta" => out(emit(&report::zeta_report(pipeline)?, o.csv))?,
        _ => {
            let r = verify(pipeline);
            if !r.pass {
                status = Outcome::Failed;
            }
            out(emit(&r, o.csv))?;
        }
    }
    if let Some(w) = pipeline.warning() {
        eprintln!("warning: {w}");
    }
    Ok(status)
}

fn write_svg(path: &PathBuf, pipeline: &Pipeline) -> anyhow::Result<()> {
    let cs = pipeline.conjugates().context("conjugates for --svg")?;
    std::fs::write(path, emit_svg(&[cs])).with_context(|| format!("writing {}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, o) = match &cli.command {
        Command::Expand(o) => ("expand", o),
        Command::Classify(o) => ("classify", o),
        Command::Parry(o) => ("parry", o),
        Command::Conjugates(o) => ("conjugates", o),
        Command::Germ(o) => ("germ", o),
        Command::Puiseux(o) => ("puiseux", o),
        Command::Zeta(o) => ("zeta", o),
        Command::Verify(o) => ("verify", o),
    };
    let cfg = match config(o) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let pipeline = match Pipeline::new(cfg) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if is_input_error(&e) { 2 } else { 1 });
        }
    };
    let code = match run(name, o, &pipeline) {
        Ok(Outcome::Ok) => 0,
        Ok(Outcome::Failed) => 1,
        Err(e) => {
            eprintln!("error in {name}: {e}");
            if is_input_error(&e) {
                2
            } else {
                1
            }
        }
    };
    if let Some(path) = &o.svg {
        if pipeline.expansion.classification.is_parry() {
            if let Err(e) = write_svg(path, &pipeline) {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
        } else {
            eprintln!("warning: no conjugate plot for an unresolved expansion");
        }
    }
    ExitCode::from(code)
}
