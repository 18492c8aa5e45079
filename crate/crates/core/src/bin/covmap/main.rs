//! `covmap` command-line front end. Every subcommand reads a JSON payload and
//! writes a JSON report (or a flattened text rendering of it).

mod config;
mod input;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use covmap::classify::{self, ClassificationReport};
use covmap::covmap2::{self, CovariantCoefficients};
use covmap::linalg::superop_dims;
use covmap::multicopy::{self, MultiCopyCoefficients};
use covmap::norms::{self, CbNormResult};
use covmap::twirl;

use config::{CliConfig, Format, Overrides};
use input::{exit, CliError, Payload};

#[derive(Parser)]
#[command(
    name = "covmap",
    version,
    about = "Analyze unitarily covariant maps X ↦ Φ(X) on H⊗H and H^⊗m"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Hilbert-space dimension (checked against, or used to interpret, the input).
    #[arg(long, global = true)]
    d: Option<usize>,
    /// Number of Monte-Carlo samples.
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tol_abs: Option<f64>,
    #[arg(long, global = true)]
    tol_rel: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a map given by coefficients or by a dense superoperator.
    Classify { input: PathBuf },
    /// cb-norm of a trace-free map.
    Norm { input: PathBuf },
    /// Haar-twirl a superoperator onto the covariant family.
    Twirl { input: PathBuf },
    /// m-copy maps.
    #[command(subcommand)]
    Multicopy(MultiCommand),
}

#[derive(Subcommand)]
enum MultiCommand {
    /// Apply multicopy coefficients to a matrix, or realize the superoperator when --x is absent.
    Apply {
        input: PathBuf,
        /// Matrix file for X.
        #[arg(long)]
        x: Option<PathBuf>,
    },
    /// Recover m-copy coefficients from a superoperator (needs d ≥ m+1).
    Extract {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        m: usize,
    },
    /// Expand an operator on H^⊗m in the permutation operators.
    Fit {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        m: usize,
    },
}

#[derive(Serialize)]
struct Extraction {
    coefficients: MultiCopyCoefficients,
    residual: f64,
}

fn check_d(cfg: &CliConfig, actual: usize) -> Result<(), CliError> {
    match cfg.d {
        Some(d) if d != actual => Err(CliError::dimension(format!(
            "--d {d} does not match input dimension {actual}"
        ))),
        _ => Ok(()),
    }
}

/// Coefficients of a two-copy payload, extracting from a superoperator when needed.
fn two_copy(
    cfg: &CliConfig,
    payload: Payload,
) -> Result<(CovariantCoefficients, Option<f64>), CliError> {
    let (c, residual) = match payload {
        Payload::Coefficients(c) => (c, None),
        Payload::Superoperator(s) => {
            let (c, r) = covmap2::extract_or_fit(&s)?;
            (c, Some(r))
        }
        Payload::MultiCopy(mc) => (mc.to_two_copy()?, None),
    };
    check_d(cfg, c.d())?;
    Ok((c, residual))
}

fn cmd_classify(cfg: &CliConfig, input: &Path) -> Result<ClassificationReport, CliError> {
    let (c, residual) = two_copy(cfg, input::load(input)?)?;
    let mut report = classify::classify(&c, cfg.tolerance());
    report.extraction_residual = residual;
    Ok(report)
}

fn cmd_norm(cfg: &CliConfig, input: &Path) -> Result<CbNormResult, CliError> {
    let (c, _) = two_copy(cfg, input::load(input)?)?;
    Ok(norms::cb_norm(
        &c,
        cfg.samples,
        cfg.seed(),
        cfg.tolerance(),
    )?)
}

fn cmd_twirl(cfg: &CliConfig, input: &Path) -> Result<twirl::TwirlResult, CliError> {
    let superop = match input::load(input)? {
        Payload::Superoperator(s) => s,
        Payload::Coefficients(c) => covmap2::realize_superoperator(&c),
        Payload::MultiCopy(_) => {
            return Err(CliError::parse("twirl expects a two-copy superoperator"));
        }
    };
    let (d_in, d_out) = superop_dims(&superop)?;
    if d_out != d_in * d_in {
        return Err(CliError::dimension(format!(
            "superoperator of shape {:?} does not map d×d into d²×d²",
            superop.shape()
        )));
    }
    check_d(cfg, d_in)?;
    Ok(twirl::twirl(&superop, d_in, cfg.samples, cfg.seed())?)
}

/// Integer `k` with `k^p = n`.
fn int_root(n: usize, p: u32) -> Option<usize> {
    let r = (n as f64).powf(1.0 / p as f64).round() as usize;
    (r.checked_pow(p) == Some(n)).then_some(r)
}

fn cmd_multicopy(cfg: &CliConfig, cmd: &MultiCommand) -> Result<Value, CliError> {
    match cmd {
        MultiCommand::Apply { input, x } => {
            let mc = match input::load(input)? {
                Payload::MultiCopy(mc) => mc,
                Payload::Coefficients(c) => MultiCopyCoefficients::from_two_copy(&c),
                Payload::Superoperator(_) => {
                    return Err(CliError::parse("apply expects coefficients, got a matrix"));
                }
            };
            check_d(cfg, mc.d())?;
            match x {
                Some(path) => {
                    let x = input::load_matrix(path)?;
                    Ok(to_value(&multicopy::apply_multi(&mc, &x)?))
                }
                None => Ok(to_value(&multicopy::realize_multi(&mc))),
            }
        }
        MultiCommand::Extract { input, m } => {
            let superop = input::load_matrix(input)?;
            let d = match cfg.d {
                Some(d) => d,
                None => superop_dims(&superop)?.0,
            };
            let (coefficients, residual) = multicopy::extract_multi(&superop, *m, d)?;
            Ok(to_value(&Extraction {
                coefficients,
                residual,
            }))
        }
        MultiCommand::Fit { input, m } => {
            let t = input::load_matrix(input)?;
            let d = match cfg.d {
                Some(d) => d,
                None => int_root(t.rows(), *m as u32).ok_or_else(|| {
                    CliError::dimension(format!(
                        "operator with {} rows is not on an {m}-fold tensor power",
                        t.rows()
                    ))
                })?,
            };
            Ok(to_value(&multicopy::schur_weyl_fit(&t, *m, d)?))
        }
    }
}

fn to_value<T: Serialize>(report: &T) -> Value {
    serde_json::to_value(report).expect("reports serialize")
}

/// `path = value` lines, one per leaf. Complex pairs stay on one line.
fn render_text(value: &Value) -> String {
    fn is_complex(v: &Value) -> bool {
        matches!(v, Value::Array(a) if a.len() == 2 && a.iter().all(Value::is_number))
    }
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(map) => {
                for (k, v) in map {
                    let p = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&p, v, out);
                }
            }
            Value::Array(items) if !is_complex(v) => {
                for (i, v) in items.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), v, out);
                }
            }
            leaf => out.push_str(&format!("{prefix} = {leaf}\n")),
        }
    }
    let mut out = String::new();
    walk("", value, &mut out);
    out
}

fn emit(cfg: &CliConfig, value: &Value) -> Result<(), CliError> {
    let body = match cfg.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("value serializes");
            s.push('\n');
            s
        }
        Format::Text => render_text(value),
    };
    let io_err = |e: std::io::Error| CliError::new(exit::GENERIC, format!("write failed: {e}"));
    match &cfg.out {
        Some(path) => std::fs::write(path, body).map_err(|e| {
            CliError::new(
                exit::GENERIC,
                format!("cannot write {}: {e}", path.display()),
            )
        }),
        None => std::io::stdout().write_all(body.as_bytes()).map_err(io_err),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = cli.global;
    let cfg = CliConfig::load()
        .map_err(CliError::parse)?
        .apply(Overrides {
            tol_abs: g.tol_abs,
            tol_rel: g.tol_rel,
            d: g.d,
            samples: g.samples,
            seed: g.seed,
            out: g.out,
            format: g.format,
        });
    cfg.validate().map_err(CliError::parse)?;
    let value = match &cli.command {
        Command::Classify { input } => to_value(&cmd_classify(&cfg, input)?),
        Command::Norm { input } => to_value(&cmd_norm(&cfg, input)?),
        Command::Twirl { input } => to_value(&cmd_twirl(&cfg, input)?),
        Command::Multicopy(cmd) => cmd_multicopy(&cfg, cmd)?,
    };
    emit(&cfg, &value)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::from(exit::OK as u8),
        Err(e) => {
            eprintln!("covmap: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
