//! `tlv`: seeded sweeps and bound tables for cellular-automaton decoding.

mod commands;
mod grid;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use output::{hints_path, manifest_path, write_atomically, RunManifest, MANIFEST_VERSION};

#[derive(Parser, Debug)]
#[command(
    name = "tlv",
    version,
    about = "Monte Carlo sweeps and bounds for local cellular-automaton decoders"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand that produces a result file.
#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Random seed.
    #[arg(long, env = "TLV_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Result file; a `.manifest.json` is written next to it. Prints to
    /// stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Also emit a gnuplot script for the result.
    #[arg(long)]
    pub gnuplot_hints: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decoding failure probability of Bernoulli states under a step budget.
    Decode(commands::DecodeArgs),
    /// Time to the first majority flip under continuous noise.
    Ff(commands::FfArgs),
    /// First-failure times of the feed-forward decoding circuit.
    Circuit(commands::CircuitArgs),
    /// Closed-form constants and bounds.
    Bounds(commands::BoundsArgs),
    /// All fixed points of the TLV automaton on a short chain.
    FixedPoints(commands::FixedPointsArgs),
    /// Erosion times of single contiguous clusters.
    Eroder(commands::EroderArgs),
    /// Uncovered-site fractions of the sparse cluster decomposition.
    Sparse(commands::SparseArgs),
    /// Re-runs the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Args, Debug)]
struct ReplayArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Write here instead of the recorded output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A finished result, ready to be written.
pub struct Report {
    pub subcommand: &'static str,
    pub schema: &'static str,
    pub body: Vec<u8>,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub hints: Option<String>,
}

/// Bad input from the user; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn common_of(cmd: &Command) -> Option<&Common> {
    match cmd {
        Command::Decode(a) => Some(&a.common),
        Command::Ff(a) => Some(&a.common),
        Command::Circuit(a) => Some(&a.common),
        Command::Bounds(a) => Some(&a.common),
        Command::FixedPoints(a) => Some(&a.common),
        Command::Eroder(a) => Some(&a.common),
        Command::Sparse(a) => Some(&a.common),
        Command::Replay(_) => None,
    }
}

/// `argv` with `--seed` and `--out` replaced by the resolved values.
fn normalized_argv(argv: &[String], seed: u64, out: Option<&PathBuf>) -> Vec<String> {
    let mut kept = Vec::new();
    let mut skip = false;
    for a in argv {
        if skip {
            skip = false;
            continue;
        }
        if a == "--seed" || a == "--out" {
            skip = true;
            continue;
        }
        if a.starts_with("--seed=") || a.starts_with("--out=") {
            continue;
        }
        kept.push(a.clone());
    }
    kept.push("--seed".into());
    kept.push(seed.to_string());
    if let Some(o) = out {
        kept.push("--out".into());
        kept.push(o.display().to_string());
    }
    kept
}

fn run(argv: Vec<String>) -> Result<()> {
    let cli = Cli::try_parse_from(std::iter::once("tlv".to_string()).chain(argv.iter().cloned()))?;
    if let Command::Replay(r) = &cli.command {
        let text = std::fs::read_to_string(&r.manifest)
            .with_context(|| format!("cannot read manifest {}", r.manifest.display()))?;
        let m: RunManifest =
            serde_json::from_str(&text).map_err(|e| UsageError(format!("bad manifest: {e}")))?;
        if m.manifest_version != MANIFEST_VERSION {
            return Err(UsageError(format!(
                "unsupported manifest version {}",
                m.manifest_version
            ))
            .into());
        }
        let mut args = m.argv.clone();
        if let Some(out) = &r.out {
            args = normalized_argv(&args, m.seed.unwrap_or(0), Some(out));
        }
        return run(args);
    }
    let common = common_of(&cli.command).expect("not replay").clone();
    if let Some(n) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .ok();
    }
    let report = match &cli.command {
        Command::Decode(a) => commands::decode(a)?,
        Command::Ff(a) => commands::ff(a)?,
        Command::Circuit(a) => commands::circuit(a)?,
        Command::Bounds(a) => commands::bounds(a)?,
        Command::FixedPoints(a) => commands::fixed_points(a)?,
        Command::Eroder(a) => commands::eroder(a)?,
        Command::Sparse(a) => commands::sparse(a)?,
        Command::Replay(_) => unreachable!(),
    };
    match &common.out {
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&report.body)?;
            if let Some(h) = &report.hints {
                eprint!("{h}");
            }
        }
        Some(out) => {
            let mut outputs = vec![out.clone()];
            let mut files = vec![(out.clone(), report.body.clone())];
            if let Some(h) = &report.hints {
                files.push((hints_path(out), h.clone().into_bytes()));
                outputs.push(hints_path(out));
            }
            let manifest = RunManifest {
                manifest_version: MANIFEST_VERSION,
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                subcommand: report.subcommand.to_string(),
                schema: report.schema.to_string(),
                seed: report.seed,
                config: report.config.clone(),
                argv: normalized_argv(&argv, common.seed, Some(out)),
                outputs,
            };
            let mut json = serde_json::to_vec_pretty(&manifest)?;
            json.push(b'\n');
            files.push((manifest_path(out), json));
            write_atomically(&files)?;
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<clap::Error>() {
        return if e.use_stderr() { 2 } else { 0 };
    }
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<tlv_core::Error>() {
        Some(tlv_core::Error::Invariant(_)) => 3,
        Some(_) => 2,
        None => 1,
    }
}

fn main() -> ExitCode {
    match run(std::env::args().skip(1).collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            if let Some(e) = err.downcast_ref::<clap::Error>() {
                let _ = e.print();
            } else {
                eprintln!("error: {err:#}");
            }
            ExitCode::from(exit_code(&err))
        }
    }
}
