//! Subcommand definitions and their implementations.
//!
//! Command functions take an explicit output sink so tests can capture
//! bytes without spawning the binary; `main` wires them to stdout or the
//! `--out` file.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use revsup_core::{estimate, protocol, verify_against_analytic, SchemeParams};

use crate::record::{write_csv, write_json, RunRecord};

#[derive(Parser, Debug)]
#[command(
    name = "revsup",
    version,
    about = "Adjoint-cycle error suppression for reversible quantum algorithms: \
             exact simulation, closed forms, Monte Carlo sampling, and validation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulate one parameter point alongside its closed-form quantities
    Run(RunArgs),
    /// Simulate a grid of parameter points
    Sweep(SweepArgs),
    /// Error rate against cycle count at fixed register width (figure data)
    Fig3(Fig3Args),
    /// Error rate against register width at fixed noise (figure data)
    Fig4(Fig4Args),
    /// Expected whole-scheme repetitions against error rate (figure data)
    Fig5(Fig5Args),
    /// Monte Carlo trajectory estimate for one parameter point
    Mc(McArgs),
    /// Cross-validate simulation, closed forms, oracle, and sampler
    Validate(ValidateArgs),
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Write to this path instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Register width N
    #[arg(long)]
    pub n_qubits: u32,
    /// Depolarization probability
    #[arg(long)]
    pub p: f64,
    /// Total algorithm applications (one forward run plus k-1 adjoints)
    #[arg(long)]
    pub k: u32,
    /// Marked answer label
    #[arg(long, default_value_t = 1)]
    pub marked: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Register widths, comma-separated
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_qubits: Vec<u32>,
    /// Depolarization probabilities, comma-separated
    #[arg(long, value_delimiter = ',', required = true)]
    pub p: Vec<f64>,
    /// Application counts: comma-separated values and inclusive a..b ranges
    #[arg(long, value_delimiter = ',', required = true)]
    pub k: Vec<String>,
    /// Marked answer label
    #[arg(long, default_value_t = 1)]
    pub marked: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct Fig3Args {
    /// Register width N
    #[arg(long, default_value_t = 2)]
    pub n_qubits: u32,
    /// Largest application count (rows cover 1..=k-max)
    #[arg(long, default_value_t = 30)]
    pub k_max: u32,
    /// Depolarization probabilities, comma-separated
    #[arg(long, value_delimiter = ',',
          default_values_t = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])]
    pub p: Vec<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct Fig4Args {
    /// Depolarization probability
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Application counts, comma-separated
    #[arg(long, value_delimiter = ',', default_values_t = [1u32, 2, 3, 5])]
    pub k: Vec<u32>,
    /// Largest register width (rows cover 1..=n-max)
    #[arg(long, default_value_t = 12)]
    pub n_max: u32,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct Fig5Args {
    /// Register width N
    #[arg(long, default_value_t = 4)]
    pub n_qubits: u32,
    /// Largest application count (rows cover 1..=k-max)
    #[arg(long, default_value_t = 10)]
    pub k_max: u32,
    /// Depolarization probabilities, comma-separated
    #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.1, 0.2, 0.5])]
    pub p: Vec<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct McArgs {
    /// Register width N
    #[arg(long)]
    pub n_qubits: u32,
    /// Depolarization probability
    #[arg(long)]
    pub p: f64,
    /// Total algorithm applications
    #[arg(long)]
    pub k: u32,
    /// Marked answer label
    #[arg(long, default_value_t = 1)]
    pub marked: u64,
    /// Number of trajectories
    #[arg(long)]
    pub trials: u64,
    /// Base seed; every trial derives its stream from (seed, trial index)
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Largest register width for the density-matrix comparison grid
    #[arg(long, default_value_t = 3)]
    pub max_n: u32,
}

/// Command failure, carrying the process exit code.
#[derive(Debug)]
pub enum CmdError {
    /// Bad flag values or parameter combinations (exit 2).
    Config(String),
    /// A cross-check failed (exit 1).
    Validation(String),
    /// Output could not be written (exit 1).
    Io(std::io::Error),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Config(_) => 2,
            CmdError::Validation(_) | CmdError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CmdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmdError::Config(msg) => write!(f, "configuration error: {msg}"),
            CmdError::Validation(msg) => write!(f, "validation failure: {msg}"),
            CmdError::Io(err) => write!(f, "output error: {err}"),
        }
    }
}

impl From<std::io::Error> for CmdError {
    fn from(err: std::io::Error) -> Self {
        CmdError::Io(err)
    }
}

impl From<revsup_core::Error> for CmdError {
    fn from(err: revsup_core::Error) -> Self {
        CmdError::Config(err.to_string())
    }
}

fn emit(out: &mut dyn Write, format: Format, records: &[RunRecord]) -> Result<(), CmdError> {
    match format {
        Format::Csv => write_csv(out, records)?,
        Format::Json => write_json(out, records)?,
    }
    Ok(())
}

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> Result<(), CmdError> {
    let params = SchemeParams::new(args.n_qubits, args.p, args.k, args.marked)?;
    let record = RunRecord::collect(&params)?;
    emit(out, args.output.format, &[record])
}

/// Expand comma-separated values and inclusive `a..b` ranges.
pub fn expand_k_specs(specs: &[String]) -> Result<Vec<u32>, CmdError> {
    let mut out = Vec::new();
    for spec in specs {
        let spec = spec.trim();
        if let Some((low, high)) = spec.split_once("..") {
            let low: u32 = low
                .trim()
                .parse()
                .map_err(|_| CmdError::Config(format!("bad k range start in {spec:?}")))?;
            let high: u32 = high
                .trim()
                .parse()
                .map_err(|_| CmdError::Config(format!("bad k range end in {spec:?}")))?;
            if low > high {
                return Err(CmdError::Config(format!("empty k range {spec:?}")));
            }
            out.extend(low..=high);
        } else {
            out.push(
                spec.parse()
                    .map_err(|_| CmdError::Config(format!("bad k value {spec:?}")))?,
            );
        }
    }
    Ok(out)
}

pub fn cmd_sweep(
    args: &SweepArgs,
    out: &mut dyn Write,
    log: &mut dyn Write,
) -> Result<(), CmdError> {
    let ks = expand_k_specs(&args.k)?;
    let mut grid = Vec::new();
    for &n in &args.n_qubits {
        for &p in &args.p {
            for &k in &ks {
                match SchemeParams::new(n, p, k, args.marked) {
                    Ok(params) => grid.push(params),
                    // Record the bad point and keep sweeping.
                    Err(err) => writeln!(log, "skipping (N={n}, p={p}, k={k}): {err}")?,
                }
            }
        }
    }
    if grid.is_empty() {
        return Err(CmdError::Config("no valid grid points".into()));
    }
    let records = protocol::sweep(&grid)
        .iter()
        .map(RunRecord::from_result)
        .collect::<revsup_core::Result<Vec<_>>>()?;
    emit(out, args.output.format, &records)
}

/// Simulate a grid point and require simulation/closed-form agreement.
fn verified_record(params: &SchemeParams) -> Result<RunRecord, CmdError> {
    let result = protocol::run_scheme(params);
    let report = verify_against_analytic(&result)?;
    if !report.pass {
        return Err(CmdError::Validation(format!(
            "simulation and closed form disagree at (N={}, p={}, k={}): {report:?}",
            params.n_qubits(),
            params.p(),
            params.k()
        )));
    }
    RunRecord::from_result(&result).map_err(CmdError::from)
}

pub fn cmd_fig3(args: &Fig3Args, out: &mut dyn Write) -> Result<(), CmdError> {
    let mut records = Vec::new();
    for &p in &args.p {
        for k in 1..=args.k_max.max(1) {
            let params = SchemeParams::new(args.n_qubits, p, k, 1)?;
            records.push(verified_record(&params)?);
        }
    }
    emit(out, args.output.format, &records)
}

pub fn cmd_fig4(args: &Fig4Args, out: &mut dyn Write) -> Result<(), CmdError> {
    let mut records = Vec::new();
    for &k in &args.k {
        for n in 1..=args.n_max.max(1) {
            let params = SchemeParams::new(n, args.p, k, 1)?;
            records.push(verified_record(&params)?);
        }
    }
    emit(out, args.output.format, &records)
}

pub fn cmd_fig5(args: &Fig5Args, out: &mut dyn Write) -> Result<(), CmdError> {
    let mut records = Vec::new();
    for &p in &args.p {
        for k in 1..=args.k_max.max(1) {
            let params = SchemeParams::new(args.n_qubits, p, k, 1)?;
            records.push(verified_record(&params)?);
        }
    }
    emit(out, args.output.format, &records)
}

pub fn cmd_mc(args: &McArgs, out: &mut dyn Write) -> Result<(), CmdError> {
    let params = SchemeParams::new(args.n_qubits, args.p, args.k, args.marked)?;
    let sampled = estimate(&params, args.trials, args.seed)?;
    let record = RunRecord::collect(&params)?.with_mc(&sampled);
    emit(out, args.output.format, &[record])
}
