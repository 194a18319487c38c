use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qubit_landscape::expr::parse_real;
use serde::{Deserialize, Serialize};

/// Control landscape of a qubit under ultrafast pulses.
///
/// Numeric flags accept decimals or multiples of π such as `pi/12` or
/// `2*pi/3`.
#[derive(Debug, Parser)]
#[command(name = "qland", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Exceptional control, critical time, canonical vectors and domain.
    Info(ProblemArgs),
    /// Objective for a control file.
    Evaluate(EvaluateArgs),
    /// Hessian kernel at f = 0 sampled on a (t1, t2) grid.
    Hessian(HessianArgs),
    /// Domain label with Φ and Ψ.
    Classify(ProblemArgs),
    /// All trap-free conditions and the resulting verdict.
    TrapFree(ProblemArgs),
    /// Certifies a saddle at f = 0 with bump-pair controls.
    ProbeSaddle(ProblemArgs),
    /// Dimension spanned by the interaction picture coupling.
    SpanRank(SpanRankArgs),
    /// Monte Carlo probability map over the (φ, ψ) grid.
    Scan(ScanArgs),
    /// Gradient ascent from a seeded random start.
    Optimize(OptimizeArgs),
    /// Writes a named problem file.
    Preset(PresetArgs),
    /// Re-runs the command recorded in a manifest.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Info(_) => "info",
            Command::Evaluate(_) => "evaluate",
            Command::Hessian(_) => "hessian",
            Command::Classify(_) => "classify",
            Command::TrapFree(_) => "trap-free",
            Command::ProbeSaddle(_) => "probe-saddle",
            Command::SpanRank(_) => "span-rank",
            Command::Scan(_) => "scan",
            Command::Optimize(_) => "optimize",
            Command::Preset(_) => "preset",
            Command::Replay(_) => "replay",
        }
    }

    pub fn output(&self) -> Option<&OutputArgs> {
        Some(match self {
            Command::Info(a) | Command::Classify(a) | Command::TrapFree(a) | Command::ProbeSaddle(a) => {
                &a.output
            }
            Command::Evaluate(a) => &a.problem.output,
            Command::Hessian(a) => &a.problem.output,
            Command::SpanRank(a) => &a.problem.output,
            Command::Scan(a) => &a.output,
            Command::Optimize(a) => &a.problem.output,
            Command::Preset(a) => &a.output,
            Command::Replay(_) => return None,
        })
    }

    pub fn output_mut(&mut self) -> Option<&mut OutputArgs> {
        Some(match self {
            Command::Info(a) | Command::Classify(a) | Command::TrapFree(a) | Command::ProbeSaddle(a) => {
                &mut a.output
            }
            Command::Evaluate(a) => &mut a.problem.output,
            Command::Hessian(a) => &mut a.problem.output,
            Command::SpanRank(a) => &mut a.problem.output,
            Command::Scan(a) => &mut a.output,
            Command::Optimize(a) => &mut a.problem.output,
            Command::Preset(a) => &mut a.output,
            Command::Replay(_) => return None,
        })
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Command::Scan(a) => Some(a.seed),
            Command::Optimize(a) => Some(a.seed),
            _ => None,
        }
    }
}

fn real(s: &str) -> Result<f64, String> {
    parse_real(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct OutputArgs {
    /// Output file; a `<out>.manifest.json` is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ProblemArgs {
    /// Problem file (`H0`, `V`, `rho0`, `A`, `T`).
    #[arg(long)]
    pub problem: PathBuf,
    /// Overrides the horizon of the problem file.
    #[arg(long = "T", value_parser = real)]
    pub horizon: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EvaluateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub problem: ProblemArgs,
    /// Control file (`breakpoints`, `amplitudes`).
    #[arg(long)]
    pub control: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct HessianArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub problem: ProblemArgs,
    /// Sample counts along t1 and t2, endpoints included.
    #[arg(long, default_value = "21x21")]
    pub grid: Grid,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SpanRankArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub problem: ProblemArgs,
    /// Control file; defaults to the exceptional control.
    #[arg(long)]
    pub control: Option<PathBuf>,
    /// Time samples per interval.
    #[arg(long, default_value_t = 16)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ScanArgs {
    #[arg(long = "T", value_parser = real, default_value = "pi/12")]
    pub horizon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "101x101")]
    pub grid: Grid,
    #[arg(long, default_value_t = 300)]
    pub samples: usize,
    #[arg(long, default_value_t = 100)]
    pub intervals: usize,
    /// Standard deviation of the random amplitudes.
    #[arg(long, value_parser = real, default_value = "1")]
    pub sigma: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct OptimizeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value_t = 20)]
    pub intervals: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Standard deviation of the random start amplitudes.
    #[arg(long, value_parser = real, default_value = "1")]
    pub sigma: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Stop once the gradient max-norm falls below this.
    #[arg(long, value_parser = real, default_value = "1e-10")]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PresetArgs {
    /// One of `spin-rotation`, `landau-zener`, `scan-default`.
    pub name: String,
    #[arg(long = "T", value_parser = real, default_value = "pi/12")]
    pub horizon: f64,
    /// Coupling `vx,vy` for `spin-rotation`.
    #[arg(long)]
    pub v: Option<Pair>,
    /// Coupling angle for `scan-default`.
    #[arg(long, value_parser = real)]
    pub phi: Option<f64>,
    /// Target angle for `scan-default`.
    #[arg(long, value_parser = real)]
    pub psi: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Writes the output here instead of the recorded path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// `<n>x<m>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub rows: usize,
    pub cols: usize,
}

impl FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("expected <n>x<m>, got `{s}`"))?;
        let n = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
        Ok(Grid { rows: n(a)?, cols: n(b)? })
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

/// `<x>,<y>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pair(pub f64, pub f64);

impl FromStr for Pair {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| format!("expected <x>,<y>, got `{s}`"))?;
        Ok(Pair(parse_real(a)?, parse_real(b)?))
    }
}
