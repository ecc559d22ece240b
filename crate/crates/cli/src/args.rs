use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "corrconv", version, about = "Correlation-conversion sweeps, claim reports and protocol sampling")]
pub struct Cli {
    /// Flat `key = value` file supplying defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate every correlation measure over a grid of phase-flip strengths.
    Sweep(SweepArgs),
    /// Check the tracked claims and write a verdict report.
    Verify(VerifyArgs),
    /// Sample flag outcomes for a batch of transmissions.
    Protocol(ProtocolArgs),
    /// Evaluate the qudit entanglement threshold.
    Qudit(QuditArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        <Self as ValueEnum>::from_str(s, true).ok()
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Text => "txt",
        }
    }
}

/// Accepts decimals and simple fractions such as `1/3`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| format!("invalid number `{s}`"))?;
            let b: f64 = b.trim().parse().map_err(|_| format!("invalid number `{s}`"))?;
            a / b
        }
        None => s.parse().map_err(|_| format!("invalid number `{s}`"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("non-finite number `{s}`"))
    }
}

#[derive(Debug, Args, Default)]
pub struct Common {
    /// Output file; stdout when absent and CORRCONV_OUT_DIR is unset.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_real)]
    pub p_min: Option<f64>,
    #[arg(long, value_parser = parse_real)]
    pub p_max: Option<f64>,
    #[arg(long, value_parser = parse_real)]
    pub p_step: Option<f64>,
    #[arg(long, value_parser = parse_real)]
    pub delta_in: Option<f64>,
    /// Input correlations; must lie on the family `(δ, −δ, 1 − 2δ)`.
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub c1: Option<f64>,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub c2: Option<f64>,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub c3: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_parser = parse_real)]
    pub p: Option<f64>,
    #[arg(long, value_parser = parse_real)]
    pub delta_in: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ProtocolArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_parser = parse_real)]
    pub p: Option<f64>,
    #[arg(long, value_parser = parse_real)]
    pub delta_in: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct QuditArgs {
    #[arg(long)]
    pub d: Option<usize>,
    /// Comma-separated Schmidt coefficients of the input pair, rescaled to
    /// unit norm.
    #[arg(long)]
    pub schmidt: Option<String>,
    /// Overrides `max(b1 b2, c1 c2)`.
    #[arg(long, value_parser = parse_real)]
    pub m: Option<f64>,
    #[arg(long, value_parser = parse_real)]
    pub p: Option<f64>,
    /// Leading Schmidt pair of the output state; defaults to the input pair.
    #[arg(long, value_parser = parse_real)]
    pub a1: Option<f64>,
    #[arg(long, value_parser = parse_real)]
    pub a2: Option<f64>,
    /// Flag-partition coefficients entering `M`.
    #[arg(long, value_parser = parse_real)]
    pub c1: Option<f64>,
    #[arg(long, value_parser = parse_real)]
    pub c2: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}
