use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use revineq_core::harness::FieldChoice;

#[derive(Debug, Parser)]
#[command(
    name = "revineq",
    version,
    about = "Certified checks of reverse triangle and reverse Schwarz inequalities",
    args_override_self = true
)]
pub struct Cli {
    /// TOML file of flag values; command-line flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a random soundness campaign over the finite-dimensional theorems.
    Verify(VerifyArgs),
    /// Build an equality instance and re-verify it.
    Witness(WitnessArgs),
    /// Sweep the Schwarz-reverse ratio toward its limiting constant.
    Sharpness(SharpnessArgs),
    /// Integral reverses: a random campaign, or one instance read from CSV.
    Integral(IntegralArgs),
    /// Re-emit a saved JSON report and exit by its verdict.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Sampling flags shared by `verify` and `integral`.
#[derive(Debug, Args)]
pub struct SamplingArgs {
    /// Comma-separated theorem ids, or `all`.
    #[arg(long, default_value = "all")]
    pub theorems: String,

    #[arg(long, default_value_t = 1000)]
    pub samples: u64,

    /// Falls back to INEQ_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Dimension range `LO:HI` (or a single value).
    #[arg(long, value_parser = parse_usize_range)]
    pub dim: Option<(usize, usize)>,

    /// Vectors per instance, `LO:HI`.
    #[arg(long, value_parser = parse_usize_range)]
    pub n: Option<(usize, usize)>,

    #[arg(long, default_value = "both", value_parser = parse_field)]
    pub field: FieldChoice,

    /// Fixed radius (or ratio).
    #[arg(long)]
    pub rho: Option<f64>,

    /// Radius range `LO:HI`.
    #[arg(long, value_parser = parse_f64_pair)]
    pub rho_range: Option<(f64, f64)>,

    /// Fixed bracket `m:M`.
    #[arg(long, value_parser = parse_f64_pair)]
    pub bracket: Option<(f64, f64)>,

    #[arg(long)]
    pub tol_rel: Option<f64>,

    #[arg(long)]
    pub tol_abs: Option<f64>,

    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Exit 3 if any sample had an empty hypothesis region.
    #[arg(long)]
    pub strict_feasibility: bool,

    /// Test hook: tightens every bound by this amount.
    #[arg(long, hide = true, allow_hyphen_values = true)]
    pub fault_delta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub sampling: SamplingArgs,

    /// Orthonormal family size range `LO:HI`.
    #[arg(long, value_parser = parse_usize_range)]
    pub family_size: Option<(usize, usize)>,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[arg(long)]
    pub theorem: String,

    /// Number of vectors.
    #[arg(long, default_value_t = 2)]
    pub n: usize,

    /// Ambient dimension; defaults to the smallest that fits.
    #[arg(long)]
    pub dim: Option<usize>,

    #[arg(long, default_value = "real", value_parser = parse_field)]
    pub field: FieldChoice,

    /// Radius or ratio (T4.3: the radius r, up to sqrt 2).
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,

    #[arg(long, default_value = "1:4", value_parser = parse_f64_pair)]
    pub bracket: (f64, f64),

    /// Orthonormal family size for the family theorems.
    #[arg(long, default_value_t = 2)]
    pub family_size: usize,

    /// Component along the anchor (T3.1, T3.2).
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,

    /// Spread amplitude (T3.1, T3.2).
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,

    #[arg(long)]
    pub tol_rel: Option<f64>,

    #[arg(long)]
    pub tol_abs: Option<f64>,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SharpnessArgs {
    /// `HI:LO:log[:COUNT]` or `HI:LO:lin:COUNT`; log defaults to one point per decade.
    #[arg(long, default_value = "1e-1:1e-6:log")]
    pub r_sweep: String,

    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct IntegralArgs {
    #[command(flatten)]
    pub sampling: SamplingArgs,

    /// Quadrature size.
    #[arg(long)]
    pub nodes: Option<usize>,

    /// `uniform`, `linear`, `mixed` (campaign only) or `poly:c0,c1,...`.
    #[arg(long, default_value = "mixed")]
    pub weight: String,

    /// Divide the weight by its computed integral instead of rejecting it.
    #[arg(long)]
    pub renormalize: bool,

    /// Interval `a:b` for CSV input.
    #[arg(long, default_value = "0:1", value_parser = parse_f64_pair)]
    pub interval: (f64, f64),

    /// CSV of node values of the reference function g.
    #[arg(long, value_name = "PATH", requires = "f_csv")]
    pub g_csv: Option<PathBuf>,

    /// CSVs of node values of f_1, ..., f_n (comma-separated).
    #[arg(long, value_name = "PATHS", value_delimiter = ',', requires = "g_csv")]
    pub f_csv: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    pub path: PathBuf,

    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

fn parse_field(s: &str) -> Result<FieldChoice, String> {
    s.parse().map_err(|e: revineq_core::Error| e.to_string())
}

fn split_pair(s: &str) -> Result<(&str, &str), String> {
    match s.split_once(':') {
        Some((a, b)) => Ok((a, b)),
        None => Ok((s, s)),
    }
}

pub fn parse_usize_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = split_pair(s)?;
    let p = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    Ok((p(a)?, p(b)?))
}

pub fn parse_f64_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = split_pair(s)?;
    let p = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    Ok((p(a)?, p(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_accept_single_values() {
        assert_eq!(parse_usize_range("3"), Ok((3, 3)));
        assert_eq!(parse_usize_range("1:16"), Ok((1, 16)));
        assert_eq!(parse_f64_pair("1:4"), Ok((1.0, 4.0)));
        assert!(parse_usize_range("a:2").is_err());
    }

    #[test]
    fn later_flags_win() {
        let cli =
            Cli::try_parse_from(["revineq", "verify", "--samples", "5", "--samples", "7"]).unwrap();
        let Command::Verify(v) = cli.command else {
            panic!()
        };
        assert_eq!(v.sampling.samples, 7);
    }
}
