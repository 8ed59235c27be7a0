//! `bayespace` — simulate, smooth, transform, and analyze probability
//! density functions as elements of weighted Bayes Hilbert spaces.
//!
//! Exit codes: 0 on success (including `--help`/`--version`), 1 on usage
//! errors, 2 on data errors (unreadable/malformed inputs, failed analyses).

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use bayespace::measure::RefSpec;
use bayespace::sfpca::DEFAULT_HARMONIC_MULTIPLE;

#[derive(Parser)]
#[command(name = "bayespace", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic density sample as a density table
    Simulate(SimulateArgs),
    /// Run a weighted simplicial functional PCA of a density table
    Fpca(FpcaArgs),
    /// Smooth histogram counts into densities via penalized clr splines
    Smooth(SmoothArgs),
    /// Rank candidate reference measures by ANOVA score separation
    SelectReference(SelectReferenceArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Family {
    /// 81 truncated log-normals on [1, 10] over a 9×9 parameter design
    LognormalStudy,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Density family to generate
    #[arg(long, value_enum)]
    pub family: Family,
    /// Domain written as `a:b`
    #[arg(long, default_value = "1:10")]
    pub domain: String,
    /// Grid resolution
    #[arg(long, default_value_t = 2048)]
    pub n: usize,
    /// Output density table
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct FpcaArgs {
    /// Input density table, stored against the Lebesgue reference
    #[arg(long)]
    pub input: PathBuf,
    /// Analysis reference: lebesgue | uniform | exp:<delta> | mean
    #[arg(long, default_value = "lebesgue", value_parser = parse_refspec)]
    pub reference: RefSpec,
    /// Number of principal components to retain
    #[arg(long, default_value_t = 2)]
    pub components: usize,
    /// Harmonic display amplitude, in units of the component's √ρ
    #[arg(long, default_value_t = DEFAULT_HARMONIC_MULTIPLE)]
    pub harmonic_multiple: f64,
    /// Directory for result.txt, scores.csv, and the curve tables
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Args)]
pub struct SmoothArgs {
    /// Long-form histogram CSV: `id,lower,upper,count`
    #[arg(long)]
    pub input: PathBuf,
    /// Domain written as `a:b`
    #[arg(long)]
    pub domain: String,
    /// Comma-separated spline knot positions
    #[arg(long, value_delimiter = ',', required = true)]
    pub knots: Vec<f64>,
    /// Roughness penalty weight
    #[arg(long)]
    pub penalty: f64,
    /// Grid resolution of the output densities
    #[arg(long, default_value_t = 2048)]
    pub n: usize,
    /// Add half a count to every class so empty classes survive the log
    #[arg(long)]
    pub impute: bool,
    /// Output density table
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SelectReferenceArgs {
    /// Input density table, stored against the Lebesgue reference
    #[arg(long)]
    pub input: PathBuf,
    /// CSV mapping `id,group`
    #[arg(long)]
    pub groups: PathBuf,
    /// Comma-separated candidate reference specs
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_refspec)]
    pub candidates: Vec<RefSpec>,
    /// Output table; printed to stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_refspec(s: &str) -> Result<RefSpec, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Simulate(args) => commands::simulate(args),
        Command::Fpca(args) => commands::fpca(args),
        Command::Smooth(args) => commands::smooth(args),
        Command::SelectReference(args) => commands::select_reference(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
