use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use latticetodd::emops::{Backend, DEFAULT_TOLERANCE};
use latticetodd_cli::commands::{self, Common, EmOptions};
use latticetodd_cli::error::CliError;
use latticetodd_cli::{load, ReportDocument};
use serde::Serialize;

/// Exact lattice-point sums over simple lattice polytopes.
///
/// Every command reads a JSON polytope document and prints a JSON report.
/// Exit codes: 0 success, 2 schema error, 3 geometry error, 4 resource cap,
/// 5 verification failure.
#[derive(Parser, Debug)]
#[command(name = "latticetodd", version)]
struct Cli {
    /// Seed for the generic-direction search.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Add wall-clock timings to the report (makes output non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Brion count and brute-force count.
    Count { file: PathBuf },
    /// Weighted count sum_E (1+y)^dim E |Relint E ∩ M|.
    WeightedCount { file: PathBuf },
    /// Ehrhart polynomial, with dilation and reciprocity checks.
    Ehrhart { file: PathBuf },
    /// |(1+y)P ∩ M| as a polynomial in 1+y.
    ChiY { file: PathBuf },
    /// Checks one Euler-Maclaurin identity.
    EmVerify(Box<EmArgs>),
    /// Runs every command on each JSON file of a directory.
    Report { dir: PathBuf },
}

#[derive(clap::Args, Debug)]
struct EmArgs {
    file: PathBuf,
    /// One of: embv, dual, facets-removed, face-closed, face-relint, weighted,
    /// weighted-renormalized, weighted-facets-removed, weighted-face,
    /// minkowski, guillemin, stokes, pick, vertex-spec, local.
    #[arg(long)]
    identity: String,
    /// Removed facet indices, comma separated.
    #[arg(long = "K", value_delimiter = ',')]
    removed: Vec<usize>,
    /// Face index, as listed in the report's face order.
    #[arg(long)]
    face: Option<usize>,
    #[arg(long, value_enum, default_value_t = BackendArg::Exact)]
    backend: BackendArg,
    /// Truncation order of the operator series (default n + deg f).
    #[arg(long)]
    order: Option<usize>,
    /// Relative tolerance of the complex backend.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    /// Sampled y, overriding the document.
    #[arg(long, allow_hyphen_values = true)]
    y: Option<String>,
    /// Vertex index for the local identity.
    #[arg(long)]
    vertex: Option<usize>,
    /// Direction z for the local identity, as "p/q,p/q,...".
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    /// Scale applied to z.
    #[arg(long, default_value = "1")]
    scale: String,
    /// Local kind: todd, dual, facets-removed or weighted.
    #[arg(long, default_value = "todd")]
    local_kind: String,
    /// Direction m0 for Stokes, comma separated (default all ones).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    m0: Option<Vec<i64>>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BackendArg {
    Exact,
    Complex,
}

fn print<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
}

fn single(
    file: &Path,
    common: &Common,
    run: impl FnOnce(&latticetodd_cli::Input, &str, &Common) -> Result<ReportDocument, CliError>,
) -> Result<i32, CliError> {
    let input = load(file)?;
    let r = run(&input, &file.display().to_string(), common)?;
    print(&r);
    Ok(commands::exit_code(&r))
}

fn em_options(a: &EmArgs) -> Result<EmOptions, CliError> {
    let parse = |s: &str| latticetodd::arith::parse_rat(s).map_err(|e| CliError::Schema(e.to_string()));
    Ok(EmOptions {
        identity: a.identity.clone(),
        removed: a.removed.clone(),
        face: a.face,
        backend: match a.backend {
            BackendArg::Exact => Backend::Exact,
            BackendArg::Complex => Backend::Complex,
        },
        order: a.order,
        tolerance: a.tol,
        y: a.y.as_deref().map(parse).transpose()?,
        vertex: a.vertex,
        z: a.z.as_deref().map(commands::parse_rat_list).transpose()?,
        scale: parse(&a.scale)?,
        local_kind: a.local_kind.clone(),
        m0: a.m0.clone(),
    })
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    let common = Common { seed: cli.seed, timing: cli.timing };
    match &cli.command {
        Command::Count { file } => single(file, &common, commands::count),
        Command::WeightedCount { file } => single(file, &common, commands::weighted_count),
        Command::Ehrhart { file } => single(file, &common, commands::ehrhart),
        Command::ChiY { file } => single(file, &common, commands::chi_y),
        Command::EmVerify(a) => {
            let o = em_options(a)?;
            single(&a.file, &common, |i, f, c| commands::em(i, f, &o, c))
        }
        Command::Report { dir } => {
            let r = commands::report(dir, &common)?;
            print(&r);
            Ok(commands::corpus_exit_code(&r))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("latticetodd: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
