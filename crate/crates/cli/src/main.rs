//! `cvwitness`: parameter scans and invariant validation for the cumulant
//! entanglement witness.

mod config;
mod scan;
mod validate;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{FileConfig, Scan, ScanConfig};

const EXIT_NUMERIC: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "cvwitness",
    version,
    about = "Cumulant-based PPT entanglement witness scans"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// E2 and E4 of the two-mode cat-like state over alpha.
    CatScan(Overrides),
    /// E2, E4 and covariance-only E4 of the mirror state over Ω_m t.
    MirrorScan(Overrides),
    /// Normalised distances between the four Wigner centres over Ω_m t.
    DistanceScan(Overrides),
    /// E4 over a log grid of Λ at fixed Ω_m t.
    LambdaScan(Overrides),
    /// E4 and the component-wise lower bound over Ω_m t.
    BoundCheck(Overrides),
    /// Run the invariant suite and print a JSON report.
    Validate(Overrides),
}

/// Flags shared by every subcommand; each overrides the config file.
#[derive(Args, Debug, Default, Clone)]
pub struct Overrides {
    /// Flat TOML file with scan settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long = "t-min")]
    pub t_min: Option<f64>,
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    /// Number of points of the scanned grid.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long = "alpha-min")]
    pub alpha_min: Option<f64>,
    #[arg(long = "alpha-max")]
    pub alpha_max: Option<f64>,
    #[arg(long = "lambda-min")]
    pub lambda_min: Option<f64>,
    #[arg(long = "lambda-max")]
    pub lambda_max: Option<f64>,
    /// Ω_m t of the lambda scan.
    #[arg(long = "t-fixed")]
    pub t_fixed: Option<f64>,
    /// Detection tolerance on eigenvalues.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn open_output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (scan, flags) = match cli.command {
        Command::CatScan(o) => (Scan::Cat, o),
        Command::MirrorScan(o) => (Scan::Mirror, o),
        Command::DistanceScan(o) => (Scan::Distance, o),
        Command::LambdaScan(o) => (Scan::Lambda, o),
        Command::BoundCheck(o) => (Scan::Bound, o),
        Command::Validate(o) => (Scan::Validate, o),
    };
    let file = match flags.config.as_deref().map(FileConfig::load).transpose() {
        Ok(f) => f.unwrap_or_default(),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let config = match ScanConfig::resolve(scan, file, &flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let mut out = match open_output(config.output_path.as_deref()) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: cannot open output: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };

    let (written, clean) = if scan == Scan::Validate {
        let report = validate::run(&config);
        for c in report.checks.iter().filter(|c| !c.passed) {
            eprintln!("validation failed: {}", c.name);
        }
        let text = serde_json::to_string_pretty(&report).expect("report serialises");
        (writeln!(out, "{text}"), report.passed)
    } else {
        let table = scan::run(scan, &config);
        for (row, reason) in &table.failures {
            eprintln!("warning: row {row} failed, written as nan: {reason}");
        }
        (table.write_csv(&mut out), table.failures.is_empty())
    };
    if let Err(e) = written.and_then(|_| out.flush()) {
        eprintln!("error: writing output failed: {e}");
        return ExitCode::from(EXIT_NUMERIC);
    }
    if clean {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NUMERIC)
    }
}
