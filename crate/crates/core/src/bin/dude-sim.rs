use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hetnet_dude::blockage::beta_from_stats;
use hetnet_dude::geometry::{footprint_stats, read_footprints};
use hetnet_dude::runner::{format_sig6, parse_config, simulate_row, sweep, write_csv, ResultRow, SimConfig, SweepAxis};
use hetnet_dude::Error;

#[derive(Debug, Parser)]
#[command(name = "dude-sim", version, about = "Decoupled DL/UL association in hybrid mmWave/UHF HetNets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one Monte Carlo experiment and write a single CSV row.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `master_seed` from the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sweep one parameter and write one CSV row per value.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// `lambda_s` or `gamma`.
        #[arg(long)]
        param: String,
        /// Comma-separated values; defaults to the built-in grid for the axis.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Derive building statistics and the blockage rate from a footprint file.
    ExtractBlockage {
        #[arg(long)]
        footprints: PathBuf,
        /// Area of the mapped region in m².
        #[arg(long)]
        region_area: f64,
    },
}

enum Failure {
    Validation(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() { Failure::Validation(e.to_string()) } else { Failure::Io(e.to_string()) }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn load_config(path: &Path, seed: Option<u64>) -> Result<SimConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    let mut cfg = parse_config(&text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    Ok(cfg)
}

fn emit(rows: &[ResultRow], out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| io_failure(path, e))?;
            write_csv(rows, BufWriter::new(file))?;
        }
        None => write_csv(rows, io::stdout().lock())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate { config, out, seed } => {
            let cfg = load_config(&config, seed)?;
            emit(&[simulate_row(&cfg)?], out.as_deref())
        }
        Command::Sweep { config, param, values, out, seed } => {
            let cfg = load_config(&config, seed)?;
            let axis: SweepAxis = param.parse()?;
            let values = values.unwrap_or_else(|| axis.default_values(&cfg));
            emit(&sweep(&cfg, axis, &values)?, out.as_deref())
        }
        Command::ExtractBlockage { footprints, region_area } => {
            let file = File::open(&footprints).map_err(|e| io_failure(&footprints, e))?;
            let polys = read_footprints(io::BufReader::new(file))?;
            let stats = footprint_stats(&polys, region_area)?;
            let beta = beta_from_stats(&stats)?;
            let mut stdout = io::stdout().lock();
            let lines = [
                ("buildings", polys.len().to_string()),
                ("A", format_sig6(stats.mean_area())),
                ("kappa", format_sig6(stats.coverage_fraction())),
                ("rho_perim", format_sig6(stats.mean_perimeter())),
                ("beta", format_sig6(beta)),
            ];
            for (k, v) in lines {
                writeln!(stdout, "{k} = {v}").map_err(|e| Failure::Io(e.to_string()))?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("I/O error: {msg}");
            ExitCode::from(2)
        }
    }
}
