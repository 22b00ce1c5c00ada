use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use htopt::experiment::{sweep, SweepReport};
use htopt::io;
use htopt::suites::Suite;
use htopt::{run_experiment, ExperimentConfig, HarnessError};

#[derive(Parser)]
#[command(name = "htopt", version, about = "Heavy-tailed nonconvex optimization experiments")]
struct Cli {
    /// Base seed; overrides HTOPT_SEED and the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the config file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; `verify` defaults to json, everything else to csv.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (T, seed) pair and write the traces.
    Run { config: PathBuf },
    /// Run and summarize per budget, with a log-log rate fit.
    Sweep { config: PathBuf },
    /// Fit log(error) against log(T) from a CSV of (T, error) rows.
    RateFit { input: PathBuf },
    /// Run the built-in verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
    /// Sweep and write traces, summary.csv and report.json into a directory.
    Export { config: PathBuf, dir: PathBuf },
}

fn load(path: &Path, cli: &Cli) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Ok(s) = std::env::var("HTOPT_SEED") {
        cfg.base_seed = s.trim().parse().map_err(|_| HarnessError::config(format!("HTOPT_SEED='{s}' is not an integer")))?;
    }
    if let Some(s) = cli.seed {
        cfg.base_seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.output = Some(o.clone());
    }
    Ok(cfg)
}

fn print_report(report: &SweepReport, format: Format) -> Result<(), HarnessError> {
    let stdout = std::io::stdout();
    match format {
        Format::Json => io::write_json(stdout.lock(), report)?,
        Format::Csv => {
            io::write_summary(stdout.lock(), report)?;
            if let Some(fit) = &report.fit {
                eprintln!("slope {:.4}  intercept {:.4}  r^2 {:.4}", fit.slope, fit.intercept, fit.r_squared);
            }
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool, HarnessError> {
    match &cli.command {
        Command::Run { config } => {
            let cfg = load(config, cli)?;
            let records = run_experiment(&cfg)?;
            match &cfg.output {
                Some(dir) => io::write_traces(dir, &records)?,
                None if cli.format == Some(Format::Json) => io::write_json(std::io::stdout().lock(), &records)?,
                None => {
                    for r in &records {
                        println!("# T={} seed={}", r.t, r.seed);
                        io::write_trace(std::io::stdout().lock(), &r.trace)?;
                    }
                }
            }
            Ok(true)
        }
        Command::Sweep { config } => {
            let cfg = load(config, cli)?;
            let (records, report) = sweep(&cfg)?;
            if let Some(dir) = &cfg.output {
                io::export(dir, &records, &report)?;
            }
            print_report(&report, cli.format.unwrap_or(Format::Csv))?;
            Ok(true)
        }
        Command::Export { config, dir } => {
            let cfg = load(config, cli)?;
            let (records, report) = sweep(&cfg)?;
            io::export(dir, &records, &report)?;
            Ok(true)
        }
        Command::RateFit { input } => {
            let fit = io::fit_file(input)?;
            match cli.format.unwrap_or(Format::Csv) {
                Format::Json => io::write_json(std::io::stdout().lock(), &fit)?,
                Format::Csv => println!("slope,intercept,r_squared\n{},{},{}", fit.slope, fit.intercept, fit.r_squared),
            }
            Ok(true)
        }
        Command::Verify { suite } => {
            let reports = suite.run(cli.seed.unwrap_or(0))?;
            let mut out = std::io::stdout().lock();
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => {
                    io::write_json(&mut out, &reports)?;
                    let _ = writeln!(out);
                }
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(&mut out);
                    for r in &reports {
                        w.serialize(r)?;
                    }
                    w.flush().map_err(csv::Error::from)?;
                }
            }
            let _ = out.flush();
            Ok(reports.iter().all(|r| r.passed))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
