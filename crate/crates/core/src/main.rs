use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lowit::cli::{self, CliError, Figure, RunConfig};
use lowit::validate::{run_all, ValidateConfig};

#[derive(Parser)]
#[command(name = "lowit", version, about = "LO-agnostic squeezing witnesses for balanced homodyne detection")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Regenerate figure data as CSV plus a JSON summary (and optionally SVG).
    Reproduce {
        #[arg(long)]
        figure: Figure,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: bool,
        #[arg(long)]
        points: Option<usize>,
        /// Plot floor for the noise parameter in dB.
        #[arg(long, default_value_t = cli::DEFAULT_CLAMP_DB, allow_hyphen_values = true)]
        clamp_floor: f64,
    },
    /// Evaluate measured moments from a CSV with columns theta_rad,var_L,nb[,na].
    Witness {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = lowit::witness::DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the randomized oracle suites.
    Validate {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 128)]
        cutoff_max: usize,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(args: Args) -> Result<(), CliError> {
    match args.command {
        Command::Reproduce {
            figure,
            out,
            svg,
            points,
            clamp_floor,
        } => {
            let config = RunConfig {
                points,
                svg,
                clamp_floor,
                ..RunConfig::default()
            };
            let artifacts = cli::render(figure, &config)?;
            for path in cli::write_artifacts(&out, &artifacts)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Witness { input, tol, out } => {
            RunConfig { tol, ..RunConfig::default() }.check()?;
            let file = File::open(&input)
                .map_err(|e| CliError::Input(format!("cannot open {}: {e}", input.display())))?;
            let parsed = cli::read_records(file)?;
            for w in &parsed.warnings {
                eprintln!("warning: {w}");
            }
            let report = cli::evaluate_records(&parsed.records, tol)?;
            let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
            text.push('\n');
            std::fs::write(&out, text).map_err(|source| CliError::Write { path: out.clone(), source })?;
            eprintln!(
                "{} rows: {} nonclassical_SI, {} classical_consistent",
                report.summary.rows, report.summary.nonclassical_si, report.summary.classical_consistent
            );
            Ok(())
        }
        Command::Validate {
            trials,
            seed,
            cutoff_max,
            out,
        } => {
            RunConfig {
                trials,
                seed,
                cutoff_max,
                ..RunConfig::default()
            }
            .check()?;
            if trials == 0 {
                eprintln!("warning: zero trials requested; every suite passes vacuously");
            }
            let report = run_all(&ValidateConfig { trials, seed, cutoff_max });
            for s in &report.suites {
                eprintln!(
                    "{} {:<24} trials={} max_deviation={:e} threshold={:e}",
                    if s.passed { "PASS" } else { "FAIL" },
                    s.name,
                    s.trials,
                    s.max_deviation,
                    s.threshold
                );
                for m in &s.messages {
                    eprintln!("     {m}");
                }
            }
            let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
            text.push('\n');
            match out {
                Some(path) => std::fs::write(&path, text).map_err(|source| CliError::Write { path, source })?,
                None => print!("{text}"),
            }
            if report.passed {
                Ok(())
            } else {
                Err(CliError::ValidationFailed)
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
