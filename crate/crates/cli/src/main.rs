use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dgfv_core::config::{CaseConfig, CaseTag};
use dgfv_core::run::{run_case, RunError};
use dgfv_core::verify::{run_suite, Suite};

const EXIT_INVALID_CONFIG: u8 = 2;
const EXIT_SOLVER_ABORT: u8 = 3;
const EXIT_VERIFICATION: u8 = 4;

#[derive(Parser)]
#[command(name = "dgfv", version, about = "Hybrid DG/FV Euler solver on moving curved meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a case described by a TOML file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output.directory`.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Overrides the top-level `seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Selects the case defaults the file is laid over.
        #[arg(long = "case")]
        case: Option<CaseTag>,
    },
    /// Run one self-check suite; exits with 4 if any check fails.
    Verify {
        #[arg(long)]
        suite: Suite,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            config,
            output_dir,
            seed,
            case,
        } => run(&config, output_dir.as_deref(), seed, case),
        Command::Verify { suite } => verify(suite),
    }
}

fn load(path: &Path, seed: Option<u64>, case: Option<CaseTag>) -> Result<CaseConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut cfg = CaseConfig::from_toml(&text, case).map_err(|e| e.to_string())?;
    if let Some(s) = seed {
        cfg.apply_seed(s);
        cfg.validate().map_err(|e| e.to_string())?;
    }
    Ok(cfg)
}

fn run(path: &Path, output_dir: Option<&Path>, seed: Option<u64>, case: Option<CaseTag>) -> ExitCode {
    let cfg = match load(path, seed, case) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID_CONFIG);
        }
    };
    let dir = output_dir.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(&cfg.output.directory));
    match run_case(&cfg, Some(&dir)) {
        Ok(out) => {
            let rows = &out.diagnostics.rows;
            let last = rows.last().expect("initial row is always recorded");
            println!(
                "{}: {} steps to t = {}, max relative drift of totals {:.3e}, output in {}",
                cfg.case,
                last.step,
                last.time,
                out.diagnostics.max_relative_drift().into_iter().fold(0.0, f64::max),
                dir.display()
            );
            ExitCode::SUCCESS
        }
        Err(RunError::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID_CONFIG)
        }
        Err(e @ RunError::Solver { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_SOLVER_ABORT)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn verify(suite: Suite) -> ExitCode {
    match run_suite(suite) {
        Ok(report) => {
            for c in &report.checks {
                println!("{c}");
            }
            println!("{}", report.summary_line());
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VERIFICATION)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_VERIFICATION)
        }
    }
}
