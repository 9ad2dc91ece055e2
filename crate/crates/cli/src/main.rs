//! `povm-forge`: validate problem files, compute orbit bounds, decompose and
//! prune POVMs, and run the trines experiments.
//!
//! Exit codes: 0 success, 1 domain failure, 2 usage or parse failure.

mod commands;
mod error;
mod examples;
mod experiment;
mod schema;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use povm_forge::quantum::VALIDATION_TOL;
use povm_forge::trines::SCAN_GRID;

use crate::error::{domain, usage, CliError, CliResult};
use crate::examples::ExampleName;
use crate::experiment::{ExperimentName, DEFAULT_ALPHA};

const THREADS_ENV: &str = "POVM_FORGE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "povm-forge", version, about = "Accessible-information tools for symmetric quantum ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the ensemble, POVM and group in a problem file.
    Validate {
        file: PathBuf,
        /// Print a machine-readable report on stdout.
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = VALIDATION_TOL)]
        tol: f64,
    },
    /// Upper bound on the number of orbits of an optimal POVM.
    Bound {
        file: PathBuf,
        /// Bound for real ensembles and representations.
        #[arg(long)]
        real: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run a named experiment and compare against reference values.
    Experiment {
        #[arg(value_enum)]
        name: ExperimentName,
        /// Lift parameter (lifted-trines only; defaults to 0.05).
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Grid points in x for surface.csv.
        #[arg(long, default_value_t = SCAN_GRID)]
        nx: usize,
        /// Grid points in b for surface.csv.
        #[arg(long, default_value_t = SCAN_GRID)]
        nb: usize,
    },
    /// Write the identity resolution of a POVM as a mixture of basic solutions.
    Decompose {
        file: PathBuf,
        /// Write the JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shrink a POVM without losing information.
    Prune {
        file: PathBuf,
        /// Prune within a symmetry group; generators come from FILE, or
        /// from the problem file when FILE is omitted.
        #[arg(long, value_name = "FILE", num_args = 0..=1)]
        group: Option<Option<PathBuf>>,
        /// Use the real orbit bound (real data only).
        #[arg(long)]
        real: bool,
        /// Write the pruned problem file here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a built-in problem file.
    Example {
        #[arg(value_enum)]
        name: ExampleName,
        /// Lift parameter for lifted-trines.
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        /// Dimension for identity and trivial.
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| domain(format!("cannot configure thread pool: {e}")))
}

fn emit(out: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => commands::write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match cli.command {
        Command::Validate { file, json, tol } => {
            let report = commands::validate(&file, tol)?;
            for line in commands::violation_lines(&report.json) {
                eprintln!("{line}");
            }
            if json {
                print!("{}", pretty(&report.json));
            } else {
                println!("{}: {}", file.display(), if report.valid { "valid" } else { "INVALID" });
            }
            if report.valid {
                Ok(())
            } else {
                Err(domain("validation failed"))
            }
        }
        Command::Bound { file, real, json } => {
            let b = commands::bound(&file, real)?;
            if json {
                let mut v = serde_json::json!({ "group_order": b.order, "complex_bound": b.complex });
                if let Some(r) = b.real {
                    v["real_bound"] = r.into();
                }
                print!("{}", pretty(&v));
            } else {
                println!("{}", b.real.unwrap_or(b.complex));
            }
            Ok(())
        }
        Command::Experiment {
            name,
            alpha,
            out_dir,
            nx,
            nb,
        } => {
            let output = match name {
                ExperimentName::LiftedTrines => {
                    experiment::lifted_trines(alpha.unwrap_or(DEFAULT_ALPHA), &out_dir, nx, nb)?
                }
                ExperimentName::DoubleTrines => {
                    if alpha.is_some() {
                        return Err(usage("--alpha is fixed at 1/2 for double-trines"));
                    }
                    experiment::double_trines_experiment(&out_dir, nx, nb)?
                }
            };
            output.write()?;
            for (path, _) in &output.files {
                eprintln!("wrote {}", path.display());
            }
            print!("{}", output.table());
            if output.all_passed() {
                Ok(())
            } else {
                Err(domain("some reference checks failed"))
            }
        }
        Command::Decompose { file, out } => emit(out.as_ref(), &pretty(&commands::decompose(&file)?)),
        Command::Prune { file, group, real, out } => {
            let pruned = commands::prune(&file, &group, real)?;
            let o = &pruned.outcome;
            eprintln!(
                "operators: {}; orbits: {}; bound: {}; information: {:.9} -> {:.9} bit",
                o.povm.len(),
                if group.is_some() { o.orbits.len().to_string() } else { "-".into() },
                o.bound,
                o.info_before,
                o.info_after
            );
            emit(out.as_ref(), &pruned.file.to_pretty_json())
        }
        Command::Example { name, alpha, dim } => {
            print!("{}", examples::build(name, alpha, dim)?.to_pretty_json());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = std::io::stdout().flush();
            eprintln!("error: {e}");
            ExitCode::from(CliError::exit_code(&e))
        }
    }
}
