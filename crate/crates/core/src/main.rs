use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use eikonal_core::experiment::{dump_field, run_experiment, write_csv, write_csv_file, DumpFormat, ExperimentSpec, RunOptions};
use eikonal_core::metrics::ground_truth;
use eikonal_core::problems::{ExitMode, NamedProblem};
use eikonal_core::{build_problem, EikonalError, Result};

#[derive(Parser)]
#[command(name = "eikbench", version, about = "Benchmark runner for 2-D Eikonal solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment matrix and write one CSV row per run.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// CSV destination; overrides `out` in the config, stdout if neither is set.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        dump_dir: Option<PathBuf>,
        /// Repeat each solve and report the fastest time.
        #[arg(long, default_value_t = 1)]
        repeat: usize,
        /// Worker threads (0 = one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Compute a refined reference solution and dump it.
    Truth {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        grid: usize,
        #[arg(long, default_value_t = 4)]
        refine: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "ascii")]
        format: String,
        #[arg(long, default_value = "point")]
        exit: String,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            out,
            dump_dir,
            repeat,
            jobs,
        } => {
            let mut spec = ExperimentSpec::load(&config)?;
            if dump_dir.is_some() {
                spec.dump_dir = dump_dir;
            }
            if repeat == 0 {
                return Err(EikonalError::config("--repeat must be at least 1"));
            }
            let rows = run_experiment(&spec, RunOptions { repeat, jobs })?;
            match out.or(spec.out) {
                Some(path) => write_csv_file(&rows, &path),
                None => write_csv(&rows, io::stdout().lock()),
            }
        }
        Command::Truth {
            problem,
            grid,
            refine,
            out,
            format,
            exit,
        } => {
            let named: NamedProblem = problem.parse()?;
            let format: DumpFormat = format.parse()?;
            let exit: ExitMode = exit.parse()?;
            named.validate_grid(grid)?;
            let p = build_problem(&named.spec(grid, exit))?;
            let truth = ground_truth(&p, refine)?;
            dump_field(&truth, p.grid().h(), &out, format)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("eikbench: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
