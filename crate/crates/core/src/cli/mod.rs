//! Command implementations behind the `gaitopt` binary.
//!
//! Exit codes: 0 ok, 2 config or input error, 3 evaluation failure, 4 insufficient data.

mod commands;
mod matrix;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::analysis::VariableGroup;
use crate::config::RunConfig;
use crate::error::{Error, Result};

pub use commands::{
    compare_files, compare_protocols, eval, generations_csv, optimize, parse_genome, regress, run_optimization,
    Candidate, Provenance, RegressOptions,
};
pub use matrix::{matrix, matrix_csv, matrix_table, run_cells, CellResult, CellStatus};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_EVALUATION: u8 = 3;
pub const EXIT_INSUFFICIENT_DATA: u8 = 4;

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Evaluation { .. } => EXIT_EVALUATION,
        Error::InsufficientData(_) => EXIT_INSUFFICIENT_DATA,
        _ => EXIT_INPUT,
    }
}

#[derive(Debug, Parser)]
#[command(name = "gaitopt", version, about = "Many-objective gait optimization for modular legged robots")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
    pub objectives: Option<u8>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Output directory; defaults to the config's `output_dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunArgs {
    fn load(&self) -> Result<(RunConfig, PathBuf)> {
        let mut cfg = RunConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.set_seed(seed);
        }
        if let Some(m) = self.objectives {
            cfg.objective_count = m as usize;
        }
        cfg.validate()?;
        let out = self.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
        Ok((cfg, out))
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run NSGA-III and write the Pareto archive.
    Optimize(RunArgs),
    /// Score one candidate and export its trace.
    Eval {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated genome `L_1..L_k,V_1..V_k,H,beta`.
        #[arg(long, conflicts_with = "archive")]
        genome: Option<String>,
        #[arg(long, requires = "index")]
        archive: Option<PathBuf>,
        #[arg(long)]
        index: Option<usize>,
    },
    /// Run every cell of the config's `[matrix]` and tabulate success.
    Matrix(RunArgs),
    /// Regress load on the gait parameters of one or more archives.
    Regress {
        #[arg(required = true)]
        archives: Vec<PathBuf>,
        /// Variable groups to include: duty-height, strides, speeds.
        #[arg(long, value_delimiter = ',')]
        groups: Option<Vec<VariableGroup>>,
        /// Fit one model over all archives instead of one per archive.
        #[arg(long)]
        pooled: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Compare the load-aware and load-blind protocols.
    Compare {
        /// Run both protocols from this config.
        #[arg(long, conflicts_with_all = ["with_load", "without_load"])]
        config: Option<PathBuf>,
        #[arg(long, requires = "without_load")]
        with_load: Option<PathBuf>,
        #[arg(long)]
        without_load: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn print_paths(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Optimize(args) => {
            let (cfg, out) = args.load()?;
            print_paths(&optimize(&cfg, args.jobs, &out)?);
        }
        Command::Eval {
            run,
            genome,
            archive,
            index,
        } => {
            let (cfg, out) = run.load()?;
            let candidate = match (genome, archive, index) {
                (Some(g), _, _) => Candidate::Genome(parse_genome(&g)?),
                (None, Some(path), Some(index)) => Candidate::ArchiveIndex { path, index },
                _ => return Err(Error::config("genome", "pass --genome or --archive with --index")),
            };
            let (entry, paths) = eval(&cfg, &candidate, &out)?;
            println!(
                "f_speed {} f_stability {} f_load {} violation {} failure {}",
                entry.objectives.f_speed,
                entry.objectives.f_stability,
                entry.objectives.f_load,
                entry.constraint_violation,
                entry.summary.failure.map_or("none".to_string(), |f| f.to_string())
            );
            print_paths(&paths);
        }
        Command::Matrix(args) => {
            let (cfg, out) = args.load()?;
            let (results, paths) = matrix(&cfg, args.jobs, &out)?;
            print!("{}", matrix_table(&results));
            print_paths(&paths);
        }
        Command::Regress {
            archives,
            groups,
            pooled,
            out,
        } => {
            let options = RegressOptions {
                groups: groups.unwrap_or_else(|| VariableGroup::EXPLANATORY.to_vec()),
                pooled,
            };
            for (name, report) in regress(&archives, &options, &out)? {
                println!("== {name}");
                print!("{}", report.to_text());
            }
        }
        Command::Compare {
            config,
            with_load,
            without_load,
            seed,
            jobs,
            out,
        } => {
            let cmp = match (config, with_load, without_load) {
                (Some(config), _, _) => {
                    let args = RunArgs {
                        config,
                        seed,
                        objectives: None,
                        jobs,
                        out: out.clone(),
                    };
                    let (cfg, out) = args.load()?;
                    compare_protocols(&cfg, jobs, &out)?
                }
                (None, Some(a), Some(b)) => compare_files(&a, &b, &out.unwrap_or_else(|| ".".into()))?,
                _ => return Err(Error::config("compare", "pass --config or both --with-load and --without-load")),
            };
            print!("{}", cmp.to_text());
        }
    }
    Ok(())
}

/// Parses arguments, runs the command and maps errors and panics to exit codes.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_OK });
        }
    };
    match std::panic::catch_unwind(|| execute(cli.command)) {
        Ok(Ok(())) => ExitCode::from(EXIT_OK),
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(_) => ExitCode::from(EXIT_EVALUATION),
    }
}
