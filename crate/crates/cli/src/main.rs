use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dpart::InstanceKind;

mod commands;
mod output;

use output::Failure;

/// Differentially private synthetic tabular data.
#[derive(Debug, Parser)]
#[command(name = "dpart", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a synthesizer to a CSV file and write the model.
    Fit {
        #[arg(long)]
        data: PathBuf,
        /// Schema/bounds JSON; bounds listed here are used as given.
        #[arg(long)]
        schema: PathBuf,
        /// One of: independent, privbayes, dp-synthpop.
        #[arg(long)]
        engine: InstanceKind,
        /// Total privacy budget. Omit for a non-private fit.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Schema/bounds JSON whose bounds override those of --schema.
        #[arg(long)]
        bounds: Option<PathBuf>,
        /// Model spec JSON merged over the engine preset (e.g. split, methods, config).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Fixed RNG seed. For tests and demos only: seeded noise is not private.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sample rows from a fitted model.
    Generate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        rows: u64,
        /// Output CSV, or "-" for standard output.
        #[arg(long)]
        out: PathBuf,
        /// Fixed RNG seed. For tests and demos only: seeded noise is not private.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare a synthetic CSV with a real one; prints JSON metrics.
    Evaluate {
        #[arg(long)]
        real: PathBuf,
        #[arg(long)]
        synth: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        /// Categorical column predicted by the evaluation classifier.
        #[arg(long)]
        target: String,
        /// Held-out CSV for accuracy; defaults to --real.
        #[arg(long)]
        test: Option<PathBuf>,
    },
    /// Run an epsilon sweep and write report.csv and summary.json.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Write the reconstructed Adult table, its schema and a default experiment config.
    Dataset {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = dpart::eval::adult::ADULT_ROWS)]
        rows: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Fit {
            data,
            schema,
            engine,
            epsilon,
            bounds,
            config,
            out,
            seed,
        } => commands::fit(commands::FitArgs {
            data,
            schema,
            engine,
            epsilon,
            bounds,
            config,
            out,
            seed,
        }),
        Command::Generate { model, rows, out, seed } => commands::generate(&model, rows as usize, &out, seed),
        Command::Evaluate {
            real,
            synth,
            schema,
            target,
            test,
        } => commands::evaluate(&real, &synth, &schema, &target, test.as_deref()),
        Command::Experiment { config, out_dir } => commands::experiment(&config, &out_dir),
        Command::Dataset { out_dir, rows, seed } => commands::dataset(&out_dir, rows, seed),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
