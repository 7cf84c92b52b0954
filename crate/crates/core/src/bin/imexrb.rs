use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use imexrb::harness::{self, ExperimentSpec, ProblemId};

/// Run IMEX-RB benchmark sweeps and write their results as CSV.
#[derive(Parser)]
#[command(name = "imexrb", version)]
struct Cli {
    /// Worker threads for sweep points (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Result CSV path, overriding the one in the spec.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a JSON spec file.
    Run { config: PathBuf },
    /// Run a named preset sweep.
    Preset {
        name: String,
        /// Directory for the CSV files.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print K_2(A)^-1 for a linear benchmark.
    Epsbar { problem: ProblemId, n_per_dim: usize },
}

fn execute(spec: ExperimentSpec, csv: Option<PathBuf>, out_dir: Option<&Path>) -> harness::Result<bool> {
    let in_dir = |p: PathBuf| match out_dir {
        Some(d) => d.join(p),
        None => p,
    };
    let results = csv.or_else(|| spec.output.clone().map(in_dir)).unwrap_or_else(|| in_dir(format!("{}.csv", spec.name).into()));
    let steps = spec.step_log.clone().map(in_dir);

    let outcome = harness::run_experiment(&spec)?;
    for (n, bar) in &outcome.epsilon_bars {
        log::info!("n_per_dim={n}: epsilon_bar={bar:.4e}");
    }
    harness::write_results(&results, &outcome.rows)?;
    eprintln!("wrote {} rows to {}", outcome.rows.len(), results.display());
    if let Some(path) = steps {
        harness::write_step_log(&path, &outcome.step_log)?;
        eprintln!("wrote {} step rows to {}", outcome.step_log.len(), path.display());
    }
    for (point, err) in &outcome.failures {
        eprintln!("failed: {point}: {err}");
    }
    Ok(outcome.failures.is_empty())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Run { config } => ExperimentSpec::from_path(&config).and_then(|s| execute(s, cli.csv, None)),
        Command::Preset { name, out } => harness::preset(&name).and_then(|s| execute(s, cli.csv, out.as_deref())),
        Command::Epsbar { problem, n_per_dim } => harness::epsilon_bar(problem, n_per_dim).map(|e| {
            println!("{e:.6e}");
            true
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: some sweep points failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
