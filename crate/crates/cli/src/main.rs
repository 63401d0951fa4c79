use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wwgm_cli::{run, Experiment, ExperimentConfig, Overrides, RunError};

/// Phase-space quantum mechanics experiments.
#[derive(Debug, Parser)]
#[command(name = "wwgm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Coherent states and their Wigner densities.
    Coherent(RunArgs),
    /// Unit, commutator, associativity and conjugation checks of the star product.
    StarCheck(RunArgs),
    /// Time evolution in any picture.
    Evolve(RunArgs),
    /// One contraction sweep over the k list.
    SweepK(RunArgs),
    /// Coset flow tables.
    Coset(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated k values (overrides `k_values`).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    k: Option<Vec<f64>>,
    /// Grid points per axis (overrides `grid.size`).
    #[arg(long)]
    grid_n: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_final: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    save_every: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, args) = match cli.command {
        Command::Coherent(a) => (Experiment::Coherent, a),
        Command::StarCheck(a) => (Experiment::StarCheck, a),
        Command::Evolve(a) => (Experiment::Evolve, a),
        Command::SweepK(a) => (Experiment::SweepK, a),
        Command::Coset(a) => (Experiment::Coset, a),
    };
    match execute(experiment, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let record = serde_json::to_string(&e.record()).expect("error record serialization");
            eprintln!("{record}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(experiment: Experiment, args: RunArgs) -> Result<(), RunError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| RunError::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    cfg.apply(&Overrides {
        k_values: args.k,
        grid_n: args.grid_n,
        dt: args.dt,
        t_final: args.t_final,
        steps: args.steps,
        save_every: args.save_every,
        output_dir: args.out.map(|p| p.display().to_string()),
    });
    let manifest = run(experiment, &cfg)?;
    eprintln!("wrote {} files to {}", manifest.files.len() + 1, cfg.output_dir());
    Ok(())
}
