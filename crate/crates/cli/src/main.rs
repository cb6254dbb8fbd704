use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use advq_cli::config::{apply_file, parse_config_file, ExperimentConfig, Preset};
use advq_cli::error::Result;
use advq_cli::{compare, experiment, grid, tomography};
use advq_core::adversarial::Seeds;

/// Learn quantum state-preparation circuits with an adversarial game and
/// run the associated studies.
#[derive(Parser)]
#[command(name = "advq", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Experiment preset: fig2-left, fig2-center, fig2-right, fig3, fig4,
    /// fig5, fig6
    #[arg(long)]
    preset: Option<String>,

    /// Flat key=value config file; CLI flags override file values
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,

    /// Master seed expanded into target/init/shot seeds
    #[arg(long)]
    seed: Option<u64>,

    /// Number of seeded repetitions
    #[arg(long)]
    reps: Option<usize>,

    /// Iteration cap override
    #[arg(long)]
    iters: Option<usize>,

    /// Emit SVG charts next to the CSV output
    #[arg(long)]
    svg: bool,

    /// Use published-scale settings for the study presets instead of the
    /// reduced desk-scale defaults
    #[arg(long)]
    full: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment: seeded repetitions of a single game setting
    Train(RunArgs),
    /// Run a (generator layers) x (discriminator layers) grid study
    Grid(RunArgs),
    /// Compare iRprop-minus against gradient descent with momentum
    CompareOptim(RunArgs),
    /// Dump |rho| matrices for a completed run
    Tomography {
        /// Directory containing manifest.json and rep_*_params.json
        #[arg(long)]
        run: PathBuf,
        /// Repetition index
        #[arg(long, default_value_t = 0)]
        rep: usize,
        /// Also write heat-map SVGs
        #[arg(long)]
        svg: bool,
    },
}

fn resolve_config(args: &RunArgs) -> Result<ExperimentConfig> {
    let preset = match &args.preset {
        Some(name) => Some(Preset::parse(name)?),
        None => None,
    };
    let mut config = preset
        .map(|p| p.expand(args.seed.unwrap_or(1), args.full))
        .unwrap_or_default();
    if let Some(path) = &args.config {
        let entries = parse_config_file(path)?;
        apply_file(&mut config, &entries)?;
    }
    if let Some(seed) = args.seed {
        config.master_seed = Some(seed);
        config.game.seeds = Seeds::from_master(seed);
    }
    if let Some(reps) = args.reps {
        config.repetitions = reps;
    }
    if let Some(iters) = args.iters {
        config.game.max_iters = iters;
    }
    if let Some(out) = &args.out {
        config.output_dir = out.clone();
    }
    if args.svg {
        config.emit_svg = true;
    }
    Ok(config)
}

fn init_worker_pool() {
    if let Ok(value) = std::env::var("ADVQ_WORKERS") {
        if let Ok(workers) = value.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
        }
    }
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    init_worker_pool();
    match cli.command {
        Command::Train(args) => {
            let config = resolve_config(&args)?;
            let summary = experiment::run_experiment(&config)?;
            println!(
                "{} repetitions finished; mean final trace distance {:.4}; artifacts in {}",
                config.repetitions,
                summary.mean_final_trace_dist(),
                config.output_dir.display()
            );
            Ok(())
        }
        Command::Grid(args) => {
            let config = resolve_config(&args)?;
            let summary = grid::run_complexity_grid(&config)?;
            for cell in &summary.cells {
                println!(
                    "c(G)={} c(D)={}: mean final trace distance {:.4} (std {:.4})",
                    cell.gen_layers, cell.disc_layers, cell.mean_final, cell.std_final
                );
            }
            Ok(())
        }
        Command::CompareOptim(args) => {
            let config = resolve_config(&args)?;
            let runs = compare::run_optimizer_comparison(&config)?;
            for run in &runs {
                println!("{}: mean final trace distance {:.4}", run.label, run.mean_final);
            }
            Ok(())
        }
        Command::Tomography { run, rep, svg } => tomography::dump_tomography(&run, rep, svg),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
