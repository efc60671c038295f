mod figures;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use bgcsp_core::{
    build_ladder, merge_beta_product, run_ensemble, write_outputs, CoefficientField, Error, ExperimentConfig,
    Schedule,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bgcsp", version, about = "Grid constrained diffusions, skew Brownian motion and barrier ladders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunOptions {
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the number of paths.
    #[arg(long)]
    paths: Option<usize>,
    /// Override the number of steps (the step size is kept).
    #[arg(long)]
    steps: Option<usize>,
    /// Number of worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        run: RunOptions,
    },
    /// Print the merged skewness of a list of barriers.
    Merge {
        /// Comma-separated skewness values in [-1, 1].
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        betas: Vec<f64>,
    },
    /// Build a barrier ladder and print or save it as JSON.
    Ladder {
        /// Generator, e.g. `quadratic:10`, `linear:1,0`, `asymptotic:2,0.5`.
        #[arg(long)]
        psi: CoefficientField,
        /// Barriers per side.
        #[arg(long)]
        n: usize,
        /// Position of the outermost barriers.
        #[arg(long, default_value_t = 20.0)]
        width: f64,
        /// `psi_proportional` or `geometric:<ratio>`.
        #[arg(long, default_value = "psi_proportional", value_parser = parse_schedule)]
        schedule: Schedule,
        /// Write the ladder here instead of standard output.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Run one of the bundled figure experiments.
    Reproduce {
        /// fig06 … fig13
        figure: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[command(flatten)]
        run: RunOptions,
    },
}

fn parse_schedule(s: &str) -> Result<Schedule, String> {
    match s.split_once(':') {
        None if s == "psi_proportional" => Ok(Schedule::PsiProportional),
        Some(("geometric", r)) => r
            .parse()
            .map(|ratio| Schedule::Geometric { ratio })
            .map_err(|e| format!("bad ratio `{r}`: {e}")),
        _ => Err(format!("unknown schedule `{s}`; use psi_proportional or geometric:<ratio>")),
    }
}

fn apply(mut config: ExperimentConfig, run: &RunOptions) -> Result<ExperimentConfig, Error> {
    if let Some(seed) = run.seed {
        config.master_seed = seed;
    }
    if let Some(paths) = run.paths {
        config.n_paths = paths;
    }
    if let Some(steps) = run.steps {
        let dt = config.dt();
        config.n_steps = steps;
        config.horizon = dt * steps as f64;
    }
    config.validate()?;
    Ok(config)
}

fn experiment(config: ExperimentConfig, run: &RunOptions, out: &Path) -> anyhow::Result<()> {
    let config = apply(config, run)?;
    let result = run_ensemble(&config, run.workers)?;
    let files = write_outputs(&config, &result, out)?;
    println!("{} -> {} file(s) in {}", result.summary(&config.name), files.len(), out.display());
    Ok(())
}

fn dispatch(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Simulate { config, out, run } => {
            let text = fs::read_to_string(&config).with_context(|| format!("cannot read {}", config.display()))?;
            let parsed =
                ExperimentConfig::from_json(&text).with_context(|| format!("in {}", config.display()))?;
            experiment(parsed, &run, &out)
        }
        Command::Merge { betas } => {
            println!("{}", merge_beta_product(&betas)?);
            Ok(())
        }
        Command::Ladder {
            psi,
            n,
            width,
            schedule,
            emit,
        } => {
            let ladder = build_ladder(&psi, width, n, schedule)?;
            let mut json = serde_json::to_string_pretty(&ladder)?;
            json.push('\n');
            match emit {
                Some(path) => fs::write(&path, json).with_context(|| format!("cannot write {}", path.display()))?,
                None => print!("{json}"),
            }
            Ok(())
        }
        Command::Reproduce { figure, out, run } => {
            let fig = figures::find(&figure).ok_or_else(|| {
                let keys: Vec<&str> = figures::FIGURES.iter().map(|f| f.key).collect();
                anyhow!("unknown figure `{figure}`; choose one of {}", keys.join(", "))
            })?;
            experiment(ExperimentConfig::from_json(fig.config)?, &run, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::Numeric { .. }) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
