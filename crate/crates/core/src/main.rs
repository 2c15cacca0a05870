use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rmab::experiment::{self, ExperimentConfig, InstanceSpec};

#[derive(Parser)]
#[command(name = "rmab", version, about = "Whittle indices and RMAB policy experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the Whittle index table of every arm as CSV.
    Index(Source),
    /// Run the configured policies and write raw and aggregate CSVs.
    Run(Source),
    /// Summarise aggregate CSVs over their final window.
    Compare {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Fraction of final steps to average.
        #[arg(long, default_value_t = 0.2)]
        window: f64,
    },
    /// List the instance generators.
    ListInstances,
}

#[derive(Args)]
struct Source {
    /// Experiment config (JSON).
    #[arg(long, conflicts_with = "generator")]
    config: Option<PathBuf>,
    /// Use a generator with default parameters instead of a config.
    #[arg(long)]
    generator: Option<String>,
    #[arg(long = "T")]
    horizon: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Source {
    fn load(&self) -> rmab::Result<ExperimentConfig> {
        let mut cfg = match (&self.config, &self.generator) {
            (Some(path), _) => ExperimentConfig::from_path(path)?,
            (None, Some(name)) => ExperimentConfig::for_instance(InstanceSpec::from_generator(name)?),
            (None, None) => return Err(rmab::Error::Config("pass --config <path> or --generator <name>".into())),
        };
        if let Some(t) = self.horizon {
            cfg.horizon = t;
        }
        if let Some(n) = self.trials {
            cfg.trials = n;
        }
        if let Some(s) = self.seed {
            cfg.base_seed = s;
        }
        if let Some(b) = self.budget {
            cfg.budget = Some(b);
        }
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        cfg.check()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> rmab::Result<()> {
    match cli.command {
        Command::Index(src) => {
            let cfg = src.load()?;
            let (path, rows) = experiment::cmd_index(&cfg)?;
            println!("arm,state,lambda_star");
            for r in rows {
                println!("{},{},{}", r.arm, r.state, r.lambda_star);
            }
            eprintln!("wrote {}", path.display());
        }
        Command::Run(src) => {
            let cfg = src.load()?;
            let manifest = experiment::cmd_run(&cfg)?;
            for r in &manifest.runs {
                eprintln!("{:<8} final-20% mean {:.4}  {}", r.policy, r.final_window_mean, r.agg.display());
            }
        }
        Command::Compare { files, window } => {
            let rows = experiment::cmd_compare(&files, window)?;
            print!("{}", experiment::format_comparison(&rows));
        }
        Command::ListInstances => print!("{}", experiment::format_instance_list()),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
