//! Study runner: drives the library from a JSON config file.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use amisc::studio::{
    compare_study, density_report, run_study, sobol_report, Strategy, StudyConfig,
};

#[derive(Parser)]
#[command(
    name = "amisc",
    about = "Adaptive multi-index stochastic collocation studies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Study configuration file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the refinement strategy (single | multilevel | multiindex).
    #[arg(long, value_parser = parse_strategy)]
    strategy: Option<Strategy>,
    /// Override the error tolerance stopping criterion.
    #[arg(long)]
    tau: Option<f64>,
    /// Override the work budget stopping criterion.
    #[arg(long)]
    wmax: Option<f64>,
    /// Override the mean/variance indicator weight.
    #[arg(long)]
    kappa: Option<f64>,
}

impl Common {
    fn load(&self) -> amisc::Result<StudyConfig> {
        let mut cfg = StudyConfig::from_file(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        if let Some(strategy) = self.strategy {
            cfg.strategy = strategy;
        }
        if let Some(tau) = self.tau {
            cfg.tau = Some(tau);
        }
        if let Some(wmax) = self.wmax {
            cfg.w_max = Some(wmax);
        }
        if let Some(kappa) = self.kappa {
            cfg.kappa = kappa;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one study and write trace, convergence, and allocation tables.
    Run(Common),
    /// Run several strategies and merge their convergence traces.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Strategies to compare (repeat or comma-separate); defaults to
        /// multiindex and single.
        #[arg(long = "strategies", value_delimiter = ',', value_parser = parse_strategy)]
        strategies: Vec<Strategy>,
    },
    /// Write the Sobol sensitivity report of the completed surrogate.
    Sobol(Common),
    /// Write kernel density tables of the surrogate outputs.
    Density(Common),
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn run(cli: Cli) -> amisc::Result<()> {
    match cli.command {
        Command::Run(common) => {
            let cfg = common.load()?;
            let output = run_study(&cfg)?;
            let surrogate = &output.surrogate;
            println!(
                "{}: {} accepted indices, work {:.6}, stop: {:?}",
                cfg.strategy.name(),
                surrogate.accepted().len(),
                surrogate.work_total(),
                output.stop
            );
            if let Some(row) = output.convergence.last() {
                println!("final validation error: {:?}", row.errors);
            }
            println!("artifacts in {}", cfg.out_dir.display());
        }
        Command::Compare { common, strategies } => {
            let cfg = common.load()?;
            let strategies = if strategies.is_empty() {
                vec![Strategy::Multiindex, Strategy::Single]
            } else {
                strategies
            };
            let outputs = compare_study(&cfg, &strategies)?;
            for output in &outputs {
                let last = output.convergence.last();
                println!(
                    "{}: work {:.6}, final error {:?}",
                    output.strategy.name(),
                    output.surrogate.work_total(),
                    last.map(|r| r.errors.clone()).unwrap_or_default()
                );
            }
            println!(
                "merged trace in {}",
                cfg.out_dir.join("compare.csv").display()
            );
        }
        Command::Sobol(common) => {
            let cfg = common.load()?;
            let path = sobol_report(&cfg)?;
            println!("sensitivity report in {}", path.display());
        }
        Command::Density(common) => {
            let cfg = common.load()?;
            let path = density_report(&cfg)?;
            println!("density table in {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
