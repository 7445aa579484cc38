use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gic_cli::{
    cmd_layers, cmd_region, cmd_saturation, cmd_validate, parse_mu_grid, CliError, Outcome,
    Scenario,
};

#[derive(Parser, Debug)]
#[command(
    name = "gic",
    version,
    about = "Rate regions of the two-user weak Gaussian interference channel"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario JSON file; the symmetric default scenario when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides the scenario's out_dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Also write SVG plots.
    #[arg(long, global = true)]
    plot: bool,

    /// Seed for the validation suite.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Comma-separated mu values, e.g. "0.5,1,2".
    #[arg(long = "mu-grid", global = true)]
    mu_grid: Option<String>,

    #[arg(long = "inject-fault", global = true, hide = true)]
    inject_fault: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Trace the rate-region boundary over the mu grid.
    Region,
    /// Saturation powers and the nested re-solve check.
    Saturation,
    /// Layer-aggregate error against closed-form rates.
    Layers,
    /// Seeded property suite.
    Validate,
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let mut sc = match &cli.config {
        Some(path) => Scenario::load(path)?,
        None => Scenario::default(),
    };
    if let Some(text) = &cli.mu_grid {
        sc.mu_grid = parse_mu_grid(text)?;
    }
    if let Some(seed) = cli.seed {
        sc.options.seed = seed;
    }
    let out = cli
        .out
        .clone()
        .unwrap_or_else(|| sc.options.out_dir.clone());
    let plot = cli.plot || sc.options.plot;
    match cli.command {
        Command::Region => cmd_region(&sc, &out, plot),
        Command::Saturation => cmd_saturation(&sc, &out),
        Command::Layers => cmd_layers(&sc, &out, plot),
        Command::Validate => cmd_validate(&sc, &out, cli.inject_fault),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            println!("{}", outcome.summary.trim_end());
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            ExitCode::from(if outcome.failed { 1 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
