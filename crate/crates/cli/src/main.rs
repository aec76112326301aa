use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use magdimer_cli::config::parse_grid;
use magdimer_cli::{
    emit_plot_data, init_threads, parse_config, run_subcommand, CliError, Command, Overrides,
    DEFAULT_CONFIG,
};

/// Steady states, branches, phase diagrams, quenches and Gaussian
/// fluctuations of a driven cavity-magnon dimer.
#[derive(Parser)]
#[command(name = "magdimer", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List every fixed point at the configured power.
    Steady(RunArgs),
    /// Continue all branches through the configured power and mark folds.
    Branch(RunArgs),
    /// Classify stable-state regions on a (P_d, J) grid.
    PhaseDiagram(RunArgs),
    /// Simulate a power quench and scan relaxation times near a fold.
    Quench(RunArgs),
    /// Fidelity, mutual information and negativity of the magnon pair.
    Fluct(RunArgs),
    /// Reshape a CSV artifact into gnuplot column blocks.
    PlotData(PlotArgs),
    /// Print the shipped configuration.
    DefaultConfig,
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration; the shipped default when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Drive power in mW.
    #[arg(long = "p-d")]
    p_d: Option<f64>,
    /// Tunneling as a multiple of kappa_a.
    #[arg(long)]
    j: Option<f64>,
    /// Phase-diagram grid as NxM (powers x tunneling values).
    #[arg(long)]
    grid: Option<String>,
    /// Seed for the multistart jitter.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct PlotArgs {
    /// CSV file written by another subcommand.
    input: PathBuf,
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run_args(cmd: Command, a: &RunArgs) -> Result<(), CliError> {
    let text = match &a.config {
        Some(p) => fs::read_to_string(p).map_err(|e| CliError::io(p.display().to_string(), e))?,
        None => DEFAULT_CONFIG.to_string(),
    };
    let overrides = Overrides {
        p_d_mw: a.p_d,
        j_over_kappa_a: a.j,
        grid: a.grid.as_deref().map(parse_grid).transpose()?,
        seed: a.seed,
        out: a.out.clone(),
    };
    let cfg = parse_config(&text)?.with_overrides(&overrides)?;
    init_threads()?;
    for path in run_subcommand(cmd, &cfg)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn plot(a: &PlotArgs) -> Result<(), CliError> {
    let text =
        fs::read_to_string(&a.input).map_err(|e| CliError::io(a.input.display().to_string(), e))?;
    let out = emit_plot_data(&text)?;
    match &a.out {
        Some(p) => fs::write(p, out).map_err(|e| CliError::io(p.display().to_string(), e)),
        None => {
            print!("{out}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Cmd::Steady(a) => run_args(Command::Steady, a),
        Cmd::Branch(a) => run_args(Command::Branch, a),
        Cmd::PhaseDiagram(a) => run_args(Command::PhaseDiagram, a),
        Cmd::Quench(a) => run_args(Command::Quench, a),
        Cmd::Fluct(a) => run_args(Command::Fluct, a),
        Cmd::PlotData(a) => plot(a),
        Cmd::DefaultConfig => {
            print!("{DEFAULT_CONFIG}");
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let record = serde_json::to_string(&e.record()).expect("error record serializes");
            eprintln!("{record}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
