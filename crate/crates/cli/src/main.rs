use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use overcoupled_cli::commands;
use overcoupled_cli::CliError;

/// Multi-modal resonance analysis for magnetically over-coupled inductor
/// arrays.
#[derive(Parser)]
#[command(name = "ovc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigen-frequencies and voltage mode shapes of a configured array
    Modes {
        /// Array config file (TOML)
        config: PathBuf,
        /// Write the CSV table here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Impedance sweep with detected-peak annotations
    Sweep {
        config: PathBuf,
        /// Override the config's drive element (1-based)
        #[arg(long)]
        drive: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write an SVG plot next to --out (or next to the config)
        #[arg(long)]
        plot: bool,
    },
    /// Closed-form split of an identical two-coil pair
    TwoCoil {
        #[arg(long, default_value_t = 10.0)]
        l_uh: f64,
        #[arg(long, default_value_t = 150.0)]
        c_pf: f64,
        #[arg(long, default_value_t = 10.0)]
        r_ohm: f64,
        /// Coupling coefficient for the single-point report
        #[arg(long, default_value_t = 0.14)]
        k: f64,
        /// Produce the dispersion curve on [0, K_MAX] instead
        #[arg(long)]
        k_max: Option<f64>,
        #[arg(long, default_value_t = 41)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dispersion curve of a two-coil pair over a coupling range
    Dispersion {
        #[arg(long, default_value_t = 10.0)]
        l_uh: f64,
        #[arg(long, default_value_t = 150.0)]
        c_pf: f64,
        #[arg(long, default_value_t = 10.0)]
        r_ohm: f64,
        #[arg(long)]
        k_max: f64,
        #[arg(long, default_value_t = 41)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a uniform nearest-neighbour coupling to observed frequencies
    FitK {
        config: PathBuf,
        /// Observed resonant frequencies in MHz, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        observed: Vec<f64>,
        #[arg(long, default_value_t = 0.01)]
        k_min: f64,
        #[arg(long, default_value_t = 0.8)]
        k_max: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Peak deviation against uniform series resistance
    Damping {
        config: PathBuf,
        /// Resistances in ohms, comma separated, ascending
        #[arg(long, value_delimiter = ',', required = true)]
        r_list: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        plot: bool,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Modes { config, out } => {
            commands::cmd_modes(&config, out.as_deref())?;
        }
        Command::Sweep {
            config,
            drive,
            out,
            plot,
        } => {
            let output = commands::cmd_sweep(&config, drive, out.as_deref(), plot)?;
            if let Some(path) = output.plot_written {
                eprintln!("plot written to {}", path.display());
            }
        }
        Command::TwoCoil {
            l_uh,
            c_pf,
            r_ohm,
            k,
            k_max,
            steps,
            out,
        } => {
            commands::cmd_two_coil(l_uh, c_pf, r_ohm, k, k_max, steps, out.as_deref())?;
        }
        Command::Dispersion {
            l_uh,
            c_pf,
            r_ohm,
            k_max,
            steps,
            out,
        } => {
            commands::cmd_dispersion(l_uh, c_pf, r_ohm, k_max, steps, out.as_deref())?;
        }
        Command::FitK {
            config,
            observed,
            k_min,
            k_max,
            out,
        } => {
            commands::cmd_fit_k(&config, &observed, (k_min, k_max), out.as_deref())?;
        }
        Command::Damping {
            config,
            r_list,
            out,
            plot,
        } => {
            let output = commands::cmd_damping(&config, &r_list, out.as_deref(), plot)?;
            if let Some(path) = output.plot_written {
                eprintln!("plot written to {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.exit_code() as u8)
        }
    }
}
