mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use recurlab::Rational;

use report::{emit, error_json, exit_code, EXIT_OK, EXIT_PARSE, EXIT_PROPERTY};

#[derive(Parser)]
#[command(name = "recurlab", version, about = "Exact finite-scale checks of multiple recurrence statements")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn rational(s: &str) -> Result<Rational, String> {
    recurlab::rational::parse(s).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
pub enum Command {
    /// Correlations c_g, the return set R_eps and left/right covering sets.
    RothVerify {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        set: PathBuf,
        #[arg(long, value_parser = rational)]
        epsilon: Rational,
    },
    /// Cube measure invariance, magic and satedness; a random suite without --system.
    CubeCheck {
        #[arg(long)]
        system: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// Triple averages via the direct sweep and the Furstenberg coupling.
    K3Check {
        #[arg(long)]
        system: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 25)]
        trials: usize,
    },
    /// Van der Corput inequality on random vector-valued functions.
    VdcCheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Largest group order drawn.
        #[arg(long, default_value_t = 12)]
        n: usize,
    },
    /// kappa, the weight chi and the weighted lower bound for f = 1_A.
    WeightsCheck {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        set: PathBuf,
        #[arg(long, value_parser = rational)]
        epsilon: Rational,
    },
    /// The two counterexample computations.
    Counterexample {
        #[command(subcommand)]
        which: Counterexample,
    },
    /// Corners on (Z/n)^2 (exact) or on Z^2 windows (--predicate).
    DensityCorners {
        #[arg(long, default_value_t = 5)]
        n: usize,
        /// JSON list of [x, y] pairs; a random set from --seed otherwise.
        #[arg(long)]
        set: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_parser = rational, default_value = "1/10")]
        epsilon: Rational,
        /// "even", "even-diagonal" or "random:p,seed" on Z^2.
        #[arg(long)]
        predicate: Option<String>,
        #[arg(long, default_value_t = 8)]
        radius: i64,
        #[arg(long, default_value_t = 6)]
        shift: i64,
    },
}

#[derive(Subcommand)]
pub enum Counterexample {
    /// c_g = 2/243 against mu(A) = 2/9 on a ternary Bernoulli system.
    Bernoulli {
        #[arg(long, value_parser = rational, default_value = "3.19")]
        exponent: Rational,
        /// Test the nonzero elements of [-n, n]^2.
        #[arg(long, default_value_t = 2)]
        n: i64,
    },
    /// The Cesàro limit for a rotation and the complement of an arc.
    Rotation {
        #[arg(long, value_parser = rational, default_value = "1/5")]
        delta: Rational,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = commands::name(&cli.command);
    match commands::run(&cli.command) {
        Ok(report) => {
            let text = match cli.format {
                Format::Json => report.to_json(),
                Format::Csv => match report.to_csv() {
                    Ok(t) => t,
                    Err(e) => {
                        eprintln!("recurlab: {e}");
                        return ExitCode::from(EXIT_PARSE);
                    }
                },
            };
            if let Err(e) = emit(&text, cli.out.as_deref()) {
                eprintln!("recurlab: cannot write report: {e}");
                return ExitCode::from(EXIT_PARSE);
            }
            ExitCode::from(if report.holds { EXIT_OK } else { EXIT_PROPERTY })
        }
        Err(e) => {
            eprintln!("recurlab {name}: {e}");
            let _ = emit(&error_json(&name, &e), cli.out.as_deref());
            ExitCode::from(exit_code(&e))
        }
    }
}
