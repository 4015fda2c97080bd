mod commands;
mod failure;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use ctxgeom::ChshConfig;
use output::{Format, Sink};

/// Projector-overlap geometry and contextuality witnesses for KCBS, CHSH and
/// odd n-cycles.
#[derive(Parser, Debug)]
#[command(name = "ctxgeom", author, version, about)]
struct Cli {
    /// Output directory
    #[arg(long, global = true, env = "CTXGEOM_OUT", default_value = ".")]
    out: PathBuf,

    /// Output format: summaries default to json, the n-cycle table to csv;
    /// figure data is always CSV and verify output always JSON
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Decimal places in every written number
    #[arg(long, global = true, default_value_t = 6, value_parser = clap::value_parser!(u8).range(4..=15))]
    precision: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// KCBS pentagon: configuration quantities, witness grid and figure data
    Kcbs {
        /// Mixing weight p (repeatable); defaults to 0, 0.25, 0.5, p*, 0.75, 0.9, 1
        #[arg(long = "p", allow_negative_numbers = true)]
        p: Vec<f64>,
    },
    /// CHSH 4-cycle on the Bell state
    Chsh {
        /// Named angle set
        #[arg(long, value_enum, default_value_t = Regime::Bell, conflicts_with = "angles")]
        regime: Regime,

        /// Explicit angles a0 b0 a1 b1 in radians
        #[arg(long, num_args = 4, value_names = ["A0", "B0", "A1", "B1"], allow_negative_numbers = true)]
        angles: Option<Vec<f64>>,
    },
    /// Odd n-cycle scan
    Ncycle {
        /// Cycle length (odd, at least 5; repeatable)
        #[arg(long = "n")]
        n: Vec<usize>,
    },
    /// Exactness reports and the coarse-graining monotonicity fuzz
    Verify {
        #[arg(long, default_value_t = 10_000)]
        trials: usize,

        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Regime {
    Bell,
    Entropic,
}

fn run(cli: Cli) -> Result<()> {
    let sink = Sink::new(cli.out, cli.precision as usize)?;
    match cli.command {
        Command::Kcbs { p } => {
            let grid = if p.is_empty() {
                commands::default_p_grid()
            } else {
                p
            };
            commands::kcbs(&sink, cli.format.unwrap_or(Format::Json), &grid)
        }
        Command::Chsh { regime, angles } => {
            let (label, config) = match angles {
                Some(a) => ("angles", ChshConfig::new(a[0], a[1], a[2], a[3])?),
                None => match regime {
                    Regime::Bell => ("bell", ChshConfig::bell_optimal()),
                    Regime::Entropic => ("entropic", ChshConfig::entropic_optimal()),
                },
            };
            commands::chsh(&sink, cli.format.unwrap_or(Format::Json), label, config)
        }
        Command::Ncycle { n } => {
            let ns = if n.is_empty() {
                commands::DEFAULT_NS.to_vec()
            } else {
                n
            };
            commands::ncycle(&sink, cli.format.unwrap_or(Format::Csv), &ns)
        }
        Command::Verify { trials, seed } => commands::verify(&sink, trials, seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(failure::Kind::Args.code() as u8),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(failure::exit_code(&e) as u8)
        }
    }
}
