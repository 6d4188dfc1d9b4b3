//! `frontera` — mean-variance portfolios and cross-efficiency selection from
//! the command line.
//!
//! Exit codes: 0 success, 1 domain error (inadmissible rate, infeasible
//! no-short problem, non-positive-definite covariance, ...), 2 input or
//! parse error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use frontera::{Error, Mode, Result};

use commands::Which;
use config::{Format, Kind, RunConfig};

#[derive(Parser)]
#[command(
    name = "frontera",
    version,
    about = "Mean-variance portfolios and cross-efficiency tangent selection",
    after_help = "Option precedence: command-line flags override the --config file, \
which overrides built-in defaults. Boolean flags can only enable; disable them \
in the config file."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Optional key=value config file (keys mirror the long flag names).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Input data file.
    #[arg(long, global = true, value_name = "PATH")]
    input: Option<PathBuf>,

    /// Input layout.
    #[arg(long, global = true, value_enum)]
    kind: Option<Kind>,

    /// Keep percent units when loading the French industry file.
    #[arg(long, global = true)]
    percent: bool,

    /// Split boundary label: rows up to and including it form the
    /// estimation sample.
    #[arg(long, global = true, value_name = "LABEL")]
    split: Option<String>,

    /// Risk-free-rate interval for the cross-efficiency search, as R1:R2.
    /// Defaults to 0:r_gmv of the fitted model.
    #[arg(long, global = true, value_name = "R1:R2")]
    interval: Option<String>,

    /// Risk-free rate of the MSR portfolio (and the CML in plot data).
    #[arg(long = "msr-rate", global = true, value_name = "RATE")]
    msr_rate: Option<f64>,

    /// Forbid short sales (route through the QP machinery).
    #[arg(long = "no-short", global = true)]
    no_short: bool,

    /// Number of equal parts the rate interval is divided into for the
    /// no-short search.
    #[arg(long, global = true, value_name = "N")]
    grid: Option<usize>,

    /// Backtest horizons in periods, comma separated. Defaults to the full
    /// test sample.
    #[arg(long, global = true, value_name = "H1,H2,...")]
    horizons: Option<String>,

    /// Backtest accounting: rebalanced or buyhold.
    #[arg(long, global = true, value_name = "MODE")]
    mode: Option<String>,

    /// Output rendering.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Directory for output files (plot data always goes here).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Significant digits in printed numbers, up to 15. Defaults to 6
    /// (plotdata: 15).
    #[arg(long, global = true, value_name = "P")]
    precision: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Per-asset descriptive statistics (per split side when --split given).
    Stats,
    /// One fitted portfolio: weights, expected return, risk, Sharpe ratio.
    Portfolio {
        #[arg(value_enum)]
        which: Which,
    },
    /// Out-of-sample value changes for GMV, TP, MSR and MCESR.
    Backtest,
    /// CSV files with frontier samples, reference lines, marked portfolios
    /// and equity curves.
    Plotdata,
}

fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let file = match &cli.config {
        Some(path) => config::load_file_config(path)?,
        None => config::FileConfig::default(),
    };
    let interval = match &cli.interval {
        Some(text) => Some(config::parse_interval(text)?),
        None => file.interval,
    };
    let horizons = match &cli.horizons {
        Some(text) => Some(config::parse_horizons(text)?),
        None => file.horizons,
    };
    let mode = match &cli.mode {
        Some(text) => text.parse::<Mode>()?,
        None => file.mode.unwrap_or(Mode::BuyAndHold),
    };
    let precision = cli.precision.or(file.precision);
    if let Some(p) = precision {
        if !(1..=15).contains(&p) {
            return Err(Error::InvalidInput(format!(
                "precision must be between 1 and 15, got {p}"
            )));
        }
    }
    Ok(RunConfig {
        input: cli
            .input
            .clone()
            .or(file.input)
            .ok_or_else(|| Error::InvalidInput("missing --input".into()))?,
        kind: cli.kind.or(file.kind).unwrap_or(Kind::ReturnsCsv),
        percent: cli.percent || file.percent.unwrap_or(false),
        split: cli.split.clone().or(file.split),
        interval,
        msr_rate: cli.msr_rate.or(file.msr_rate).unwrap_or(0.0),
        no_short: cli.no_short || file.no_short.unwrap_or(false),
        grid: cli.grid.or(file.grid).unwrap_or(1000),
        horizons,
        mode,
        format: cli.format.or(file.format).unwrap_or(Format::Table),
        out: cli.out.clone().or(file.out),
        precision,
    })
}

/// 2 for input/parse problems, 1 for every domain error.
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parse { .. }
        | Error::DuplicateDate { .. }
        | Error::RaggedRow { .. }
        | Error::NonPositivePrice { .. }
        | Error::MissingData { .. }
        | Error::EmptySide { .. }
        | Error::InvalidInput(_)
        | Error::Io(_) => 2,
        _ => 1,
    }
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = resolve_config(cli)?;
    let payload = match &cli.command {
        Command::Stats => commands::cmd_stats(&cfg)?,
        Command::Portfolio { which } => commands::cmd_portfolio(&cfg, *which)?,
        Command::Backtest => commands::cmd_backtest(&cfg)?,
        Command::Plotdata => commands::cmd_plotdata(&cfg)?,
    };
    print!("{payload}");
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
