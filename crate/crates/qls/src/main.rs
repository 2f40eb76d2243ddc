use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qls::commands::{self, Context};
use qls::config::{LoadedConfig, RamseyScanKind};
use qls::error::{CliError, CliResult, EXIT_OK, EXIT_USAGE};

#[derive(Debug, Parser)]
#[command(name = "qls", version, about = "Quantum-logic spectroscopy simulations and analysis")]
struct Cli {
    /// TOML configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Also write SVG plots next to the CSVs.
    #[arg(long, global = true)]
    plots: bool,
    /// Override the shot count of the subcommand.
    #[arg(long, global = true)]
    shots: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Scan {
    Detuning,
    Phase,
    Wait,
}

impl From<Scan> for RamseyScanKind {
    fn from(s: Scan) -> Self {
        match s {
            Scan::Detuning => RamseyScanKind::Detuning,
            Scan::Phase => RamseyScanKind::Phase,
            Scan::Wait => RamseyScanKind::Wait,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Normal modes of the two-ion crystal.
    Modes,
    /// Frequency scan of the probed ion across carrier and sidebands.
    Spectrum,
    /// Rabi flopping on a carrier or sideband.
    Rabi,
    /// Ramsey fringes versus detuning, phase or free-evolution time.
    Ramsey {
        #[arg(long, value_enum)]
        scan: Option<Scan>,
    },
    /// Optical pumping into a stretched state versus repetitions.
    Pump,
    /// A batch of quantum-logic shots at fixed excitation probability.
    QlsBatch {
        #[arg(long)]
        p: Option<f64>,
    },
    /// Clock-transition line scan with double state mapping.
    ClockScan,
    /// Zeeman line fit, zero-field frequency and g-factor.
    Fit {
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Significance of a shift between long and short Ramsey times.
    TestRamseyDependence {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        sigma_r: Option<f64>,
    },
    /// Apply the systematic-shift table to a measured frequency.
    Budget {
        #[arg(long)]
        table: Option<PathBuf>,
        /// Uncorrected frequency in Hz.
        #[arg(long)]
        f0: Option<u64>,
    },
    /// Two-setup comparison with the one-minute difference histogram.
    Compare,
    /// Exact comb chain from 729 nm to the Al⁺ probe.
    Chain,
}

fn run(cli: Cli) -> CliResult<serde_json::Value> {
    let cfg = match &cli.config {
        Some(p) => LoadedConfig::load(p)?,
        None => LoadedConfig::defaults(),
    };
    let Format::Csv = cli.format;
    let ctx = Context {
        cfg,
        seed: cli.seed,
        out: cli.out,
        plots: cli.plots,
        shots: cli.shots,
    };
    if ctx.shots == Some(0) {
        return Err(CliError::Usage("--shots must be positive".into()));
    }
    log::info!("seed {} -> {}", ctx.seed, ctx.out.display());
    match cli.cmd {
        Cmd::Modes => commands::modes::run(&ctx),
        Cmd::Spectrum => commands::spectrum::run(&ctx),
        Cmd::Rabi => commands::rabi::run(&ctx),
        Cmd::Ramsey { scan } => commands::ramsey::run(&ctx, scan.map(Into::into)),
        Cmd::Pump => commands::pump::run(&ctx),
        Cmd::QlsBatch { p } => commands::qls_batch::run(&ctx, p),
        Cmd::ClockScan => commands::clock::run(&ctx),
        Cmd::Fit { input } => commands::fit::run(&ctx, input.as_deref()),
        Cmd::TestRamseyDependence {
            input,
            delta,
            n,
            sigma_r,
        } => commands::fit::run_dependence(&ctx, input.as_deref(), delta, n, sigma_r),
        Cmd::Budget { table, f0 } => commands::budget::run(&ctx, table.as_deref(), f0),
        Cmd::Compare => commands::compare::run(&ctx),
        Cmd::Chain => commands::chain::run(&ctx),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK } as u8);
        }
    };
    match run(cli) {
        Ok(summary) => {
            println!("{}", serde_json::to_string_pretty(&summary).unwrap_or_default());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
