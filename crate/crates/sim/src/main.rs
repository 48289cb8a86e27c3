use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use zakotfs::dd::DdGrid;
use zakotfs_sim::{parse_config_in, run_sweep, summarize_file, SchemeKind, SimConfig};

#[derive(Parser, Debug)]
#[command(name = "zakotfs", version, about = "Zak-OTFS data-only channel estimation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Run a Monte-Carlo sweep and write results.csv.
    Run(RunArgs),
    /// Aggregate a results CSV into summary.csv and SVG plots.
    Summarize {
        /// Results file written by `run`.
        csv: PathBuf,
        /// Output directory (defaults to the CSV's directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Skip SVG output.
        #[arg(long)]
        no_plots: bool,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// TOML sweep configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (defaults to available parallelism).
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long = "M")]
    m: Option<usize>,
    #[arg(long = "N")]
    n: Option<usize>,
    /// Doppler period in Hz.
    #[arg(long)]
    nu_p: Option<f64>,
    #[arg(long)]
    qam: Option<usize>,
    /// Comma-separated schemes: do, sp, separate, perfect.
    #[arg(long, value_delimiter = ',')]
    scheme: Option<Vec<String>>,
    /// Comma-separated data energy fractions for the spread-pilot scheme.
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    /// Comma-separated data SNRs in dB.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr: Option<Vec<f64>>,
    #[arg(long)]
    frames: Option<usize>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    pilot_period: Option<usize>,
    /// Roll-off for both delay and Doppler filters.
    #[arg(long)]
    beta: Option<f64>,
    /// Skip SVG output.
    #[arg(long)]
    no_plots: bool,
}

fn load(args: &RunArgs) -> Result<SimConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let base = path.parent().unwrap_or(Path::new("."));
            parse_config_in(&text, base).with_context(|| format!("{}", path.display()))?
        }
        None => SimConfig::default(),
    };
    if args.m.is_some() || args.n.is_some() || args.nu_p.is_some() {
        config.grid = DdGrid::new(
            args.m.unwrap_or(config.grid.m()),
            args.n.unwrap_or(config.grid.n()),
            args.nu_p.unwrap_or(config.grid.nu_p()),
        )?;
    }
    if let Some(list) = &args.scheme {
        config.schemes = list
            .iter()
            .map(|s| SchemeKind::parse(s.trim()).with_context(|| format!("unknown scheme {s:?}")))
            .collect::<Result<_>>()?;
    }
    if let Some(b) = args.beta {
        config.filter.beta_tau = b;
        config.filter.beta_nu = b;
    }
    macro_rules! set {
        ($($field:ident <- $arg:expr),*) => {
            $(if let Some(v) = $arg.clone() { config.$field = v; })*
        };
    }
    set!(
        out_dir <- args.out,
        seed <- args.seed,
        qam <- args.qam,
        alphas <- args.alpha,
        snr_db <- args.snr,
        frames <- args.frames,
        realizations <- args.realizations,
        pilot_period <- args.pilot_period
    );
    if args.no_plots {
        config.plots = false;
    }
    if let Err((key, msg)) = config.validate() {
        bail!("{key}: {msg}");
    }
    Ok(config)
}

fn run(args: RunArgs) -> Result<()> {
    let config = load(&args)?;
    let jobs = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let (outcome, path) = run_sweep(&config, jobs)?;
    for f in &outcome.failures {
        eprintln!(
            "cell {} snr {} realization {} failed: {}",
            f.cell.scheme.name(),
            config.snr_db[f.cell.snr_index],
            f.cell.realization,
            f.message
        );
    }
    eprintln!(
        "{} cells ({} failed), {} rows in {:.2?} on {jobs} worker(s) -> {}",
        outcome.cells,
        outcome.failures.len(),
        outcome.rows.len(),
        outcome.elapsed,
        path.display()
    );
    if config.plots {
        summarize_file(&path, &config.out_dir, true)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Summarize { csv, out, no_plots } => {
            let out = out.unwrap_or_else(|| csv.parent().unwrap_or(Path::new(".")).to_path_buf());
            summarize_file(&csv, &out, !no_plots)
                .map(|(s, files)| {
                    eprintln!("{} aggregate rows, {} files written", s.table.len(), files.len());
                })
                .map_err(Into::into)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
