//! Parallel Monte-Carlo sweep and CSV emission.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use zakotfs::channel::{default_support_box, ChannelRealization};
use zakotfs::frames::{energy_split, Constellation, FrameScheme};
use zakotfs::receiver::{run_session, Link, MetricsRecord, SessionConfig};

use crate::config::SimConfig;
use crate::seed::{cell_seed, channel_seed};

/// Above this many DD bins sessions skip detection and only estimate.
pub const DETECTION_LIMIT: usize = 4000;

/// One CSV row. Absent metrics serialize as empty fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scheme: String,
    pub alpha: Option<f64>,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub qam: usize,
    pub snr_db: f64,
    pub seed: u64,
    pub frame: usize,
    pub nmse: Option<f64>,
    pub ber: Option<f64>,
}

/// One (scheme, SNR, realization) unit of work.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub scheme: FrameScheme,
    pub snr_index: usize,
    pub realization: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub cell: Cell,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<ResultRow>,
    pub failures: Vec<CellFailure>,
    pub cells: usize,
    pub elapsed: Duration,
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("link setup failed: {0}")]
    Link(#[from] zakotfs::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Cells in output order: scheme, then SNR, then realization.
pub fn cells(config: &SimConfig) -> Vec<Cell> {
    let mut out = Vec::new();
    for scheme in config.frame_schemes() {
        for snr_index in 0..config.snr_db.len() {
            for realization in 0..config.realizations {
                out.push(Cell {
                    scheme,
                    snr_index,
                    realization,
                });
            }
        }
    }
    out
}

pub fn build_link(config: &SimConfig) -> zakotfs::Result<Link> {
    let support = default_support_box(
        &config.grid,
        &config.filter,
        config.channel.max_delay_s(),
        config.channel.nu_max_hz,
    );
    Link::new(
        config.grid,
        config.filter,
        support,
        Constellation::new(config.qam)?,
    )
}

fn run_cell(config: &SimConfig, link: &Link, cell: &Cell) -> zakotfs::Result<Vec<MetricsRecord>> {
    let ch_seed = channel_seed(config.seed, cell.realization);
    let realization =
        ChannelRealization::draw(config.channel.clone(), &mut ChaCha8Rng::seed_from_u64(ch_seed))?;
    let snr = config.snr_db[cell.snr_index];
    let budget = energy_split(snr, &cell.scheme)?;
    let session = SessionConfig {
        pilot_period: config.pilot_period,
        detect: config.grid.len() <= DETECTION_LIMIT,
        seed: ch_seed,
        ..SessionConfig::new(cell.scheme, config.frames)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(config.seed, &cell.scheme, cell.snr_index, cell.realization));
    run_session(link, &realization, &session, &budget, &mut rng)
}

fn to_row(config: &SimConfig, r: MetricsRecord) -> ResultRow {
    ResultRow {
        scheme: r.scheme.to_string(),
        alpha: r.alpha,
        m: config.grid.m(),
        n: config.grid.n(),
        qam: config.qam,
        snr_db: r.snr_db,
        seed: r.seed,
        frame: r.frame,
        nmse: r.nmse,
        ber: r.ber,
    }
}

/// Run every cell on `jobs` worker threads. Rows come back in cell order
/// whatever the worker count.
pub fn run_cells(config: &SimConfig, jobs: usize) -> Result<SweepOutcome, SweepError> {
    let start = Instant::now();
    let link = build_link(config)?;
    let cells = cells(config);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    let results: Vec<_> = pool.install(|| {
        cells
            .par_iter()
            .map(|cell| run_cell(config, &link, cell))
            .collect()
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (cell, result) in cells.iter().zip(results) {
        match result {
            Ok(records) => rows.extend(records.into_iter().map(|r| to_row(config, r))),
            Err(e) => failures.push(CellFailure {
                cell: *cell,
                message: e.to_string(),
            }),
        }
    }
    Ok(SweepOutcome {
        rows,
        failures,
        cells: cells.len(),
        elapsed: start.elapsed(),
    })
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(["scheme", "alpha", "M", "N", "qam", "snr_db", "seed", "frame", "nmse", "ber"])?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Run the sweep and write `results.csv` into `config.out_dir`.
pub fn run_sweep(config: &SimConfig, jobs: usize) -> Result<(SweepOutcome, PathBuf), SweepError> {
    let outcome = run_cells(config, jobs)?;
    let io = |path: &PathBuf| {
        let path = path.clone();
        move |source| SweepError::Io { path, source }
    };
    std::fs::create_dir_all(&config.out_dir).map_err(io(&config.out_dir))?;
    let path = config.out_dir.join("results.csv");
    let file = File::create(&path).map_err(io(&path))?;
    write_csv(&outcome.rows, BufWriter::new(file))?;
    Ok((outcome, path))
}
