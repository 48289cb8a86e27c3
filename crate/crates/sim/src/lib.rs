//! Configuration, parallel sweeps, CSV output and summaries for the
//! `zakotfs` link simulator.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod plot;
pub mod seed;
pub mod summary;
pub mod sweep;

pub use config::{parse_config, parse_config_in, ConfigError, SchemeKind, SimConfig};
pub use summary::{read_rows, render_plots, summarize, summarize_file, Summary};
pub use sweep::{run_cells, run_sweep, write_csv, ResultRow, SweepOutcome};
