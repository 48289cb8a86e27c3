//! Channel estimation, detection and the per-frame session loops.

mod estimate;
mod lmmse;
mod session;

pub use estimate::{ber, estimate_h_eff, nmse, remove_pilot, ChannelEstimate, EstimateSource};
pub use lmmse::{lmmse_detect, lmmse_detect_dense, Detection, REG_FLOOR};
pub use session::{
    differential_step, run_differential_session, run_perfect_csi_session, run_separate_session,
    run_session, run_sp_session, Link, MetricsRecord, SessionConfig, DEFAULT_PILOT_PERIOD,
};
