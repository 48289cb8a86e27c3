//! Constellations, frame construction and energy accounting.

mod budget;
mod build;
mod chirp;
mod constellation;

pub use budget::{energy_split, EnergyBudget, FrameScheme, PILOT_OFFSET_DB};
pub use build::{build_do_frame, build_pp_frame, build_sp_frame, SpFrame};
pub use chirp::{
    ambiguity_purity_check, build_chirp_pilot, select_chirp_root, ChirpPilot, PurityReport,
    ValidatedPilot, PURITY_TOLERANCE,
};
pub use constellation::{qam_hard_demod, qam_modulate, Constellation};
