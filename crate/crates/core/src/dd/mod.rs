//! Delay-Doppler algebra.
//!
//! Everything here is a pure function of its inputs. Signals live on an
//! `M x N` grid of delay and Doppler bins; time sequences have length `MN`
//! and are indexed cyclically.

mod ambiguity;
mod grid;
mod region;
mod signal;
mod twisted;
mod zak;

pub use ambiguity::{
    cross_ambiguity, cross_ambiguity_at, dd_cross_ambiguity, pulsone_cross_ambiguity,
    symbol_ambiguity, AmbiguitySurface,
};
pub use grid::{unit_root, DdGrid, RootTable};
pub use region::{DdBox, DdPatch, DdSampled, Periodic};
pub use signal::{point_pulsone, QpSignal};
pub use twisted::{twisted_convolution, twisted_convolution_at};
pub use zak::{inverse_zak, zak};

pub use num_complex::Complex64 as C64;

/// Total energy `sum |x|^2` of a sequence.
pub fn energy(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum()
}

/// Mean per-sample energy.
pub fn mean_energy(x: &[C64]) -> f64 {
    if x.is_empty() {
        0.0
    } else {
        energy(x) / x.len() as f64
    }
}
