//! Per-cell seed derivation.
//!
//! Every seed is a SplitMix64 fold over a fixed word sequence:
//!
//! ```text
//! fold(words) = s, where s = splitmix64(master) and s = splitmix64(s ^ w) for each w
//! channel_seed = fold(master; CHANNEL_TAG, realization)
//! cell_seed    = fold(master; scheme_id, alpha.to_bits() or 0, snr_index, realization)
//! ```
//!
//! The channel seed ignores scheme and SNR, so every scheme sees the same
//! channel realizations.

use zakotfs::frames::FrameScheme;

const CHANNEL_TAG: u64 = 0x6368_616e_6e65_6c00;

/// SplitMix64 output function applied to `x + golden gamma`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn fold(master: u64, words: &[u64]) -> u64 {
    words
        .iter()
        .fold(splitmix64(master), |s, &w| splitmix64(s ^ w))
}

pub fn scheme_id(scheme: &FrameScheme) -> u64 {
    match scheme {
        FrameScheme::DataOnly => 1,
        FrameScheme::SpreadPilot { .. } => 2,
        FrameScheme::SeparatePilot { .. } => 3,
        FrameScheme::PerfectCsi => 4,
    }
}

pub fn channel_seed(master: u64, realization: usize) -> u64 {
    fold(master, &[CHANNEL_TAG, realization as u64])
}

pub fn cell_seed(master: u64, scheme: &FrameScheme, snr_index: usize, realization: usize) -> u64 {
    let alpha = scheme.alpha().map(f64::to_bits).unwrap_or(0);
    fold(
        master,
        &[scheme_id(scheme), alpha, snr_index as u64, realization as u64],
    )
}
