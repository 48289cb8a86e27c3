use crate::{Error, Result};

/// Pilot energy sits this many dB below the data energy in the baseline split.
pub const PILOT_OFFSET_DB: f64 = 5.0;

/// Pilot strategy of a frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrameScheme {
    /// No pilot; detected data serve as the estimation reference.
    DataOnly,
    /// Chirp pilot superimposed on data with energy fraction `alpha` on data.
    SpreadPilot { alpha: f64, root: Option<u64> },
    /// Point-pilot frames alternating with data frames.
    SeparatePilot { k_p: i64, l_p: i64 },
    /// Oracle channel knowledge.
    PerfectCsi,
}

impl FrameScheme {
    pub fn name(&self) -> &'static str {
        match self {
            FrameScheme::DataOnly => "do",
            FrameScheme::SpreadPilot { .. } => "sp",
            FrameScheme::SeparatePilot { .. } => "separate",
            FrameScheme::PerfectCsi => "perfect",
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self {
            FrameScheme::SpreadPilot { alpha, .. } => Some(*alpha),
            _ => None,
        }
    }
}

/// Per-symbol energies (linear) and noise variance for one SNR point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBudget {
    pub snr_db: f64,
    /// Data energy per symbol.
    pub data: f64,
    /// Pilot energy per symbol.
    pub pilot: f64,
    /// Total per-symbol energy, `data + pilot`. A data-only frame puts all of
    /// it on data.
    pub total: f64,
    pub noise_var: f64,
    pub alpha: Option<f64>,
}

impl EnergyBudget {
    pub fn with_noise_var(mut self, noise_var: f64) -> Self {
        self.noise_var = noise_var;
        self
    }
}

/// Energies for a data SNR:
/// `e_d = 10^{SNR/10}`, `e_p,dB = e_d,dB - 5`, `e_do = e_d + e_p`, `sigma^2 = 1`.
/// A spread-pilot scheme re-splits the same total as `alpha e_do` on data
/// and `(1 - alpha) e_do` on the pilot.
pub fn energy_split(snr_db: f64, scheme: &FrameScheme) -> Result<EnergyBudget> {
    if !snr_db.is_finite() {
        return Err(Error::InvalidParameter(format!("SNR must be finite, got {snr_db}")));
    }
    let data = 10f64.powf(snr_db / 10.0);
    let pilot = 10f64.powf((snr_db - PILOT_OFFSET_DB) / 10.0);
    let total = data + pilot;
    let base = EnergyBudget {
        snr_db,
        data,
        pilot,
        total,
        noise_var: 1.0,
        alpha: None,
    };
    match *scheme {
        FrameScheme::SpreadPilot { alpha, .. } => {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "alpha must lie in (0, 1), got {alpha}"
                )));
            }
            Ok(EnergyBudget {
                data: alpha * total,
                pilot: (1.0 - alpha) * total,
                alpha: Some(alpha),
                ..base
            })
        }
        _ => Ok(base),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_db_split() {
        let b = energy_split(10.0, &FrameScheme::DataOnly).unwrap();
        assert!((b.data - 10.0).abs() < 1e-12);
        assert!((b.pilot - 3.162_277_660_168_379_5).abs() < 1e-12);
        assert!((b.total - 13.162_277_660_168_38).abs() < 1e-12);
        assert_eq!(b.noise_var, 1.0);
    }

    #[test]
    fn half_alpha_splits_evenly() {
        let s = FrameScheme::SpreadPilot {
            alpha: 0.5,
            root: None,
        };
        let b = energy_split(7.0, &s).unwrap();
        assert!((b.data - b.pilot).abs() < 1e-12);
        assert!((b.data - b.total / 2.0).abs() < 1e-12);
    }

    #[test]
    fn alpha_split_preserves_total() {
        let base = energy_split(15.0, &FrameScheme::DataOnly).unwrap();
        for alpha in [0.1, 0.3, 0.9] {
            let b = energy_split(15.0, &FrameScheme::SpreadPilot { alpha, root: None }).unwrap();
            assert!((b.data + b.pilot - base.total).abs() < 1e-12);
            assert_eq!(b.noise_var, 1.0);
        }
    }

    #[test]
    fn alpha_out_of_range() {
        for alpha in [0.0, 1.0, 1.3, -0.2] {
            assert!(energy_split(0.0, &FrameScheme::SpreadPilot { alpha, root: None }).is_err());
        }
    }
}
