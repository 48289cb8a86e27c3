use std::f64::consts::PI;

use crate::{Error, Result};

/// Unit-energy root-raised-cosine impulse response at normalized time `s`
/// (symbol period 1). The removable singularities at `s = 0` and
/// `s = +-1/(4 beta)` are evaluated by their limits.
pub fn rrc(beta: f64, s: f64) -> f64 {
    if s == 0.0 {
        return 1.0 - beta + 4.0 * beta / PI;
    }
    if beta > 0.0 && ((4.0 * beta * s).abs() - 1.0).abs() < 1e-9 {
        let a = PI / (4.0 * beta);
        return beta / 2f64.sqrt() * ((1.0 + 2.0 / PI) * a.sin() + (1.0 - 2.0 / PI) * a.cos());
    }
    let num = (PI * s * (1.0 - beta)).sin() + 4.0 * beta * s * (PI * s * (1.0 + beta)).cos();
    let den = PI * s * (1.0 - (4.0 * beta * s).powi(2));
    num / den
}

/// Separable delay/Doppler RRC shaping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfig {
    pub beta_tau: f64,
    pub beta_nu: f64,
    /// Truncation half-width along delay, in taps.
    pub half_width_delay: usize,
    /// Truncation half-width along Doppler, in taps.
    pub half_width_doppler: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            beta_tau: 0.6,
            beta_nu: 0.6,
            half_width_delay: 2,
            half_width_doppler: 2,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, b) in [("beta_tau", self.beta_tau), ("beta_nu", self.beta_nu)] {
            if !(0.0..=1.0).contains(&b) {
                return Err(Error::InvalidParameter(format!("{name} must lie in [0, 1], got {b}")));
            }
        }
        Ok(())
    }
}
