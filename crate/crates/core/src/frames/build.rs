use super::{EnergyBudget, ValidatedPilot};
use crate::dd::{energy, inverse_zak, mean_energy, point_pulsone, DdGrid, QpSignal, C64};
use crate::{Error, Result};

fn symbols_signal(grid: &DdGrid, symbols: &[C64]) -> Result<QpSignal> {
    QpSignal::new(*grid, symbols.to_vec())
}

/// Data-only frame `sqrt(e) inverse_zak(X)`; mean per-symbol energy `e` for
/// unit-energy symbols.
pub fn build_do_frame(grid: &DdGrid, symbols: &[C64], e: f64) -> Result<Vec<C64>> {
    let x = inverse_zak(&symbols_signal(grid, symbols)?);
    let s = e.sqrt();
    Ok(x.into_iter().map(|v| v * s).collect())
}

/// Point-pilot frame: all `MN e` energy on the pulsone at `(k_p, l_p)`.
pub fn build_pp_frame(grid: &DdGrid, k_p: i64, l_p: i64, e: f64) -> Result<Vec<C64>> {
    let p = inverse_zak(&point_pulsone(grid, k_p, l_p)?);
    let s = (grid.len() as f64 * e).sqrt();
    Ok(p.into_iter().map(|v| v * s).collect())
}

/// A spread-pilot frame and the data part it carries.
#[derive(Debug, Clone, PartialEq)]
pub struct SpFrame {
    /// `sqrt(e_d) data + sqrt(e_p) pilot`.
    pub samples: Vec<C64>,
    /// Unit mean-energy data component, orthogonal to the pilot when the
    /// pilot energy is positive.
    pub data: Vec<C64>,
}

/// Superimpose a validated chirp pilot on data.
///
/// The data waveform is normalized to unit mean energy and, when the pilot
/// carries energy, made orthogonal to it, so the frame energy is exactly
/// `MN (e_d + e_p)`.
pub fn build_sp_frame(
    grid: &DdGrid,
    symbols: &[C64],
    budget: &EnergyBudget,
    pilot: &ValidatedPilot,
) -> Result<SpFrame> {
    if pilot.grid() != grid {
        return Err(Error::InvalidParameter("pilot built for a different grid".into()));
    }
    let mut data = inverse_zak(&symbols_signal(grid, symbols)?);
    let p = pilot.samples();
    if budget.pilot > 0.0 {
        let proj: C64 = data.iter().zip(p).map(|(d, q)| d * q.conj()).sum::<C64>() / energy(p);
        for (d, q) in data.iter_mut().zip(p) {
            *d -= proj * q;
        }
    }
    let e = mean_energy(&data);
    if e <= 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let norm = e.sqrt().recip();
    data.iter_mut().for_each(|d| *d *= norm);
    let (sd, sp) = (budget.data.sqrt(), budget.pilot.sqrt());
    let samples = data.iter().zip(p).map(|(d, q)| d * sd + q * sp).collect();
    Ok(SpFrame { samples, data })
}
