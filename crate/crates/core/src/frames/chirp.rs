use std::f64::consts::PI;

use crate::dd::{cross_ambiguity, cross_ambiguity_at, DdBox, DdGrid, C64};
use crate::{Error, Result};

/// Off-origin ambiguity magnitude allowed relative to the origin value.
pub const PURITY_TOLERANCE: f64 = 1e-6;

/// Unit-modulus discrete chirp of length `MN`:
/// `p[n] = exp(j pi u n (n + 1) / MN)` for odd `MN`, `exp(j pi u n^2 / MN)`
/// for even `MN`. Its self-ambiguity lives on the line `l = u k (mod MN)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChirpPilot {
    grid: DdGrid,
    root: u64,
    samples: Vec<C64>,
}

impl ChirpPilot {
    pub fn grid(&self) -> &DdGrid {
        &self.grid
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    /// Run [`ambiguity_purity_check`] over `region` and keep the pilot only
    /// if it passes.
    pub fn validated(self, region: DdBox) -> Result<ValidatedPilot> {
        let report = ambiguity_purity_check(&self.grid, &self.samples, &region)?;
        if !report.pass {
            let (k, l, magnitude) = report.worst;
            return Err(Error::ImpureAmbiguity {
                k,
                l,
                magnitude,
                origin: report.origin,
            });
        }
        Ok(ValidatedPilot {
            pilot: self,
            region,
        })
    }
}

/// A chirp whose self-ambiguity is a delta over `region` (usually the
/// difference set of the channel support box).
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedPilot {
    pilot: ChirpPilot,
    region: DdBox,
}

impl ValidatedPilot {
    pub fn samples(&self) -> &[C64] {
        &self.pilot.samples
    }

    pub fn root(&self) -> u64 {
        self.pilot.root
    }

    pub fn grid(&self) -> &DdGrid {
        &self.pilot.grid
    }

    pub fn region(&self) -> &DdBox {
        &self.region
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn build_chirp_pilot(grid: &DdGrid, root: u64) -> Result<ChirpPilot> {
    let len = grid.len() as u64;
    if root == 0 || gcd(root, len) != 1 {
        return Err(Error::NonCoprimeRoot {
            root,
            len: grid.len(),
        });
    }
    let odd = len % 2 == 1;
    let two_len = 2 * len;
    let u = root % two_len;
    let samples = (0..len)
        .map(|n| {
            let quad = if odd { n * (n + 1) } else { n * n };
            // exponent pi r / MN with r reduced mod 2 MN
            let r = ((quad % two_len) as u128 * u as u128 % two_len as u128) as f64;
            C64::from_polar(1.0, PI * r / len as f64)
        })
        .collect();
    Ok(ChirpPilot {
        grid: *grid,
        root,
        samples,
    })
}

/// Outcome of scanning a pilot's self-ambiguity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurityReport {
    pub pass: bool,
    /// `|A[0, 0]|`.
    pub origin: f64,
    /// Largest off-origin `(k, l, |A|)` in the region.
    pub worst: (i64, i64, f64),
}

/// Passes iff every off-origin `|A_{p,p}|` in `region` is at most
/// [`PURITY_TOLERANCE`] times `|A_{p,p}[0, 0]|`.
pub fn ambiguity_purity_check(grid: &DdGrid, pilot: &[C64], region: &DdBox) -> Result<PurityReport> {
    let origin = cross_ambiguity_at(grid, pilot, pilot, 0, 0)?.norm();
    let surface = cross_ambiguity(grid, pilot, pilot, region)?;
    let mut worst = (0, 0, 0.0);
    for (k, l, v) in surface.patch().iter() {
        if (k, l) == (0, 0) {
            continue;
        }
        if v.norm() > worst.2 {
            worst = (k, l, v.norm());
        }
    }
    Ok(PurityReport {
        pass: origin > 0.0 && worst.2 <= PURITY_TOLERANCE * origin,
        origin,
        worst,
    })
}

/// Smallest root coprime to `MN` whose ambiguity line misses `region`
/// except at the origin, confirmed by a full purity scan.
pub fn select_chirp_root(grid: &DdGrid, region: DdBox) -> Result<ValidatedPilot> {
    let len = grid.len() as i64;
    let line_misses = |u: i64| {
        (region.delay.0..=region.delay.1).all(|k| {
            if k.rem_euclid(len) == 0 {
                return true;
            }
            let l = (u * k).rem_euclid(len);
            // every Doppler alias of l must avoid the region
            let first = region.doppler.0 + (l - region.doppler.0).rem_euclid(len);
            first > region.doppler.1
        })
    };
    for u in 1..len {
        if gcd(u as u64, len as u64) != 1 || !line_misses(u) {
            continue;
        }
        if let Ok(p) = build_chirp_pilot(grid, u as u64)?.validated(region) {
            return Ok(p);
        }
    }
    Err(Error::InvalidParameter(format!(
        "no chirp root gives a clean ambiguity over {region} on a {}x{} grid",
        grid.m(),
        grid.n()
    )))
}
