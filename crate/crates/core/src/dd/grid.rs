use std::f64::consts::TAU;

use super::C64;
use crate::{Error, Result};

/// Frame geometry: `M` delay bins, `N` Doppler bins and the Doppler period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DdGrid {
    m: usize,
    n: usize,
    nu_p: f64,
}

impl DdGrid {
    pub fn new(m: usize, n: usize, nu_p: f64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidParameter(format!(
                "grid dimensions must be positive, got {m}x{n}"
            )));
        }
        if !(nu_p.is_finite() && nu_p > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Doppler period must be positive, got {nu_p}"
            )));
        }
        Ok(Self { m, n, nu_p })
    }

    /// Delay bins.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Doppler bins.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of DD bins, which is also the time-domain frame length.
    pub fn len(&self) -> usize {
        self.m * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Doppler period in Hz.
    pub fn nu_p(&self) -> f64 {
        self.nu_p
    }

    /// Delay period in seconds.
    pub fn tau_p(&self) -> f64 {
        1.0 / self.nu_p
    }

    /// Bandwidth `M nu_p` in Hz. Also the time-domain sample rate.
    pub fn bandwidth(&self) -> f64 {
        self.m as f64 * self.nu_p
    }

    /// Frame duration `N tau_p` in seconds.
    pub fn duration(&self) -> f64 {
        self.n as f64 * self.tau_p()
    }

    pub fn delay_resolution(&self) -> f64 {
        self.tau_p() / self.m as f64
    }

    pub fn doppler_resolution(&self) -> f64 {
        self.nu_p / self.n as f64
    }

    /// Column-major index `k + l M` of a fundamental-domain bin.
    pub fn index(&self, k: usize, l: usize) -> usize {
        k + l * self.m
    }

    pub fn check_bin(&self, k: i64, l: i64) -> Result<()> {
        if k < 0 || l < 0 || k as usize >= self.m || l as usize >= self.n {
            return Err(Error::IndexOutOfRange {
                k,
                l,
                m: self.m,
                n: self.n,
            });
        }
        Ok(())
    }
}

/// `exp(j 2 pi idx / len)` with the index reduced first, so large products
/// of indices stay exact.
pub fn unit_root(len: usize, idx: i64) -> C64 {
    let r = idx.rem_euclid(len as i64) as f64;
    C64::from_polar(1.0, TAU * r / len as f64)
}

/// Precomputed `exp(j 2 pi i / len)` for `i in 0..len`.
#[derive(Debug, Clone)]
pub struct RootTable {
    roots: Vec<C64>,
}

impl RootTable {
    pub fn new(len: usize) -> Self {
        Self {
            roots: (0..len as i64).map(|i| unit_root(len, i)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    #[inline]
    pub fn get(&self, idx: i64) -> C64 {
        self.roots[idx.rem_euclid(self.roots.len() as i64) as usize]
    }

    #[inline]
    pub fn get_reduced(&self, idx: usize) -> C64 {
        self.roots[idx]
    }
}
