use std::f64::consts::TAU;

use nalgebra::DMatrix;

use super::{rrc, FilterConfig, PhysicalPath};
use crate::dd::{
    twisted_convolution, unit_root, DdBox, DdGrid, DdPatch, QpSignal, RootTable, C64,
};
use crate::{Error, Result};

/// Effective DD channel taps on a support box, zero outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannel {
    grid: DdGrid,
    taps: DdPatch,
}

impl EffectiveChannel {
    pub fn new(grid: DdGrid, taps: DdPatch) -> Self {
        Self { grid, taps }
    }

    pub fn zeros(grid: DdGrid, support: DdBox) -> Self {
        Self::new(grid, DdPatch::zeros(support))
    }

    pub fn grid(&self) -> &DdGrid {
        &self.grid
    }

    pub fn support(&self) -> &DdBox {
        self.taps.region()
    }

    pub fn taps(&self) -> &DdPatch {
        &self.taps
    }

    pub fn into_taps(self) -> DdPatch {
        self.taps
    }

    pub fn tap(&self, k: i64, l: i64) -> C64 {
        self.taps.get(k, l)
    }

    /// Apply to a DD frame: `h *_sigma X` on the fundamental domain.
    pub fn apply_dd(&self, x: &QpSignal) -> QpSignal {
        let out = twisted_convolution(&self.grid, &self.taps, x, &DdBox::fundamental(&self.grid));
        QpSignal::new(self.grid, out.into_values()).expect("fundamental box has MN points")
    }

    /// Apply to a time-domain frame.
    pub fn apply_time(&self, x: &[C64]) -> Result<Vec<C64>> {
        TimeKernel::new(self).apply(x)
    }

    pub fn channel_matrix(&self) -> DMatrix<C64> {
        build_channel_matrix(self)
    }
}

/// Support box `[0, ceil(B tau_max) + 4 w_tau] x [-(ceil(T nu_max) + 4 w_nu), ...]`.
pub fn default_support_box(
    grid: &DdGrid,
    filter: &FilterConfig,
    max_delay_s: f64,
    max_doppler_hz: f64,
) -> DdBox {
    let k_max = (grid.bandwidth() * max_delay_s).ceil() as i64 + 4 * filter.half_width_delay as i64;
    let l_max =
        (grid.duration() * max_doppler_hz).ceil() as i64 + 4 * filter.half_width_doppler as i64;
    DdBox::channel(k_max, l_max).expect("non-negative extents")
}

/// Sample the effective channel of `paths` with complex `gains`:
///
/// `h[k, l] = sum_i g_i exp(-j 2 pi nu_i tau_i) rrc(beta_tau, k - B tau_i) rrc(beta_nu, l - T nu_i)`.
pub fn sample_effective_channel(
    paths: &[PhysicalPath],
    gains: &[C64],
    grid: &DdGrid,
    filter: &FilterConfig,
    support: DdBox,
) -> Result<EffectiveChannel> {
    filter.validate()?;
    if paths.len() != gains.len() {
        return Err(Error::LengthMismatch {
            left: paths.len(),
            right: gains.len(),
        });
    }
    for (index, p) in paths.iter().enumerate() {
        let delay_ok = p.delay_s >= 0.0 && p.delay_s < grid.tau_p();
        let doppler_ok = p.doppler_hz.abs() < grid.nu_p() / 2.0;
        if !(delay_ok && doppler_ok) {
            return Err(Error::PathOutsideRegion {
                index,
                delay_s: p.delay_s,
                doppler_hz: p.doppler_hz,
            });
        }
    }
    let (b, t) = (grid.bandwidth(), grid.duration());
    let weights: Vec<C64> = paths
        .iter()
        .zip(gains)
        .map(|(p, g)| g * C64::from_polar(1.0, -TAU * p.doppler_hz * p.delay_s))
        .collect();
    let taps = DdPatch::from_fn(support, |k, l| {
        paths
            .iter()
            .zip(&weights)
            .map(|(p, w)| {
                w * rrc(filter.beta_tau, k as f64 - b * p.delay_s)
                    * rrc(filter.beta_nu, l as f64 - t * p.doppler_hz)
            })
            .sum()
    });
    Ok(EffectiveChannel::new(*grid, taps))
}

/// Dense `MN x MN` DD channel matrix. Column `k0 + l0 M` is
/// `vec(h *_sigma pulsone(k0, l0))`, so `H vec(X) = vec(h *_sigma X)`.
pub fn build_channel_matrix(h: &EffectiveChannel) -> DMatrix<C64> {
    let grid = h.grid();
    let (m, n, len) = (grid.m() as i64, grid.n() as i64, grid.len());
    let roots = RootTable::new(len);
    let mut mat = DMatrix::from_element(len, len, C64::new(0.0, 0.0));
    for (kt, lt, v) in h.taps().iter() {
        if v == C64::new(0.0, 0.0) {
            continue;
        }
        for l0 in 0..n {
            for k0 in 0..m {
                // The pulsone at (k0, l0) shifted by (kt, lt) lands on
                // (k0 + kt) mod M, (l0 + lt) mod N with a quasi-periodic wrap.
                let kk = k0 + kt;
                let ll = l0 + lt;
                let k = kk.rem_euclid(m);
                let l = ll.rem_euclid(n);
                // pulsone.at(k - kt, l - lt): wraps = (k - kt - k0) / M
                let wraps = (k - kt - k0).div_euclid(m);
                let qp = unit_root(n as usize, wraps.rem_euclid(n) * l0);
                let twist = roots.get(lt * (k - kt));
                let row = (k + l * m) as usize;
                let col = (k0 + l0 * m) as usize;
                mat[(row, col)] += v * qp * twist;
            }
        }
    }
    mat
}

/// Time-domain form of a DD channel:
/// `y[n] = sum_d g_d[n] x[(n - d) mod MN]` with
/// `g_d[n] = sum_l h[d, l] exp(j 2 pi l (n - d) / MN)`.
#[derive(Debug, Clone)]
pub struct TimeKernel {
    len: usize,
    delays: Vec<i64>,
    /// `gains[j][n]` for delay `delays[j]`.
    gains: Vec<Vec<C64>>,
}

impl TimeKernel {
    pub fn new(h: &EffectiveChannel) -> Self {
        let len = h.grid().len();
        let roots = RootTable::new(len);
        let support = h.support();
        let mut delays = Vec::with_capacity(support.delay_len());
        let mut gains = Vec::with_capacity(support.delay_len());
        for d in support.delay.0..=support.delay.1 {
            let taps: Vec<(i64, C64)> = (support.doppler.0..=support.doppler.1)
                .map(|l| (l, h.tap(d, l)))
                .filter(|(_, v)| *v != C64::new(0.0, 0.0))
                .collect();
            if taps.is_empty() {
                continue;
            }
            let g = (0..len as i64)
                .map(|n| taps.iter().map(|&(l, v)| v * roots.get(l * (n - d))).sum())
                .collect();
            delays.push(d);
            gains.push(g);
        }
        Self { len, delays, gains }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Delays with at least one nonzero tap.
    pub fn delays(&self) -> &[i64] {
        &self.delays
    }

    /// `g_d[n]` for the `j`-th stored delay.
    pub fn gains(&self, j: usize) -> &[C64] {
        &self.gains[j]
    }

    fn check(&self, x: &[C64]) -> Result<()> {
        if x.len() != self.len {
            return Err(Error::MalformedFrame {
                expected: self.len,
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.check(x)?;
        let len = self.len as i64;
        let mut y = vec![C64::new(0.0, 0.0); self.len];
        for (d, g) in self.delays.iter().zip(&self.gains) {
            let shift = d.rem_euclid(len) as usize;
            for (n, yn) in y.iter_mut().enumerate() {
                let src = (n + self.len - shift) % self.len;
                *yn += g[n] * x[src];
            }
        }
        Ok(y)
    }

    /// `H^H y`.
    pub fn adjoint(&self, y: &[C64]) -> Result<Vec<C64>> {
        self.check(y)?;
        let len = self.len as i64;
        let mut x = vec![C64::new(0.0, 0.0); self.len];
        for (d, g) in self.delays.iter().zip(&self.gains) {
            let shift = d.rem_euclid(len) as usize;
            for (m, xm) in x.iter_mut().enumerate() {
                let n = (m + shift) % self.len;
                *xm += g[n].conj() * y[n];
            }
        }
        Ok(x)
    }
}
