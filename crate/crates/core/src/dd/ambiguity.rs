use super::{DdBox, DdGrid, DdPatch, Periodic, QpSignal, RootTable, C64};
use crate::{Error, Result};

/// Cross-ambiguity values on a rectangle of shifts, normalized by `1/MN`.
///
/// With that normalization `A_{x,x}[0, 0]` is the mean symbol energy of `x`.
/// Surfaces computed from time sequences are periodic with period `MN` on
/// both axes.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbiguitySurface {
    grid: DdGrid,
    patch: DdPatch,
}

impl AmbiguitySurface {
    pub fn grid(&self) -> &DdGrid {
        &self.grid
    }

    pub fn region(&self) -> &DdBox {
        self.patch.region()
    }

    /// The fixed `1/MN` factor applied to every value.
    pub fn normalization(&self) -> f64 {
        1.0 / self.grid.len() as f64
    }

    pub fn get(&self, k: i64, l: i64) -> C64 {
        self.patch.get(k, l)
    }

    pub fn patch(&self) -> &DdPatch {
        &self.patch
    }

    pub fn into_patch(self) -> DdPatch {
        self.patch
    }

    /// Cyclic view; requires the surface to span `[0, MN) x [0, MN)`.
    pub fn periodic(&self) -> Result<Periodic<'_>> {
        Periodic::new(&self.patch, self.grid.len())
    }
}

fn check_len(grid: &DdGrid, s: &[C64]) -> Result<()> {
    if s.len() != grid.len() {
        return Err(Error::MalformedFrame {
            expected: grid.len(),
            got: s.len(),
        });
    }
    Ok(())
}

/// Time-domain cross-ambiguity over `region`:
///
/// `A[k, l] = 1/MN sum_n y[n] conj(x[(n - k) mod MN]) exp(-j 2 pi l (n - k) / MN)`.
///
/// Costs `O(MN)` per point.
pub fn cross_ambiguity(
    grid: &DdGrid,
    y: &[C64],
    x: &[C64],
    region: &DdBox,
) -> Result<AmbiguitySurface> {
    check_len(grid, y)?;
    check_len(grid, x)?;
    let len = grid.len();
    let roots = RootTable::new(len);
    let norm = 1.0 / len as f64;
    let mut values = vec![C64::new(0.0, 0.0); region.len()];
    let mut prod = vec![C64::new(0.0, 0.0); len];
    for k in region.delay.0..=region.delay.1 {
        let start = (-k).rem_euclid(len as i64) as usize;
        // prod[i] = y[n] conj(x[i]) with i = (n - k) mod MN
        for (i, p) in prod.iter_mut().enumerate() {
            let n = (i + len - start) % len;
            *p = y[n] * x[i].conj();
        }
        for l in region.doppler.0..=region.doppler.1 {
            let step = (-l).rem_euclid(len as i64) as usize;
            let mut phase = 0usize;
            let mut acc = C64::new(0.0, 0.0);
            for p in &prod {
                acc += p * roots.get_reduced(phase);
                phase += step;
                if phase >= len {
                    phase -= len;
                }
            }
            let idx = region.index(k, l).expect("point inside region");
            values[idx] = acc * norm;
        }
    }
    Ok(AmbiguitySurface {
        grid: *grid,
        patch: DdPatch::new(*region, values)?,
    })
}

/// Single-point cross-ambiguity by the literal sum.
pub fn cross_ambiguity_at(grid: &DdGrid, y: &[C64], x: &[C64], k: i64, l: i64) -> Result<C64> {
    check_len(grid, y)?;
    check_len(grid, x)?;
    let len = grid.len() as i64;
    let mut acc = C64::new(0.0, 0.0);
    for (n, yn) in y.iter().enumerate() {
        let shifted = (n as i64 - k).rem_euclid(len);
        acc += yn * x[shifted as usize].conj() * super::unit_root(len as usize, -l * shifted);
    }
    Ok(acc / len as f64)
}

/// Delay-Doppler domain cross-ambiguity of two DD arrays:
///
/// `A[k, l] = 1/MN sum_{k', l'} Y[k', l'] conj(X[k' - k, l' - l]) exp(-j 2 pi l (k' - k) / MN)`
///
/// with `X` quasi-periodically extended. Equal to [`cross_ambiguity`] of the
/// inverse Zak transforms.
pub fn dd_cross_ambiguity(
    y: &QpSignal,
    x: &QpSignal,
    region: &DdBox,
) -> Result<AmbiguitySurface> {
    let grid = *y.grid();
    if *x.grid() != grid {
        return Err(Error::InvalidParameter("signals on different grids".into()));
    }
    let (m, n, len) = (grid.m(), grid.n(), grid.len());
    let roots = RootTable::new(len);
    let patch = DdPatch::from_fn(*region, |k, l| {
        let mut acc = C64::new(0.0, 0.0);
        for lp in 0..n {
            for kp in 0..m {
                let yv = y.get(kp, lp);
                if yv == C64::new(0.0, 0.0) {
                    continue;
                }
                let dk = kp as i64 - k;
                acc += yv * x.at(dk, lp as i64 - l).conj() * roots.get(-l * dk);
            }
        }
        acc / len as f64
    });
    Ok(AmbiguitySurface { grid, patch })
}

/// Closed-form cross-ambiguity between the time-domain pulsones at
/// `(k0, l0)` and `(k1, l1)`, evaluated at the shift `(k, l)`.
///
/// Nonzero only on the lattice `k = (k0 - k1) mod M`, `l = (l0 - l1) mod N`,
/// where it is `1/MN exp(j 2 pi (l1 + l) q / N) exp(-j 2 pi l k1 / MN)` with
/// `q = (k - (k0 - k1)) / M`.
pub fn pulsone_cross_ambiguity(
    grid: &DdGrid,
    (k0, l0): (i64, i64),
    (k1, l1): (i64, i64),
    k: i64,
    l: i64,
) -> C64 {
    let (m, n, len) = (grid.m() as i64, grid.n() as i64, grid.len() as i64);
    let dk = k - (k0 - k1);
    if dk.rem_euclid(m) != 0 || (l - (l0 - l1)).rem_euclid(n) != 0 {
        return C64::new(0.0, 0.0);
    }
    let q = dk / m;
    let idx = ((l1 + l).rem_euclid(n) * q.rem_euclid(n)).rem_euclid(n) * m
        - l.rem_euclid(len) * k1;
    super::unit_root(len as usize, idx) / len as f64
}

/// Self-ambiguity of a DD symbol array written through the pulsone lattice:
///
/// `B[k, l] = sum_{k0, l0} X[k0, l0] conj(X[k1, l1]) A_{p(k0,l0), p(k1,l1)}[k, l]`
///
/// where only the partner `k1 = (k0 - k) mod M`, `l1 = (l0 - l) mod N`
/// survives. For a frame `x = sqrt(e) inverse_zak(X)` the time-domain
/// self-ambiguity is `e B`.
pub fn symbol_ambiguity(symbols: &QpSignal, region: &DdBox) -> AmbiguitySurface {
    let grid = *symbols.grid();
    let (m, n, len) = (grid.m() as i64, grid.n() as i64, grid.len() as i64);
    let roots = RootTable::new(len as usize);
    let patch = DdPatch::from_fn(*region, |k, l| {
        let mut acc = C64::new(0.0, 0.0);
        let l_red = l.rem_euclid(len);
        for l0 in 0..n {
            let l1 = (l0 - l).rem_euclid(n);
            let doppler_factor = (l1 + l).rem_euclid(n);
            for k0 in 0..m {
                let a = symbols.get(k0 as usize, l0 as usize);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let k1 = (k0 - k).rem_euclid(m);
                let q = (k - (k0 - k1)) / m;
                let idx = (doppler_factor * q.rem_euclid(n)).rem_euclid(n) * m - l_red * k1;
                acc += a * symbols.get(k1 as usize, l1 as usize).conj() * roots.get(idx);
            }
        }
        acc / len as f64
    });
    AmbiguitySurface { grid, patch }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::{inverse_zak, point_pulsone};

    fn grid() -> DdGrid {
        DdGrid::new(5, 7, 30e3).unwrap()
    }

    fn test_seq(len: usize, seed: f64) -> Vec<C64> {
        (0..len)
            .map(|i| {
                let t = i as f64 + seed;
                C64::new((1.3 * t).sin(), (0.7 * t + seed).cos())
            })
            .collect()
    }

    #[test]
    fn origin_is_mean_energy() {
        let g = grid();
        let x = test_seq(35, 0.4);
        let a = cross_ambiguity(&g, &x, &x, &DdBox::point(0, 0)).unwrap();
        let mean = crate::dd::mean_energy(&x);
        assert!((a.get(0, 0) - C64::new(mean, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn fast_path_matches_literal_sum() {
        let g = grid();
        let y = test_seq(35, 0.1);
        let x = test_seq(35, 2.0);
        let region = DdBox::new(-3, 40, -6, 36).unwrap();
        let a = cross_ambiguity(&g, &y, &x, &region).unwrap();
        for (k, l) in region.iter() {
            let want = cross_ambiguity_at(&g, &y, &x, k, l).unwrap();
            assert!((a.get(k, l) - want).norm() < 1e-12, "({k},{l})");
        }
    }

    #[test]
    fn shifted_copy_peaks_at_shift() {
        let g = grid();
        let len = 35;
        let x = test_seq(len, 0.9);
        let (k0, l0) = (3i64, 4i64);
        let y: Vec<C64> = (0..len as i64)
            .map(|n| {
                let s = (n - k0).rem_euclid(len as i64);
                x[s as usize] * crate::dd::unit_root(len, l0 * s)
            })
            .collect();
        let a = cross_ambiguity(&g, &y, &x, &DdBox::full(&g)).unwrap();
        let mean = crate::dd::mean_energy(&x);
        assert!((a.get(k0, l0) - C64::new(mean, 0.0)).norm() < 1e-12);
        let peak = a.patch().max_abs();
        assert!((peak - mean).abs() < 1e-12);
    }

    #[test]
    fn closed_form_pulsone_matches_time_domain() {
        let g = grid();
        let pairs = [((0, 0), (0, 0)), ((1, 2), (3, 5)), ((4, 6), (0, 1))];
        let region = DdBox::new(-5, 39, -7, 40).unwrap();
        for (a, b) in pairs {
            let pa = inverse_zak(&point_pulsone(&g, a.0, a.1).unwrap());
            let pb = inverse_zak(&point_pulsone(&g, b.0, b.1).unwrap());
            let surf = cross_ambiguity(&g, &pa, &pb, &region).unwrap();
            for (k, l) in region.iter() {
                let cf = pulsone_cross_ambiguity(&g, a, b, k, l);
                assert!((surf.get(k, l) - cf).norm() < 1e-14, "{a:?} {b:?} ({k},{l})");
            }
        }
    }

    #[test]
    fn length_mismatch_errors() {
        let g = grid();
        let x = test_seq(35, 0.0);
        assert!(cross_ambiguity(&g, &x[..34], &x, &DdBox::point(0, 0)).is_err());
    }
}
