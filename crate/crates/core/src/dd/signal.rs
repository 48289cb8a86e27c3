use super::{unit_root, DdGrid, DdSampled, C64};
use crate::{Error, Result};

/// An `M x N` delay-Doppler array with quasi-periodic extension
/// `X[k + nM, l + mN] = exp(j 2 pi n l / N) X[k, l]`.
///
/// Storage is column-major (`k + l M`), matching `vec(X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QpSignal {
    grid: DdGrid,
    data: Vec<C64>,
}

impl QpSignal {
    pub fn new(grid: DdGrid, data: Vec<C64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::MalformedFrame {
                expected: grid.len(),
                got: data.len(),
            });
        }
        Ok(Self { grid, data })
    }

    pub fn zeros(grid: DdGrid) -> Self {
        Self {
            grid,
            data: vec![C64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> &DdGrid {
        &self.grid
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    /// Fundamental-domain value. Panics outside `[0, M) x [0, N)`.
    pub fn get(&self, k: usize, l: usize) -> C64 {
        self.data[self.grid.index(k, l)]
    }

    pub fn set(&mut self, k: usize, l: usize, v: C64) {
        let i = self.grid.index(k, l);
        self.data[i] = v;
    }

    /// Value at any integer `(k, l)` through the quasi-periodic extension.
    pub fn at(&self, k: i64, l: i64) -> C64 {
        let m = self.grid.m() as i64;
        let n = self.grid.n() as i64;
        let wraps = k.div_euclid(m);
        let kk = k.rem_euclid(m) as usize;
        let ll = l.rem_euclid(n);
        let base = self.data[self.grid.index(kk, ll as usize)];
        if wraps == 0 {
            base
        } else {
            // n*l mod N, reduced before multiplication to stay exact
            unit_root(self.grid.n(), wraps.rem_euclid(n) * ll) * base
        }
    }

    pub fn energy(&self) -> f64 {
        super::energy(&self.data)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grid: self.grid,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }
}

impl DdSampled for QpSignal {
    fn sample(&self, k: i64, l: i64) -> C64 {
        self.at(k, l)
    }
}

/// The DD point pulsone: indicator of `(k0, l0)` on the fundamental domain.
pub fn point_pulsone(grid: &DdGrid, k0: i64, l0: i64) -> Result<QpSignal> {
    grid.check_bin(k0, l0)?;
    let mut x = QpSignal::zeros(*grid);
    x.set(k0 as usize, l0 as usize, C64::new(1.0, 0.0));
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> DdGrid {
        DdGrid::new(11, 13, 30e3).unwrap()
    }

    #[test]
    fn pulsone_fundamental_domain_is_indicator() {
        let g = grid();
        let p = point_pulsone(&g, 0, 0).unwrap();
        for k in 0..11 {
            for l in 0..13 {
                let want = if k == 0 && l == 0 { 1.0 } else { 0.0 };
                assert_eq!(p.get(k, l), C64::new(want, 0.0));
            }
        }
    }

    #[test]
    fn pulsone_extension_phase() {
        let g = grid();
        let (k0, l0) = (4, 5);
        let p = point_pulsone(&g, k0, l0).unwrap();
        let v = p.at(k0 + 11, l0);
        let want = C64::from_polar(1.0, std::f64::consts::TAU * l0 as f64 / 13.0);
        assert!((v - want).norm() < 1e-15);
        // Doppler wraps carry no phase.
        assert!((p.at(k0, l0 + 13) - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pulsone_rejects_out_of_range() {
        let g = grid();
        assert!(point_pulsone(&g, 11, 0).is_err());
        assert!(point_pulsone(&g, 0, -1).is_err());
    }
}
