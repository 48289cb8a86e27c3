use std::fmt;

use super::{DdGrid, C64};
use crate::{Error, Result};

/// A rectangle of integer delay-Doppler shifts, both ends inclusive.
///
/// Doppler indices are signed; a channel support box is typically
/// `[0, k_max] x [-l_max, l_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DdBox {
    pub delay: (i64, i64),
    pub doppler: (i64, i64),
}

impl DdBox {
    pub fn new(k_lo: i64, k_hi: i64, l_lo: i64, l_hi: i64) -> Result<Self> {
        if k_lo > k_hi || l_lo > l_hi {
            return Err(Error::InvalidParameter(format!(
                "empty box [{k_lo}, {k_hi}] x [{l_lo}, {l_hi}]"
            )));
        }
        Ok(Self {
            delay: (k_lo, k_hi),
            doppler: (l_lo, l_hi),
        })
    }

    /// `[0, k_max] x [-l_max, l_max]`.
    pub fn channel(k_max: i64, l_max: i64) -> Result<Self> {
        Self::new(0, k_max, -l_max, l_max)
    }

    pub fn point(k: i64, l: i64) -> Self {
        Self {
            delay: (k, k),
            doppler: (l, l),
        }
    }

    /// The fundamental domain `[0, M) x [0, N)`.
    pub fn fundamental(grid: &DdGrid) -> Self {
        Self {
            delay: (0, grid.m() as i64 - 1),
            doppler: (0, grid.n() as i64 - 1),
        }
    }

    /// One full period `[0, MN) x [0, MN)` of a cyclic ambiguity surface.
    pub fn full(grid: &DdGrid) -> Self {
        let last = grid.len() as i64 - 1;
        Self {
            delay: (0, last),
            doppler: (0, last),
        }
    }

    /// All differences `a - b` of two points in this box.
    pub fn difference(&self) -> Self {
        let dk = self.delay.1 - self.delay.0;
        let dl = self.doppler.1 - self.doppler.0;
        Self {
            delay: (-dk, dk),
            doppler: (-dl, dl),
        }
    }

    /// Grow the box by `dk` delay and `dl` Doppler bins on every side.
    pub fn expand(&self, dk: i64, dl: i64) -> Self {
        Self {
            delay: (self.delay.0 - dk, self.delay.1 + dk),
            doppler: (self.doppler.0 - dl, self.doppler.1 + dl),
        }
    }

    pub fn delay_len(&self) -> usize {
        (self.delay.1 - self.delay.0 + 1) as usize
    }

    pub fn doppler_len(&self) -> usize {
        (self.doppler.1 - self.doppler.0 + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.delay_len() * self.doppler_len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, k: i64, l: i64) -> bool {
        (self.delay.0..=self.delay.1).contains(&k) && (self.doppler.0..=self.doppler.1).contains(&l)
    }

    /// Delay-fastest linear index.
    pub fn index(&self, k: i64, l: i64) -> Option<usize> {
        self.contains(k, l).then(|| {
            (k - self.delay.0) as usize + (l - self.doppler.0) as usize * self.delay_len()
        })
    }

    pub fn point_at(&self, idx: usize) -> (i64, i64) {
        let d = self.delay_len();
        (
            self.delay.0 + (idx % d) as i64,
            self.doppler.0 + (idx / d) as i64,
        )
    }

    /// Points in linear-index order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (0..self.len()).map(move |i| self.point_at(i))
    }

    /// True if no two points of the box alias modulo `period` on either axis
    /// jointly, i.e. the box fits inside one period of a cyclic surface.
    pub fn fits_period(&self, period: usize) -> bool {
        self.delay_len() <= period && self.doppler_len() <= period
    }
}

impl fmt::Display for DdBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}] x [{}, {}]",
            self.delay.0, self.delay.1, self.doppler.0, self.doppler.1
        )
    }
}

/// Anything that can be evaluated at an arbitrary integer DD shift.
pub trait DdSampled {
    fn sample(&self, k: i64, l: i64) -> C64;
}

/// Complex values on a [`DdBox`], zero everywhere else.
#[derive(Debug, Clone, PartialEq)]
pub struct DdPatch {
    region: DdBox,
    values: Vec<C64>,
}

impl DdPatch {
    pub fn new(region: DdBox, values: Vec<C64>) -> Result<Self> {
        if values.len() != region.len() {
            return Err(Error::LengthMismatch {
                left: region.len(),
                right: values.len(),
            });
        }
        Ok(Self { region, values })
    }

    pub fn zeros(region: DdBox) -> Self {
        Self {
            region,
            values: vec![C64::new(0.0, 0.0); region.len()],
        }
    }

    pub fn from_fn(region: DdBox, mut f: impl FnMut(i64, i64) -> C64) -> Self {
        let values = region.iter().map(|(k, l)| f(k, l)).collect();
        Self { region, values }
    }

    /// A single tap at `(k, l)`.
    pub fn delta(k: i64, l: i64, value: C64) -> Self {
        Self {
            region: DdBox::point(k, l),
            values: vec![value],
        }
    }

    pub fn region(&self) -> &DdBox {
        &self.region
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn get(&self, k: i64, l: i64) -> C64 {
        self.region
            .index(k, l)
            .map_or(C64::new(0.0, 0.0), |i| self.values[i])
    }

    pub fn set(&mut self, k: i64, l: i64, v: C64) -> Result<()> {
        let i = self.region.index(k, l).ok_or(Error::InvalidParameter(format!(
            "({k}, {l}) outside {}",
            self.region
        )))?;
        self.values[i] = v;
        Ok(())
    }

    /// `(k, l, value)` for every point of the box.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64, C64)> + '_ {
        self.region
            .iter()
            .zip(&self.values)
            .map(|((k, l), v)| (k, l, *v))
    }

    pub fn energy(&self) -> f64 {
        super::energy(&self.values)
    }

    /// Values of `self` resampled onto `region` (zero outside `self`).
    pub fn restrict(&self, region: DdBox) -> Self {
        Self::from_fn(region, |k, l| self.get(k, l))
    }

    pub fn scale(&mut self, s: C64) {
        self.values.iter_mut().for_each(|v| *v *= s);
    }

    /// Largest absolute entry-wise difference against another patch on the
    /// union of both supports.
    pub fn max_abs_diff(&self, other: &DdPatch) -> f64 {
        let mut worst = 0.0f64;
        for (k, l, v) in self.iter() {
            worst = worst.max((v - other.get(k, l)).norm());
        }
        for (k, l, v) in other.iter() {
            if !self.region.contains(k, l) {
                worst = worst.max(v.norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

impl DdSampled for DdPatch {
    fn sample(&self, k: i64, l: i64) -> C64 {
        self.get(k, l)
    }
}

/// Cyclic (period `MN` on both axes) view of a patch that covers a full
/// period starting at the origin.
#[derive(Debug, Clone, Copy)]
pub struct Periodic<'a> {
    patch: &'a DdPatch,
    period: i64,
}

impl<'a> Periodic<'a> {
    pub fn new(patch: &'a DdPatch, period: usize) -> Result<Self> {
        let expected = DdBox::new(0, period as i64 - 1, 0, period as i64 - 1)?;
        if *patch.region() != expected {
            return Err(Error::BoxMismatch {
                expected: expected.to_string(),
                got: patch.region().to_string(),
            });
        }
        Ok(Self {
            patch,
            period: period as i64,
        })
    }
}

impl DdSampled for Periodic<'_> {
    fn sample(&self, k: i64, l: i64) -> C64 {
        self.patch
            .get(k.rem_euclid(self.period), l.rem_euclid(self.period))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_indexing_round_trips() {
        let b = DdBox::channel(4, 3).unwrap();
        assert_eq!(b.len(), 5 * 7);
        for (i, (k, l)) in b.iter().enumerate() {
            assert_eq!(b.index(k, l), Some(i));
        }
        assert_eq!(b.index(5, 0), None);
        assert_eq!(b.index(0, -4), None);
    }

    #[test]
    fn difference_box_covers_all_pairs() {
        let b = DdBox::new(0, 3, -2, 2).unwrap();
        let d = b.difference();
        for (k0, l0) in b.iter() {
            for (k1, l1) in b.iter() {
                assert!(d.contains(k0 - k1, l0 - l1));
            }
        }
        assert_eq!(d, DdBox::new(-3, 3, -4, 4).unwrap());
    }

    #[test]
    fn patch_is_zero_outside() {
        let p = DdPatch::delta(2, -1, C64::new(3.0, 1.0));
        assert_eq!(p.get(2, -1), C64::new(3.0, 1.0));
        assert_eq!(p.sample(2, 0), C64::new(0.0, 0.0));
    }
}
