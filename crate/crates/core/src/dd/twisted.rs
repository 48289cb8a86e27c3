use super::{DdBox, DdGrid, DdPatch, DdSampled, RootTable, C64};

/// `(a *_sigma b)[k, l] = sum_{(k', l') in supp a} a[k', l'] b[k - k', l - l'] exp(j 2 pi l' (k - k') / MN)`
///
/// The extension of `b` outside its stored values is whatever its
/// [`DdSampled`] impl provides: quasi-periodic for `QpSignal`, cyclic for a
/// [`Periodic`](super::Periodic) surface, zero for a bare `DdPatch`.
pub fn twisted_convolution(
    grid: &DdGrid,
    a: &DdPatch,
    b: &impl DdSampled,
    region: &DdBox,
) -> DdPatch {
    let roots = RootTable::new(grid.len());
    let taps: Vec<_> = a
        .iter()
        .filter(|(_, _, v)| *v != C64::new(0.0, 0.0))
        .collect();
    DdPatch::from_fn(*region, |k, l| {
        taps.iter()
            .map(|&(ka, la, v)| v * b.sample(k - ka, l - la) * roots.get(la * (k - ka)))
            .sum()
    })
}

/// Single output point of [`twisted_convolution`].
pub fn twisted_convolution_at(
    grid: &DdGrid,
    a: &DdPatch,
    b: &impl DdSampled,
    k: i64,
    l: i64,
) -> C64 {
    let len = grid.len();
    a.iter()
        .map(|(ka, la, v)| v * b.sample(k - ka, l - la) * super::unit_root(len, la * (k - ka)))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::unit_root;

    fn grid() -> DdGrid {
        DdGrid::new(11, 13, 30e3).unwrap()
    }

    fn patch() -> DdPatch {
        DdPatch::from_fn(DdBox::new(-1, 2, -2, 1).unwrap(), |k, l| {
            C64::new(k as f64 + 0.5, l as f64 * 0.25)
        })
    }

    #[test]
    fn delta_is_left_identity() {
        let g = grid();
        let b = patch();
        let out = twisted_convolution(&g, &DdPatch::delta(0, 0, C64::new(1.0, 0.0)), &b, b.region());
        assert!(out.max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn delta_is_right_identity() {
        let g = grid();
        let a = patch();
        let out = twisted_convolution(&g, &a, &DdPatch::delta(0, 0, C64::new(1.0, 0.0)), a.region());
        assert!(out.max_abs_diff(&a) < 1e-15);
    }

    #[test]
    fn shifts_do_not_commute() {
        let g = grid();
        let a = DdPatch::delta(1, 0, C64::new(1.0, 0.0));
        let b = DdPatch::delta(0, 1, C64::new(1.0, 0.0));
        let region = DdBox::new(0, 2, 0, 2).unwrap();
        let ab = twisted_convolution(&g, &a, &b, &region);
        let ba = twisted_convolution(&g, &b, &a, &region);
        // Both are supported at (1, 1) only.
        for (k, l, v) in ab.iter() {
            if (k, l) != (1, 1) {
                assert_eq!(v, C64::new(0.0, 0.0));
            }
        }
        assert!((ab.get(1, 1) - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((ba.get(1, 1) - unit_root(143, 1)).norm() < 1e-15);
        assert!((ba.get(1, 1) / ab.get(1, 1) - unit_root(143, 1)).norm() < 1e-15);
    }

    #[test]
    fn point_evaluation_matches_region() {
        let g = grid();
        let a = patch();
        let b = DdPatch::from_fn(DdBox::new(0, 3, 0, 3).unwrap(), |k, l| {
            C64::new((k * l) as f64, 1.0)
        });
        let region = DdBox::new(-2, 6, -3, 5).unwrap();
        let out = twisted_convolution(&g, &a, &b, &region);
        for (k, l, v) in out.iter() {
            assert!((v - twisted_convolution_at(&g, &a, &b, k, l)).norm() < 1e-12);
        }
    }
}
