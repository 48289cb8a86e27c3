//! Property tests for the Zak transform, pulsone lattice support and the
//! agreement of DD and time-domain channel actions.

use proptest::prelude::*;
use zakotfs::channel::EffectiveChannel;
use zakotfs::dd::{
    energy, inverse_zak, point_pulsone, pulsone_cross_ambiguity, zak, cross_ambiguity, DdBox,
    DdGrid, DdPatch, QpSignal, C64,
};

fn grid_strategy() -> impl Strategy<Value = DdGrid> {
    (2usize..9, 2usize..9).prop_map(|(m, n)| DdGrid::new(m, n, 1.0).unwrap())
}

fn signal(grid: DdGrid) -> impl Strategy<Value = (DdGrid, Vec<C64>)> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), grid.len())
        .prop_map(move |v| (grid, v.into_iter().map(|(a, b)| C64::new(a, b)).collect()))
}

fn grid_and_signal() -> impl Strategy<Value = (DdGrid, Vec<C64>)> {
    grid_strategy().prop_flat_map(signal)
}

proptest! {
    #[test]
    fn zak_round_trip_and_parseval((g, x) in grid_and_signal()) {
        let z = zak(&g, &x).unwrap();
        let back = inverse_zak(&z);
        let scale = energy(&x).sqrt().max(1e-300);
        for (a, b) in back.iter().zip(&x) {
            prop_assert!((a - b).norm() <= 1e-12 * scale);
        }
        prop_assert!((z.energy() - energy(&x)).abs() <= 1e-12 * energy(&x).max(1e-300));
    }

    #[test]
    fn quasi_periodic_extension((g, x) in grid_and_signal(), n in -3i64..3, m in -3i64..3) {
        let z = zak(&g, &x).unwrap();
        let (gm, gn) = (g.m() as i64, g.n() as i64);
        for l in 0..gn {
            for k in 0..gm {
                let phase = C64::from_polar(1.0, std::f64::consts::TAU * (n * l) as f64 / gn as f64);
                let want = phase * z.get(k as usize, l as usize);
                prop_assert!((z.at(k + n * gm, l + m * gn) - want).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn pulsone_ambiguity_on_lattice(
        g in grid_strategy(),
        a in (0usize..64, 0usize..64),
        b in (0usize..64, 0usize..64),
    ) {
        let (m, n) = (g.m(), g.n());
        let (k0, l0) = ((a.0 % m) as i64, (a.1 % n) as i64);
        let (k1, l1) = ((b.0 % m) as i64, (b.1 % n) as i64);
        let p0 = inverse_zak(&point_pulsone(&g, k0, l0).unwrap());
        let p1 = inverse_zak(&point_pulsone(&g, k1, l1).unwrap());
        let surf = cross_ambiguity(&g, &p0, &p1, &DdBox::full(&g)).unwrap();
        for (k, l, v) in surf.patch().iter() {
            let closed = pulsone_cross_ambiguity(&g, (k0, l0), (k1, l1), k, l);
            prop_assert!((v - closed).norm() <= 1e-12);
            let on = (k - (k0 - k1)).rem_euclid(m as i64) == 0
                && (l - (l0 - l1)).rem_euclid(n as i64) == 0;
            if !on {
                prop_assert!(v.norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn dd_and_time_actions_agree(
        (g, x) in grid_and_signal(),
        taps in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 12),
    ) {
        let support = DdBox::new(-1, 2, -1, 1).unwrap();
        let patch = DdPatch::new(support, taps.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap();
        let h = EffectiveChannel::new(g, patch);
        let via_time = zak(&g, &h.apply_time(&x).unwrap()).unwrap();
        let via_dd = h.apply_dd(&zak(&g, &x).unwrap());
        for (a, b) in via_time.as_slice().iter().zip(via_dd.as_slice()) {
            prop_assert!((a - b).norm() <= 1e-10);
        }
        let mat = h.channel_matrix();
        let xd = zak(&g, &x).unwrap();
        let v = nalgebra::DVector::from_column_slice(xd.as_slice());
        let prod = mat * v;
        for (a, b) in prod.iter().zip(via_dd.as_slice()) {
            prop_assert!((a - b).norm() <= 1e-10);
        }
    }
}

#[test]
fn channel_matrix_matches_twisted_convolution_at_working_size() {
    let g = DdGrid::new(31, 37, 30e3).unwrap();
    let support = DdBox::channel(11, 10).unwrap();
    let patch = DdPatch::from_fn(support, |k, l| {
        let t = (k * 13 + l * 7) as f64;
        C64::new(t.sin(), t.cos()) * 0.1
    });
    let h = EffectiveChannel::new(g, patch);
    let x = QpSignal::new(
        g,
        (0..g.len())
            .map(|i| C64::new(((i * 31) % 17) as f64 - 8.0, ((i * 7) % 5) as f64 - 2.0))
            .collect(),
    )
    .unwrap();
    let want = h.apply_dd(&x);
    let got = h.channel_matrix() * nalgebra::DVector::from_column_slice(x.as_slice());
    let scale = want.as_slice().iter().map(|v| v.norm()).fold(0.0, f64::max);
    for (a, b) in got.iter().zip(want.as_slice()) {
        assert!((a - b).norm() <= 1e-10 * scale);
    }
}
