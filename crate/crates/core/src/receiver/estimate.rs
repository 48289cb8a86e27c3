use crate::channel::{EffectiveChannel, TimeKernel};
use crate::dd::{cross_ambiguity, mean_energy, DdBox, DdGrid, DdPatch, C64};
use crate::{Error, Result};

/// Where an estimate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateSource {
    Pilot,
    Data,
    Oracle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    pub channel: EffectiveChannel,
    pub source: EstimateSource,
    /// Frame whose received samples produced the estimate.
    pub frame: usize,
    /// Modelled `E ||h_est - h||^2`; zero unless set by the caller.
    pub error_power: f64,
}

impl ChannelEstimate {
    pub fn oracle(channel: EffectiveChannel, frame: usize) -> Self {
        Self {
            channel,
            source: EstimateSource::Oracle,
            frame,
            error_power: 0.0,
        }
    }

    /// Record the expected error of a cross-ambiguity estimate whose
    /// reference has per-sample energy `e_ref`. `e_other` is the per-sample
    /// energy of received signal that looks random against the reference:
    /// superimposed data, or for a data reference the data itself through
    /// its off-origin self-ambiguity.
    ///
    /// Each tap then picks up interference of power
    /// `(e_other ||h||^2 + noise_var) / (MN e_ref)`.
    pub fn with_modelled_error(mut self, e_ref: f64, e_other: f64, noise_var: f64) -> Self {
        let taps = self.channel.support().len() as f64;
        let len = self.channel.grid().len() as f64;
        let power = self.channel.taps().energy();
        self.error_power = taps * (e_other * power + noise_var) / (len * e_ref);
        self
    }

    pub fn taps(&self) -> &DdPatch {
        self.channel.taps()
    }
}

/// Cross-ambiguity estimate `A_{y, x_ref}[k, l] / e` over `support`.
///
/// `e` is the mean per-sample energy of `x_ref`; negative Doppler indices
/// are read off the cyclic surface.
pub fn estimate_h_eff(
    grid: &DdGrid,
    y: &[C64],
    x_ref: &[C64],
    support: DdBox,
    e: f64,
    source: EstimateSource,
    frame: usize,
) -> Result<ChannelEstimate> {
    if !(e > 0.0) || mean_energy(x_ref) == 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let mut taps = cross_ambiguity(grid, y, x_ref, &support)?.into_patch();
    taps.scale(C64::new(1.0 / e, 0.0));
    Ok(ChannelEstimate {
        channel: EffectiveChannel::new(*grid, taps),
        source,
        frame,
        error_power: 0.0,
    })
}

/// `y - sqrt(e_p) H_est p`.
pub fn remove_pilot(
    y: &[C64],
    estimate: &EffectiveChannel,
    pilot: &[C64],
    e_p: f64,
) -> Result<Vec<C64>> {
    if y.len() != pilot.len() {
        return Err(Error::LengthMismatch {
            left: y.len(),
            right: pilot.len(),
        });
    }
    if e_p == 0.0 {
        return Ok(y.to_vec());
    }
    let echo = TimeKernel::new(estimate).apply(pilot)?;
    let s = e_p.sqrt();
    Ok(y.iter().zip(&echo).map(|(a, b)| a - b * s).collect())
}

/// `||est - truth||^2 / ||truth||^2` over matching support boxes.
pub fn nmse(estimate: &DdPatch, truth: &DdPatch) -> Result<f64> {
    if estimate.region() != truth.region() {
        return Err(Error::BoxMismatch {
            expected: truth.region().to_string(),
            got: estimate.region().to_string(),
        });
    }
    let power = truth.energy();
    if power == 0.0 {
        return Err(Error::ZeroChannel);
    }
    let err: f64 = estimate
        .values()
        .iter()
        .zip(truth.values())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    Ok(err / power)
}

/// Fraction of differing bits.
pub fn ber(tx: &[u8], rx: &[u8]) -> Result<f64> {
    if tx.len() != rx.len() {
        return Err(Error::LengthMismatch {
            left: tx.len(),
            right: rx.len(),
        });
    }
    if tx.is_empty() {
        return Ok(0.0);
    }
    let errors = tx.iter().zip(rx).filter(|(a, b)| a != b).count();
    Ok(errors as f64 / tx.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::inverse_zak;
    use crate::frames::{
        build_do_frame, build_sp_frame, energy_split, select_chirp_root, FrameScheme,
    };
    use crate::dd::{energy, QpSignal};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid() -> DdGrid {
        DdGrid::new(31, 37, 30e3).unwrap()
    }

    fn support() -> DdBox {
        DdBox::channel(11, 10).unwrap()
    }

    fn pseudo_channel(g: &DdGrid, support: DdBox) -> EffectiveChannel {
        let taps = DdPatch::from_fn(support, |k, l| {
            let t = (3 * k - 5 * l) as f64 * 0.37;
            C64::new(t.cos(), (1.3 * t).sin()) / (1.0 + (k * k + l * l) as f64).sqrt()
        });
        EffectiveChannel::new(*g, taps)
    }

    fn qpsk(g: &DdGrid, seed: u64) -> Vec<C64> {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..g.len())
            .map(|_| {
                let (a, b): (bool, bool) = (rng.random(), rng.random());
                C64::new(if a { r } else { -r }, if b { r } else { -r })
            })
            .collect()
    }

    #[test]
    fn chirp_pilot_gives_exact_estimate() {
        let g = grid();
        let h = pseudo_channel(&g, support());
        let pilot = select_chirp_root(&g, support().difference()).unwrap();
        let e: f64 = 7.5;
        let x: Vec<C64> = pilot.samples().iter().map(|v| v * e.sqrt()).collect();
        let y = h.apply_time(&x).unwrap();
        let est = estimate_h_eff(&g, &y, &x, support(), e, EstimateSource::Pilot, 0).unwrap();
        assert!(nmse(est.taps(), h.taps()).unwrap().sqrt() <= 1e-9);
    }

    #[test]
    fn identity_channel_scale() {
        let g = grid();
        let e = 4.0;
        let x = build_do_frame(&g, &qpsk(&g, 1), e).unwrap();
        let est = estimate_h_eff(&g, &x, &x, support(), e, EstimateSource::Data, 0).unwrap();
        assert!((est.channel.tap(0, 0) - C64::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn zero_observation_gives_zero_estimate() {
        let g = grid();
        let x = build_do_frame(&g, &qpsk(&g, 2), 1.0).unwrap();
        let y = vec![C64::new(0.0, 0.0); g.len()];
        let est = estimate_h_eff(&g, &y, &x, support(), 1.0, EstimateSource::Data, 3).unwrap();
        assert_eq!(est.taps().max_abs(), 0.0);
        assert_eq!(est.frame, 3);
    }

    #[test]
    fn zero_reference_rejected() {
        let g = grid();
        let z = vec![C64::new(0.0, 0.0); g.len()];
        let err = estimate_h_eff(&g, &z, &z, support(), 1.0, EstimateSource::Data, 0);
        assert_eq!(err.unwrap_err(), Error::ZeroEnergy);
    }

    #[test]
    fn data_estimate_has_self_interference_floor() {
        let g = grid();
        let h = pseudo_channel(&g, support());
        let x = build_do_frame(&g, &qpsk(&g, 5), 2.0).unwrap();
        let y = h.apply_time(&x).unwrap();
        let est = estimate_h_eff(&g, &y, &x, support(), 2.0, EstimateSource::Data, 0).unwrap();
        let v = nmse(est.taps(), h.taps()).unwrap();
        assert!(v > 0.01 && v < 1.0, "{v}");
    }

    #[test]
    fn pilot_removal_leaves_data_component() {
        let g = grid();
        let h = pseudo_channel(&g, support());
        let pilot = select_chirp_root(&g, support().difference()).unwrap();
        let b = energy_split(10.0, &FrameScheme::SpreadPilot { alpha: 0.5, root: None }).unwrap();
        let sp = build_sp_frame(&g, &qpsk(&g, 9), &b, &pilot).unwrap();
        let y = h.apply_time(&sp.samples).unwrap();
        let cleaned = remove_pilot(&y, &h, pilot.samples(), b.pilot).unwrap();
        let data_only: Vec<C64> = sp.data.iter().map(|v| v * b.data.sqrt()).collect();
        let want = h.apply_time(&data_only).unwrap();
        let diff: Vec<C64> = cleaned.iter().zip(&want).map(|(a, b)| a - b).collect();
        assert!((energy(&diff) / energy(&want)).sqrt() < 1e-9);
    }

    #[test]
    fn pilot_removal_trivial_cases() {
        let g = grid();
        let y = inverse_zak(&QpSignal::new(g, qpsk(&g, 4)).unwrap());
        let p = select_chirp_root(&g, support().difference()).unwrap();
        let zero = EffectiveChannel::zeros(g, support());
        assert_eq!(remove_pilot(&y, &zero, p.samples(), 3.0).unwrap(), y);
        let h = pseudo_channel(&g, support());
        assert_eq!(remove_pilot(&y, &h, p.samples(), 0.0).unwrap(), y);
    }

    #[test]
    fn modelled_error_tracks_measured_error() {
        let g = grid();
        let h = pseudo_channel(&g, support());
        let pilot = select_chirp_root(&g, support().difference()).unwrap();
        let b = energy_split(10.0, &FrameScheme::SpreadPilot { alpha: 0.5, root: None }).unwrap();
        let (mut measured_do, mut modelled_do) = (0.0, 0.0);
        let (mut measured_sp, mut modelled_sp) = (0.0, 0.0);
        for seed in 0..20 {
            let symbols = qpsk(&g, 40 + seed);
            let x = build_do_frame(&g, &symbols, b.total).unwrap();
            let y = h.apply_time(&x).unwrap();
            let est = estimate_h_eff(&g, &y, &x, support(), b.total, EstimateSource::Data, 0)
                .unwrap()
                .with_modelled_error(b.total, b.total, 0.0);
            measured_do += nmse(est.taps(), h.taps()).unwrap() * h.taps().energy();
            modelled_do += est.error_power;

            let sp = build_sp_frame(&g, &symbols, &b, &pilot).unwrap();
            let y = h.apply_time(&sp.samples).unwrap();
            let x_ref: Vec<C64> = pilot.samples().iter().map(|v| v * b.pilot.sqrt()).collect();
            let est = estimate_h_eff(&g, &y, &x_ref, support(), b.pilot, EstimateSource::Pilot, 0)
                .unwrap()
                .with_modelled_error(b.pilot, b.data, 0.0);
            measured_sp += nmse(est.taps(), h.taps()).unwrap() * h.taps().energy();
            modelled_sp += est.error_power;
        }
        for (m, p) in [(measured_do, modelled_do), (measured_sp, modelled_sp)] {
            let ratio = m / p;
            assert!(ratio > 0.7 && ratio < 1.4, "measured {m} modelled {p}");
        }
    }

    #[test]
    fn nmse_examples() {
        let h = pseudo_channel(&grid(), support());
        let t = h.taps();
        assert_eq!(nmse(t, t).unwrap(), 0.0);
        assert!((nmse(&DdPatch::zeros(support()), t).unwrap() - 1.0).abs() < 1e-15);
        let mut twice = t.clone();
        twice.scale(C64::new(2.0, 0.0));
        assert!((nmse(&twice, t).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(
            nmse(t, &DdPatch::zeros(support())).unwrap_err(),
            Error::ZeroChannel
        );
        assert!(matches!(
            nmse(&DdPatch::zeros(DdBox::channel(1, 1).unwrap()), t),
            Err(Error::BoxMismatch { .. })
        ));
    }

    #[test]
    fn ber_examples() {
        let a: Vec<u8> = (0..100).map(|i| (i % 2) as u8).collect();
        assert_eq!(ber(&a, &a).unwrap(), 0.0);
        let flipped: Vec<u8> = a.iter().map(|b| 1 - b).collect();
        assert_eq!(ber(&a, &flipped).unwrap(), 1.0);
        let mut one = a.clone();
        one[17] ^= 1;
        assert!((ber(&a, &one).unwrap() - 0.01).abs() < 1e-15);
        assert!(ber(&a, &a[..99]).is_err());
    }
}
