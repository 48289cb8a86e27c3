use rand::Rng;

use super::{
    ber, estimate_h_eff, lmmse_detect, nmse, remove_pilot, ChannelEstimate, Detection,
    EstimateSource, REG_FLOOR,
};
use crate::channel::{awgn, sample_effective_channel, ChannelRealization, EffectiveChannel, FilterConfig};
use crate::dd::{DdBox, DdGrid, C64};
use crate::frames::{
    build_chirp_pilot, build_do_frame, build_pp_frame, build_sp_frame, qam_modulate,
    select_chirp_root, Constellation, EnergyBudget, FrameScheme, ValidatedPilot,
};
use crate::{Error, Result};

pub const DEFAULT_PILOT_PERIOD: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionConfig {
    pub scheme: FrameScheme,
    /// Frames between pilot refreshes in a differential session.
    pub pilot_period: usize,
    pub frames_total: usize,
    /// Added to the LMMSE diagonal.
    pub reg_floor: f64,
    /// When false the session only estimates; data-derived estimates then
    /// use the transmitted frame as reference.
    pub detect: bool,
    /// Copied into every record.
    pub seed: u64,
}

impl SessionConfig {
    pub fn new(scheme: FrameScheme, frames_total: usize) -> Self {
        Self {
            scheme,
            pilot_period: DEFAULT_PILOT_PERIOD,
            frames_total,
            reg_floor: REG_FLOOR,
            detect: true,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pilot_period == 0 {
            return Err(Error::InvalidParameter("pilot period must be at least 1".into()));
        }
        if !(self.reg_floor >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "regularization floor must be non-negative, got {}",
                self.reg_floor
            )));
        }
        Ok(())
    }
}

/// Per-frame outcome. Pilot-only frames carry no BER; frames that produce
/// no estimate carry no NMSE.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub frame: usize,
    pub nmse: Option<f64>,
    pub ber: Option<f64>,
    pub snr_db: f64,
    pub scheme: &'static str,
    pub alpha: Option<f64>,
    pub seed: u64,
}

/// Everything about the link that stays fixed for a session.
#[derive(Debug, Clone)]
pub struct Link {
    pub grid: DdGrid,
    pub filter: FilterConfig,
    pub support: DdBox,
    pub constellation: Constellation,
    pilot: ValidatedPilot,
}

impl Link {
    /// Picks a chirp pilot whose ambiguity is clean over the difference set
    /// of `support`.
    pub fn new(
        grid: DdGrid,
        filter: FilterConfig,
        support: DdBox,
        constellation: Constellation,
    ) -> Result<Self> {
        let pilot = select_chirp_root(&grid, support.difference())?;
        Ok(Self {
            grid,
            filter,
            support,
            constellation,
            pilot,
        })
    }

    pub fn pilot(&self) -> &ValidatedPilot {
        &self.pilot
    }

    /// Effective channel seen by frame `frame`, i.e. at `t = frame T`.
    pub fn true_channel(&self, realization: &ChannelRealization, frame: usize) -> Result<EffectiveChannel> {
        let gains = realization.gains_at(frame as f64 * self.grid.duration())?;
        sample_effective_channel(&realization.paths, &gains, &self.grid, &self.filter, self.support)
    }

    fn random_data<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Vec<u8>, Vec<C64>)> {
        let n = self.grid.len() * self.constellation.bits_per_symbol();
        let bits: Vec<u8> = (0..n).map(|_| rng.random_range(0..2u8)).collect();
        let symbols = qam_modulate(&bits, &self.constellation)?;
        Ok((bits, symbols))
    }

    fn chirp_frame(&self, pilot: &ValidatedPilot, e: f64) -> Vec<C64> {
        let s = e.sqrt();
        pilot.samples().iter().map(|v| v * s).collect()
    }
}

fn transmit<R: Rng + ?Sized>(h: &EffectiveChannel, x: &[C64], noise_var: f64, rng: &mut R) -> Result<Vec<C64>> {
    Ok(awgn(&h.apply_time(x)?, noise_var, rng))
}

fn record(config: &SessionConfig, budget: &EnergyBudget, frame: usize, nmse: Option<f64>, ber: Option<f64>) -> MetricsRecord {
    MetricsRecord {
        frame,
        nmse,
        ber,
        snr_db: budget.snr_db,
        scheme: config.scheme.name(),
        alpha: config.scheme.alpha(),
        seed: config.seed,
    }
}

/// Noise variance seen by a detector working from `estimate` when `e` per
/// sample passes through the channel: thermal noise plus the mismatch
/// `(H - H_est) x`.
fn effective_noise(budget: &EnergyBudget, estimate: &ChannelEstimate, e: f64) -> f64 {
    budget.noise_var + e * estimate.error_power
}

fn data_estimate(link: &Link, y: &[C64], x_ref: &[C64], budget: &EnergyBudget, frame: usize) -> Result<ChannelEstimate> {
    let e = budget.total;
    Ok(estimate_h_eff(&link.grid, y, x_ref, link.support, e, EstimateSource::Data, frame)?
        .with_modelled_error(e, e, budget.noise_var))
}

/// Detect frame data with `prior`, re-modulate the hard decisions and
/// estimate the channel from them.
///
/// The detector treats the modelled error of `prior` as extra noise.
pub fn differential_step(
    link: &Link,
    y: &[C64],
    prior: &ChannelEstimate,
    budget: &EnergyBudget,
    reg_floor: f64,
    frame: usize,
) -> Result<(Detection, ChannelEstimate)> {
    let e = budget.total;
    let noise = effective_noise(budget, prior, e);
    let det = lmmse_detect(y, &prior.channel, noise, e, &link.constellation, reg_floor)?;
    let x_hat = build_do_frame(&link.grid, &det.symbols, e)?;
    let est = data_estimate(link, y, &x_hat, budget, frame)?;
    Ok((det, est))
}

/// Decision-directed session: a full-energy chirp pilot frame every
/// `pilot_period` frames (starting at frame 0), data-only frames otherwise.
pub fn run_differential_session<R: Rng + ?Sized>(
    link: &Link,
    realization: &ChannelRealization,
    config: &SessionConfig,
    budget: &EnergyBudget,
    rng: &mut R,
) -> Result<Vec<MetricsRecord>> {
    config.validate()?;
    let e = budget.total;
    let mut records = Vec::with_capacity(config.frames_total);
    let mut prior: Option<ChannelEstimate> = None;
    for f in 0..config.frames_total {
        let h = link.true_channel(realization, f)?;
        let est = if f % config.pilot_period == 0 {
            let x = link.chirp_frame(&link.pilot, e);
            let y = transmit(&h, &x, budget.noise_var, rng)?;
            let est = estimate_h_eff(&link.grid, &y, &x, link.support, e, EstimateSource::Pilot, f)?
                .with_modelled_error(e, 0.0, budget.noise_var);
            records.push(record(config, budget, f, Some(nmse(est.taps(), h.taps())?), None));
            est
        } else {
            let (bits, symbols) = link.random_data(rng)?;
            let x = build_do_frame(&link.grid, &symbols, e)?;
            let y = transmit(&h, &x, budget.noise_var, rng)?;
            let (est, rate) = match (&prior, config.detect) {
                (Some(p), true) => {
                    let (det, est) = differential_step(link, &y, p, budget, config.reg_floor, f)?;
                    (est, Some(ber(&bits, &det.bits)?))
                }
                _ => (data_estimate(link, &y, &x, budget, f)?, None),
            };
            records.push(record(config, budget, f, Some(nmse(est.taps(), h.taps())?), rate));
            est
        };
        prior = Some(est);
    }
    Ok(records)
}

/// Every frame carries a spread chirp pilot; the pilot estimate is used to
/// cancel the pilot and detect the data of the same frame.
pub fn run_sp_session<R: Rng + ?Sized>(
    link: &Link,
    realization: &ChannelRealization,
    config: &SessionConfig,
    budget: &EnergyBudget,
    rng: &mut R,
) -> Result<Vec<MetricsRecord>> {
    config.validate()?;
    let pilot = match config.scheme {
        FrameScheme::SpreadPilot { root: Some(u), .. } => {
            build_chirp_pilot(&link.grid, u)?.validated(link.support.difference())?
        }
        _ => link.pilot.clone(),
    };
    let x_ref = link.chirp_frame(&pilot, budget.pilot);
    let mut records = Vec::with_capacity(config.frames_total);
    for f in 0..config.frames_total {
        let h = link.true_channel(realization, f)?;
        let (bits, symbols) = link.random_data(rng)?;
        let frame = build_sp_frame(&link.grid, &symbols, budget, &pilot)?;
        let y = transmit(&h, &frame.samples, budget.noise_var, rng)?;
        let est = estimate_h_eff(&link.grid, &y, &x_ref, link.support, budget.pilot, EstimateSource::Pilot, f)?
            .with_modelled_error(budget.pilot, budget.data, budget.noise_var);
        let rate = if config.detect {
            let cleaned = remove_pilot(&y, &est.channel, pilot.samples(), budget.pilot)?;
            // data and the pilot residual both pass through the mismatch
            let noise = effective_noise(budget, &est, budget.total);
            let det = lmmse_detect(
                &cleaned,
                &est.channel,
                noise,
                budget.data,
                &link.constellation,
                config.reg_floor,
            )?;
            Some(ber(&bits, &det.bits)?)
        } else {
            None
        };
        records.push(record(config, budget, f, Some(nmse(est.taps(), h.taps())?), rate));
    }
    Ok(records)
}

/// Point-pilot frames (even indices) alternate with data-only frames (odd
/// indices); each data frame is detected with the preceding pilot estimate.
pub fn run_separate_session<R: Rng + ?Sized>(
    link: &Link,
    realization: &ChannelRealization,
    config: &SessionConfig,
    budget: &EnergyBudget,
    rng: &mut R,
) -> Result<Vec<MetricsRecord>> {
    config.validate()?;
    let (k_p, l_p) = match config.scheme {
        FrameScheme::SeparatePilot { k_p, l_p } => (k_p, l_p),
        _ => (0, 0),
    };
    let e = budget.total;
    let pilot = build_pp_frame(&link.grid, k_p, l_p, e)?;
    let mut records = Vec::with_capacity(config.frames_total);
    let mut latest: Option<ChannelEstimate> = None;
    for f in 0..config.frames_total {
        let h = link.true_channel(realization, f)?;
        if f % 2 == 0 {
            let y = transmit(&h, &pilot, budget.noise_var, rng)?;
            let est = estimate_h_eff(&link.grid, &y, &pilot, link.support, e, EstimateSource::Pilot, f)?
                .with_modelled_error(e, 0.0, budget.noise_var);
            records.push(record(config, budget, f, Some(nmse(est.taps(), h.taps())?), None));
            latest = Some(est);
        } else {
            let (bits, symbols) = link.random_data(rng)?;
            let x = build_do_frame(&link.grid, &symbols, e)?;
            let y = transmit(&h, &x, budget.noise_var, rng)?;
            let rate = match (&latest, config.detect) {
                (Some(est), true) => {
                    let det = lmmse_detect(
                        &y,
                        &est.channel,
                        effective_noise(budget, est, e),
                        e,
                        &link.constellation,
                        config.reg_floor,
                    )?;
                    Some(ber(&bits, &det.bits)?)
                }
                _ => None,
            };
            records.push(record(config, budget, f, None, rate));
        }
    }
    Ok(records)
}

/// Data-only frames detected with the true channel. NMSE is recorded as 0.
pub fn run_perfect_csi_session<R: Rng + ?Sized>(
    link: &Link,
    realization: &ChannelRealization,
    config: &SessionConfig,
    budget: &EnergyBudget,
    rng: &mut R,
) -> Result<Vec<MetricsRecord>> {
    config.validate()?;
    let e = budget.total;
    let mut records = Vec::with_capacity(config.frames_total);
    for f in 0..config.frames_total {
        let h = link.true_channel(realization, f)?;
        let (bits, symbols) = link.random_data(rng)?;
        let x = build_do_frame(&link.grid, &symbols, e)?;
        let y = transmit(&h, &x, budget.noise_var, rng)?;
        let rate = if config.detect {
            let det = lmmse_detect(&y, &h, budget.noise_var, e, &link.constellation, config.reg_floor)?;
            Some(ber(&bits, &det.bits)?)
        } else {
            None
        };
        records.push(record(config, budget, f, Some(0.0), rate));
    }
    Ok(records)
}

/// Dispatch on `config.scheme`.
pub fn run_session<R: Rng + ?Sized>(
    link: &Link,
    realization: &ChannelRealization,
    config: &SessionConfig,
    budget: &EnergyBudget,
    rng: &mut R,
) -> Result<Vec<MetricsRecord>> {
    match config.scheme {
        FrameScheme::DataOnly => run_differential_session(link, realization, config, budget, rng),
        FrameScheme::SpreadPilot { .. } => run_sp_session(link, realization, config, budget, rng),
        FrameScheme::SeparatePilot { .. } => run_separate_session(link, realization, config, budget, rng),
        FrameScheme::PerfectCsi => run_perfect_csi_session(link, realization, config, budget, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{default_support_box, ChannelConfig};
    use crate::frames::energy_split;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn link(config: &ChannelConfig) -> Link {
        let grid = DdGrid::new(31, 37, 30e3).unwrap();
        let filter = FilterConfig::default();
        let support = default_support_box(&grid, &filter, config.max_delay_s(), config.nu_max_hz);
        Link::new(grid, filter, support, Constellation::new(4).unwrap()).unwrap()
    }

    fn realization(config: &ChannelConfig, seed: u64) -> ChannelRealization {
        ChannelRealization::draw(config.clone(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    #[test]
    fn step_with_true_prior_is_error_free() {
        let cfg = ChannelConfig::default();
        let link = link(&cfg);
        let real = realization(&cfg, 1);
        let h = link.true_channel(&real, 0).unwrap();
        let budget = energy_split(20.0, &FrameScheme::DataOnly).unwrap().with_noise_var(0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (bits, symbols) = link.random_data(&mut rng).unwrap();
        let x = build_do_frame(&link.grid, &symbols, budget.total).unwrap();
        let y = h.apply_time(&x).unwrap();
        let prior = ChannelEstimate::oracle(h.clone(), 0);
        let (det, est) = differential_step(&link, &y, &prior, &budget, REG_FLOOR, 1).unwrap();
        assert_eq!(det.bits, bits);
        assert_eq!(est.source, EstimateSource::Data);
        let floor = estimate_h_eff(&link.grid, &y, &x, link.support, budget.total, EstimateSource::Data, 1)
            .unwrap();
        assert!(est.taps().max_abs_diff(floor.taps()) < 1e-12);
        let v = nmse(est.taps(), h.taps()).unwrap();
        assert!(v > 0.05 && v < 0.5, "{v}");
    }

    #[test]
    fn zero_prior_degenerates() {
        let cfg = ChannelConfig::default();
        let link = link(&cfg);
        let real = realization(&cfg, 3);
        let h = link.true_channel(&real, 0).unwrap();
        let budget = energy_split(20.0, &FrameScheme::DataOnly).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (bits, symbols) = link.random_data(&mut rng).unwrap();
        let x = build_do_frame(&link.grid, &symbols, budget.total).unwrap();
        let y = transmit(&h, &x, budget.noise_var, &mut rng).unwrap();
        let prior = ChannelEstimate::oracle(EffectiveChannel::zeros(link.grid, link.support), 0);
        let (det, _) = differential_step(&link, &y, &prior, &budget, REG_FLOOR, 1).unwrap();
        let rate = ber(&bits, &det.bits).unwrap();
        assert!((rate - 0.5).abs() < 0.1, "{rate}");
    }

    #[test]
    fn differential_session_layout() {
        let cfg = ChannelConfig::default();
        let link = link(&cfg);
        let real = realization(&cfg, 5);
        let mut config = SessionConfig::new(FrameScheme::DataOnly, 8);
        config.pilot_period = 4;
        config.seed = 77;
        let budget = energy_split(10.0, &FrameScheme::DataOnly).unwrap();
        let recs = run_differential_session(&link, &real, &config, &budget, &mut ChaCha8Rng::seed_from_u64(6))
            .unwrap();
        assert_eq!(recs.len(), 8);
        for r in &recs {
            assert_eq!(r.ber.is_none(), r.frame % 4 == 0, "frame {}", r.frame);
            assert!(r.nmse.unwrap() >= 0.0);
            assert_eq!((r.seed, r.scheme), (77, "do"));
        }
    }

    #[test]
    fn noiseless_pilot_frames_are_exact() {
        let cfg = ChannelConfig::default();
        let link = link(&cfg);
        let real = realization(&cfg, 7);
        let mut config = SessionConfig::new(FrameScheme::DataOnly, 5);
        config.pilot_period = 2;
        let budget = energy_split(0.0, &FrameScheme::DataOnly).unwrap().with_noise_var(0.0);
        let recs = run_differential_session(&link, &real, &config, &budget, &mut ChaCha8Rng::seed_from_u64(8))
            .unwrap();
        for r in recs.iter().filter(|r| r.frame % 2 == 0) {
            assert!(r.nmse.unwrap() < 1e-18, "{r:?}");
        }
    }

    #[test]
    fn static_channel_has_no_drift_at_high_snr() {
        let cfg = ChannelConfig {
            nu_max_hz: 0.0,
            ..ChannelConfig::default()
        };
        let link = link(&cfg);
        let real = realization(&cfg, 9);
        let config = SessionConfig::new(FrameScheme::DataOnly, 30);
        let budget = energy_split(30.0, &FrameScheme::DataOnly).unwrap();
        let recs = run_differential_session(&link, &real, &config, &budget, &mut ChaCha8Rng::seed_from_u64(10))
            .unwrap();
        let trace: Vec<f64> = recs[1..].iter().map(|r| r.nmse.unwrap()).collect();
        let head: f64 = trace[..5].iter().sum::<f64>() / 5.0;
        let tail: f64 = trace[trace.len() - 5..].iter().sum::<f64>() / 5.0;
        assert!((tail - head).abs() <= 0.1 * head, "{head} {tail}");
        let bers: Vec<f64> = recs[1..].iter().map(|r| r.ber.unwrap()).collect();
        assert!(bers.iter().all(|&b| b < 0.1));
    }

    #[test]
    fn perfect_csi_noiseless_has_zero_ber() {
        let cfg = ChannelConfig::default();
        let link = link(&cfg);
        let real = realization(&cfg, 11);
        let config = SessionConfig::new(FrameScheme::PerfectCsi, 3);
        let budget = energy_split(10.0, &FrameScheme::PerfectCsi).unwrap().with_noise_var(0.0);
        let recs = run_perfect_csi_session(&link, &real, &config, &budget, &mut ChaCha8Rng::seed_from_u64(12))
            .unwrap();
        assert!(recs.iter().all(|r| r.ber == Some(0.0) && r.nmse == Some(0.0)));
    }

    #[test]
    fn separate_session_alternates() {
        let cfg = ChannelConfig::default();
        let link = link(&cfg);
        let real = realization(&cfg, 13);
        let scheme = FrameScheme::SeparatePilot { k_p: 0, l_p: 0 };
        let config = SessionConfig::new(scheme, 4);
        let budget = energy_split(0.0, &scheme).unwrap().with_noise_var(0.0);
        let recs = run_separate_session(&link, &real, &config, &budget, &mut ChaCha8Rng::seed_from_u64(14))
            .unwrap();
        for r in &recs {
            if r.frame % 2 == 0 {
                assert!(r.ber.is_none() && r.nmse.unwrap() < 1e-18, "{r:?}");
            } else {
                assert!(r.nmse.is_none() && r.ber.unwrap() < 0.01, "{r:?}");
            }
        }
    }

    #[test]
    fn sp_session_records_both_metrics() {
        let cfg = ChannelConfig::default();
        let link = link(&cfg);
        let real = realization(&cfg, 15);
        let scheme = FrameScheme::SpreadPilot { alpha: 0.5, root: None };
        let config = SessionConfig::new(scheme, 2);
        let budget = energy_split(20.0, &scheme).unwrap();
        let recs = run_sp_session(&link, &real, &config, &budget, &mut ChaCha8Rng::seed_from_u64(16)).unwrap();
        for r in &recs {
            assert_eq!(r.alpha, Some(0.5));
            assert!(r.nmse.unwrap() < 1.0 && r.ber.unwrap() < 0.5, "{r:?}");
        }
    }

    #[test]
    fn sp_session_rejects_dirty_root() {
        let cfg = ChannelConfig::default();
        let link = link(&cfg);
        let real = realization(&cfg, 15);
        let scheme = FrameScheme::SpreadPilot { alpha: 0.5, root: Some(1) };
        let config = SessionConfig::new(scheme, 1);
        let budget = energy_split(20.0, &scheme).unwrap();
        let out = run_sp_session(&link, &real, &config, &budget, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(matches!(out, Err(Error::ImpureAmbiguity { .. })));
    }

    #[test]
    fn zero_pilot_period_rejected() {
        let mut config = SessionConfig::new(FrameScheme::DataOnly, 1);
        config.pilot_period = 0;
        assert!(config.validate().is_err());
    }
}
