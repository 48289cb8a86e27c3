use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::dd::C64;
use crate::{Error, Result};

/// ITU Vehicular-A tap delays in microseconds.
pub const VEHA_DELAYS_US: [f64; 6] = [0.0, 0.31, 0.71, 1.09, 1.73, 2.51];
/// ITU Vehicular-A relative tap powers in dB.
pub const VEHA_POWERS_DB: [f64; 6] = [0.0, -1.0, -9.0, -10.0, -15.0, -20.0];

/// One propagation path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalPath {
    /// Delay in seconds.
    pub delay_s: f64,
    /// Doppler shift in Hz, signed.
    pub doppler_hz: f64,
    /// Base amplitude from the power profile.
    pub gain: f64,
    /// Static phase in radians.
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    pub carrier_hz: f64,
    pub light_speed: f64,
    /// Offset added to every path length so the zero-delay tap has finite loss.
    pub d_ref_m: f64,
    pub nu_max_hz: f64,
    /// `(delay s, power dB)` per tap.
    pub profile: Vec<(f64, f64)>,
    /// Rotate each gain by `exp(j 2 pi nu_i t)` as time advances.
    pub doppler_phase: bool,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            carrier_hz: 4e9,
            light_speed: 3e8,
            d_ref_m: 1000.0,
            nu_max_hz: 815.0,
            profile: VEHA_DELAYS_US
                .iter()
                .zip(VEHA_POWERS_DB)
                .map(|(d, p)| (d * 1e-6, p))
                .collect(),
            doppler_phase: false,
        }
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| {
            Err(Error::InvalidParameter(format!("{what} must be positive, got {v}")))
        };
        if !(self.carrier_hz > 0.0) {
            return bad("carrier frequency", self.carrier_hz);
        }
        if !(self.light_speed > 0.0) {
            return bad("propagation speed", self.light_speed);
        }
        if !(self.d_ref_m > 0.0) {
            return bad("reference distance", self.d_ref_m);
        }
        if !(self.nu_max_hz >= 0.0 && self.nu_max_hz.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "maximum Doppler must be non-negative, got {}",
                self.nu_max_hz
            )));
        }
        if self.profile.iter().any(|&(d, p)| !(d >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidParameter(
                "profile delays must be non-negative and powers finite".into(),
            ));
        }
        Ok(())
    }

    pub fn max_delay_s(&self) -> f64 {
        self.profile.iter().map(|p| p.0).fold(0.0, f64::max)
    }
}

/// Parse a power-delay profile: one `delay_us power_db` pair per line.
/// Blank lines and `#` comments are ignored.
pub fn parse_profile(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut taps = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parsed = match fields.as_slice() {
            [d, p] => d.parse::<f64>().ok().zip(p.parse::<f64>().ok()),
            _ => None,
        };
        let (d, p) = parsed.ok_or_else(|| {
            Error::InvalidParameter(format!(
                "profile line {}: expected `delay_us power_db`, got `{line}`",
                lineno + 1
            ))
        })?;
        taps.push((d * 1e-6, p));
    }
    if taps.is_empty() {
        return Err(Error::EmptyProfile);
    }
    Ok(taps)
}

/// Draw one path per profile tap.
///
/// Amplitudes are `10^{P/20}` normalized to unit total power, phases are
/// uniform on `[-2 pi, 2 pi)` and Dopplers follow `nu_max cos(2 pi u)`.
pub fn veha_paths<R: Rng + ?Sized>(config: &ChannelConfig, rng: &mut R) -> Result<Vec<PhysicalPath>> {
    config.validate()?;
    if config.profile.is_empty() {
        return Err(Error::EmptyProfile);
    }
    let amps: Vec<f64> = config
        .profile
        .iter()
        .map(|&(_, p)| 10f64.powf(p / 20.0))
        .collect();
    let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
    Ok(config
        .profile
        .iter()
        .zip(amps)
        .map(|(&(delay_s, _), a)| {
            let phase = rng.random_range(-TAU..TAU);
            let u: f64 = rng.random();
            PhysicalPath {
                delay_s,
                doppler_hz: config.nu_max_hz * (2.0 * PI * u).cos(),
                gain: a / norm,
                phase,
            }
        })
        .collect())
}

/// Complex path gains at time `t`:
/// `d_i(t) = d_ref + tau_i c + (nu_i c / f_c) t`, `h_i(t) = alpha_i exp(j theta_i) / d_i(t)`.
pub fn evolve_gains(paths: &[PhysicalPath], config: &ChannelConfig, t: f64) -> Result<Vec<C64>> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time must be >= 0, got {t}")));
    }
    let c = config.light_speed;
    paths
        .iter()
        .enumerate()
        .map(|(index, p)| {
            let d = config.d_ref_m + p.delay_s * c + p.doppler_hz * c / config.carrier_hz * t;
            if !(d > 0.0) {
                return Err(Error::ModelBreakdown {
                    index,
                    distance_m: d,
                    t_s: t,
                });
            }
            let mut h = C64::from_polar(p.gain / d, p.phase);
            if config.doppler_phase {
                h *= C64::from_polar(1.0, TAU * p.doppler_hz * t);
            }
            Ok(h)
        })
        .collect()
}

/// A drawn set of paths plus the scale that puts unit total power on the
/// gains at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub config: ChannelConfig,
    pub paths: Vec<PhysicalPath>,
    scale: f64,
}

impl ChannelRealization {
    pub fn new(config: ChannelConfig, paths: Vec<PhysicalPath>) -> Result<Self> {
        let g0 = evolve_gains(&paths, &config, 0.0)?;
        let power: f64 = g0.iter().map(|g| g.norm_sqr()).sum();
        let scale = if power > 0.0 { power.sqrt().recip() } else { 1.0 };
        Ok(Self {
            config,
            paths,
            scale,
        })
    }

    pub fn draw<R: Rng + ?Sized>(config: ChannelConfig, rng: &mut R) -> Result<Self> {
        let paths = veha_paths(&config, rng)?;
        Self::new(config, paths)
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Normalized gains at time `t`.
    pub fn gains_at(&self, t: f64) -> Result<Vec<C64>> {
        let mut g = evolve_gains(&self.paths, &self.config, t)?;
        g.iter_mut().for_each(|v| *v *= self.scale);
        Ok(g)
    }
}
