//! TOML sweep configuration.
//!
//! ```toml
//! M = 31
//! N = 37
//! snr_db = [0, 5, 10, 15, 20, 25]
//! # optional, defaults shown
//! nu_p = 30000.0
//! qam = 4
//! frames = 60
//! realizations = 10
//! pilot_period = 30
//! seed = 0
//! schemes = ["do", "sp", "separate", "perfect"]
//! alpha = [0.5]
//! out = "results"
//! plots = true
//!
//! [filter]
//! beta_tau = 0.6
//! beta_nu = 0.6
//! half_width_delay = 2
//! half_width_doppler = 2
//!
//! [channel]
//! carrier_hz = 4e9
//! d_ref_m = 1000.0
//! nu_max_hz = 815.0
//! doppler_phase = false
//! profile = "profile.txt"   # "delay_us power_db" lines; VehA if omitted
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use zakotfs::channel::{parse_profile, ChannelConfig, FilterConfig};
use zakotfs::dd::DdGrid;
use zakotfs::frames::{Constellation, FrameScheme};
use zakotfs::receiver::DEFAULT_PILOT_PERIOD;

/// Configuration problem, with the offending line when known.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    DataOnly,
    SpreadPilot,
    Separate,
    PerfectCsi,
}

impl SchemeKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "do" | "data-only" => Some(Self::DataOnly),
            "sp" | "spread" => Some(Self::SpreadPilot),
            "separate" => Some(Self::Separate),
            "perfect" | "perfect-csi" => Some(Self::PerfectCsi),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub grid: DdGrid,
    pub filter: FilterConfig,
    pub channel: ChannelConfig,
    pub schemes: Vec<SchemeKind>,
    /// Data energy fractions for the spread-pilot scheme.
    pub alphas: Vec<f64>,
    pub sp_root: Option<u64>,
    pub snr_db: Vec<f64>,
    pub frames: usize,
    pub realizations: usize,
    pub pilot_period: usize,
    pub qam: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub plots: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            grid: DdGrid::new(31, 37, 30e3).expect("valid default grid"),
            filter: FilterConfig::default(),
            channel: ChannelConfig::default(),
            schemes: vec![
                SchemeKind::DataOnly,
                SchemeKind::SpreadPilot,
                SchemeKind::Separate,
                SchemeKind::PerfectCsi,
            ],
            alphas: vec![0.5],
            sp_root: None,
            snr_db: vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0],
            frames: 60,
            realizations: 10,
            pilot_period: DEFAULT_PILOT_PERIOD,
            qam: 4,
            seed: 0,
            out_dir: PathBuf::from("results"),
            plots: true,
        }
    }
}

impl SimConfig {
    /// Frame schemes expanded over the alpha list.
    pub fn frame_schemes(&self) -> Vec<FrameScheme> {
        let mut out = Vec::new();
        for kind in &self.schemes {
            match kind {
                SchemeKind::DataOnly => out.push(FrameScheme::DataOnly),
                SchemeKind::SpreadPilot => out.extend(self.alphas.iter().map(|&alpha| {
                    FrameScheme::SpreadPilot {
                        alpha,
                        root: self.sp_root,
                    }
                })),
                SchemeKind::Separate => out.push(FrameScheme::SeparatePilot { k_p: 0, l_p: 0 }),
                SchemeKind::PerfectCsi => out.push(FrameScheme::PerfectCsi),
            }
        }
        out
    }

    /// Checks every field. Errors name the config key they concern.
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        if self.snr_db.is_empty() {
            return Err(("snr_db", "SNR list must not be empty".into()));
        }
        if let Some(s) = self.snr_db.iter().find(|s| !s.is_finite()) {
            return Err(("snr_db", format!("SNR values must be finite, got {s}")));
        }
        if self.schemes.is_empty() {
            return Err(("schemes", "scheme list must not be empty".into()));
        }
        if self.schemes.contains(&SchemeKind::SpreadPilot) && self.alphas.is_empty() {
            return Err(("alpha", "spread-pilot scheme needs at least one alpha".into()));
        }
        if let Some(a) = self.alphas.iter().find(|&&a| !(a > 0.0 && a < 1.0)) {
            return Err(("alpha", format!("alpha must lie in (0, 1), got {a}")));
        }
        if self.frames == 0 {
            return Err(("frames", "frames must be at least 1".into()));
        }
        if self.realizations == 0 {
            return Err(("realizations", "realizations must be at least 1".into()));
        }
        if self.pilot_period == 0 {
            return Err(("pilot_period", "pilot period must be at least 1".into()));
        }
        Constellation::new(self.qam).map_err(|e| ("qam", e.to_string()))?;
        self.filter.validate().map_err(|e| ("filter", e.to_string()))?;
        self.channel.validate().map_err(|e| ("channel", e.to_string()))?;
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "N")]
    n: usize,
    snr_db: Vec<f64>,
    nu_p: Option<f64>,
    qam: Option<usize>,
    frames: Option<usize>,
    realizations: Option<usize>,
    pilot_period: Option<usize>,
    seed: Option<u64>,
    schemes: Option<Vec<String>>,
    alpha: Option<Vec<f64>>,
    sp_root: Option<u64>,
    out: Option<PathBuf>,
    plots: Option<bool>,
    filter: Option<RawFilter>,
    channel: Option<RawChannel>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFilter {
    beta_tau: Option<f64>,
    beta_nu: Option<f64>,
    half_width_delay: Option<usize>,
    half_width_doppler: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    carrier_hz: Option<f64>,
    d_ref_m: Option<f64>,
    nu_max_hz: Option<f64>,
    doppler_phase: Option<bool>,
    profile: Option<PathBuf>,
}

/// 1-based line of the first `key = ...` assignment in `text`.
fn key_line(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|line| {
        let t = line.trim_start();
        t.strip_prefix(key)
            .map(|rest| rest.trim_start().starts_with('='))
            .unwrap_or(false)
    })
    .map(|i| i + 1)
}

/// Narrow a section-level validation failure to the field it is about.
fn blame<'a>(key: &'a str, message: &str) -> &'a str {
    match key {
        "filter" if message.contains("beta_nu") => "beta_nu",
        "filter" => "beta_tau",
        "channel" if message.contains("carrier") => "carrier_hz",
        "channel" if message.contains("reference distance") => "d_ref_m",
        "channel" if message.contains("Doppler") => "nu_max_hz",
        "channel" => "profile",
        k => k,
    }
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parse and validate. Relative profile paths resolve against `base`.
pub fn parse_config_in(text: &str, base: &Path) -> Result<SimConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError {
        line: e.span().map(|s| line_of_offset(text, s.start)),
        message: e.message().trim().to_string(),
    })?;
    let at = |key: &str, message: String| ConfigError {
        line: key_line(text, key),
        message,
    };
    let defaults = SimConfig::default();
    let grid = DdGrid::new(raw.m, raw.n, raw.nu_p.unwrap_or(defaults.grid.nu_p()))
        .map_err(|e| at("M", e.to_string()))?;
    let schemes = match raw.schemes {
        Some(list) => list
            .iter()
            .map(|s| SchemeKind::parse(s).ok_or_else(|| at("schemes", format!("unknown scheme {s:?}"))))
            .collect::<Result<Vec<_>, _>>()?,
        None => defaults.schemes.clone(),
    };
    let mut filter = defaults.filter;
    if let Some(f) = raw.filter {
        filter.beta_tau = f.beta_tau.unwrap_or(filter.beta_tau);
        filter.beta_nu = f.beta_nu.unwrap_or(filter.beta_nu);
        filter.half_width_delay = f.half_width_delay.unwrap_or(filter.half_width_delay);
        filter.half_width_doppler = f.half_width_doppler.unwrap_or(filter.half_width_doppler);
    }
    let mut channel = defaults.channel.clone();
    if let Some(c) = raw.channel {
        channel.carrier_hz = c.carrier_hz.unwrap_or(channel.carrier_hz);
        channel.d_ref_m = c.d_ref_m.unwrap_or(channel.d_ref_m);
        channel.nu_max_hz = c.nu_max_hz.unwrap_or(channel.nu_max_hz);
        channel.doppler_phase = c.doppler_phase.unwrap_or(channel.doppler_phase);
        if let Some(path) = c.profile {
            let path = base.join(path);
            let body = std::fs::read_to_string(&path)
                .map_err(|e| at("profile", format!("{}: {e}", path.display())))?;
            channel.profile = parse_profile(&body).map_err(|e| at("profile", e.to_string()))?;
        }
    }
    let config = SimConfig {
        grid,
        filter,
        channel,
        schemes,
        alphas: raw.alpha.unwrap_or(defaults.alphas),
        sp_root: raw.sp_root,
        snr_db: raw.snr_db,
        frames: raw.frames.unwrap_or(defaults.frames),
        realizations: raw.realizations.unwrap_or(defaults.realizations),
        pilot_period: raw.pilot_period.unwrap_or(defaults.pilot_period),
        qam: raw.qam.unwrap_or(defaults.qam),
        seed: raw.seed.unwrap_or(defaults.seed),
        out_dir: raw.out.unwrap_or(defaults.out_dir),
        plots: raw.plots.unwrap_or(defaults.plots),
    };
    config.validate().map_err(|(key, msg)| at(blame(key, &msg), msg))?;
    Ok(config)
}

pub fn parse_config(text: &str) -> Result<SimConfig, ConfigError> {
    parse_config_in(text, Path::new("."))
}
