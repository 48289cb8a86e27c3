use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed frame: expected {expected} samples, got {got}")]
    MalformedFrame { expected: usize, got: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("index ({k}, {l}) outside the {m}x{n} fundamental domain")]
    IndexOutOfRange { k: i64, l: i64, m: usize, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("channel power profile is empty")]
    EmptyProfile,

    #[error("path {index} (delay {delay_s} s, Doppler {doppler_hz} Hz) lies outside the unambiguous region")]
    PathOutsideRegion {
        index: usize,
        delay_s: f64,
        doppler_hz: f64,
    },

    #[error("path {index}: distance {distance_m} m at t = {t_s} s is not positive")]
    ModelBreakdown {
        index: usize,
        distance_m: f64,
        t_s: f64,
    },

    #[error("chirp root {root} shares a factor with MN = {len}")]
    NonCoprimeRoot { root: u64, len: usize },

    #[error("pilot ambiguity not delta-like: |A[{k}, {l}]| = {magnitude:e} (origin {origin:e})")]
    ImpureAmbiguity {
        k: i64,
        l: i64,
        magnitude: f64,
        origin: f64,
    },

    #[error("reference signal has zero energy")]
    ZeroEnergy,

    #[error("true channel has zero norm")]
    ZeroChannel,

    #[error("support box {got} does not match {expected}")]
    BoxMismatch { expected: String, got: String },

    #[error("linear system is numerically singular (pivot {pivot:e} at row {row})")]
    Singular { row: usize, pivot: f64 },
}
