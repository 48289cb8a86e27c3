//! Time-varying multipath channels in the delay-Doppler domain.
//!
//! A realization is a list of [`PhysicalPath`]s whose complex gains follow a
//! distance-based path-loss law. The receiver sees the *effective* channel:
//! the paths smeared by separable RRC shaping and sampled on the DD grid.

mod effective;
mod noise;
mod path;
mod rrc;

pub use effective::{
    build_channel_matrix, default_support_box, sample_effective_channel, EffectiveChannel,
    TimeKernel,
};
pub use noise::awgn;
pub use path::{
    evolve_gains, parse_profile, veha_paths, ChannelConfig, ChannelRealization, PhysicalPath,
    VEHA_DELAYS_US, VEHA_POWERS_DB,
};
pub use rrc::{rrc, FilterConfig};
