//! Single-cell physical layer: channel draws, MRT beams and the
//! rate/power/efficiency metrics.

mod beam;
mod channel;
mod metrics;

pub(crate) use beam::mrt_all;
pub use beam::{link_gain, mrt, mrt_beamformers, norm, project, Beamformers, GainMatrix};
pub use channel::{
    complex_gaussian, complex_gaussian_vec, draw_channels, draw_fast_fading, draw_large_scale,
    draw_placement, draw_shadow_db, path_gain, seeded_rng, ChannelSet, LargeScale, Placement,
    SimRng,
};
pub use metrics::{
    energy_efficiency, power_consumption, rate, shannon_rate, sinr, sinr_from_gains,
    PowerAllocation,
};
