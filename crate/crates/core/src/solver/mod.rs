//! Energy-efficiency maximizing power allocation under fixed beams.
//!
//! Three nested loops: Dinkelbach on the ratio `Σr/P`, successive convex
//! approximation of each rate, and a closed-form power update driven by
//! interference feedback with projected multiplier updates.

mod dinkelbach;
mod dual;
mod inner;
mod network;
mod sca;

pub use dinkelbach::{
    dinkelbach_solve, sca_loop, sca_loop_from, ScaOutcome, Solution, SolverTrace, TraceEntry,
};
pub use dual::{subgradient_step, DualMultipliers};
pub use inner::{inner_solve, interference_feedback, power_update, InnerOutcome};
pub use network::Network;
pub use sca::{sca_update, ScaCoefficients};

use crate::error::Result;
use crate::params::SystemParams;
use crate::sysmodel::{mrt_beamformers, ChannelSet};

/// MRT beams on `channels`, then [`dinkelbach_solve`].
pub fn solve(params: &SystemParams, channels: &ChannelSet) -> Result<Solution> {
    let beams = mrt_beamformers(channels)?;
    dinkelbach_solve(&Network::single_cell(params, channels, &beams)?)
}
