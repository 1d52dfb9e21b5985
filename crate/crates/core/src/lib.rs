//! Energy-efficient downlink power allocation for massive-MIMO cells.

pub mod error;
pub mod experiment;
pub mod multicell;
pub mod oracle;
pub mod params;
pub mod solver;
pub mod sysmodel;

pub use error::{Error, Result};
pub use params::{SolverSettings, SystemParams};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/system-model.md")]
    mod system_model {}
    #[doc = include_str!("../../../book/src/solver.md")]
    mod solver {}
    #[doc = include_str!("../../../book/src/multicell.md")]
    mod multicell {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
