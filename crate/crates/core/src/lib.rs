//! Secrecy outage probability (SOP) engine for multi-antenna downlinks.
//!
//! Alice (M antennas) serves a single-antenna receiver Bob while eavesdroppers
//! are scattered as a Poisson point process. Bob may run full duplex and jam;
//! Alice may inject artificial noise into the null space of the main channel.
//! The crate evaluates closed-form and quadrature-based connection
//! probabilities for antenna selection (TAS), beamforming (TAB) and
//! beamforming with user selection (TAB-US), against non-colluding and
//! colluding eavesdroppers, and ships a Monte Carlo simulator that serves as
//! an independent oracle for every analytic route.

pub mod error;
pub mod montecarlo;
pub mod model;
pub mod optimizer;
pub mod quadrature;
pub mod scenario;
pub mod sop_colluding;
pub mod sop_noncolluding;
pub mod sop_userselect;
pub mod specfun;

mod averaging;

pub use error::{Error, Result};
pub use model::SystemParams;
