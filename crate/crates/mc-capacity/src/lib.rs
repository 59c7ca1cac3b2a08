//! Achievable-rate bounds for molecular amplitude-shift keying over a
//! diffusion channel with one slot of inter-symbol interference.
//!
//! The transmitter releases `0..=x_max` molecules per slot; each molecule's
//! transit time follows an inverse Gaussian law, so a molecule lands in its
//! own slot (probability `q1`), the next slot (`q2`), or is treated as lost.
//! On top of that model the crate provides:
//!
//! - [`aign`] — numerically stable transit-time CDF and slot-arrival
//!   probabilities,
//! - [`channel`] — every transition law as an explicit row-stochastic matrix,
//! - [`bounds`] — entropy/mutual-information functionals and the four rate
//!   quantities (two lower bounds, the interference-free upper bound, and the
//!   two-slot matched-filter rate),
//! - [`baa`] — standard Blahut–Arimoto for fixed channels plus the modified
//!   variant that rebuilds the input-dependent matrix every iteration,
//! - [`mcsim`] — a seeded per-molecule Monte-Carlo oracle used to validate
//!   the analytic laws.

pub mod aign;
pub mod baa;
pub mod bounds;
pub mod channel;
mod error;
pub mod mcsim;
pub mod special;

pub use error::{Error, Result};

/// Slot-duration grid used by the shipped figure-reproduction presets
/// (log-spaced, half-decade steps). Tests and the `presets/*.cfg` files must
/// agree on these values.
pub const PRESET_T_GRID: [f64; 9] = [
    1e-5,
    3.16227766016838e-5,
    1e-4,
    3.16227766016838e-4,
    1e-3,
    3.16227766016838e-3,
    1e-2,
    3.16227766016838e-2,
    1e-1,
];
