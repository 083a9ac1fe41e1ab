//! Driven-dissipative Dicke model toolkit.
//!
//! Three independent routes to the phase diagram of `N` spins coupled to a
//! damped harmonic oscillator:
//!
//! * [`cumulant`] — second-order cumulant equations of motion, their numeric
//!   steady states and the closed-form steady-state solutions;
//! * [`liouville`] — the full Lindblad master equation on a
//!   permutation-symmetric spin sector with a truncated Fock space, plus a
//!   brute-force tensor-product oracle for small `N`;
//! * [`spectral`] — dressed-state detunings and effective heating rates of the
//!   blockade-breakdown mechanism.
//!
//! [`model`] holds the physical parameter set and the closed-form critical
//! couplings, [`ionmap`] translates trapped-ion laser settings into model
//! parameters, and [`sweep`]/[`method`] orchestrate phase-diagram scans with
//! runtime-selectable evaluation strategies.

pub mod cumulant;
pub mod error;
pub mod ionmap;
pub mod liouville;
pub mod method;
pub mod model;
pub mod ode;
pub mod output;
pub mod spectral;
pub mod sweep;

pub use error::Error;
pub use model::ModelParams;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
