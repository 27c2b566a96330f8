//! Spatial intensity-intensity correlations of the resonance-fluorescence
//! spectral bands emitted by a regularly spaced chain of strongly driven
//! two-level atoms.
//!
//! The crate provides closed-form second-order correlation functions and
//! Cauchy-Schwarz parameters for each pair of Mollow bands as functions of
//! two detector positions, the dressed-state relaxation dynamics of an atom
//! pair, an exact-diagonalization oracle that cross-checks every closed
//! form by direct operator algebra, and a configurable sweep layer that
//! evaluates detector-angle grids in parallel and emits CSV/JSON files.
//!
//! Units: rates in the spontaneous decay rate γ, lengths in the drive
//! wavelength λ, angles in radians.

pub mod correlations;
pub mod dynamics;
pub mod error;
pub mod oracle;
pub mod params;
pub mod sweep;

pub use error::{Error, Result};
