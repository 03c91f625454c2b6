//! Simulation and verification toolkit for few-photon states that carry
//! polarization, orbital angular momentum (OAM) and a spatial path.
//!
//! The crate models, in exact second quantization:
//!
//! * sparse fixed-photon-number states over (path, polarization, OAM)
//!   modes ([`fock`]);
//! * linear optical elements — wave plates, polarizing beam splitters,
//!   q-plates, fork holograms, angular slit masks, polarization-to-OAM
//!   transferrers — lifted from single-photon matrices to any photon
//!   number ([`elements`]);
//! * named sources and element pipelines that prepare and convert
//!   entangled pair, triple and quadruple states between polarization,
//!   OAM and single-path encodings ([`circuits`]);
//! * an entanglement witness for two-qubit Bell correlations in either
//!   polarization or OAM, with closed-form separable-state baselines and
//!   a numerical minimizer over product states ([`witness`]);
//! * a detection protocol that turns witness terms into counting
//!   experiments with seeded, reproducible shot noise ([`measurement`]).
//!
//! Amplitudes are exact up to `f64` rounding: no perturbative cutoffs, no
//! Monte-Carlo state evolution. Randomness only enters when simulated
//! detector counts are explicitly requested.

pub mod circuits;
pub mod elements;
mod error;
pub mod fock;
pub mod measurement;
pub mod witness;

pub use error::{Error, Result};
