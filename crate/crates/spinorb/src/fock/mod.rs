//! Second-quantized Fock-space core: mode bookkeeping, sparse states,
//! single-photon map lifting and projective measurement.

mod map;
mod projector;
mod registry;
mod state;

pub use map::{ModeMap, SparseVector};
pub use projector::{outcome_probability, project, LocalState, PolState, Projector};
pub use registry::{ModeLabel, ModeRegistry, Polarization};
pub use state::{Occupation, PhotonicState, AMPLITUDE_PRUNE_TOLERANCE};

pub(crate) use state::NORM_SQR_TOLERANCE;
