//! Crate-wide error type.
//!
//! Every fallible operation returns [`Result`]. Errors are values, not
//! panics: malformed pipeline files, annihilated post-selections and
//! ill-posed witness evaluations are all ordinary outcomes a caller may
//! want to branch on.

use thiserror::Error;

use crate::fock::ModeLabel;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All error conditions surfaced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mode registry needs at least one path")]
    EmptyRegistry,

    #[error("duplicate path index {0} in registry")]
    DuplicatePath(u32),

    #[error("OAM order must be at least 1, got {0}")]
    InvalidOamOrder(u32),

    #[error("mode {0} is not in the registry")]
    UnregisteredMode(ModeLabel),

    #[error("path {0} is not in the registry")]
    UnregisteredPath(u32),

    #[error("states belong to different mode registries")]
    RegistryMismatch,

    #[error("photon numbers differ: {left} vs {right}")]
    PhotonNumberMismatch { left: u32, right: u32 },

    #[error("cannot normalize a state with zero norm")]
    ZeroNorm,

    #[error("superposition needs at least one term")]
    EmptySuperposition,

    #[error("zero vector cannot describe a single-photon state")]
    ZeroVector,

    #[error("projector states at path {path} are not orthonormal: {detail}")]
    ProjectorNotOrthonormal { path: u32, detail: String },

    #[error("{element}: occupied component has no image in the registry: {detail}")]
    OutsideDomain { element: String, detail: String },

    #[error("transferrer at path {0} requires every photon at that path to carry OAM 0")]
    NonZeroInputOam(u32),

    #[error("element needs two distinct paths, got {0} twice")]
    IdenticalPaths(u32),

    #[error("{element}: invalid parameter: {detail}")]
    InvalidParameter { element: String, detail: String },

    #[error("element {index} ({element}): post-selection annihilated the state")]
    Annihilated { index: usize, element: String },

    #[error("element {index} ({element}): {source}")]
    ElementFailed {
        index: usize,
        element: String,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown state identifier `{0}`")]
    UnknownState(String),

    #[error("unknown pipeline `{0}`")]
    UnknownPipeline(String),

    #[error("pipeline file line {line}: {message}")]
    PipelineParse { line: usize, message: String },

    #[error("witness undefined for this state: {0}")]
    WitnessDomain(String),

    #[error("separable parameters violate normalization beyond 1e-9: {0}")]
    SeparableConstraint(String),

    #[error("cannot estimate witness: the four basis settings have zero total counts")]
    EmptyBasisCounts,

    #[error("count record does not match the witness: expected setting `{0}`")]
    MissingSetting(String),
}
