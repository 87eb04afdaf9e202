use thiserror::Error;

use crate::superpotentials::ClassTag;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("x = {x} lies outside the open domain ({lower}, {upper})")]
    Domain { x: f64, lower: f64, upper: f64 },

    #[error("closed form is singular at x = {x}")]
    Singularity { x: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("operation not supported for class {0}")]
    UnsupportedClass(ClassTag),

    #[error("unsupported parameters: {0}")]
    UnsupportedParameters(String),

    #[error("indeterminate phase: {0}")]
    IndeterminatePhase(String),

    #[error("wrong phase: {0}")]
    Phase(String),

    #[error("hierarchy condition fails at n = {n}: {reason}")]
    Hierarchy { n: usize, reason: String },

    #[error("no turning points: E = {energy} is below min W^2 = {min_w2}")]
    NoTurningPoints { energy: f64, min_w2: f64 },

    #[error("W^2 = E has a single intersection at E = {energy}; the integral has no second limit")]
    SingleIntersection { energy: f64 },

    #[error("integrand E - W^2 = {value} < 0 at x = {x}; turning points do not bracket the allowed region")]
    NegativeIntegrand { x: f64, value: f64 },

    #[error("quadrature did not converge with {nodes} nodes (last change {last_change:e})")]
    ConvergenceFailure { nodes: usize, last_change: f64 },

    #[error("root bracket lost or iteration cap reached: {0}")]
    RootFinding(String),

    #[error("grid too coarse: level {level} moved by {shift:e} (relative) between N and 2N+1")]
    GridTooCoarse { level: usize, shift: f64 },

    #[error("truncation: V({x}) = {potential} is below E_k + margin = {required}")]
    Truncation { x: f64, potential: f64, required: f64 },

    #[error("empty input")]
    EmptyInput,

    #[error("unknown catalog entry '{0}'")]
    UnknownInstance(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
