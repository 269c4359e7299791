use thiserror::Error;

/// Errors raised by the algebra, simulation and synthesis layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("rotation axis is not a unit vector (norm {norm})")]
    NonUnitAxis { norm: f64 },

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("reference state is not pure (purity {purity})")]
    NotPure { purity: f64 },

    #[error("branch index {index} out of range for {len} adversary operations")]
    BranchOutOfRange { index: usize, len: usize },

    #[error("expected {expected} weights, got {got}")]
    WeightMismatch { expected: usize, got: usize },

    #[error("invalid probability weights: {0}")]
    InvalidWeights(String),

    #[error("operator set is empty")]
    EmptyOps,

    #[error("operators do not pairwise commute")]
    NonCommuting,

    #[error("parameter out of range: {0}")]
    ParamRange(String),

    #[error("adversary operations differ only by a phase (sin(varphi/2) = {sin_half:e})")]
    DegenerateComposition { sin_half: f64 },

    #[error("linear system is singular ({0})")]
    Singular(String),

    #[error("gamma is inconsistent with the adversary rotation angle (cos(varphi/2) - c cos(gamma/2) = {residual:e})")]
    InconsistentGamma { residual: f64 },

    #[error("Bloch vector of the first move has norm {norm}, expected 1; retune theta1")]
    AxisNorm { norm: f64 },

    #[error("no winning strategy exists for this operator set")]
    NoStrategy,
}

pub type Result<T> = std::result::Result<T, Error>;
