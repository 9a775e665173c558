use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A Fourier index beyond what the representation can resolve without aliasing.
    #[error("Fourier index {k} is outside the resolvable window |k| <= {window}")]
    OutsideWindow { k: i64, window: usize },

    #[error("kernel sample at angle {angle} is not finite")]
    NonFiniteKernel { angle: f64 },

    #[error("kernel does not satisfy the duality hypotheses: {0}")]
    KernelHypothesis(String),

    #[error("grid is not symmetric under θ -> -θ")]
    AsymmetricGrid,

    #[error("functions live on different grids")]
    GridMismatch,

    #[error("grid does not contain the breakpoint {angle}")]
    MissingBreakpoint { angle: f64 },

    #[error("no n <= {n_max} satisfies the localization condition for m = {m}")]
    NoQualifyingN { m: usize, n_max: usize },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("coefficient at k = {index} has modulus {modulus:e}, input is not Hardy class")]
    NotHardy { index: i64, modulus: f64 },

    #[error("gliding hump stage {stage} could not reach the target (best error {best_error})")]
    StageFailure { stage: usize, best_error: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
