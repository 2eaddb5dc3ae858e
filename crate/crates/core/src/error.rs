use thiserror::Error;

pub type Result<T> = std::result::Result<T, HraError>;

#[derive(Debug, Error)]
pub enum HraError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The pre-scan of `h(alpha)` saw more than one sign change, so the
    /// declared monotonicity profile cannot be right.
    #[error("ambiguous root: h(alpha) changes sign {sign_changes} times over the pre-scan")]
    AmbiguousRoot {
        sign_changes: usize,
        /// `(alpha, h(alpha))` pairs of the pre-scan.
        trace: Vec<(f64, f64)>,
    },

    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    #[error("quadrature did not converge: {0}")]
    Accuracy(String),

    #[error("polar angle undefined for the zero vector")]
    UndefinedAngle,

    #[error("degenerate gradient (norm {norm:e}) at the evaluation point")]
    DegenerateGradient { norm: f64 },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("unknown benchmark case `{0}` (available: linear, crank_slider, cantilever_tube)")]
    UnknownCase(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HraError {
    /// True for errors caused by bad input rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            HraError::UnknownCase(_) | HraError::Config { .. } | HraError::InvalidParameter(_) | HraError::Io(_)
        )
    }
}
