use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures raised by the library.
///
/// Everything except [`Error::Accuracy`] is a validation failure: the input
/// was rejected before any numerics ran. `Accuracy` means a computation ran
/// but a monitored error estimate crossed its threshold.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("unsupported dimension {got}; expected 1..={max}")]
    UnsupportedDimension { got: usize, max: usize },

    #[error("rotation matrix is not antisymmetric at ({row}, {col})")]
    NotAntisymmetric { row: usize, col: usize },

    #[error("contraction parameter must be finite and > 0, got {0}")]
    InvalidContraction(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("phase functions live on different grids")]
    GridMismatch,

    #[error("coherent label outside the grid margin: {0}")]
    LabelOutsideMargin(String),

    #[error("support spills past the grid boundary: {0}")]
    SupportSpill(String),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("wrong role: expected {expected}, got {got}")]
    WrongRole { expected: &'static str, got: &'static str },

    #[error("stability guard: {0}")]
    StabilityGuard(String),

    #[error("resolution guard: {0}")]
    Resolution(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("accuracy failure: {0}")]
    Accuracy(String),
}

impl Error {
    /// True for errors raised after a computation ran and failed its
    /// accuracy monitor, as opposed to rejected input.
    pub fn is_accuracy(&self) -> bool {
        matches!(self, Error::Accuracy(_))
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::UnsupportedDimension { .. } => "unsupported_dimension",
            Error::NotAntisymmetric { .. } => "not_antisymmetric",
            Error::InvalidContraction(_) => "invalid_contraction",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::GridMismatch => "grid_mismatch",
            Error::LabelOutsideMargin(_) => "label_outside_margin",
            Error::SupportSpill(_) => "support_spill",
            Error::NotNormalized(_) => "not_normalized",
            Error::WrongRole { .. } => "wrong_role",
            Error::StabilityGuard(_) => "stability_guard",
            Error::Resolution(_) => "resolution_guard",
            Error::InvalidInput(_) => "invalid_input",
            Error::Accuracy(_) => "accuracy_failure",
        }
    }
}
