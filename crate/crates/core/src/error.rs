use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The upper tail beyond `x` carries less mass than the truncation cutoff.
    #[error("tail truncation at x = {x}: survival {survival:e} is below the cutoff")]
    TailTruncation { x: f64, survival: f64 },

    /// A schedule formula has a denominator at or below zero.
    #[error("out of regime at x = {x}: formula denominator {denominator:e} is not positive")]
    DegenerateDenominator { x: f64, denominator: f64 },

    #[error("{what} did not converge (last error estimate {estimate:e})")]
    NoConvergence { what: &'static str, estimate: f64 },

    /// Wraps an error raised while evaluating a schedule at a grid point.
    #[error("at grid point x = {x}: {source}")]
    AtGridPoint { x: f64, source: Box<Error> },

    #[error("no interior wealth solution: delta ({delta}) must exceed r ({r})")]
    NoInteriorWealth { delta: f64, r: f64 },

    /// A brute-force argmax landed on a grid edge that is not a natural bound.
    #[error("argmax on the {axis} grid boundary at {value}; widen the grid")]
    GridBoundary { axis: &'static str, value: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown work kind `{0}`")]
    UnknownWorkKind(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn at_grid_point(x: f64, source: Error) -> Self {
        match source {
            e @ Error::AtGridPoint { .. } => e,
            other => Error::AtGridPoint { x, source: Box::new(other) },
        }
    }

    /// True for failures of a numerical method rather than of the input data.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::TailTruncation { .. }
            | Error::DegenerateDenominator { .. }
            | Error::NoConvergence { .. }
            | Error::NoInteriorWealth { .. }
            | Error::GridBoundary { .. } => true,
            Error::AtGridPoint { source, .. } => source.is_numerical(),
            Error::Domain(_) | Error::Config(_) | Error::UnknownWorkKind(_) => false,
        }
    }
}
