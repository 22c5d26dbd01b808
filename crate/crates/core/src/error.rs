use thiserror::Error;

/// Errors surfaced by the numeric layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A series or Jackson sum hit its hard term cap before the tail
    /// criterion was met.
    #[error("series did not converge within {max_terms} terms")]
    NonConvergent { max_terms: usize },

    /// An argument left the domain on which the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter bundle violated its invariants.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A closed-form evaluation exceeded the representable floating range.
    #[error("overflow: {0}")]
    Overflow(String),

    /// The evaluation grid is too coarse for the requested modulus window.
    #[error("grid too coarse: spacing {spacing} exceeds {limit}")]
    GridTooCoarse { spacing: f64, limit: f64 },

    /// A Lipschitz specification failed verification on the grid.
    #[error("lipschitz spec unverified: {0}")]
    SpecUnverified(String),

    /// A derivative required by a bound was not supplied.
    #[error("missing derivative for function `{0}`")]
    MissingDerivative(String),

    /// A moment index outside the supported closed-form set.
    #[error("unsupported moment index ({0}, {1})")]
    UnsupportedMoment(u32, u32),
}

pub type Result<T> = std::result::Result<T, Error>;
