use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("site ({p}, {q}) is outside a {rows}x{cols} lattice")]
    SiteOutOfRange {
        p: usize,
        q: usize,
        rows: usize,
        cols: usize,
    },

    #[error("matrix is not Hermitian (max |H - H^dagger| = {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("eigensolver did not converge for eigenvalue {index} after {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },

    #[error("eigensolver failed at alpha = {alpha}: {source}")]
    AtAlpha {
        alpha: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("missing link amplitude between sites {from} and {to}")]
    MissingLink { from: usize, to: usize },

    #[error("no level crossing found for L = {size} in [{alpha_min}, {alpha_max}]")]
    NoCrossing {
        size: usize,
        alpha_min: f64,
        alpha_max: f64,
    },

    #[error("photon block is singular at the reference energy (detuning too small)")]
    Resonance,

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn at_alpha(self, alpha: f64) -> Self {
        match self {
            e @ Error::AtAlpha { .. } => e,
            e => Error::AtAlpha {
                alpha,
                source: Box::new(e),
            },
        }
    }

    /// Strips any `AtAlpha` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtAlpha { source, .. } => source.root(),
            e => e,
        }
    }
}
