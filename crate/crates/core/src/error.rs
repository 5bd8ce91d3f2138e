use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("gamma ratio crosses a pole: Gamma({g})/Gamma({g} - {k})")]
    GammaPole { g: String, k: u32 },

    #[error("term {term} has no elementary antiderivative")]
    NonElementaryIntegral { term: String },

    #[error("term {term} is not integrable at the left endpoint")]
    IntegrabilityViolation { term: String },

    #[error("limit at the endpoint diverges because of term {term}")]
    DivergentLimit { term: String },

    #[error("expansion integrates to zero")]
    ZeroIntegral,

    #[error("operation not available for this expansion family: {0}")]
    IncompatibleKind(String),

    #[error("parameter regime not supported: {0}")]
    RegimeUnsupported(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("in cell (N={big_n}, n={n}): {source}")]
    InCell {
        big_n: u32,
        n: u32,
        #[source]
        source: Box<Error>,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// Strip cell coordinates.
    pub fn root(&self) -> &Error {
        match self {
            Error::InCell { source, .. } => source.root(),
            e => e,
        }
    }

    pub fn is_regime_unsupported(&self) -> bool {
        matches!(self.root(), Error::RegimeUnsupported(_))
    }

    pub fn is_numerical(&self) -> bool {
        matches!(self.root(), Error::Numerical(_))
    }
}
