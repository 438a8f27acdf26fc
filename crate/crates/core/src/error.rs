use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands live in different coordinate rings")]
    RingMismatch,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("invalid ring declaration: {0}")]
    InvalidRing(String),
    #[error("negative exponent on non-invertible variable `{0}`")]
    NegativeExponent(String),
    #[error("not a unit: leading term `{0}` is not a nonzero constant times a monomial in invertible variables")]
    NotAUnit(String),
    #[error("malformed deformation: the hbar^0 coefficient of the bivector is nonzero")]
    MalformedDeformation,
    #[error("expected a {expected}, got degree {found}")]
    WrongDegree {
        expected: &'static str,
        found: usize,
    },
    #[error("Poisson structure has not been certified by a Jacobi check")]
    Uncertified,
    #[error("[pi, pi] does not vanish at hbar^{order}")]
    JacobiViolation { order: usize },
    #[error("not a volume form: {0}")]
    NotAVolume(String),
    #[error("unsupported structure: {0}")]
    UnsupportedStructure(String),
    #[error("unsupported truncation order {order} (maximum {max})")]
    UnsupportedOrder { order: usize, max: usize },
    #[error("wrong star provider: {0}")]
    WrongProvider(String),
    #[error("operands use different star providers or automorphisms")]
    ProviderMismatch,
    #[error("vector field is not Poisson: [pi, w] is nonzero at hbar^{order}")]
    NotPoisson { order: usize },
    #[error("derivation has a nonzero hbar^0 part; its exponential is not defined")]
    NonzeroConstantTerm,
    #[error("star product failed its associativity certification at hbar^{order}")]
    CertificationFailed { order: usize },
    #[error("obstruction: {0}")]
    Obstruction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
