use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("subfield of degree {sub} does not exist in a field of degree {degree}")]
    InvalidSubfield { sub: usize, degree: usize },
    #[error("operands live in different field contexts")]
    ContextMismatch,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("element is not a p-th power")]
    NotAPthPower,
    #[error("total degree {degree} exceeds the configured bound {bound}")]
    DegreeOverflow { degree: u32, bound: u32 },
    #[error("linear system has no solution")]
    NoSolution,
    #[error("zero element where a nonzero one is required")]
    ZeroElement,
    #[error("elements are not p-independent")]
    NotPIndependent,
    #[error("forms or frames do not match")]
    FrameMismatch,
    #[error("exactness is not defined in degree 0")]
    DegreeZero,
    #[error("form of degree {degree} is not of top degree {top}")]
    NotTopDegree { degree: usize, top: usize },
    #[error("extension degree {d} is divisible by p = {p}")]
    NotPrimeToP { d: usize, p: u32 },
    #[error("symbol has a zero entry")]
    ZeroEntry,
    #[error("form is not in the kernel of the Artin-Schreier operator")]
    NotInNu,
    #[error("subspaces do not have codimension one")]
    BadCodimension,
    #[error("form is exact")]
    IsExact,
    #[error("unsupported extension: {0}")]
    UnsupportedExtension(String),
    #[error("a constant-field extension of degree {0} is required")]
    ExtensionRequired(usize),
    #[error("form is not divisible by the distinguished logarithmic symbol")]
    NotInWedgeIdeal,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("hypersurface is not of the form T^p - g: {0}")]
    NotPMonic(String),
    #[error("hypersurface is reducible (g is a p-th power)")]
    Reducible,
    #[error("hypersurface is geometrically reduced")]
    NotGeometricallyNonreduced,
    #[error("analysis has no function field")]
    MissingFunctionField,
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
