use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero in GF({0})")]
    DivisionByZero(u32),
    #[error("{0} is not a prime below 2^31")]
    InvalidPrime(u64),
    #[error("matrix dimensions do not match: {0}")]
    Shape(String),
    #[error("not a complex: {0}")]
    NotAComplex(String),
    #[error("not a chain map: {0}")]
    NotAChainMap(String),
    #[error("inhomogeneous element: {0}")]
    Inhomogeneous(String),
    #[error("objects live over different rings")]
    RingMismatch,
    #[error("monomials have {0} and {1} variables")]
    VariableMismatch(usize, usize),
    #[error("degree {0} exceeds the supported bound")]
    DegreeOverflow(i64),
    #[error("term {0} of the complex is not free")]
    NotFree(i32),
    #[error("element is not in the image of the map")]
    NotInImage,
    #[error("ring has no quotient ideal")]
    NoQuotient,
    #[error("empty cohomological range {0}..={1}")]
    EmptyRange(i32, i32),
    #[error("not an exceptional pair: {0}")]
    NotExceptional(String),
    #[error("not a spherical object: {0}")]
    NotSpherical(String),
    #[error("parse error at offset {offset}: {msg}")]
    Parse { offset: usize, msg: String },
    #[error("{0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
