use thiserror::Error;

/// Errors raised by the library. Domain errors carry enough context to
/// locate the offending prime, index or file line.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero element has no associate generator")]
    ZeroElement,
    #[error("division by zero in coefficient field")]
    DivisionByZero,
    #[error("invalid base field: {0}")]
    InvalidField(String),
    #[error("invalid coefficient field: {0}")]
    InvalidCoeffField(String),
    #[error("coefficient fields do not match: {0}")]
    FieldMismatch(String),
    #[error("element is not integral: {0}")]
    NotIntegral(String),
    #[error("ideal {ideal} is not coprime to {modulus}")]
    NotCoprime { ideal: String, modulus: String },
    #[error("residue ring of norm {norm} exceeds the enumeration guard {limit}")]
    TooLarge { norm: u64, limit: u64 },
    #[error("character order {0} is not representable in a multiquadratic field")]
    UnsupportedOrder(u64),
    #[error("character is not totally odd")]
    NotTotallyOdd,
    #[error("truncation bound {requested} exceeds available bound {available}")]
    BoundTooLarge { requested: String, available: String },
    #[error("insufficient bound: {0}")]
    InsufficientBound(String),
    #[error("series metadata mismatch: {0}")]
    MetadataMismatch(String),
    #[error("constant term of divisor is zero")]
    NonInvertibleConstant,
    #[error("{0} is not a totally positive unit")]
    NotAUnit(String),
    #[error("weight {k1},{k2} has odd difference")]
    OddWeightDifference { k1: i64, k2: i64 },
    #[error("no coefficient available for ideal {0} inside the box")]
    OutOfBox(String),
    #[error("{0} is not a prime ideal")]
    NotPrime(String),
    #[error("prime {prime} squared divides the level {level}")]
    BadLevelRelation { prime: String, level: String },
    #[error("missing eigenvalue for prime {0}")]
    MissingEigenvalue(String),
    #[error("newform is not normalized: c((1)) = {0}")]
    NotNormalized(String),
    #[error("exact and numeric L(psi,0) disagree: exact {exact}, numeric {numeric}, gap {gap:e}")]
    NumericMismatch { exact: String, numeric: String, gap: f64 },
    #[error("truncated basis has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("validation failed ({invariant}): {msg}")]
    Validation { invariant: String, msg: String },
    #[error("i/o error on {path}: {msg}")]
    Io { path: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
