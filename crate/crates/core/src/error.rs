use thiserror::Error;

/// Errors raised by field construction, exact arithmetic and the verification engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus is reducible over F_{0}")]
    ReducibleModulus(u64),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("field of size {q} exceeds the table bound {bound}")]
    FieldTooLarge { q: u128, bound: u64 },
    #[error("zero has no discrete logarithm")]
    ZeroElement,
    #[error("division by zero")]
    DivisionByZero,
    #[error("embedding {embedding} is not a unit modulo {level}")]
    NonUnitEmbedding { embedding: i64, level: u32 },
    #[error("q = {q} is not congruent to 1 modulo {modulus}")]
    CongruenceViolation { q: u64, modulus: u64 },
    #[error("operands live over different fields")]
    FieldMismatch,
    #[error("degenerate parameters: {0}")]
    DegenerateParams(String),
    #[error("argument is a singular point of the sheaf")]
    SingularPoint,
    #[error("normalizing Jacobi sum vanishes")]
    ZeroNormalizer,
    #[error("brute-force oracle too large: {0}")]
    OracleTooLarge(String),
    #[error("branch parameters are not distinct")]
    DiscriminantZero,
    #[error("Newton recursion predicts a different power sum at degree {degree}")]
    NewtonInconsistency { degree: usize },
    #[error("root of modulus {modulus} deviates from sqrt(q) = {expected}")]
    PurityViolation { modulus: f64, expected: f64 },
    #[error("hypothesis N does not divide the exponent fails at index {0}")]
    HypothesisViolation(String),
    #[error("local monodromy is not semisimple")]
    NonSemisimple,
    #[error("rational map is constant")]
    ConstantMap,
    #[error("singular point is an algebraic place; pullback needs rational points")]
    UnsupportedAlgebraicSingularity,
    #[error("determinant condition fails: exponent sum {0} is not an integer")]
    DeterminantViolation(String),
    #[error("input tuple has a common invariant subspace")]
    ReducibleInput,
    #[error("scalar 1 handled as the identity functor")]
    SpecialScalar,
    #[error("Fuchs relation fails: exponent sum {found}, expected {expected}")]
    FuchsViolation { found: String, expected: String },
    #[error("a side vanishes at the reference point")]
    ZeroAtReference,
    #[error("reference point is excluded: {0}")]
    ExcludedPoint(String),
    #[error("lower parameter c is a nonpositive integer")]
    PoleInC,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
