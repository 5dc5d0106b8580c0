use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("characteristic {0} is even; only odd characteristic is supported")]
    EvenCharacteristic(u32),
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("extension degree must be at least 1, got {0}")]
    InvalidDegree(u32),
    #[error("field of order {p}^{k} is too large")]
    FieldTooLarge { p: u32, k: u32 },
    #[error("bad modulus: {0}")]
    BadModulus(String),
    #[error("element index {index} is outside F_{q}")]
    ElementOutOfRange { index: u64, q: u32 },
    #[error("bad element: {0}")]
    BadElement(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("character table for q = {q} exceeds the budget of {budget} entries")]
    TableBudget { q: u32, budget: usize },

    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coefficient index ({i}, {j}) out of range for {n} variables")]
    IndexOutOfRange { i: usize, j: usize, n: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("quadratic form is degenerate (zero discriminant)")]
    Degenerate,
    #[error("parse error: {0}")]
    Parse(String),

    #[error("the zero vector is not a projective point")]
    ZeroVector,
    #[error("operation needs {expected} homogeneous coordinates, got {got}")]
    WrongDimension { expected: String, got: usize },
    #[error("internal/external classification is undefined for n = {0} variables (n must be odd)")]
    EvenDimension(usize),
    #[error("found {0} tangent lines through a point; a smooth conic admits at most 2")]
    TangentCount(usize),

    #[error("the two quadrics are proportional (g = c*f), so they define the same quadric")]
    ProportionalForms,
    #[error("no smooth form found after {0} attempts")]
    SamplingExhausted(usize),
    #[error("bound hypothesis violated: {0}")]
    BoundHypothesis(String),
}
