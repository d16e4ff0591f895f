use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NonPrimeP(u32),
    #[error("modulus {0:?} is reducible over the prime field")]
    ReduciblePolynomial(Vec<u32>),
    #[error("invalid modulus {poly:?}: {reason}")]
    InvalidModulus {
        poly: Vec<u32>,
        reason: &'static str,
    },
    #[error("field order {0} is not a prime power")]
    NotPrimePower(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("trace value does not lie in the base field")]
    NotInSubfield,
    #[error("no zero of the trace sequence found in [0, q]")]
    ZeroNotFound,
    #[error("mapping is not a bijection onto 0..{0}")]
    NotABijection(usize),
    #[error("phi maps two nonzero field elements to the same residue mod q-1")]
    PhiCollision,
    #[error("input sequence is not unimodular at index {0}")]
    NonUnimodularInput(usize),
    #[error("oversampling factor must be at least 4, got {0}")]
    InvalidOversampling(usize),
    #[error("{construction} requires q > {min}, got q = {q}")]
    ParameterTooSmall {
        construction: &'static str,
        min: u32,
        q: u32,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },
    #[error("sequence lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("matrix shapes differ: {0:?} vs {1:?}")]
    ShapeMismatch((usize, usize), (usize, usize)),
    #[error("region ({zx}, {zy}) outside 1..={n}")]
    RegionOutOfRange { zx: usize, zy: usize, n: usize },
    #[error("bound not applicable: {0}")]
    NotApplicable(&'static str),
    #[error("bound must be positive, got {0}")]
    NonPositiveBound(f64),
    #[error("malformed input: {0}")]
    Malformed(String),
}
