//! Error type shared by all torusflow modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero chord: the two frequencies coincide")]
    ZeroChord,

    #[error("magnitude bound exceeded: |coordinate| must be <= 2^20, got {0}")]
    MagnitudeBound(i64),

    #[error("dimension must be between 1 and 8, got {0}")]
    BadDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("affine rank of an empty point list is undefined")]
    EmptyPointList,

    #[error("duplicate frequency {0:?}")]
    DuplicateFrequency(Vec<i64>),

    #[error("non-finite amplitude for frequency {0:?}")]
    NonFiniteAmplitude(Vec<i64>),

    #[error("grid aliasing: need at least {required} samples per axis, got {got}")]
    Aliasing { required: usize, got: usize },

    #[error("operation requires a nonzero state")]
    ZeroState,

    #[error("mixture must contain at least one term")]
    EmptyMixture,

    #[error("mixture weights must be positive, got {0}")]
    NonPositiveWeight(f64),

    #[error("kernel support too large for dense eigensolve: {size} > {max}")]
    SupportTooLarge { size: usize, max: usize },

    #[error("kernel is not positive semidefinite: min eigenvalue {min_eig} < {tolerance}")]
    NotPositiveSemidefinite { min_eig: f64, tolerance: f64 },

    #[error("kernel is not Hermitian at k={k:?}, j={j:?}")]
    NotHermitian { k: Vec<i64>, j: Vec<i64> },

    #[error("not an eigenfunction: found |k|^2 values {first} and {second}")]
    NotEigenfunction { first: i64, second: i64 },

    #[error("density matrix is not in the translation-invariance class of the submodule")]
    NotInSubmoduleClass,

    #[error("submodule must have rank >= 1")]
    RankZeroSubmodule,

    #[error("exponent must satisfy p >= 1, got {0}")]
    InvalidExponent(f64),

    #[error("parameter range violated: need 0 <= r <= delta-1 <= d-1, got r={r}, delta={delta}, d={d}")]
    ParameterRange { r: usize, delta: usize, d: usize },

    #[error("tuple budget exceeded: enumeration needs {needed} tuples, budget is {budget}")]
    TupleBudget { needed: u64, budget: u64 },

    #[error("only d=1 states are supported here, got d={0}")]
    NotOneDimensional(usize),

    #[error("no lattice point has |k|^2 = {lambda} in dimension {d}; nearest representable: {nearest}")]
    EmptySphere { d: usize, lambda: i64, nearest: String },

    #[error("direction must be a primitive nonzero integer vector")]
    NotPrimitiveDirection,

    #[error("resonance parameter must satisfy 1 <= r <= d, got r={r}, d={d}")]
    ResonanceRange { r: usize, d: usize },

    #[error("sequence must contain at least {required} indices, got {got}")]
    SequenceTooShort { required: usize, got: usize },

    #[error("window bounds must be >= 1")]
    BadWindow,

    #[error("h rule produced a non-positive value {0}")]
    BadOscillationScale(f64),

    #[error("explicit h rule has {got} values but the sequence has {required} indices")]
    HRuleLength { required: usize, got: usize },

    #[error("invalid json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("invalid csv at line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
