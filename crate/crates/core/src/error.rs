use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("group must have at least one cyclic factor")]
    EmptyGroup,
    #[error("cyclic factor order {0} must be at least 2")]
    FactorTooSmall(u64),
    #[error("group order overflows u64")]
    OrderOverflow,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cannot parse {what} at token {token:?}")]
    Parse { what: &'static str, token: String },
    #[error("equation needs at least 2 variables, got {0}")]
    ArityTooSmall(usize),
    #[error("system has {rows} rows but only {cols} variables")]
    TooManyRows { rows: usize, cols: usize },
    #[error("no coefficient is coprime to the group order {order}")]
    NoCoprimeCoefficient { order: u64 },
    #[error("coefficient {coeff} is not coprime to the group order {order}")]
    NonCoprimeCoefficient { coeff: i64, order: u64 },
    #[error("fewer than three coefficients are coprime to the group order")]
    TooFewCoprime,
    #[error("brute-force search space {size} exceeds limit {limit}")]
    SearchTooLarge { size: u128, limit: u128 },
    #[error("residual imaginary part {0:e} above tolerance")]
    ResidualImaginary(f64),
    #[error("value {value} at rank {rank} lies outside [0, 1]")]
    RangeViolation { rank: usize, value: f64 },
    #[error("group has exponent 2; use the exponent-2 witness")]
    ExponentTwo,
    #[error("a canceling partition exists, so no negative witness is possible")]
    CancelingPartition,
    #[error("witness plan invariant violated: {0}")]
    PlanInvariant(String),
    #[error("phase search failed: best psi {best} above threshold -{threshold}")]
    PhaseSearchFailed { best: f64, threshold: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("rounding failed: {0}")]
    RoundingFailed(String),
    #[error("internal check failed: {0}")]
    Assertion(String),
    #[error("equation is not a negative case: {0}")]
    PositiveCase(&'static str),
}
