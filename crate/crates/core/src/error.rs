use crate::circuit::Variant;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("qubit count {0} outside supported range 2..=5")]
    QubitCount(usize),
    #[error("qubit index {index} out of range for a {qubits}-qubit register")]
    QubitOutOfRange { index: usize, qubits: usize },
    #[error("gate targets must be distinct, got qubit {0} twice")]
    DuplicateTarget(usize),
    #[error("entangling parameter {0} outside [0, pi/4]")]
    ChiOutOfRange(f64),
    #[error("probability p = {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("delta must be finite and non-negative, got {0}")]
    InvalidDelta(f64),
    #[error("expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("state is not normalized: squared norm {0}")]
    NotNormalized(f64),
    #[error("distribution does not sum to one: total {0}")]
    DistributionNotNormalized(f64),
    #[error("invalid value {value} at index {index}")]
    InvalidEntry { index: usize, value: f64 },
    #[error("payoff entries must be finite")]
    NonFinitePayoff,
    #[error("noise parameter `{name}` = {value} is invalid")]
    InvalidNoise { name: &'static str, value: f64 },
    #[error("{variant:?}-circuit branch {branch:03b} has zero population")]
    EmptyBranch { variant: Variant, branch: u8 },
    #[error("confusion matrix column {column} sums to {sum}, expected 1")]
    NotStochastic { column: usize, sum: f64 },
    #[error("confusion matrix is singular or ill-conditioned (condition estimate {0})")]
    Singular(f64),
    #[error("corrected population of outcome {outcome} is {value}, beyond the clipping tolerance")]
    NegativePopulation { outcome: usize, value: f64 },
    #[error("shot count must be positive")]
    NoShots,
    #[error("no equilibrium reports given")]
    EmptyReports,
    #[error("reports must be ordered by strictly ascending p")]
    UnorderedReports,
    #[error("reference tensor has no Nash equilibrium")]
    NoReferenceEquilibrium,
}
