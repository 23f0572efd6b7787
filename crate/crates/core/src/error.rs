use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ambient dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("genericity failure{}: {reason}", step.map(|s| format!(" at step {s}")).unwrap_or_default())]
    GenericityFailure { step: Option<usize>, reason: String },

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("invalid snarl: {0}")]
    InvalidSnarl(String),

    #[error("inconsistent witness: {0}")]
    InconsistentWitness(String),

    #[error("entry `{label}` has codimension {codim}; expected a one-dimensional snarl")]
    NonOneDimensional { label: String, codim: usize },

    #[error("cannot partition {0} remaining label(s) into two nonempty sets")]
    CannotPartition(usize),

    #[error("entry `{0}` has codimension 1 and cannot be split")]
    NotSplittable(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("linear map `{0}` is not surjective")]
    NotSurjective(String),

    #[error("inconsistent kernel: {0}")]
    InconsistentKernel(String),

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("malformed splitting data: {0}")]
    MalformedSplitting(String),

    #[error(
        "quadrature did not converge with {nodes} nodes per axis (last two estimates {previous} and {last})"
    )]
    NodeCapExceeded {
        nodes: usize,
        previous: Complex64,
        last: Complex64,
    },

    #[error("decay fit needs at least 3 tail rows with nonzero values, found {0}")]
    InsufficientTail(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
