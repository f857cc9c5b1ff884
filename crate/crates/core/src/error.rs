use thiserror::Error;

/// Errors raised by the construction and analysis routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoxError {
    #[error("order {order} does not divide the conductor {conductor}")]
    NonDivisorOrder { order: u64, conductor: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("field elements belong to different contexts (conductors {0} and {1})")]
    ContextMismatch(u64, u64),
    #[error("galois index {index} is not coprime to the conductor {conductor}")]
    NotCoprime { index: i64, conductor: u64 },

    #[error("coxeter matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("diagonal entry m[{0}][{0}] must be 1")]
    BadDiagonal(usize),
    #[error("label m[{0}][{1}] is infinite; only 2-spherical systems are supported")]
    InfiniteLabel(usize, usize),
    #[error("label m[{0}][{1}] = {2} is not an integer >= 2")]
    InvalidLabel(usize, usize, i64),
    #[error("coxeter diagram is disconnected")]
    Disconnected,
    #[error("edge ({0}, {1}) is not a chord of the spanning tree")]
    NotAChord(usize, usize),
    #[error("spanning trees or representations refer to different diagrams")]
    DifferentDiagram,
    #[error("edge set does not form a spanning tree: {0}")]
    NotASpanningTree(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),

    #[error("parameter system is incomplete: {0}")]
    IncompleteParameters(String),
    #[error("chord parameter on ({0}, {1}) is zero")]
    ZeroChordParameter(usize, usize),

    #[error("order classification disagrees with matrix powers: {0}")]
    OrderMismatch(String),
    #[error("unipotency criteria disagree: {0}")]
    EquivalenceViolation(String),
    #[error("the two reflections are identical")]
    IdenticalReflections,
    #[error("no invariant sesquilinear form: {0}")]
    NoInvariantForm(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, CoxError>;
