use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The four coefficients do not define an orientation-preserving map
    /// (determinant not finite and positive).
    #[error("coefficients do not define an element of PSL(2,R): det = {det}")]
    NotProjective { det: f64 },

    /// Strict classification was requested but the trace sits on the
    /// parabolic/hyperbolic boundary within tolerance.
    #[error("ambiguous class: |tr| = {trace_abs} within tolerance of 2")]
    AmbiguousClass { trace_abs: f64 },

    /// An arc's angular length underflowed.
    #[error("degenerate arc: angular length {len} below tolerance")]
    DegenerateArc { len: f64 },

    /// The arcs of a union would cover the whole circle.
    #[error("arc union covers the whole boundary circle")]
    CoversCircle,

    /// A point-set operation received no points.
    #[error("empty input")]
    EmptyInput,

    /// A search exceeded its configured node budget.
    #[error("budget exceeded: {nodes} nodes requested, budget {budget}")]
    BudgetExceeded { nodes: u64, budget: u64 },

    /// A stated precondition does not hold.
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    /// The antiparallel test is undefined for maps with a common fixed point.
    #[error("maps share a fixed point; antiparallel test undefined")]
    CommonFixedPoint,

    /// A map was not of the class an operation requires.
    #[error("invalid map class: {0}")]
    InvalidClass(String),

    /// Tuple-file parse error.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Unknown reproduction scenario name.
    #[error("unknown scenario: {0}")]
    UnknownScenario(String),
}

pub type Result<V> = std::result::Result<V, Error>;
