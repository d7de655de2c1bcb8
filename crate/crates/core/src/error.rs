use thiserror::Error;

/// Errors raised by set construction, reachability and the solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operands use different factor forms")]
    FormMismatch,
    #[error("matrix is structurally singular: {0}")]
    StructurallySingular(String),
    #[error("inconsistent linear system: a row reduces to 0 = {residual:e}")]
    InconsistentSystem { residual: f64 },
    #[error("invalid interval: lower bound {lo} exceeds upper bound {hi}")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("membership enumeration over {0} binary factors exceeds the limit of 20")]
    TooManyBinaries(usize),
    #[error("a union needs at least one set")]
    EmptyUnion,
    #[error("set {0} is not a zonotope")]
    NotAZonotope(usize),
    #[error("zonotope union needs unconstrained graphs, mode {0} has constraints or binary factors")]
    ZonotopeUnionInapplicable(usize),
    #[error("planning horizon must be at least one step")]
    HorizonZero,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::DimensionMismatch(msg.into()))
}
