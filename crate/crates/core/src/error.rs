use thiserror::Error;

/// Errors produced by mesh construction, groupoid algebra, and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh dimensions too small: need at least 2x2 vertices, got {nx}x{ny}")]
    DimensionTooSmall { nx: usize, ny: usize },

    #[error("unknown vertex id {0}")]
    UnknownVertex(usize),

    #[error("unknown face id {0}")]
    UnknownFace(usize),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("elements not composable: anchor mismatch {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotComposable { defect: f64, tol: f64 },

    #[error("jet adjacency failure between components {slot} and {next_slot}")]
    JetNotComposable { slot: usize, next_slot: usize },

    #[error("cycle defect {defect:.3e} exceeds tolerance {tol:.3e}: component product is not a unit")]
    CycleDefect { defect: f64, tol: f64 },

    #[error("base point mismatch: distance {0:.3e}")]
    BaseMismatch(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is singular (|det| below {0:.1e})")]
    SingularMatrix(f64),

    #[error("element outside the injectivity radius of exp (measure {value:.4}, radius {radius:.4})")]
    OutsideInjectivityRadius { value: f64, radius: f64 },

    #[error("field has no value on edge ({src}, {dst})")]
    MissingEdgeValue { src: usize, dst: usize },

    #[error("field has no value at vertex {0}")]
    MissingVertexValue(usize),

    #[error("vertex {0} is not interior: residual is only assembled at interior vertices")]
    BoundaryVertex(usize),

    #[error("index {index} out of range 1..={k}")]
    IndexOutOfRange { index: usize, k: usize },

    #[error("operation requires realization {expected}, got {got}")]
    WrongRealization { expected: &'static str, got: String },

    #[error("wrong mesh type: {0}")]
    WrongMeshType(String),

    #[error("path is not composable at step {0}")]
    PathNotComposable(usize),

    #[error("Newton did not converge: residual {residual:.3e} after {iterations} iterations")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("singular Jacobian in linear solve (pivot {pivot:.3e})")]
    SingularJacobian { pivot: f64 },

    #[error("degenerate Legendre transform: marching Jacobian is singular (pivot {pivot:.3e})")]
    DegenerateLegendre { pivot: f64 },

    #[error("Lagrangian is not invariant: worst probe defect {defect:.3e} exceeds {tol:.3e}")]
    NotInvariant { defect: f64, tol: f64 },

    #[error("field does not solve the field equations: residual {residual:.3e} exceeds {tol:.3e}")]
    NotASolution { residual: f64, tol: f64 },

    #[error("boundary data disagrees with the initial guess on edge ({src}, {dst}) by {defect:.3e}")]
    BoundaryMismatch { src: usize, dst: usize, defect: f64 },

    #[error("unrecognized configuration string: {0}")]
    UnknownSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
