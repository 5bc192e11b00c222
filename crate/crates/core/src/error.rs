use thiserror::Error;

/// Errors raised by the model, solvers and negativity routes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("sector dimension {dim} exceeds configured bound {bound}")]
    Capacity { dim: usize, bound: usize },

    #[error("no convergence after {iterations} iterations (best residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("empty symmetry sector (r = {r}, p = {p})")]
    EmptySector { r: usize, p: usize },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("Bethe roots collide: |λ_{i} - λ_{j}| = {gap:e}")]
    RootCollision { i: usize, j: usize, gap: f64 },

    #[error("monotonicity violated at Δ = {delta}: {detail}")]
    Monotonicity { delta: f64, detail: String },

    #[error("infeasible request: {0}")]
    Infeasible(String),

    #[error("extrapolation uncertainty {estimate:e} exceeds {bound:e}")]
    Extrapolation { estimate: f64, bound: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
