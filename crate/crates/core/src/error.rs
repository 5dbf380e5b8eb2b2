use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("cell counts must be at least 1 (got nx = {nx}, ny = {ny})")]
    InvalidCellCount { nx: usize, ny: usize },
    #[error("degenerate rectangle [{x0}, {x1}] x [{y0}, {y1}]")]
    DegenerateRectangle { x0: f64, x1: f64, y0: f64, y1: f64 },
    #[error("interface vertex count mismatch: fluid mesh has {fluid}, porous mesh has {porous}")]
    InterfaceCountMismatch { fluid: usize, porous: usize },
    #[error("interface vertex {index} does not match: fluid {fluid:?} vs porous {porous:?}")]
    InterfaceCoordinateMismatch {
        index: usize,
        fluid: [f64; 2],
        porous: [f64; 2],
    },
    #[error("expected one fluid and one porous mesh")]
    SubdomainMismatch,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParameterError {
    #[error("invalid viscosity parameters: {0}")]
    Viscosity(String),
    #[error("invalid physical parameter: {0}")]
    Physical(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("dimension mismatch: matrix is {rows}x{cols}, right-hand side has length {rhs}")]
    DimensionMismatch { rows: usize, cols: usize, rhs: usize },
    #[error("matrix is singular (structural rank deficiency at pivot {pivot})")]
    StructurallySingular { pivot: usize },
    #[error("matrix is numerically singular (amplification factor {amplification:.3e})")]
    NumericallySingular { amplification: f64 },
    #[error("system contains non-finite entries")]
    NonFinite,
    #[error("residual check failed: |Ax - b| = {residual:.3e} exceeds bound {bound:.3e}")]
    Residual { residual: f64, bound: f64 },
    #[error("factorization failed: {0}")]
    Factorization(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TimeGridError {
    #[error("final time must be positive (got {0})")]
    NonPositiveHorizon(f64),
    #[error("a time grid needs at least one interval")]
    NoIntervals,
    #[error("breakpoints must start at 0 and increase strictly (violation at index {0})")]
    NotIncreasing(usize),
    #[error("time grids span different horizons: {0} vs {1}")]
    HorizonMismatch(f64, f64),
    #[error("field has {slabs} slabs but its grid has {intervals} intervals")]
    SlabCount { slabs: usize, intervals: usize },
    #[error("slab {slab} has length {len}, expected {expected}")]
    SlabLength {
        slab: usize,
        len: usize,
        expected: usize,
    },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SubdomainError {
    #[error("linear solve failed at step {step}: {source}")]
    Linear {
        step: usize,
        #[source]
        source: SolveError,
    },
    #[error("inner Newton did not converge at step {step} after {iterations} iterations (residual {residual:.3e})")]
    NewtonNotConverged {
        step: usize,
        iterations: usize,
        residual: f64,
    },
    #[error(transparent)]
    TimeGrid(#[from] TimeGridError),
    #[error("base trajectory has {found} steps, expected {expected}")]
    BaseMismatch { found: usize, expected: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InterfaceError {
    #[error("Stokes subproblem: {0}")]
    Stokes(#[source] SubdomainError),
    #[error("Darcy subproblem: {0}")]
    Darcy(#[source] SubdomainError),
    #[error(transparent)]
    TimeGrid(#[from] TimeGridError),
    #[error("preconditioner: {0}")]
    Preconditioner(#[source] SubdomainError),
    #[error("invalid solver configuration: {0}")]
    Config(String),
}

/// Crate-wide error for callers that do not care which layer failed.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Parameter(#[from] ParameterError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    TimeGrid(#[from] TimeGridError),
    #[error(transparent)]
    Subdomain(#[from] SubdomainError),
    #[error(transparent)]
    Interface(#[from] InterfaceError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
