//! Taylor-Hood finite elements: quadrature, shape functions, degree-of-freedom
//! maps, assembly of the subdomain step systems and sparse direct solves.

pub mod assembly;
pub mod basis;
pub mod darcy;
pub mod fields;
pub mod interface;
pub mod quadrature;
pub mod space;
pub mod sparse;
pub mod stokes;

pub use darcy::{assemble_darcy_system, DarcyData, DarcyParams};
pub use fields::{BoundaryCondition, ScalarField, VectorField, WallKind, Walls};
pub use interface::{interface_mass_matrix, interface_trace_residual};
pub use space::TaylorHoodSpace;
pub use sparse::{solve_sparse, CsrMatrix, SparseLu, SparseSystem};
pub use stokes::{assemble_stokes_system, StepData, StokesData, StokesParams};
