//! The space-time interface problem in the multiplier `lambda`.

pub mod gmres;
pub mod newton;
pub mod preconditioner;
pub mod psi;

pub use gmres::{gmres, GmresOutcome};
pub use newton::{field_norm, newton_solve, slab_norm, NewtonOutcome, OuterConfig, OuterIteration};
pub use preconditioner::Preconditioner;
pub use psi::{apply_psi_prime, evaluate_psi, interface_residual, Linearization, PsiEvaluation};
