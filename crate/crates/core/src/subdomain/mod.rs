//! Global-in-time subdomain solves driven by interface data.

pub mod linearized;
pub mod nonlinear;
pub mod problem;

pub use linearized::{
    solve_linearized_darcy_trajectory, solve_linearized_stokes_trajectory,
    solve_stokes_normal_dirichlet_trajectory, LinearizedKind, LinearizedOperator,
    NormalDirichletStokes,
};
pub use nonlinear::{solve_darcy_trajectory, solve_stokes_trajectory};
pub use problem::{CoupledProblem, Geometry, InitialPressure, InitialVelocity, InnerConfig, ProblemData};

use crate::time_grid::TimeGrid;

/// Coefficient vectors (velocity and pressure stacked as in the dof map) at
/// the end of every step of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SubdomainTrajectory {
    pub grid: TimeGrid,
    pub initial: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Newton iterations used per step.
    pub inner_iterations: Vec<usize>,
}

impl SubdomainTrajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().unwrap_or(&self.initial)
    }

    /// State at breakpoint `k` (`0` is the initial state).
    pub fn state_at(&self, k: usize) -> &[f64] {
        if k == 0 {
            &self.initial
        } else {
            &self.states[k - 1]
        }
    }
}
