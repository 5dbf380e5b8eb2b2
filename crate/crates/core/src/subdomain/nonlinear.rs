//! Backward-Euler marching of the nonlinear subdomain problems, with a
//! damped Newton solve in every step.

use log::debug;

use crate::error::SubdomainError;
use crate::fe::darcy::{assemble_darcy_system, darcy_residual};
use crate::fe::space::TaylorHoodSpace;
use crate::fe::sparse::{solve_sparse, SparseSystem};
use crate::fe::stokes::{assemble_stokes_system, stokes_residual, StepData};
use crate::fe::{DarcyData, StokesData};
use crate::subdomain::problem::InnerConfig;
use crate::subdomain::SubdomainTrajectory;
use crate::time_grid::PiecewiseConstantField;

/// The physics of one subdomain, as seen by the time marching.
#[derive(Debug, Clone, Copy)]
pub enum Physics<'a> {
    Stokes(&'a StokesData),
    Darcy(&'a DarcyData),
}

impl Physics<'_> {
    pub fn is_linear(&self) -> bool {
        match self {
            Physics::Stokes(d) => d.params.viscosity.r == 2.0,
            Physics::Darcy(d) => d.params.viscosity.r == 2.0,
        }
    }

    fn system(&self, space: &TaylorHoodSpace, x: &[f64], step: &StepData) -> SparseSystem {
        match self {
            Physics::Stokes(d) => assemble_stokes_system(space, d, x, true, step),
            Physics::Darcy(d) => assemble_darcy_system(space, d, x, true, step),
        }
    }

    fn residual(&self, space: &TaylorHoodSpace, x: &[f64], step: &StepData) -> Vec<f64> {
        match self {
            Physics::Stokes(d) => stokes_residual(space, d, x, step),
            Physics::Darcy(d) => darcy_residual(space, d, x, step),
        }
    }

    fn walls(&self) -> &crate::fe::Walls {
        match self {
            Physics::Stokes(d) => &d.walls,
            Physics::Darcy(d) => &d.walls,
        }
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Residual norm over free rows.
fn free_norm(r: &[f64], free: &[bool]) -> f64 {
    r.iter()
        .zip(free)
        .filter(|(_, f)| **f)
        .map(|(v, _)| v * v)
        .sum::<f64>()
        .sqrt()
}

/// Marches one subdomain over the grid of `lambda`, starting from `initial`.
pub fn solve_trajectory(
    space: &TaylorHoodSpace,
    physics: Physics,
    initial: Vec<f64>,
    lambda: &PiecewiseConstantField,
    inner: &InnerConfig,
) -> Result<SubdomainTrajectory, SubdomainError> {
    let grid = &lambda.grid;
    let mut states: Vec<Vec<f64>> = Vec::with_capacity(grid.n_intervals());
    let mut inner_iterations = Vec::with_capacity(grid.n_intervals());
    for m in 0..grid.n_intervals() {
        let previous = states.last().unwrap_or(&initial);
        let step = StepData {
            dt: grid.len(m),
            time: grid.interval(m).1,
            previous,
            lambda: &lambda.slabs[m],
        };
        let (x, its) = solve_step(space, physics, &step, inner, m)?;
        inner_iterations.push(its);
        states.push(x);
    }
    Ok(SubdomainTrajectory {
        grid: grid.clone(),
        initial,
        states,
        inner_iterations,
    })
}

fn solve_step(
    space: &TaylorHoodSpace,
    physics: Physics,
    step: &StepData,
    inner: &InnerConfig,
    index: usize,
) -> Result<(Vec<f64>, usize), SubdomainError> {
    let linear_err = |source| SubdomainError::Linear { step: index, source };
    let mut x = step.previous.to_vec();
    for (dof, g) in crate::fe::assembly::essential_values(space, physics.walls(), step.time) {
        x[dof] = g;
    }
    if physics.is_linear() {
        let sys = physics.system(space, &x, step);
        return Ok((solve_sparse(&sys).map_err(linear_err)?, 1));
    }
    let free = &space.is_free;
    let mut r_norm = free_norm(&physics.residual(space, &x, step), free);
    for k in 1..=inner.maxit {
        let sys = physics.system(space, &x, step);
        let target = solve_sparse(&sys).map_err(linear_err)?;
        let delta: Vec<f64> = target.iter().zip(&x).map(|(t, v)| t - v).collect();
        let mut alpha = 1.0;
        let mut trial;
        let mut trial_norm;
        let mut halvings = 0;
        loop {
            trial = x.iter().zip(&delta).map(|(v, d)| v + alpha * d).collect::<Vec<_>>();
            trial_norm = free_norm(&physics.residual(space, &trial, step), free);
            if trial_norm < r_norm || halvings == inner.max_halvings || !trial_norm.is_finite() {
                break;
            }
            alpha *= 0.5;
            halvings += 1;
        }
        if !trial_norm.is_finite() {
            return Err(SubdomainError::NewtonNotConverged {
                step: index,
                iterations: k,
                residual: trial_norm,
            });
        }
        let increment = alpha * norm(&delta) / norm(&trial).max(f64::MIN_POSITIVE);
        debug!("step {index} newton {k}: residual {trial_norm:.3e}, increment {increment:.3e}, damping {alpha}");
        x = trial;
        r_norm = trial_norm;
        if increment < inner.tol || r_norm <= inner.residual_tol {
            return Ok((x, k));
        }
    }
    Err(SubdomainError::NewtonNotConverged {
        step: index,
        iterations: inner.maxit,
        residual: r_norm,
    })
}

pub fn solve_stokes_trajectory(
    space: &TaylorHoodSpace,
    data: &StokesData,
    initial: Vec<f64>,
    lambda: &PiecewiseConstantField,
    inner: &InnerConfig,
) -> Result<SubdomainTrajectory, SubdomainError> {
    solve_trajectory(space, Physics::Stokes(data), initial, lambda, inner)
}

pub fn solve_darcy_trajectory(
    space: &TaylorHoodSpace,
    data: &DarcyData,
    initial: Vec<f64>,
    lambda_p: &PiecewiseConstantField,
    inner: &InnerConfig,
) -> Result<SubdomainTrajectory, SubdomainError> {
    solve_trajectory(space, Physics::Darcy(data), initial, lambda_p, inner)
}
