//! The interface operator `Psi(lambda) = S_f(lambda) + S_p(lambda)` on the
//! fluid time grid, and its Newton linearization.

use crate::error::InterfaceError;
use crate::subdomain::linearized::{LinearizedKind, LinearizedOperator};
use crate::subdomain::nonlinear::{solve_darcy_trajectory, solve_stokes_trajectory};
use crate::subdomain::{CoupledProblem, SubdomainTrajectory};
use crate::time_grid::{project, PiecewiseConstantField};

/// `Psi(lambda)` together with the subdomain trajectories it was built from.
#[derive(Debug, Clone)]
pub struct PsiEvaluation {
    pub lambda: PiecewiseConstantField,
    pub residual: PiecewiseConstantField,
    pub stokes: SubdomainTrajectory,
    pub darcy: SubdomainTrajectory,
}

/// Runs `a` and `b` concurrently or one after the other.
pub(crate) fn join<A, B, RA, RB>(parallel: bool, a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    if parallel {
        rayon::join(a, b)
    } else {
        (a(), b())
    }
}

/// Per-slab duals `|J_f^m| (G_f^T u_f^m + Pi_{f,p}(G_p^T u_p)_m)`.
pub fn interface_residual(
    problem: &CoupledProblem,
    stokes: &SubdomainTrajectory,
    darcy: &SubdomainTrajectory,
) -> Result<PiecewiseConstantField, InterfaceError> {
    let porous_traces = PiecewiseConstantField::new(
        darcy.grid.clone(),
        darcy.states.iter().map(|u| problem.porous.coupling_transpose(u)).collect(),
    )?;
    let projected = project(&porous_traces, &stokes.grid)?;
    let slabs = stokes
        .states
        .iter()
        .zip(&projected.slabs)
        .enumerate()
        .map(|(m, (u, p))| {
            let len = stokes.grid.len(m);
            problem
                .fluid
                .coupling_transpose(u)
                .iter()
                .zip(p)
                .map(|(a, b)| len * (a + b))
                .collect()
        })
        .collect();
    Ok(PiecewiseConstantField::new(stokes.grid.clone(), slabs)?)
}

pub fn evaluate_psi(
    problem: &CoupledProblem,
    lambda: &PiecewiseConstantField,
) -> Result<PsiEvaluation, InterfaceError> {
    if !lambda.grid.same_as(&problem.fluid_grid) || lambda.width() != problem.n_multipliers() {
        return Err(InterfaceError::Config(
            "lambda must live on the fluid grid and the multiplier space".into(),
        ));
    }
    let lambda_p = project(lambda, &problem.porous_grid)?;
    let (stokes, darcy) = join(
        problem.parallel,
        || {
            solve_stokes_trajectory(
                &problem.fluid,
                &problem.data.stokes,
                problem.fluid_initial_state(),
                lambda,
                &problem.inner,
            )
        },
        || {
            solve_darcy_trajectory(
                &problem.porous,
                &problem.data.darcy,
                problem.porous_initial_state(),
                &lambda_p,
                &problem.inner,
            )
        },
    );
    let stokes = stokes.map_err(InterfaceError::Stokes)?;
    let darcy = darcy.map_err(InterfaceError::Darcy)?;
    let residual = interface_residual(problem, &stokes, &darcy)?;
    Ok(PsiEvaluation {
        lambda: lambda.clone(),
        residual,
        stokes,
        darcy,
    })
}

/// Factorized linearized subdomain operators at a linearization point;
/// applies `Psi'(lambda)` matrix-free.
#[derive(Debug, Clone)]
pub struct Linearization {
    pub stokes: LinearizedOperator,
    pub darcy: LinearizedOperator,
}

impl Linearization {
    pub fn new(problem: &CoupledProblem, base: &PsiEvaluation) -> Result<Self, InterfaceError> {
        let (stokes, darcy) = join(
            problem.parallel,
            || {
                LinearizedOperator::new(
                    LinearizedKind::Stokes(problem.data.stokes.params),
                    problem.fluid.clone(),
                    &base.stokes,
                )
            },
            || {
                LinearizedOperator::new(
                    LinearizedKind::Darcy(problem.data.darcy.params),
                    problem.porous.clone(),
                    &base.darcy,
                )
            },
        );
        Ok(Self {
            stokes: stokes.map_err(InterfaceError::Stokes)?,
            darcy: darcy.map_err(InterfaceError::Darcy)?,
        })
    }

    /// Linearized trajectories driven by `h` (porous side by `Pi_{p,f} h`).
    pub fn trajectories(
        &self,
        problem: &CoupledProblem,
        h: &PiecewiseConstantField,
    ) -> Result<(SubdomainTrajectory, SubdomainTrajectory), InterfaceError> {
        let h_p = project(h, &problem.porous_grid)?;
        let (w_f, w_p) = join(problem.parallel, || self.stokes.solve(h), || self.darcy.solve(&h_p));
        Ok((w_f.map_err(InterfaceError::Stokes)?, w_p.map_err(InterfaceError::Darcy)?))
    }

    /// `Psi'(lambda) h`.
    pub fn apply(
        &self,
        problem: &CoupledProblem,
        h: &PiecewiseConstantField,
    ) -> Result<PiecewiseConstantField, InterfaceError> {
        let (w_f, w_p) = self.trajectories(problem, h)?;
        interface_residual(problem, &w_f, &w_p)
    }

    /// Fluid part `S_f^lin(h)` alone.
    pub fn apply_stokes(
        &self,
        h: &PiecewiseConstantField,
    ) -> Result<PiecewiseConstantField, InterfaceError> {
        let w = self.stokes.solve(h).map_err(InterfaceError::Stokes)?;
        let space = &self.stokes.space;
        let slabs = w
            .states
            .iter()
            .enumerate()
            .map(|(m, u)| {
                let len = w.grid.len(m);
                space.coupling_transpose(u).into_iter().map(|v| v * len).collect()
            })
            .collect();
        Ok(PiecewiseConstantField::new(w.grid, slabs)?)
    }
}

/// One-shot `Psi'(lambda) h` at the point of `base`.
pub fn apply_psi_prime(
    problem: &CoupledProblem,
    base: &PsiEvaluation,
    h: &PiecewiseConstantField,
) -> Result<PiecewiseConstantField, InterfaceError> {
    Linearization::new(problem, base)?.apply(problem, h)
}
