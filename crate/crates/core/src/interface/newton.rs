//! Outer Newton iteration on the interface equation `Psi(lambda) = 0`, each
//! correction computed by matrix-free GMRES.

use log::info;

use crate::error::InterfaceError;
use crate::interface::gmres::gmres;
use crate::interface::preconditioner::Preconditioner;
use crate::interface::psi::{evaluate_psi, Linearization, PsiEvaluation};
use crate::subdomain::CoupledProblem;
use crate::time_grid::PiecewiseConstantField;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterConfig {
    pub newton_maxit: usize,
    /// Stop once the correction norm is at most this value.
    pub newton_tol: f64,
    pub gmres_tol: f64,
    pub gmres_maxit: usize,
    pub precondition: bool,
}

impl Default for OuterConfig {
    fn default() -> Self {
        Self {
            newton_maxit: 20,
            newton_tol: 1e-7,
            gmres_tol: 1e-7,
            gmres_maxit: 100,
            precondition: false,
        }
    }
}

impl OuterConfig {
    pub fn validate(&self) -> Result<(), InterfaceError> {
        let ok = self.newton_maxit >= 1
            && self.gmres_maxit >= 1
            && self.newton_tol > 0.0
            && self.gmres_tol > 0.0;
        if ok {
            Ok(())
        } else {
            Err(InterfaceError::Config(format!(
                "tolerances must be positive and iteration caps at least 1: {self:?}"
            )))
        }
    }
}

/// Diagnostics of one outer iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterIteration {
    pub k: usize,
    /// Euclidean norm of `Psi(lambda^k)`.
    pub psi_norm: f64,
    /// Time-weighted interface L² norm of the correction.
    pub step_norm: f64,
    pub gmres_iterations: usize,
    pub gmres_converged: bool,
    pub gmres_history: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub lambda: PiecewiseConstantField,
    pub iterations: Vec<OuterIteration>,
    /// `Psi` and trajectories at the returned `lambda`.
    pub evaluation: PsiEvaluation,
    pub initial_psi_norm: f64,
    pub converged: bool,
}

impl NewtonOutcome {
    pub fn final_psi_norm(&self) -> f64 {
        field_norm(&self.evaluation.residual)
    }

    pub fn total_gmres_iterations(&self) -> usize {
        self.iterations.iter().map(|i| i.gmres_iterations).sum()
    }
}

/// Euclidean norm of all slab coefficients.
pub fn field_norm(f: &PiecewiseConstantField) -> f64 {
    f.slabs.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

/// `sqrt(Σ |J_m| h_m^T M_Γ h_m)`.
pub fn slab_norm(problem: &CoupledProblem, h: &PiecewiseConstantField) -> f64 {
    h.slabs
        .iter()
        .enumerate()
        .map(|(m, s)| {
            let ms = problem.interface_mass.mul_vec(s);
            h.grid.len(m) * s.iter().zip(&ms).map(|(a, b)| a * b).sum::<f64>()
        })
        .sum::<f64>()
        .sqrt()
}

/// Solves `Psi'(lambda) h = -Psi(lambda)` at the point of `base`.
pub fn newton_correction(
    problem: &CoupledProblem,
    base: &PsiEvaluation,
    config: &OuterConfig,
) -> Result<(PiecewiseConstantField, crate::interface::gmres::GmresOutcome), InterfaceError> {
    let lin = Linearization::new(problem, base)?;
    let grid = problem.fluid_grid.clone();
    let width = problem.n_multipliers();
    let to_field = |x: &[f64]| PiecewiseConstantField::from_flat(grid.clone(), width, x);
    let matvec = |x: &[f64]| -> Result<Vec<f64>, InterfaceError> {
        Ok(lin.apply(problem, &to_field(x)?)?.flatten())
    };
    let rhs: Vec<f64> = base.residual.flatten().iter().map(|v| -v).collect();
    let outcome = if config.precondition {
        let pre = Preconditioner::new(problem, &lin)?;
        let mut apply = |x: &[f64]| -> Result<Vec<f64>, InterfaceError> {
            Ok(pre.apply(&to_field(x)?)?.flatten())
        };
        gmres(matvec, &rhs, config.gmres_tol, config.gmres_maxit, Some(&mut apply))?
    } else {
        gmres(matvec, &rhs, config.gmres_tol, config.gmres_maxit, None)?
    };
    Ok((to_field(&outcome.solution)?, outcome))
}

pub fn newton_solve(
    problem: &CoupledProblem,
    lambda0: Option<PiecewiseConstantField>,
    config: &OuterConfig,
) -> Result<NewtonOutcome, InterfaceError> {
    config.validate()?;
    let mut lambda = lambda0.unwrap_or_else(|| {
        PiecewiseConstantField::zeros(problem.fluid_grid.clone(), problem.n_multipliers())
    });
    let mut evaluation = evaluate_psi(problem, &lambda)?;
    let initial_psi_norm = field_norm(&evaluation.residual);
    let mut iterations = Vec::new();
    let mut step_norm = f64::INFINITY;
    let mut k = 0;
    loop {
        if k >= config.newton_maxit || step_norm <= config.newton_tol {
            break;
        }
        let psi_norm = field_norm(&evaluation.residual);
        let (h, out) = newton_correction(problem, &evaluation, config)?;
        step_norm = slab_norm(problem, &h);
        info!(
            "outer {k}: |Psi| = {psi_norm:.3e}, |h| = {step_norm:.3e}, gmres {} iterations{}",
            out.iterations,
            if out.converged { "" } else { " (not converged)" }
        );
        iterations.push(OuterIteration {
            k,
            psi_norm,
            step_norm,
            gmres_iterations: out.iterations,
            gmres_converged: out.converged,
            gmres_history: out.history,
        });
        for (a, b) in lambda.slabs.iter_mut().flatten().zip(h.slabs.iter().flatten()) {
            *a += b;
        }
        evaluation = evaluate_psi(problem, &lambda)?;
        k += 1;
    }
    let converged = step_norm <= config.newton_tol;
    Ok(NewtonOutcome {
        lambda,
        iterations,
        evaluation,
        initial_psi_norm,
        converged,
    })
}
