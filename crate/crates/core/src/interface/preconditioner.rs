//! Preconditioner built from the inverse of the linearized Stokes interface
//! operator `S_f^lin`.
//!
//! When every exterior fluid wall prescribes the velocity, `S_f^lin` maps
//! constants (per slab) to zero and its range is mean-free. The mean-free
//! part of a residual is then inverted exactly (with a pressure gauge) and
//! the slab means are recovered from the response of the full operator to a
//! unit constant, which only the porous side produces.

use crate::error::InterfaceError;
use crate::interface::psi::Linearization;
use crate::subdomain::linearized::NormalDirichletStokes;
use crate::subdomain::CoupledProblem;
use crate::time_grid::PiecewiseConstantField;

#[derive(Debug, Clone)]
pub struct Preconditioner {
    inverse: NormalDirichletStokes,
    /// `M_Γ 1`, the dual of the unit constant.
    mass_ones: Vec<f64>,
    interface_length: f64,
    /// `1^T Psi'(1)_m` per slab, present in the enclosed case.
    constant_response: Option<Vec<f64>>,
}

impl Preconditioner {
    pub fn new(problem: &CoupledProblem, lin: &Linearization) -> Result<Self, InterfaceError> {
        let enclosed = problem.fluid_is_enclosed();
        let inverse =
            NormalDirichletStokes::new(lin.stokes.clone(), problem.interface_mass.clone(), enclosed)
                .map_err(InterfaceError::Preconditioner)?;
        let nl = problem.n_multipliers();
        let mass_ones = problem.interface_mass.mul_vec(&vec![1.0; nl]);
        let constant_response = if enclosed {
            let ones = PiecewiseConstantField::constant(problem.fluid_grid.clone(), &vec![1.0; nl]);
            let response = lin.apply(problem, &ones)?;
            Some(response.slabs.iter().map(|s| s.iter().sum()).collect())
        } else {
            None
        };
        Ok(Self {
            inverse,
            mass_ones,
            interface_length: problem.interface_length(),
            constant_response,
        })
    }

    /// Approximates `Psi'^{-1} r` by `(S_f^lin)^{-1} r`.
    pub fn apply(&self, r: &PiecewiseConstantField) -> Result<PiecewiseConstantField, InterfaceError> {
        let grid = &r.grid;
        let mut targets: Vec<Vec<f64>> = r
            .slabs
            .iter()
            .enumerate()
            .map(|(m, s)| s.iter().map(|v| v / grid.len(m)).collect())
            .collect();
        let means: Vec<f64> = r.slabs.iter().map(|s| s.iter().sum()).collect();
        if self.constant_response.is_some() {
            for (m, t) in targets.iter_mut().enumerate() {
                let a = means[m] / grid.len(m) / self.interface_length;
                for (v, w) in t.iter_mut().zip(&self.mass_ones) {
                    *v -= a * w;
                }
            }
        }
        let targets = PiecewiseConstantField::new(grid.clone(), targets)?;
        let mut mu = self
            .inverse
            .solve_dual(&targets)
            .map_err(InterfaceError::Preconditioner)?;
        if let Some(b) = &self.constant_response {
            for (m, slab) in mu.slabs.iter_mut().enumerate() {
                let shift = slab.iter().zip(&self.mass_ones).map(|(x, w)| x * w).sum::<f64>()
                    / self.interface_length;
                let add = if b[m].abs() > f64::MIN_POSITIVE { means[m] / b[m] } else { 0.0 };
                for v in slab.iter_mut() {
                    *v += add - shift;
                }
            }
        }
        Ok(mu)
    }
}
