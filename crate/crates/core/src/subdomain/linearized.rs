//! Newton-linearized subdomain trajectories about a base trajectory.
//!
//! Every step uses the Jacobian of the nonlinear step residual at the base
//! state. Factorizations are computed once and reused for every right-hand
//! side, which is what makes the matrix-free interface Krylov solve cheap.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::SubdomainError;
use crate::fe::darcy::darcy_jacobian;
use crate::fe::space::TaylorHoodSpace;
use crate::fe::sparse::{CsrMatrix, SparseLu, SparsityPattern};
use crate::fe::stokes::stokes_jacobian;
use crate::fe::{DarcyParams, StokesParams};
use crate::subdomain::SubdomainTrajectory;
use crate::time_grid::{PiecewiseConstantField, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinearizedKind {
    Stokes(StokesParams),
    Darcy(DarcyParams),
}

impl LinearizedKind {
    fn is_linear(&self) -> bool {
        match self {
            LinearizedKind::Stokes(p) => p.viscosity.r == 2.0,
            LinearizedKind::Darcy(p) => p.viscosity.r == 2.0,
        }
    }

    fn jacobian(&self, space: &TaylorHoodSpace, state: &[f64], dt: f64) -> CsrMatrix {
        match self {
            LinearizedKind::Stokes(p) => stokes_jacobian(space, p, state, dt),
            LinearizedKind::Darcy(p) => darcy_jacobian(space, p, state, dt),
        }
    }

    /// Coupling of consecutive steps: `(1/dt) M` on velocities for Stokes,
    /// `(S/dt) M_p` on pressures for Darcy.
    fn history_load(&self, space: &TaylorHoodSpace, prev: &[f64], dt: f64) -> Vec<f64> {
        let (mass, scale) = match self {
            LinearizedKind::Stokes(_) => (&space.velocity_mass, 1.0 / dt),
            LinearizedKind::Darcy(p) => (&space.pressure_mass, p.storage / dt),
        };
        let mut out = mass.mul_vec(prev);
        for v in out.iter_mut() {
            *v *= scale;
        }
        out
    }
}

/// Factorized step Jacobians along a base trajectory.
#[derive(Debug, Clone)]
pub struct LinearizedOperator {
    pub kind: LinearizedKind,
    pub space: Arc<TaylorHoodSpace>,
    pub grid: TimeGrid,
    /// Base states the Jacobians were evaluated at.
    base_states: Arc<Vec<Vec<f64>>>,
    factors: Vec<Arc<SparseLu>>,
}

impl LinearizedOperator {
    pub fn new(
        kind: LinearizedKind,
        space: Arc<TaylorHoodSpace>,
        base: &SubdomainTrajectory,
    ) -> Result<Self, SubdomainError> {
        let grid = base.grid.clone();
        let mut factors: Vec<Arc<SparseLu>> = Vec::with_capacity(grid.n_intervals());
        for m in 0..grid.n_intervals() {
            let dt = grid.len(m);
            if kind.is_linear() && m > 0 && (grid.len(m - 1) - dt).abs() <= 1e-14 * dt {
                let shared = factors[m - 1].clone();
                factors.push(shared);
                continue;
            }
            let jac = kind.jacobian(&space, &base.states[m], dt);
            let lu = SparseLu::factorize(jac).map_err(|source| SubdomainError::Linear { step: m, source })?;
            factors.push(Arc::new(lu));
        }
        Ok(Self {
            kind,
            space,
            grid,
            base_states: Arc::new(base.states.clone()),
            factors,
        })
    }

    pub fn n_steps(&self) -> usize {
        self.grid.n_intervals()
    }

    /// Step Jacobians (essential rows as identity rows).
    pub fn jacobian(&self, m: usize) -> &CsrMatrix {
        self.factors[m].matrix()
    }

    pub fn base_state(&self, m: usize) -> &[f64] {
        &self.base_states[m]
    }

    /// Solves the linearized trajectory with zero initial data driven by the
    /// interface load `-G h` (one `h` slab per step).
    pub fn solve(&self, h: &PiecewiseConstantField) -> Result<SubdomainTrajectory, SubdomainError> {
        if h.grid.n_intervals() != self.n_steps() {
            return Err(SubdomainError::BaseMismatch {
                found: h.grid.n_intervals(),
                expected: self.n_steps(),
            });
        }
        let n = self.space.n_dofs();
        let initial = vec![0.0; n];
        let mut states: Vec<Vec<f64>> = Vec::with_capacity(self.n_steps());
        for m in 0..self.n_steps() {
            let prev = states.last().unwrap_or(&initial);
            let mut rhs = self.kind.history_load(&self.space, prev, self.grid.len(m));
            self.space.coupling_apply_add(&h.slabs[m], -1.0, &mut rhs);
            for e in &self.space.essential {
                rhs[e.dof] = 0.0;
            }
            let x = self.factors[m]
                .solve(&rhs)
                .map_err(|source| SubdomainError::Linear { step: m, source })?;
            states.push(x);
        }
        Ok(SubdomainTrajectory {
            grid: self.grid.clone(),
            initial,
            states,
            inner_iterations: vec![1; self.n_steps()],
        })
    }
}

pub fn solve_linearized_stokes_trajectory(
    space: Arc<TaylorHoodSpace>,
    params: StokesParams,
    base: &SubdomainTrajectory,
    h: &PiecewiseConstantField,
) -> Result<SubdomainTrajectory, SubdomainError> {
    LinearizedOperator::new(LinearizedKind::Stokes(params), space, base)?.solve(h)
}

pub fn solve_linearized_darcy_trajectory(
    space: Arc<TaylorHoodSpace>,
    params: DarcyParams,
    base: &SubdomainTrajectory,
    h: &PiecewiseConstantField,
) -> Result<SubdomainTrajectory, SubdomainError> {
    LinearizedOperator::new(LinearizedKind::Darcy(params), space, base)?.solve(h)
}

/// Linearized Stokes steps with the interface normal velocity prescribed
/// weakly: `G^T w = M_Γ g`, enforced by a multiplier `mu` that plays the
/// role of the interface normal stress. Applies the inverse of the
/// linearized Stokes Steklov-Poincaré operator.
#[derive(Debug, Clone)]
pub struct NormalDirichletStokes {
    operator: LinearizedOperator,
    interface_mass: CsrMatrix,
    /// Pressure dof fixed to remove the constant pressure/stress mode of an
    /// enclosed fluid region.
    gauge: Option<usize>,
    factors: Vec<Arc<SparseLu>>,
}

impl NormalDirichletStokes {
    pub fn new(
        operator: LinearizedOperator,
        interface_mass: CsrMatrix,
        gauge: bool,
    ) -> Result<Self, SubdomainError> {
        let space = operator.space.clone();
        let n = space.n_dofs();
        let nl = space.n_multipliers();
        let gauge = gauge.then(|| space.pressure_dof(space.multiplier_vertices[0]));

        let mut rows: Vec<BTreeSet<usize>> = (0..n)
            .map(|i| space.pattern.cols(i).iter().copied().collect())
            .collect();
        rows.extend((0..nl).map(|_| BTreeSet::new()));
        for (dof, row) in &space.coupling {
            for (k, _) in row {
                rows[*dof].insert(n + k);
                rows[n + k].insert(*dof);
            }
        }
        // diagonal slots keep the pattern usable for an identity row
        for (k, r) in rows.iter_mut().enumerate().skip(n) {
            r.insert(k);
        }
        let pattern = Arc::new(SparsityPattern::from_rows(rows));

        let mut factors: Vec<Arc<SparseLu>> = Vec::with_capacity(operator.n_steps());
        for m in 0..operator.n_steps() {
            if m > 0 && Arc::ptr_eq(&operator.factors[m], &operator.factors[m - 1]) {
                let shared = factors[m - 1].clone();
                factors.push(shared);
                continue;
            }
            let jac = operator.jacobian(m);
            let mut a = CsrMatrix::zeros(pattern.clone());
            for i in 0..n {
                for (slot, &j) in jac.pattern.row(i).zip(jac.pattern.cols(i)) {
                    a.add(i, j, jac.values[slot]);
                }
            }
            for (dof, row) in &space.coupling {
                for (k, v) in row {
                    if space.is_free[*dof] {
                        a.add(*dof, n + k, *v);
                    }
                    a.add(n + k, *dof, *v);
                }
            }
            if let Some(g) = gauge {
                a.set_identity_row(g);
            }
            let lu = SparseLu::factorize(a).map_err(|source| SubdomainError::Linear { step: m, source })?;
            factors.push(Arc::new(lu));
        }
        Ok(Self {
            operator,
            interface_mass,
            gauge,
            factors,
        })
    }

    pub fn has_gauge(&self) -> bool {
        self.gauge.is_some()
    }

    pub fn operator(&self) -> &LinearizedOperator {
        &self.operator
    }

    /// Solves with the dual constraint data `G^T w = c_m` given per step.
    /// Returns the multiplier `mu` per step.
    pub fn solve_dual(&self, constraint: &PiecewiseConstantField) -> Result<PiecewiseConstantField, SubdomainError> {
        let op = &self.operator;
        let space = &op.space;
        let n = space.n_dofs();
        let nl = space.n_multipliers();
        let mut prev = vec![0.0; n];
        let mut mu_slabs = Vec::with_capacity(op.n_steps());
        for m in 0..op.n_steps() {
            let mut rhs = op.kind.history_load(space, &prev, op.grid.len(m));
            for e in &space.essential {
                rhs[e.dof] = 0.0;
            }
            if let Some(g) = self.gauge {
                rhs[g] = 0.0;
            }
            rhs.extend_from_slice(&constraint.slabs[m]);
            debug_assert_eq!(rhs.len(), n + nl);
            let x = self.factors[m]
                .solve(&rhs)
                .map_err(|source| SubdomainError::Linear { step: m, source })?;
            prev = x[..n].to_vec();
            mu_slabs.push(x[n..].to_vec());
        }
        PiecewiseConstantField::new(op.grid.clone(), mu_slabs).map_err(SubdomainError::from)
    }

    /// Normal velocity data `g` (nodal on Γ) to interface normal stress.
    pub fn solve(&self, g: &PiecewiseConstantField) -> Result<PiecewiseConstantField, SubdomainError> {
        let slabs = g.slabs.iter().map(|s| self.interface_mass.mul_vec(s)).collect();
        self.solve_dual(&PiecewiseConstantField::new(g.grid.clone(), slabs)?)
    }
}

/// Applies the inverse of the linearized Stokes interface operator to normal
/// velocity data on the fluid grid.
pub fn solve_stokes_normal_dirichlet_trajectory(
    operator: LinearizedOperator,
    interface_mass: CsrMatrix,
    g: &PiecewiseConstantField,
) -> Result<PiecewiseConstantField, SubdomainError> {
    NormalDirichletStokes::new(operator, interface_mass, false)?.solve(g)
}
