//! Backward-Euler step systems of the mixed (nonlinear) Darcy subproblem.
//!
//! Momentum: `nu(|u|) u / kappa + grad p = g`, stabilized by
//! `eta (div u, div v)`. Mass: `S (p - p_prev)/dt + div u = f`. The interface
//! datum `p = lambda` on Γ is natural.

use crate::fe::assembly::{
    add_traction_loads, apply_essential, essential_values, local_apply_add, scatter, velocity_at,
    zero_local,
};
use crate::fe::basis::{p2_gradients, p2_values};
use crate::fe::fields::{ScalarField, VectorField, Walls};
use crate::fe::quadrature::{triangle_degree4, TriangleRule};
use crate::fe::space::TaylorHoodSpace;
use crate::fe::sparse::{CsrMatrix, SparseSystem};
use crate::fe::stokes::StepData;
use crate::viscosity::CrossModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarcyParams {
    pub viscosity: CrossModel,
    pub kappa: f64,
    pub storage: f64,
    /// Grad-div stabilization weight.
    pub eta: f64,
}

#[derive(Clone)]
pub struct DarcyData {
    pub params: DarcyParams,
    /// Right-hand side of the momentum (Darcy law) equation.
    pub momentum_source: VectorField,
    /// Right-hand side of the mass equation.
    pub sink_source: ScalarField,
    pub walls: Walls,
}

impl std::fmt::Debug for DarcyData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DarcyData")
            .field("params", &self.params)
            .field("walls", &self.walls)
            .finish_non_exhaustive()
    }
}

/// Step operator frozen at `state`; see [`crate::fe::stokes::stokes_operator`].
pub fn darcy_operator(
    space: &TaylorHoodSpace,
    params: &DarcyParams,
    state: &[f64],
    dt: f64,
    newton: bool,
    rule: &TriangleRule,
) -> (CsrMatrix, Option<Vec<f64>>) {
    let model = &params.viscosity;
    let inv_kappa = 1.0 / params.kappa;
    let with_newton = newton && model.r != 2.0;
    let mut matrix = CsrMatrix::zeros(space.pattern.clone());
    let s_dt = params.storage / dt;
    if s_dt != 0.0 {
        for (v, m) in matrix.values.iter_mut().zip(&space.pressure_mass.values) {
            *v = s_dt * m;
        }
    }
    let mut newton_product = with_newton.then(|| vec![0.0; space.n_dofs()]);

    for (t, geo) in space.geometry.iter().enumerate() {
        let dofs = &space.element_dofs[t];
        let mut local = zero_local();
        let mut local_n = zero_local();
        for (lam, w) in rule.points.iter().zip(&rule.weights) {
            let wa = w * geo.area;
            let phi = p2_values(lam);
            let grad = p2_gradients(lam, geo);
            let (u, _) = velocity_at(state, dofs, &phi, &grad);
            let un = (u[0] * u[0] + u[1] * u[1]).sqrt();
            let k_eff = model.nu(un) * inv_kappa * wa;
            for a in 0..6 {
                for b in 0..6 {
                    let m = k_eff * phi[a] * phi[b];
                    local[a][b] += m;
                    local[6 + a][6 + b] += m;
                }
            }
            if params.eta != 0.0 {
                let ew = params.eta * wa;
                for c in 0..2 {
                    for a in 0..6 {
                        for e in 0..2 {
                            for b in 0..6 {
                                local[c * 6 + a][e * 6 + b] += ew * grad[a][c] * grad[b][e];
                            }
                        }
                    }
                }
            }
            for a in 0..6 {
                for c in 0..2 {
                    for k in 0..3 {
                        let v = wa * lam[k] * grad[a][c];
                        local[c * 6 + a][12 + k] -= v;
                        local[12 + k][c * 6 + a] += v;
                    }
                }
            }
            if with_newton {
                let coef = model.nu_prime_coeff(un) * inv_kappa * wa;
                for c in 0..2 {
                    for e in 0..2 {
                        let cu = coef * u[c] * u[e];
                        for a in 0..6 {
                            for b in 0..6 {
                                local_n[c * 6 + a][e * 6 + b] += cu * phi[a] * phi[b];
                            }
                        }
                    }
                }
            }
        }
        scatter(space, t, &local, &mut matrix);
        if let Some(np) = newton_product.as_mut() {
            scatter(space, t, &local_n, &mut matrix);
            local_apply_add(space, t, &local_n, state, np);
        }
    }
    (matrix, newton_product)
}

pub fn darcy_load(space: &TaylorHoodSpace, data: &DarcyData, step: &StepData) -> Vec<f64> {
    let rule = triangle_degree4();
    let t_now = step.time;
    let s_dt = data.params.storage / step.dt;
    let mut rhs = if s_dt != 0.0 {
        let mut r = space.pressure_mass.mul_vec(step.previous);
        for v in r.iter_mut() {
            *v *= s_dt;
        }
        r
    } else {
        vec![0.0; space.n_dofs()]
    };
    for (t, geo) in space.geometry.iter().enumerate() {
        let dofs = &space.element_dofs[t];
        for (lam, w) in rule.points.iter().zip(&rule.weights) {
            let wa = w * geo.area;
            let x = geo.point(lam);
            let g = (data.momentum_source)(x, t_now);
            let f = (data.sink_source)(x, t_now);
            let phi = p2_values(lam);
            for a in 0..6 {
                rhs[dofs[a]] += wa * g[0] * phi[a];
                rhs[dofs[6 + a]] += wa * g[1] * phi[a];
            }
            for k in 0..3 {
                rhs[dofs[12 + k]] += wa * f * lam[k];
            }
        }
    }
    space.coupling_apply_add(step.lambda, -1.0, &mut rhs);
    add_traction_loads(space, &data.walls, t_now, &mut rhs);
    rhs
}

pub fn assemble_darcy_system(
    space: &TaylorHoodSpace,
    data: &DarcyData,
    state: &[f64],
    newton: bool,
    step: &StepData,
) -> SparseSystem {
    let (mut matrix, np) =
        darcy_operator(space, &data.params, state, step.dt, newton, &triangle_degree4());
    let mut rhs = darcy_load(space, data, step);
    if let Some(np) = np {
        for (r, v) in rhs.iter_mut().zip(np) {
            *r += v;
        }
    }
    apply_essential(&mut matrix, Some(&mut rhs), &essential_values(space, &data.walls, step.time));
    SparseSystem {
        matrix,
        rhs,
        free: space.is_free.clone(),
    }
}

pub fn darcy_residual(space: &TaylorHoodSpace, data: &DarcyData, x: &[f64], step: &StepData) -> Vec<f64> {
    let (matrix, _) = darcy_operator(space, &data.params, x, step.dt, false, &triangle_degree4());
    let mut r = matrix.mul_vec(x);
    for (ri, b) in r.iter_mut().zip(darcy_load(space, data, step)) {
        *ri -= b;
    }
    for (dof, g) in essential_values(space, &data.walls, step.time) {
        r[dof] = x[dof] - g;
    }
    r
}

pub fn darcy_jacobian(space: &TaylorHoodSpace, params: &DarcyParams, state: &[f64], dt: f64) -> CsrMatrix {
    let (mut matrix, _) = darcy_operator(space, params, state, dt, true, &triangle_degree4());
    for e in &space.essential {
        matrix.set_identity_row(e.dof);
    }
    matrix
}
