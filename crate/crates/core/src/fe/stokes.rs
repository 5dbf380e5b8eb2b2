//! Backward-Euler step systems of the (nonlinear) Stokes subproblem.
//!
//! Momentum: `(u - u_prev)/dt - div(nu(|D u|) D u) + grad p = f`, with
//! the interface datum `-n·(nu D u - p I)·n = lambda` and the slip law
//! `-τ·(nu D u)·n = c_BJS u·τ` on Γ. Continuity: `div u = g`.

use crate::fe::assembly::{
    add_normal_edge_load, add_tangential_interface_mass, add_traction_loads, apply_essential,
    essential_values, frobenius, local_apply_add, scatter, sym_grad, velocity_at, zero_local,
};
use crate::fe::basis::{p2_gradients, p2_values};
use crate::fe::fields::{ScalarField, VectorField, Walls};
use crate::fe::quadrature::{triangle_degree4, TriangleRule};
use crate::fe::space::TaylorHoodSpace;
use crate::fe::sparse::{CsrMatrix, SparseSystem};
use crate::viscosity::CrossModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesParams {
    pub viscosity: CrossModel,
    pub c_bjs: f64,
}

/// Sources and boundary data of the Stokes subproblem.
#[derive(Clone)]
pub struct StokesData {
    pub params: StokesParams,
    pub body_force: VectorField,
    /// Right-hand side of the continuity equation.
    pub mass_source: ScalarField,
    /// Extra normal stress on Γ added to `lambda`; only manufactured
    /// solutions need it.
    pub interface_stress: Option<ScalarField>,
    pub walls: Walls,
}

impl std::fmt::Debug for StokesData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StokesData")
            .field("params", &self.params)
            .field("walls", &self.walls)
            .finish_non_exhaustive()
    }
}

/// Data of one backward-Euler step ending at `time`.
#[derive(Debug, Clone, Copy)]
pub struct StepData<'a> {
    pub dt: f64,
    pub time: f64,
    pub previous: &'a [f64],
    /// Nodal multiplier values on Γ for this step.
    pub lambda: &'a [f64],
}

/// Step operator frozen at `state`. Returns the matrix (without essential
/// rows) and, when `newton` is set, the product `N(state) state` of the
/// Gateaux-derivative part with the state.
pub fn stokes_operator(
    space: &TaylorHoodSpace,
    params: &StokesParams,
    state: &[f64],
    dt: f64,
    newton: bool,
    rule: &TriangleRule,
) -> (CsrMatrix, Option<Vec<f64>>) {
    let model = &params.viscosity;
    let with_newton = newton && model.r != 2.0;
    let mut matrix = CsrMatrix::zeros(space.pattern.clone());
    for (v, m) in matrix.values.iter_mut().zip(&space.velocity_mass.values) {
        *v = m / dt;
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
            let (_, g) = velocity_at(state, dofs, &phi, &grad);
            let d = sym_grad(&g);
            let dn = frobenius(&d);
            let nu = model.nu(dn);
            for a in 0..6 {
                for b in 0..6 {
                    let dot = grad[a][0] * grad[b][0] + grad[a][1] * grad[b][1];
                    for c in 0..2 {
                        for e in 0..2 {
                            let delta = if c == e { dot } else { 0.0 };
                            local[c * 6 + a][e * 6 + b] +=
                                nu * wa * 0.5 * (delta + grad[a][e] * grad[b][c]);
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
                let coef = model.nu_prime_coeff(dn) * wa;
                // s[c][a] = D* : D(phi_a e_c)
                let mut s = [[0.0; 6]; 2];
                for c in 0..2 {
                    for a in 0..6 {
                        s[c][a] = d[c][0] * grad[a][0] + d[c][1] * grad[a][1];
                    }
                }
                for c in 0..2 {
                    for a in 0..6 {
                        for e in 0..2 {
                            for b in 0..6 {
                                local_n[c * 6 + a][e * 6 + b] += coef * s[c][a] * s[e][b];
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
    add_tangential_interface_mass(space, params.c_bjs, &mut matrix);
    (matrix, newton_product)
}

/// Right-hand side of one step before essential rows are applied.
pub fn stokes_load(space: &TaylorHoodSpace, data: &StokesData, step: &StepData) -> Vec<f64> {
    let rule = triangle_degree4();
    let t_now = step.time;
    let mut rhs = space.velocity_mass.mul_vec(step.previous);
    for r in rhs.iter_mut() {
        *r /= step.dt;
    }
    for (t, geo) in space.geometry.iter().enumerate() {
        let dofs = &space.element_dofs[t];
        for (lam, w) in rule.points.iter().zip(&rule.weights) {
            let wa = w * geo.area;
            let x = geo.point(lam);
            let f = (data.body_force)(x, t_now);
            let g = (data.mass_source)(x, t_now);
            let phi = p2_values(lam);
            for a in 0..6 {
                rhs[dofs[a]] += wa * f[0] * phi[a];
                rhs[dofs[6 + a]] += wa * f[1] * phi[a];
            }
            for k in 0..3 {
                rhs[dofs[12 + k]] += wa * g * lam[k];
            }
        }
    }
    space.coupling_apply_add(step.lambda, -1.0, &mut rhs);
    if let Some(sigma) = &data.interface_stress {
        let edges: Vec<usize> = space.interface_edges.iter().map(|e| e.edge).collect();
        let normal = space.mesh.subdomain.interface_side().outward_normal();
        add_normal_edge_load(space, &edges, normal, sigma, t_now, -1.0, &mut rhs);
    }
    add_traction_loads(space, &data.walls, t_now, &mut rhs);
    rhs
}

/// Step system linearized about `state`: Picard (`newton = false`) or
/// Newton in full-variable form `J x = b + N(state) state`.
pub fn assemble_stokes_system(
    space: &TaylorHoodSpace,
    data: &StokesData,
    state: &[f64],
    newton: bool,
    step: &StepData,
) -> SparseSystem {
    let (mut matrix, np) =
        stokes_operator(space, &data.params, state, step.dt, newton, &triangle_degree4());
    let mut rhs = stokes_load(space, data, step);
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

/// Nonlinear step residual `A(x) x - b` on free rows and `x - g` on
/// essential rows.
pub fn stokes_residual(
    space: &TaylorHoodSpace,
    data: &StokesData,
    x: &[f64],
    step: &StepData,
) -> Vec<f64> {
    let (matrix, _) = stokes_operator(space, &data.params, x, step.dt, false, &triangle_degree4());
    let mut r = matrix.mul_vec(x);
    for (ri, b) in r.iter_mut().zip(stokes_load(space, data, step)) {
        *ri -= b;
    }
    for (dof, g) in essential_values(space, &data.walls, step.time) {
        r[dof] = x[dof] - g;
    }
    r
}

/// Jacobian of the step residual at `state`, essential rows replaced by
/// identity rows.
pub fn stokes_jacobian(space: &TaylorHoodSpace, params: &StokesParams, state: &[f64], dt: f64) -> CsrMatrix {
    let (mut matrix, _) = stokes_operator(space, params, state, dt, true, &triangle_degree4());
    for e in &space.essential {
        matrix.set_identity_row(e.dof);
    }
    matrix
}
