//! Error norms of Taylor-Hood fields against closed-form or discrete
//! references, by degree-6 quadrature.

use std::sync::Arc;

use stokes_darcy::fe::assembly::velocity_at;
use stokes_darcy::fe::basis::{p2_gradients, p2_values};
use stokes_darcy::fe::quadrature::triangle_degree6;
use stokes_darcy::fe::TaylorHoodSpace;
use stokes_darcy::subdomain::SubdomainTrajectory;

/// Exact velocity, velocity gradient (rows are components) and pressure.
#[derive(Clone)]
pub struct ExactField {
    pub velocity: Arc<dyn Fn([f64; 2], f64) -> [f64; 2] + Send + Sync>,
    pub gradient: Arc<dyn Fn([f64; 2], f64) -> [[f64; 2]; 2] + Send + Sync>,
    pub pressure: Arc<dyn Fn([f64; 2], f64) -> f64 + Send + Sync>,
}

impl ExactField {
    pub fn zero() -> Self {
        Self {
            velocity: Arc::new(|_, _| [0.0; 2]),
            gradient: Arc::new(|_, _| [[0.0; 2]; 2]),
            pressure: Arc::new(|_, _| 0.0),
        }
    }
}

/// Errors of one subdomain field at one time.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FieldErrors {
    pub velocity_l2: f64,
    pub velocity_h1_semi: f64,
    pub velocity_h1: f64,
    /// L² norm of the divergence error.
    pub divergence_l2: f64,
    pub velocity_hdiv: f64,
    pub pressure_l2: f64,
}

/// Quadrature of `state - exact(., t)` over the whole mesh.
pub fn state_errors(space: &TaylorHoodSpace, state: &[f64], exact: &ExactField, t: f64) -> FieldErrors {
    let rule = triangle_degree6();
    let (mut l2, mut semi, mut div, mut p2) = (0.0, 0.0, 0.0, 0.0);
    for (tri, geo) in space.geometry.iter().enumerate() {
        let dofs = &space.element_dofs[tri];
        for (lam, w) in rule.points.iter().zip(&rule.weights) {
            let wa = w * geo.area;
            let x = geo.point(lam);
            let phi = p2_values(lam);
            let grad = p2_gradients(lam, geo);
            let (u, g) = velocity_at(state, dofs, &phi, &grad);
            let ue = (exact.velocity)(x, t);
            let ge = (exact.gradient)(x, t);
            let p: f64 = (0..3).map(|k| state[dofs[12 + k]] * lam[k]).sum();
            let pe = (exact.pressure)(x, t);
            l2 += wa * ((u[0] - ue[0]).powi(2) + (u[1] - ue[1]).powi(2));
            for c in 0..2 {
                for d in 0..2 {
                    semi += wa * (g[c][d] - ge[c][d]).powi(2);
                }
            }
            div += wa * ((g[0][0] + g[1][1]) - (ge[0][0] + ge[1][1])).powi(2);
            p2 += wa * (p - pe).powi(2);
        }
    }
    FieldErrors {
        velocity_l2: l2.sqrt(),
        velocity_h1_semi: semi.sqrt(),
        velocity_h1: (l2 + semi).sqrt(),
        divergence_l2: div.sqrt(),
        velocity_hdiv: (l2 + div).sqrt(),
        pressure_l2: p2.sqrt(),
    }
}

/// Errors at the breakpoint `t_eval` of the trajectory's grid, or `None` if
/// `t_eval` is not a breakpoint.
pub fn error_norms(
    space: &TaylorHoodSpace,
    trajectory: &SubdomainTrajectory,
    exact: &ExactField,
    t_eval: f64,
) -> Option<FieldErrors> {
    let points = trajectory.grid.points();
    let tol = 1e-12 * trajectory.grid.horizon();
    let k = points.iter().position(|p| (p - t_eval).abs() <= tol)?;
    Some(state_errors(space, trajectory.state_at(k), exact, t_eval))
}

/// Errors of `state - reference` for two coefficient vectors on the same space.
pub fn discrete_errors(space: &TaylorHoodSpace, state: &[f64], reference: &[f64]) -> FieldErrors {
    let diff: Vec<f64> = state.iter().zip(reference).map(|(a, b)| a - b).collect();
    state_errors(space, &diff, &ExactField::zero(), 0.0)
}

/// `log2(coarse / fine)` for a halved parameter.
pub fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}
