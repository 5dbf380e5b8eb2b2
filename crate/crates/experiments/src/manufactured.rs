//! Closed-form solution of the first test case and the forcings derived
//! from it.

use std::f64::consts::E;
use std::sync::Arc;

use stokes_darcy::fe::fields::{BoundaryCondition, Walls};
use stokes_darcy::fe::{DarcyData, DarcyParams, StokesData, StokesParams};
use stokes_darcy::mesh::Side;
use stokes_darcy::subdomain::{InitialPressure, InitialVelocity, ProblemData};
use stokes_darcy::viscosity::CrossModel;

use crate::norms::ExactField;

/// Time factor `1 + t²`.
fn s(t: f64) -> f64 {
    1.0 + t * t
}

pub fn fluid_velocity([x, y]: [f64; 2], t: f64) -> [f64; 2] {
    [(y - 1.0).powi(2) * x.powi(3) * s(t), -y.cos() * E * s(t)]
}

/// Rows are components, columns are derivative directions.
pub fn fluid_velocity_gradient([x, y]: [f64; 2], t: f64) -> [[f64; 2]; 2] {
    let st = s(t);
    [
        [3.0 * x * x * (y - 1.0).powi(2) * st, 2.0 * (y - 1.0) * x.powi(3) * st],
        [0.0, y.sin() * E * st],
    ]
}

pub fn fluid_pressure([_, y]: [f64; 2], t: f64) -> f64 {
    (y.cos() * y.exp() + y * y - 2.0 * y + 1.0) * s(t)
}

pub fn porous_velocity([x, y]: [f64; 2], t: f64) -> [f64; 2] {
    let st = s(t);
    [
        -x * (y.sin() * E + 2.0 * (y - 1.0)) * st,
        (-y.cos() * E + (y - 1.0).powi(2)) * st,
    ]
}

pub fn porous_velocity_gradient([x, y]: [f64; 2], t: f64) -> [[f64; 2]; 2] {
    let st = s(t);
    let a = y.sin() * E + 2.0 * (y - 1.0);
    let da = y.cos() * E + 2.0;
    [[-a * st, -x * da * st], [0.0, (y.sin() * E + 2.0 * (y - 1.0)) * st]]
}

/// Spatial part of the porous pressure; the full field is this times `1 + t²`.
fn porous_pressure_shape([x, y]: [f64; 2]) -> f64 {
    -y.sin() * E + x.cos() * y.exp() + y * y - 2.0 * y + 1.0
}

pub fn porous_pressure(p: [f64; 2], t: f64) -> f64 {
    porous_pressure_shape(p) * s(t)
}

/// Symmetric gradient of the fluid velocity and its two partial derivatives.
fn fluid_strain([x, y]: [f64; 2], t: f64) -> ([[f64; 2]; 2], [[[f64; 2]; 2]; 2]) {
    let st = s(t);
    let d11 = 3.0 * x * x * (y - 1.0).powi(2) * st;
    let d12 = (y - 1.0) * x.powi(3) * st;
    let d22 = y.sin() * E * st;
    let dx = [[6.0 * x * (y - 1.0).powi(2) * st, 3.0 * x * x * (y - 1.0) * st], [
        3.0 * x * x * (y - 1.0) * st,
        0.0,
    ]];
    let dy = [[6.0 * x * x * (y - 1.0) * st, x.powi(3) * st], [x.powi(3) * st, y.cos() * E * st]];
    ([[d11, d12], [d12, d22]], [dx, dy])
}

fn contract(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> f64 {
    a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
}

fn norm(d: &[[f64; 2]; 2]) -> f64 {
    contract(d, d).sqrt()
}

/// `du/dt - div(nu(|D u|) D u) + grad p`.
pub fn fluid_body_force(nu: &CrossModel, p: [f64; 2], t: f64) -> [f64; 2] {
    let y = p[1];
    let (d, [dx, dy]) = fluid_strain(p, t);
    let mag = norm(&d);
    let visc = nu.nu(mag);
    let c = nu.nu_prime_coeff(mag);
    let grads = [contract(&d, &dx), contract(&d, &dy)];
    // u is (1 + t²) times its value at t = 0
    let u0 = fluid_velocity(p, 0.0);
    let dt_u = [2.0 * t * u0[0], 2.0 * t * u0[1]];
    let st = s(t);
    let grad_p = [0.0, (-y.sin() * y.exp() + y.cos() * y.exp() + 2.0 * y - 2.0) * st];
    let mut f = [0.0; 2];
    for i in 0..2 {
        let div_d = dx[i][0] + dy[i][1];
        let chain = d[i][0] * grads[0] + d[i][1] * grads[1];
        f[i] = dt_u[i] - visc * div_d - c * chain + grad_p[i];
    }
    f
}

/// `div u_f`, the continuity source; the exact fluid velocity is not solenoidal.
pub fn fluid_mass_source(p: [f64; 2], t: f64) -> f64 {
    let g = fluid_velocity_gradient(p, t);
    g[0][0] + g[1][1]
}

/// `nu(|u|) u / kappa + grad p` in the porous medium.
pub fn porous_momentum_source(nu: &CrossModel, kappa: f64, p: [f64; 2], t: f64) -> [f64; 2] {
    let [x, y] = p;
    let u = porous_velocity(p, t);
    let visc = nu.nu((u[0] * u[0] + u[1] * u[1]).sqrt());
    let st = s(t);
    let grad_p = [-x.sin() * y.exp() * st, (-y.cos() * E + x.cos() * y.exp() + 2.0 * y - 2.0) * st];
    [visc * u[0] / kappa + grad_p[0], visc * u[1] / kappa + grad_p[1]]
}

/// `S dp/dt + div u_p`.
pub fn porous_mass_source(storage: f64, p: [f64; 2], t: f64) -> f64 {
    let g = porous_velocity_gradient(p, t);
    storage * porous_pressure_shape(p) * 2.0 * t + g[0][0] + g[1][1]
}

/// Normal stress mismatch on Γ that the interface multiplier cannot carry:
/// `-n_f·(nu D - p I)·n_f - p_p` at `y = 1`.
pub fn interface_stress(nu: &CrossModel, p: [f64; 2], t: f64) -> f64 {
    let (d, _) = fluid_strain(p, t);
    -nu.nu(norm(&d)) * d[1][1] + fluid_pressure(p, t) - porous_pressure(p, t)
}

/// Physical constants of the manufactured case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case1Params {
    pub fluid_viscosity: CrossModel,
    pub porous_viscosity: CrossModel,
    pub kappa: f64,
    pub storage: f64,
    pub eta: f64,
    pub c_bjs: f64,
}

impl Case1Params {
    /// `nu_inf = 0.5`, `nu_0 = 1.5`, `K = 1` in both regions with exponent `r`.
    pub fn standard(r: f64) -> Self {
        let nu = CrossModel::new(0.5, 1.5, 1.0, r).expect("valid constants");
        Self {
            fluid_viscosity: nu,
            porous_viscosity: nu,
            kappa: 1.0,
            storage: 1.0,
            eta: 10.0,
            c_bjs: 1.0,
        }
    }
}

/// Problem data with every forcing, boundary value and initial value taken
/// from the exact solution.
pub fn manufactured_case1(params: Case1Params) -> ProblemData {
    let nu_f = params.fluid_viscosity;
    let nu_p = params.porous_viscosity;
    let kappa = params.kappa;
    let storage = params.storage;
    let vel: Arc<dyn Fn([f64; 2], f64) -> [f64; 2] + Send + Sync> = Arc::new(fluid_velocity);
    let fluid_walls = Walls::new()
        .with(Side::Left, BoundaryCondition::Velocity(vel.clone()))
        .with(Side::Right, BoundaryCondition::Velocity(vel.clone()))
        .with(Side::Top, BoundaryCondition::Velocity(vel.clone()));
    let pvel: Arc<dyn Fn([f64; 2], f64) -> [f64; 2] + Send + Sync> = Arc::new(porous_velocity);
    let porous_walls = Walls::new()
        .with(Side::Left, BoundaryCondition::NormalVelocity(pvel.clone()))
        .with(Side::Right, BoundaryCondition::NormalVelocity(pvel.clone()))
        .with(Side::Bottom, BoundaryCondition::NormalVelocity(pvel));
    ProblemData {
        stokes: StokesData {
            params: StokesParams {
                viscosity: nu_f,
                c_bjs: params.c_bjs,
            },
            body_force: Arc::new(move |p, t| fluid_body_force(&nu_f, p, t)),
            mass_source: Arc::new(fluid_mass_source),
            interface_stress: Some(Arc::new(move |p, t| interface_stress(&nu_f, p, t))),
            walls: fluid_walls,
        },
        darcy: DarcyData {
            params: DarcyParams {
                viscosity: nu_p,
                kappa,
                storage,
                eta: params.eta,
            },
            momentum_source: Arc::new(move |p, t| porous_momentum_source(&nu_p, kappa, p, t)),
            sink_source: Arc::new(move |p, t| porous_mass_source(storage, p, t)),
            walls: porous_walls,
        },
        initial_velocity: InitialVelocity(vel),
        initial_pressure: InitialPressure(Arc::new(porous_pressure)),
    }
}

pub fn fluid_exact() -> ExactField {
    ExactField {
        velocity: Arc::new(fluid_velocity),
        gradient: Arc::new(fluid_velocity_gradient),
        pressure: Arc::new(fluid_pressure),
    }
}

pub fn porous_exact() -> ExactField {
    ExactField {
        velocity: Arc::new(porous_velocity),
        gradient: Arc::new(porous_velocity_gradient),
        pressure: Arc::new(porous_pressure),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_value() {
        let u = fluid_velocity([1.0, 1.0], 0.0);
        assert_eq!(u[0], 0.0);
        assert!((u[1] + 1.468_693).abs() < 1e-6);
    }

    #[test]
    fn normal_flux_matches_across_interface() {
        for i in 0..=10 {
            let x = i as f64 / 10.0;
            for t in [0.0, 0.3, 1.0] {
                let uf = fluid_velocity([x, 1.0], t);
                let up = porous_velocity([x, 1.0], t);
                assert!((-uf[1] + up[1]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn porous_velocity_is_solenoidal() {
        for &(x, y) in &[(0.1, 0.2), (0.7, 0.4), (0.5, 0.99)] {
            let g = porous_velocity_gradient([x, y], 0.4);
            assert!((g[0][0] + g[1][1]).abs() < 1e-14);
        }
    }
}
