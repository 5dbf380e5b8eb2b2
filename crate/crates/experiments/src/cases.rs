//! Problem data of the test cases: the manufactured solution and the flow
//! driven by a pressure drop (with its discontinuous-parameter variant).

use std::sync::Arc;

use serde::Deserialize;
use stokes_darcy::fe::fields::{scalar_constant, vector_zero, BoundaryCondition, Walls};
use stokes_darcy::fe::{DarcyData, DarcyParams, StokesData, StokesParams};
use stokes_darcy::mesh::Side;
use stokes_darcy::subdomain::{InitialPressure, InitialVelocity, ProblemData};
use stokes_darcy::viscosity::CrossModel;

use crate::manufactured::{manufactured_case1, Case1Params};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseKind {
    /// Closed-form solution on stacked unit squares.
    Manufactured,
    /// Flow from the top of the fluid region to the bottom of the porous one.
    PressureDrop,
    /// Pressure drop with a much weaker shear thinning in the porous medium.
    Discontinuous,
}

/// Physical coefficients of both regions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physics {
    pub fluid_viscosity: CrossModel,
    pub porous_viscosity: CrossModel,
    pub kappa: f64,
    pub storage: f64,
    pub eta: f64,
    pub c_bjs: f64,
    /// Boundary pressures at the top of the fluid and the bottom of the
    /// porous medium; unused by the manufactured case.
    pub p_in: f64,
    pub p_out: f64,
}

fn cross(nu_inf: f64, nu_0: f64, k: f64, r: f64) -> CrossModel {
    CrossModel::new(nu_inf, nu_0, k, r).expect("built-in constants are valid")
}

impl CaseKind {
    pub fn default_physics(self) -> Physics {
        match self {
            CaseKind::Manufactured => {
                let p = Case1Params::standard(2.0);
                Physics {
                    fluid_viscosity: p.fluid_viscosity,
                    porous_viscosity: p.porous_viscosity,
                    kappa: p.kappa,
                    storage: p.storage,
                    eta: p.eta,
                    c_bjs: p.c_bjs,
                    p_in: 0.0,
                    p_out: 0.0,
                }
            }
            CaseKind::PressureDrop => Physics {
                fluid_viscosity: cross(1.0, 10.0, 1.0, 1.35),
                porous_viscosity: cross(1.0, 10.0, 1.0, 1.35),
                kappa: 1.0,
                storage: 1.0,
                eta: 0.0,
                c_bjs: 1.0,
                p_in: 1.0,
                p_out: 0.0,
            },
            CaseKind::Discontinuous => Physics {
                fluid_viscosity: cross(0.5, 1.0, 1.0, 1.35),
                porous_viscosity: cross(1.0, 10.0, 0.001, 1.35),
                ..CaseKind::PressureDrop.default_physics()
            },
        }
    }

    /// Whether errors are measured against a closed-form solution.
    pub fn has_exact_solution(self) -> bool {
        self == CaseKind::Manufactured
    }
}

/// Pressure-driven flow: traction `p_in` on top of the fluid, `p_out` below
/// the porous medium, no-slip and no-flow side walls, fluid at rest and
/// porous pressure `p_out` at `t = 0`.
pub fn pressure_drop(physics: &Physics) -> ProblemData {
    let fluid_walls = Walls::new()
        .with(Side::Left, BoundaryCondition::no_slip())
        .with(Side::Right, BoundaryCondition::no_slip())
        .with(Side::Top, BoundaryCondition::Traction(scalar_constant(physics.p_in)));
    let porous_walls = Walls::new()
        .with(Side::Left, BoundaryCondition::no_flow())
        .with(Side::Right, BoundaryCondition::no_flow())
        .with(Side::Bottom, BoundaryCondition::Traction(scalar_constant(physics.p_out)));
    ProblemData {
        stokes: StokesData {
            params: StokesParams {
                viscosity: physics.fluid_viscosity,
                c_bjs: physics.c_bjs,
            },
            body_force: vector_zero(),
            mass_source: scalar_constant(0.0),
            interface_stress: None,
            walls: fluid_walls,
        },
        darcy: DarcyData {
            params: DarcyParams {
                viscosity: physics.porous_viscosity,
                kappa: physics.kappa,
                storage: physics.storage,
                eta: physics.eta,
            },
            momentum_source: vector_zero(),
            sink_source: scalar_constant(0.0),
            walls: porous_walls,
        },
        initial_velocity: InitialVelocity(vector_zero()),
        initial_pressure: InitialPressure(Arc::new({
            let p = physics.p_out;
            move |_, _| p
        })),
    }
}

pub fn problem_data(case: CaseKind, physics: &Physics) -> ProblemData {
    match case {
        CaseKind::Manufactured => manufactured_case1(Case1Params {
            fluid_viscosity: physics.fluid_viscosity,
            porous_viscosity: physics.porous_viscosity,
            kappa: physics.kappa,
            storage: physics.storage,
            eta: physics.eta,
            c_bjs: physics.c_bjs,
        }),
        CaseKind::PressureDrop | CaseKind::Discontinuous => pressure_drop(physics),
    }
}
