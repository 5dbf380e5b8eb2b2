#![allow(dead_code)]

use std::sync::Arc;

use stokes_darcy::fe::fields::{scalar_constant, vector_zero};
use stokes_darcy::fe::{BoundaryCondition, DarcyData, DarcyParams, StokesData, StokesParams, Walls};
use stokes_darcy::mesh::Side;
use stokes_darcy::subdomain::{CoupledProblem, Geometry, InitialPressure, InitialVelocity, ProblemData};
use stokes_darcy::time_grid::{uniform_grid, PiecewiseConstantField};
use stokes_darcy::viscosity::CrossModel;

/// Small flow setup: the fluid is pushed by a top pressure `p_in` (or sealed
/// when `enclosed`), the porous block drains through its bottom at `p_out`.
pub struct Setup {
    pub n: usize,
    pub r: f64,
    pub p_in: f64,
    pub p_out: f64,
    pub p0: f64,
    pub enclosed: bool,
    pub t_final: f64,
    pub steps_fluid: usize,
    pub steps_porous: usize,
    pub c_bjs: f64,
}

impl Default for Setup {
    fn default() -> Self {
        Self {
            n: 4,
            r: 2.0,
            p_in: 1.0,
            p_out: 0.0,
            p0: 0.0,
            enclosed: false,
            t_final: 0.5,
            steps_fluid: 4,
            steps_porous: 2,
            c_bjs: 1.0,
        }
    }
}

impl Setup {
    pub fn data(&self) -> ProblemData {
        let visc = CrossModel::new(1.0, 10.0, 1.0, self.r).unwrap();
        let top = if self.enclosed {
            BoundaryCondition::no_slip()
        } else {
            BoundaryCondition::Traction(scalar_constant(self.p_in))
        };
        let fluid_walls = Walls::new()
            .with(Side::Left, BoundaryCondition::no_slip())
            .with(Side::Right, BoundaryCondition::no_slip())
            .with(Side::Top, top);
        let porous_walls = Walls::new()
            .with(Side::Left, BoundaryCondition::no_flow())
            .with(Side::Right, BoundaryCondition::no_flow())
            .with(Side::Bottom, BoundaryCondition::Traction(scalar_constant(self.p_out)));
        let p0 = self.p0;
        ProblemData {
            stokes: StokesData {
                params: StokesParams {
                    viscosity: visc,
                    c_bjs: self.c_bjs,
                },
                body_force: vector_zero(),
                mass_source: scalar_constant(0.0),
                interface_stress: None,
                walls: fluid_walls,
            },
            darcy: DarcyData {
                params: DarcyParams {
                    viscosity: visc,
                    kappa: 1.0,
                    storage: 1.0,
                    eta: 0.0,
                },
                momentum_source: vector_zero(),
                sink_source: scalar_constant(0.0),
                walls: porous_walls,
            },
            initial_velocity: InitialVelocity(vector_zero()),
            initial_pressure: InitialPressure(Arc::new(move |_, _| p0)),
        }
    }

    pub fn problem(&self) -> CoupledProblem {
        let mut p = CoupledProblem::new(
            self.data(),
            Geometry::stacked_unit_squares(self.n),
            uniform_grid(self.t_final, self.steps_fluid).unwrap(),
            uniform_grid(self.t_final, self.steps_porous).unwrap(),
        )
        .unwrap();
        p.parallel = false;
        p
    }
}

pub fn constant_lambda(problem: &CoupledProblem, c: f64) -> PiecewiseConstantField {
    PiecewiseConstantField::constant(problem.fluid_grid.clone(), &vec![c; problem.n_multipliers()])
}

/// Deterministic pseudo-random field on the fluid grid.
pub fn wiggle(problem: &CoupledProblem, seed: u64) -> PiecewiseConstantField {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let nl = problem.n_multipliers();
    let slabs = (0..problem.fluid_grid.n_intervals())
        .map(|_| (0..nl).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    PiecewiseConstantField::new(problem.fluid_grid.clone(), slabs).unwrap()
}

pub fn axpy(a: &PiecewiseConstantField, s: f64, b: &PiecewiseConstantField) -> PiecewiseConstantField {
    let flat: Vec<f64> = a.flatten().iter().zip(b.flatten()).map(|(x, y)| x + s * y).collect();
    PiecewiseConstantField::from_flat(a.grid.clone(), a.width(), &flat).unwrap()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn diff_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
