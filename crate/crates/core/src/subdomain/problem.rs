//! Problem data and discretization of the stacked Stokes-Darcy geometry.

use std::sync::Arc;

use crate::error::{Error, MeshError, ParameterError};
use crate::fe::fields::{ScalarField, VectorField};
use crate::fe::interface::interface_mass_matrix;
use crate::fe::space::TaylorHoodSpace;
use crate::fe::sparse::CsrMatrix;
use crate::fe::{DarcyData, StokesData};
use crate::mesh::{build_interface_map, build_rectangle_mesh, InterfaceMap, Rectangle, Subdomain};
use crate::time_grid::TimeGrid;

/// Stopping rules of the per-step nonlinear (Newton) solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerConfig {
    /// Relative increment `|dx| / |x|` below which a step is converged.
    pub tol: f64,
    /// Absolute residual (Euclidean, free rows) below which a step is converged.
    pub residual_tol: f64,
    pub maxit: usize,
    /// Maximal number of step halvings in the damped update.
    pub max_halvings: usize,
}

impl Default for InnerConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            residual_tol: 1e-9,
            maxit: 20,
            max_halvings: 5,
        }
    }
}

/// Physical data of both subdomains.
#[derive(Clone, Debug)]
pub struct ProblemData {
    pub stokes: StokesData,
    pub darcy: DarcyData,
    pub initial_velocity: InitialVelocity,
    pub initial_pressure: InitialPressure,
}

/// Fluid velocity at `t = 0`.
#[derive(Clone)]
pub struct InitialVelocity(pub VectorField);

/// Porous pressure at `t = 0`.
#[derive(Clone)]
pub struct InitialPressure(pub ScalarField);

impl std::fmt::Debug for InitialVelocity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("InitialVelocity(..)")
    }
}

impl std::fmt::Debug for InitialPressure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("InitialPressure(..)")
    }
}

impl ProblemData {
    pub fn validate(&self) -> Result<(), ParameterError> {
        let d = &self.darcy.params;
        let s = &self.stokes.params;
        let check = |ok: bool, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(ParameterError::Physical(msg.to_string()))
            }
        };
        check(d.kappa > 0.0 && d.kappa.is_finite(), "permeability must be positive")?;
        check(d.storage >= 0.0 && d.storage.is_finite(), "storage coefficient must be non-negative")?;
        check(d.eta >= 0.0 && d.eta.is_finite(), "stabilization weight must be non-negative")?;
        check(s.c_bjs >= 0.0 && s.c_bjs.is_finite(), "slip coefficient must be non-negative")
    }
}

/// Mesh resolution and geometry of the two stacked rectangles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub fluid: Rectangle,
    pub porous: Rectangle,
    pub nx: usize,
    pub ny_fluid: usize,
    pub ny_porous: usize,
}

impl Geometry {
    /// Unit squares `(0,1)x(1,2)` over `(0,1)x(0,1)` with `n` cells per side.
    pub fn stacked_unit_squares(n: usize) -> Self {
        Self {
            fluid: Rectangle::new(0.0, 1.0, 1.0, 2.0),
            porous: Rectangle::new(0.0, 1.0, 0.0, 1.0),
            nx: n,
            ny_fluid: n,
            ny_porous: n,
        }
    }
}

/// Everything needed to evaluate the interface operator: data, spaces,
/// interface correspondence and the two time grids.
#[derive(Debug, Clone)]
pub struct CoupledProblem {
    pub data: ProblemData,
    pub fluid: Arc<TaylorHoodSpace>,
    pub porous: Arc<TaylorHoodSpace>,
    pub interface: InterfaceMap,
    pub interface_mass: CsrMatrix,
    pub fluid_grid: TimeGrid,
    pub porous_grid: TimeGrid,
    pub inner: InnerConfig,
    /// Run the two subdomain solves concurrently.
    pub parallel: bool,
}

impl CoupledProblem {
    pub fn new(
        data: ProblemData,
        geometry: Geometry,
        fluid_grid: TimeGrid,
        porous_grid: TimeGrid,
    ) -> Result<Self, Error> {
        data.validate()?;
        let mesh_f = build_rectangle_mesh(geometry.fluid, geometry.nx, geometry.ny_fluid, Subdomain::Fluid)?;
        let mesh_p =
            build_rectangle_mesh(geometry.porous, geometry.nx, geometry.ny_porous, Subdomain::Porous)?;
        if (geometry.fluid.y0 - geometry.porous.y1).abs() > crate::mesh::INTERFACE_TOLERANCE {
            return Err(MeshError::SubdomainMismatch.into());
        }
        let interface = build_interface_map(&mesh_f, &mesh_p)?;
        let tol = crate::time_grid::BREAKPOINT_TOLERANCE * fluid_grid.horizon();
        if (fluid_grid.horizon() - porous_grid.horizon()).abs() > tol {
            return Err(crate::error::TimeGridError::HorizonMismatch(
                fluid_grid.horizon(),
                porous_grid.horizon(),
            )
            .into());
        }
        let fluid = Arc::new(TaylorHoodSpace::new(Arc::new(mesh_f), data.stokes.walls.kinds()));
        let porous = Arc::new(TaylorHoodSpace::new(Arc::new(mesh_p), data.darcy.walls.kinds()));
        let interface_mass = interface_mass_matrix(&fluid);
        Ok(Self {
            data,
            fluid,
            porous,
            interface,
            interface_mass,
            fluid_grid,
            porous_grid,
            inner: InnerConfig::default(),
            parallel: true,
        })
    }

    pub fn n_multipliers(&self) -> usize {
        self.fluid.n_multipliers()
    }

    pub fn interface_length(&self) -> f64 {
        self.interface.length()
    }

    /// Initial fluid state: interpolated velocity, zero pressure.
    pub fn fluid_initial_state(&self) -> Vec<f64> {
        let u0 = &self.data.initial_velocity.0;
        self.fluid.interpolate(|x| u0(x, 0.0), |_| 0.0)
    }

    /// Initial porous state: zero velocity, interpolated pressure.
    pub fn porous_initial_state(&self) -> Vec<f64> {
        let p0 = &self.data.initial_pressure.0;
        self.porous.interpolate(|_| [0.0, 0.0], |x| p0(x, 0.0))
    }

    /// Whether every exterior fluid wall prescribes the full velocity, in
    /// which case the fluid pressure is fixed only through Γ.
    pub fn fluid_is_enclosed(&self) -> bool {
        use crate::fe::fields::WallKind;
        let skip = self.fluid.mesh.subdomain.interface_side();
        crate::mesh::Side::ALL
            .iter()
            .filter(|s| **s != skip)
            .all(|s| self.fluid.walls[s.index()] == WallKind::Velocity)
    }
}
