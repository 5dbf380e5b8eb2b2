//! Global-in-time domain decomposition for the time-dependent, nonlinear
//! Stokes-Darcy system.
//!
//! The coupled problem is reduced to an equation for the interface pressure
//! `lambda`, piecewise constant in time on the fluid time grid. Each
//! evaluation of the interface operator solves one full Stokes trajectory and
//! one full Darcy trajectory, each on its own time grid; the two grids are
//! coupled only through L² projections in time.

pub mod error;
pub mod fe;
pub mod interface;
pub mod mesh;
pub mod subdomain;
pub mod time_grid;
pub mod viscosity;

pub use error::{Error, Result};
