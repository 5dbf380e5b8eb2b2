//! Experiment drivers for the stokes-darcy solver: a manufactured solution
//! with exact forcings, a pressure-driven flow, error norms, configuration
//! files and CSV reports.

pub mod cases;
pub mod config;
pub mod drivers;
pub mod manufactured;
pub mod norms;
pub mod report;
