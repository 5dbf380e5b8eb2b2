//! CSV tables and legacy-VTK field dumps.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use stokes_darcy::fe::TaylorHoodSpace;
use stokes_darcy::interface::NewtonOutcome;

use crate::drivers::{ErrorReport, COLUMN_NAMES};

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn header() -> Vec<String> {
    let mut h: Vec<String> = ["study", "label", "h", "dt_fluid", "dt_porous", "r_fluid", "r_porous", "precond"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    h.extend(COLUMN_NAMES.iter().map(|c| c.to_string()));
    h.extend(COLUMN_NAMES.iter().map(|c| format!("order_{c}")));
    h.extend(["outer_iterations", "gmres_iterations", "converged", "seconds"].map(String::from));
    h
}

fn record(r: &ErrorReport) -> Vec<String> {
    let mut v = vec![
        r.study.clone(),
        r.label.clone(),
        format!("{}", r.h),
        format!("{}", r.dt_fluid),
        format!("{}", r.dt_porous),
        format!("{}", r.r_fluid),
        format!("{}", r.r_porous),
        if r.precondition { "on" } else { "off" }.to_string(),
    ];
    v.extend(r.columns().iter().map(|e| format!("{e:.6e}")));
    match &r.orders {
        Some(o) => v.extend(o.0.iter().map(|x| format!("{x:.3}"))),
        None => v.extend(std::iter::repeat_n(String::new(), 7)),
    }
    v.push(r.outer_iterations.to_string());
    v.push(r.gmres_iterations.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(" "));
    v.push(r.converged.to_string());
    v.push(format!("{:.4}", r.seconds));
    v
}

pub fn write_reports<W: Write>(out: W, rows: &[ErrorReport]) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header())?;
    for r in rows {
        w.write_record(record(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_reports_file(path: &Path, rows: &[ErrorReport]) -> Result<(), ReportError> {
    write_reports(BufWriter::new(File::create(path)?), rows)
}

/// One row per GMRES iteration of every outer iteration.
pub fn write_history<W: Write>(out: W, outcome: &NewtonOutcome) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["outer", "psi_norm", "step_norm", "gmres_iteration", "relative_residual"])?;
    for it in &outcome.iterations {
        for (j, res) in it.gmres_history.iter().enumerate() {
            w.write_record([
                it.k.to_string(),
                format!("{:.6e}", it.psi_norm),
                format!("{:.6e}", it.step_norm),
                j.to_string(),
                format!("{res:.6e}"),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Vertex velocities and pressures of a state.
pub fn write_state_vtk(path: &Path, space: &TaylorHoodSpace, state: &[f64]) -> Result<(), ReportError> {
    let nv = space.mesh.n_vertices();
    let velocity: Vec<[f64; 2]> = space.nodal_velocity(state)[..nv].to_vec();
    let magnitude: Vec<f64> = velocity.iter().map(|u| u[0].hypot(u[1])).collect();
    let pressure = space.pressure(state);
    let mut out = BufWriter::new(File::create(path)?);
    space.mesh.write_vtk(
        &mut out,
        &[("pressure", pressure), ("velocity_magnitude", &magnitude)],
        &[("velocity", &velocity)],
    )?;
    out.flush()?;
    Ok(())
}
