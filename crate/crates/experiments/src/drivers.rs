//! Experiment drivers: each runs a family of coupled solves and returns one
//! [`ErrorReport`] per run.

use std::time::Instant;

use log::info;
use stokes_darcy::fe::TaylorHoodSpace;
use stokes_darcy::interface::{newton_solve, NewtonOutcome};
use stokes_darcy::subdomain::CoupledProblem;
use stokes_darcy::time_grid::PiecewiseConstantField;
use thiserror::Error;

use crate::cases::{problem_data, CaseKind};
use crate::config::{grid, step_count, ExperimentConfig};
use crate::manufactured::{fluid_exact, porous_exact};
use crate::norms::{discrete_errors, error_norms, observed_order, FieldErrors};

#[derive(Debug, Error)]
pub enum DriverError {
    #[error(transparent)]
    Solver(#[from] stokes_darcy::Error),
    #[error(transparent)]
    Interface(#[from] stokes_darcy::error::InterfaceError),
    #[error(transparent)]
    Parameter(#[from] stokes_darcy::error::ParameterError),
    #[error("{0}")]
    Setup(String),
}

/// Observed orders of the seven error columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orders(pub [f64; 7]);

/// Errors and cost of one coupled run.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub study: String,
    pub label: String,
    pub h: f64,
    pub dt_fluid: f64,
    pub dt_porous: f64,
    pub r_fluid: f64,
    pub r_porous: f64,
    pub precondition: bool,
    pub fluid: FieldErrors,
    pub porous: FieldErrors,
    /// Orders against the previous run of the same series.
    pub orders: Option<Orders>,
    pub outer_iterations: usize,
    /// GMRES iterations of each outer iteration.
    pub gmres_iterations: Vec<usize>,
    pub converged: bool,
    /// Wall-clock of the interface solve alone.
    pub seconds: f64,
}

impl ErrorReport {
    /// u_f L², u_f H¹, u_f H¹ seminorm, p_f L², u_p L², u_p H(div), p_p L².
    pub fn columns(&self) -> [f64; 7] {
        [
            self.fluid.velocity_l2,
            self.fluid.velocity_h1,
            self.fluid.velocity_h1_semi,
            self.fluid.pressure_l2,
            self.porous.velocity_l2,
            self.porous.velocity_hdiv,
            self.porous.pressure_l2,
        ]
    }

    pub fn total_gmres_iterations(&self) -> usize {
        self.gmres_iterations.iter().sum()
    }
}

pub const COLUMN_NAMES: [&str; 7] = ["uf_l2", "uf_h1", "uf_h1_semi", "pf_l2", "up_l2", "up_hdiv", "pp_l2"];

/// Fills `orders` of every row after the first from its predecessor.
pub fn fill_orders(series: &mut [ErrorReport]) {
    for i in 1..series.len() {
        let (a, b) = (series[i - 1].columns(), series[i].columns());
        let mut o = [0.0; 7];
        for k in 0..7 {
            o[k] = observed_order(a[k], b[k]);
        }
        series[i].orders = Some(Orders(o));
    }
}

/// One finished coupled solve.
pub struct Run {
    pub problem: CoupledProblem,
    pub outcome: NewtonOutcome,
    pub seconds: f64,
}

/// Step sizes and resolution of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSpec {
    pub resolution: usize,
    pub t_final: f64,
    pub dt_fluid: f64,
    pub dt_porous: f64,
}

impl RunSpec {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Self {
            resolution: cfg.resolution,
            t_final: cfg.time.t_final,
            dt_fluid: cfg.time.dt_fluid,
            dt_porous: cfg.time.dt_porous,
        }
    }
}

pub fn build_problem(cfg: &ExperimentConfig, spec: &RunSpec) -> Result<CoupledProblem, DriverError> {
    for dt in [spec.dt_fluid, spec.dt_porous] {
        if step_count(spec.t_final, dt).is_none() {
            return Err(DriverError::Setup(format!("step {dt} does not divide {}", spec.t_final)));
        }
    }
    let data = problem_data(cfg.case, &cfg.physics);
    let mut problem = CoupledProblem::new(
        data,
        cfg.geometry.discretize(spec.resolution),
        grid(spec.t_final, spec.dt_fluid),
        grid(spec.t_final, spec.dt_porous),
    )?;
    problem.inner = cfg.inner;
    problem.parallel = cfg.parallel;
    Ok(problem)
}

/// Interface trace of the initial porous pressure, constant in time.
pub fn initial_guess(problem: &CoupledProblem) -> PiecewiseConstantField {
    let p0 = &problem.data.initial_pressure.0;
    let values: Vec<f64> = problem
        .fluid
        .multiplier_vertices
        .iter()
        .map(|&v| p0(problem.fluid.mesh.vertices[v], 0.0))
        .collect();
    PiecewiseConstantField::constant(problem.fluid_grid.clone(), &values)
}

/// Builds and solves one configuration; only the interface solve is timed.
pub fn solve(cfg: &ExperimentConfig, spec: &RunSpec) -> Result<Run, DriverError> {
    let problem = build_problem(cfg, spec)?;
    let lambda0 = initial_guess(&problem);
    let start = Instant::now();
    let outcome = newton_solve(&problem, Some(lambda0), &cfg.outer)?;
    let seconds = start.elapsed().as_secs_f64();
    info!(
        "h = 1/{}, dt_f = {}, dt_p = {}: {} outer iterations, {} GMRES iterations, {:.2} s",
        spec.resolution,
        spec.dt_fluid,
        spec.dt_porous,
        outcome.iterations.len(),
        outcome.total_gmres_iterations(),
        seconds
    );
    Ok(Run {
        problem,
        outcome,
        seconds,
    })
}

/// Errors at the final time against the closed-form solution.
pub fn exact_errors(run: &Run) -> (FieldErrors, FieldErrors) {
    let ev = &run.outcome.evaluation;
    let t = run.problem.fluid_grid.horizon();
    let f = error_norms(&run.problem.fluid, &ev.stokes, &fluid_exact(), t).expect("final time is a breakpoint");
    let p = error_norms(&run.problem.porous, &ev.darcy, &porous_exact(), t).expect("final time is a breakpoint");
    (f, p)
}

/// Errors at the final time against another run on the same meshes.
pub fn reference_errors(run: &Run, reference: &Run) -> (FieldErrors, FieldErrors) {
    let ev = &run.outcome.evaluation;
    let rf = &reference.outcome.evaluation;
    (
        discrete_errors(&run.problem.fluid, ev.stokes.final_state(), rf.stokes.final_state()),
        discrete_errors(&run.problem.porous, ev.darcy.final_state(), rf.darcy.final_state()),
    )
}

fn report(
    cfg: &ExperimentConfig,
    study: &str,
    label: &str,
    spec: &RunSpec,
    run: &Run,
    errors: (FieldErrors, FieldErrors),
) -> ErrorReport {
    ErrorReport {
        study: study.to_string(),
        label: label.to_string(),
        h: 1.0 / spec.resolution as f64,
        dt_fluid: spec.dt_fluid,
        dt_porous: spec.dt_porous,
        r_fluid: cfg.physics.fluid_viscosity.r,
        r_porous: cfg.physics.porous_viscosity.r,
        precondition: cfg.outer.precondition,
        fluid: errors.0,
        porous: errors.1,
        orders: None,
        outer_iterations: run.outcome.iterations.len(),
        gmres_iterations: run.outcome.iterations.iter().map(|i| i.gmres_iterations).collect(),
        converged: run.outcome.converged,
        seconds: run.seconds,
    }
}

fn require_exact(cfg: &ExperimentConfig, what: &str) -> Result<(), DriverError> {
    if cfg.case.has_exact_solution() {
        Ok(())
    } else {
        Err(DriverError::Setup(format!("{what} needs the manufactured case")))
    }
}

/// Mesh refinement at fixed time grids, for each viscosity exponent.
pub fn run_convergence_space(cfg: &ExperimentConfig) -> Result<Vec<ErrorReport>, DriverError> {
    require_exact(cfg, "the spatial convergence study")?;
    let mut rows = Vec::new();
    for &r in &cfg.study.exponents {
        let c = cfg.with_exponent(r)?;
        let mut series = Vec::new();
        for &n in &cfg.study.resolutions {
            let spec = RunSpec {
                resolution: n,
                ..RunSpec::from_config(&c)
            };
            let run = solve(&c, &spec)?;
            series.push(report(&c, "convergence-space", &format!("r={r}"), &spec, &run, exact_errors(&run)));
        }
        fill_orders(&mut series);
        rows.extend(series);
    }
    Ok(rows)
}

/// Grid kinds of the time study.
pub const COARSE_CONFORMING: &str = "coarse-conforming";
pub const FINE_CONFORMING: &str = "fine-conforming";
pub const NONCONFORMING: &str = "nonconforming";

/// `(label, dt_fluid, dt_porous)` of the three grid kinds for a coarse step.
pub fn grid_kinds(coarse: f64, fine_in_fluid: bool) -> [(&'static str, f64, f64); 3] {
    let fine = coarse / 2.0;
    let mixed = if fine_in_fluid { (fine, coarse) } else { (coarse, fine) };
    [
        (COARSE_CONFORMING, coarse, coarse),
        (NONCONFORMING, mixed.0, mixed.1),
        (FINE_CONFORMING, fine, fine),
    ]
}

/// Coarse conforming, fine conforming and nonconforming (coarse fluid, fine
/// porous) grids for every coarse step, at a fixed mesh.
pub fn run_convergence_time(cfg: &ExperimentConfig) -> Result<Vec<ErrorReport>, DriverError> {
    require_exact(cfg, "the temporal convergence study")?;
    let mut by_kind: Vec<Vec<ErrorReport>> = vec![Vec::new(); 3];
    for &coarse in &cfg.study.dt_coarse {
        for (k, (label, dt_f, dt_p)) in grid_kinds(coarse, false).into_iter().enumerate() {
            let spec = RunSpec {
                resolution: cfg.study.time_resolution,
                t_final: cfg.study.time_t_final,
                dt_fluid: dt_f,
                dt_porous: dt_p,
            };
            let run = solve(cfg, &spec)?;
            by_kind[k].push(report(cfg, "convergence-time", label, &spec, &run, exact_errors(&run)));
        }
    }
    let mut rows = Vec::new();
    for mut series in by_kind {
        fill_orders(&mut series);
        rows.extend(series);
    }
    Ok(rows)
}

/// GMRES iterations of the first Newton correction, with and without the
/// preconditioner, under mesh refinement.
pub fn run_gmres_count_study(cfg: &ExperimentConfig) -> Result<Vec<ErrorReport>, DriverError> {
    require_exact(cfg, "the GMRES study")?;
    let mut rows = Vec::new();
    for &r in &cfg.study.exponents {
        for precondition in [false, true] {
            let mut c = cfg.with_exponent(r)?;
            c.outer.newton_maxit = 1;
            c.outer.gmres_tol = cfg.study.gmres_tol;
            c.outer.precondition = precondition;
            for &n in &cfg.study.resolutions {
                let spec = RunSpec {
                    resolution: n,
                    ..RunSpec::from_config(&c)
                };
                let run = solve(&c, &spec)?;
                let label = format!("r={r},precond={}", if precondition { "on" } else { "off" });
                rows.push(report(&c, "gmres-study", &label, &spec, &run, exact_errors(&run)));
            }
        }
    }
    Ok(rows)
}

/// Output of the pressure-drop study.
pub struct TestCase2 {
    pub reference: Run,
    pub rows: Vec<ErrorReport>,
}

/// Net normal flux from the fluid into the porous medium at the final time.
pub fn net_interface_flux(space: &TaylorHoodSpace, state: &[f64]) -> f64 {
    // multipliers form a partition of unity on Γ
    space.coupling_transpose(state).iter().sum()
}

/// Reference run, self-convergence with `dt_f = dt_p / 2`, and the
/// conforming/nonconforming comparison, all against the reference.
pub fn run_testcase2(cfg: &ExperimentConfig) -> Result<TestCase2, DriverError> {
    if cfg.case == CaseKind::Manufactured {
        return Err(DriverError::Setup("the pressure-drop study needs a pressure-drop case".into()));
    }
    let n = cfg.study.reference_resolution;
    let t_final = cfg.time.t_final;
    let spec = |dt_f: f64, dt_p: f64| RunSpec {
        resolution: n,
        t_final,
        dt_fluid: dt_f,
        dt_porous: dt_p,
    };
    let ref_spec = spec(cfg.study.reference_dt, cfg.study.reference_dt);
    let reference = solve(cfg, &ref_spec)?;
    let study = match cfg.case {
        CaseKind::Discontinuous => "testcase2-discontinuous",
        _ => "testcase2",
    };
    let mut rows = Vec::new();
    let mut series = Vec::new();
    for &dt_p in &cfg.study.dt_porous {
        let s = spec(dt_p / 2.0, dt_p);
        let run = solve(cfg, &s)?;
        series.push(report(cfg, study, "self-convergence", &s, &run, reference_errors(&run, &reference)));
    }
    fill_orders(&mut series);
    rows.extend(series);
    for (label, dt_f, dt_p) in grid_kinds(cfg.study.comparison_dt, true) {
        let s = spec(dt_f, dt_p);
        let run = solve(cfg, &s)?;
        rows.push(report(cfg, study, label, &s, &run, reference_errors(&run, &reference)));
    }
    Ok(TestCase2 { reference, rows })
}
