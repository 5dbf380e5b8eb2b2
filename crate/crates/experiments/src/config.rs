//! Experiment configuration files: TOML with one table per topic, every key
//! optional, defaults taken from the selected test case.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use stokes_darcy::error::ParameterError;
use stokes_darcy::interface::OuterConfig;
use stokes_darcy::mesh::Rectangle;
use stokes_darcy::subdomain::{Geometry, InnerConfig};
use stokes_darcy::time_grid::{uniform_grid, TimeGrid};
use stokes_darcy::viscosity::CrossModel;
use thiserror::Error;

use crate::cases::{CaseKind, Physics};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{}{key}: {message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Invalid {
        line: Option<usize>,
        key: String,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub y_bottom: f64,
    pub y_interface: f64,
    pub y_top: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            x_min: 0.0,
            x_max: 1.0,
            y_bottom: 0.0,
            y_interface: 1.0,
            y_top: 2.0,
        }
    }
}

impl GeometryConfig {
    /// Cell counts follow from `resolution` cells per unit length.
    pub fn discretize(&self, resolution: usize) -> Geometry {
        let cells = |len: f64| ((len * resolution as f64).round() as usize).max(1);
        Geometry {
            fluid: Rectangle::new(self.x_min, self.x_max, self.y_interface, self.y_top),
            porous: Rectangle::new(self.x_min, self.x_max, self.y_bottom, self.y_interface),
            nx: cells(self.x_max - self.x_min),
            ny_fluid: cells(self.y_top - self.y_interface),
            ny_porous: cells(self.y_interface - self.y_bottom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeConfig {
    pub t_final: f64,
    pub dt_fluid: f64,
    pub dt_porous: f64,
}

/// Parameters of the parameter sweeps; each driver reads its own part.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    /// Cells per unit length for the spatial and GMRES studies.
    pub resolutions: Vec<usize>,
    /// Viscosity exponents applied to both regions.
    pub exponents: Vec<f64>,
    /// Coarse steps of the time study; the fine step is half of each.
    pub dt_coarse: Vec<f64>,
    pub time_resolution: usize,
    pub time_t_final: f64,
    /// GMRES tolerance of the iteration-count study.
    pub gmres_tol: f64,
    /// Reference run of the pressure-drop study.
    pub reference_dt: f64,
    pub reference_resolution: usize,
    /// Porous steps of the self-convergence table; the fluid uses half.
    pub dt_porous: Vec<f64>,
    /// Coarse step of the conforming/nonconforming comparison.
    pub comparison_dt: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub case: CaseKind,
    pub geometry: GeometryConfig,
    pub resolution: usize,
    pub time: TimeConfig,
    pub physics: Physics,
    pub outer: OuterConfig,
    pub inner: InnerConfig,
    /// Run the two subdomain solves of each evaluation concurrently.
    pub parallel: bool,
    pub study: StudyConfig,
    pub output: PathBuf,
}

impl ExperimentConfig {
    /// Built-in defaults of a test case.
    pub fn for_case(case: CaseKind) -> Self {
        let (resolution, time, study) = match case {
            CaseKind::Manufactured => (
                8,
                TimeConfig {
                    t_final: 0.01,
                    dt_fluid: 0.002,
                    dt_porous: 0.001,
                },
                StudyConfig {
                    resolutions: vec![4, 8, 16, 32],
                    exponents: vec![2.0, 1.5],
                    dt_coarse: vec![0.2, 0.1, 0.05, 0.025],
                    time_resolution: 32,
                    time_t_final: 0.2,
                    gmres_tol: 1e-10,
                    reference_dt: 0.01,
                    reference_resolution: 32,
                    dt_porous: vec![],
                    comparison_dt: 0.1,
                },
            ),
            CaseKind::PressureDrop | CaseKind::Discontinuous => {
                let coarse = if case == CaseKind::PressureDrop { 0.125 } else { 0.25 };
                (
                    32,
                    TimeConfig {
                        t_final: 1.0,
                        dt_fluid: coarse / 2.0,
                        dt_porous: coarse,
                    },
                    StudyConfig {
                        resolutions: vec![32],
                        exponents: vec![1.35],
                        dt_coarse: vec![],
                        time_resolution: 32,
                        time_t_final: 1.0,
                        gmres_tol: 1e-10,
                        reference_dt: 0.01,
                        reference_resolution: 32,
                        dt_porous: vec![0.5, 0.25, 0.125, 0.0625],
                        comparison_dt: coarse,
                    },
                )
            }
        };
        Self {
            case,
            geometry: GeometryConfig::default(),
            resolution,
            time,
            physics: case.default_physics(),
            outer: OuterConfig::default(),
            inner: InnerConfig::default(),
            parallel: true,
            study,
            output: PathBuf::from("results"),
        }
    }

    pub fn fluid_grid(&self) -> TimeGrid {
        grid(self.time.t_final, self.time.dt_fluid)
    }

    pub fn porous_grid(&self) -> TimeGrid {
        grid(self.time.t_final, self.time.dt_porous)
    }

    /// Copy with both viscosity exponents replaced.
    pub fn with_exponent(&self, r: f64) -> Result<Self, ParameterError> {
        let mut c = self.clone();
        let f = self.physics.fluid_viscosity;
        let p = self.physics.porous_viscosity;
        c.physics.fluid_viscosity = CrossModel::new(f.nu_inf, f.nu_0, f.k, r)?;
        c.physics.porous_viscosity = CrossModel::new(p.nu_inf, p.nu_0, p.k, r)?;
        Ok(c)
    }
}

/// Number of steps of size `dt` in `t_final`, if `dt` divides it.
pub fn step_count(t_final: f64, dt: f64) -> Option<usize> {
    if !(dt > 0.0 && t_final > 0.0 && dt.is_finite() && t_final.is_finite()) {
        return None;
    }
    let n = (t_final / dt).round();
    (n >= 1.0 && (n * dt - t_final).abs() <= 1e-12 * t_final.max(1.0)).then_some(n as usize)
}

/// Uniform grid; callers validate that `dt` divides `t_final`.
pub fn grid(t_final: f64, dt: f64) -> TimeGrid {
    let n = step_count(t_final, dt).unwrap_or_else(|| ((t_final / dt).round() as usize).max(1));
    uniform_grid(t_final, n).expect("positive horizon and step count")
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    case: Option<CaseKind>,
    output: Option<PathBuf>,
    geometry: Option<RawGeometry>,
    mesh: Option<RawMesh>,
    time: Option<RawTime>,
    fluid: Option<RawViscous>,
    porous: Option<RawViscous>,
    solver: Option<RawSolver>,
    study: Option<RawStudy>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    x_min: Option<f64>,
    x_max: Option<f64>,
    y_bottom: Option<f64>,
    y_interface: Option<f64>,
    y_top: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMesh {
    resolution: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    t_final: Option<f64>,
    dt_fluid: Option<f64>,
    dt_porous: Option<f64>,
}

/// Shared by both regions; region-specific keys are rejected later.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawViscous {
    nu_inf: Option<f64>,
    nu_0: Option<f64>,
    k: Option<f64>,
    r: Option<f64>,
    c_bjs: Option<f64>,
    p_in: Option<f64>,
    kappa: Option<f64>,
    storage: Option<f64>,
    eta: Option<f64>,
    p_out: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    newton_maxit: Option<usize>,
    newton_tol: Option<f64>,
    gmres_tol: Option<f64>,
    gmres_maxit: Option<usize>,
    precondition: Option<bool>,
    inner_tol: Option<f64>,
    inner_residual_tol: Option<f64>,
    inner_maxit: Option<usize>,
    parallel: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStudy {
    resolutions: Option<Vec<usize>>,
    exponents: Option<Vec<f64>>,
    dt_coarse: Option<Vec<f64>>,
    time_resolution: Option<usize>,
    time_t_final: Option<f64>,
    gmres_tol: Option<f64>,
    reference_dt: Option<f64>,
    reference_resolution: Option<usize>,
    dt_porous: Option<Vec<f64>>,
    comparison_dt: Option<f64>,
}

/// Line (1-based) of `key` inside `[section]` (or the top level).
fn locate(source: &str, section: Option<&str>, key: &str) -> Option<usize> {
    let mut current: Option<String> = None;
    for (i, line) in source.lines().enumerate() {
        let t = line.trim();
        if let Some(name) = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            current = Some(name.trim().to_string());
            continue;
        }
        let matches_key = t
            .split('=')
            .next()
            .is_some_and(|k| k.trim() == key && t.contains('='));
        if matches_key && current.as_deref() == section {
            return Some(i + 1);
        }
    }
    None
}

fn line_of(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].matches('\n').count() + 1
}

struct Checker<'a> {
    source: &'a str,
}

impl Checker<'_> {
    fn fail(&self, section: Option<&str>, key: &str, message: impl fmt::Display) -> ConfigError {
        let line = locate(self.source, section, key);
        let key = match section {
            Some(s) => format!("{s}.{key}"),
            None => key.to_string(),
        };
        ConfigError::Invalid {
            line,
            key,
            message: message.to_string(),
        }
    }

    fn positive(&self, section: &str, key: &str, v: f64) -> Result<(), ConfigError> {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(self.fail(Some(section), key, format!("must be positive, got {v}")))
        }
    }

    fn divides(&self, section: &str, key: &str, t_final: f64, dt: f64) -> Result<(), ConfigError> {
        self.positive(section, key, dt)?;
        step_count(t_final, dt)
            .map(|_| ())
            .ok_or_else(|| self.fail(Some(section), key, format!("step {dt} does not divide the horizon {t_final}")))
    }
}

/// Parses configuration text; the case table defaults fill missing keys.
pub fn parse_config_str(source: &str) -> Result<ExperimentConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(source).map_err(|e| ConfigError::Parse {
        line: e.span().map_or(1, |s| line_of(source, s.start)),
        message: e.message().to_string(),
    })?;
    let check = Checker { source };
    let mut cfg = ExperimentConfig::for_case(raw.case.unwrap_or(CaseKind::Manufactured));
    if let Some(o) = raw.output {
        cfg.output = o;
    }
    if let Some(g) = raw.geometry {
        let d = &mut cfg.geometry;
        d.x_min = g.x_min.unwrap_or(d.x_min);
        d.x_max = g.x_max.unwrap_or(d.x_max);
        d.y_bottom = g.y_bottom.unwrap_or(d.y_bottom);
        d.y_interface = g.y_interface.unwrap_or(d.y_interface);
        d.y_top = g.y_top.unwrap_or(d.y_top);
        if !(d.x_min < d.x_max && d.y_bottom < d.y_interface && d.y_interface < d.y_top) {
            return Err(check.fail(Some("geometry"), "y_interface", "rectangles must be non-degenerate and stacked"));
        }
    }
    if let Some(r) = raw.mesh.and_then(|m| m.resolution) {
        if r == 0 {
            return Err(check.fail(Some("mesh"), "resolution", "must be at least 1"));
        }
        cfg.resolution = r;
    }
    if let Some(t) = raw.time {
        cfg.time.t_final = t.t_final.unwrap_or(cfg.time.t_final);
        cfg.time.dt_fluid = t.dt_fluid.unwrap_or(cfg.time.dt_fluid);
        cfg.time.dt_porous = t.dt_porous.unwrap_or(cfg.time.dt_porous);
    }
    check.positive("time", "t_final", cfg.time.t_final)?;
    check.divides("time", "dt_fluid", cfg.time.t_final, cfg.time.dt_fluid)?;
    check.divides("time", "dt_porous", cfg.time.t_final, cfg.time.dt_porous)?;

    let viscous = |section: &str, base: CrossModel, raw: &RawViscous| -> Result<CrossModel, ConfigError> {
        CrossModel::new(
            raw.nu_inf.unwrap_or(base.nu_inf),
            raw.nu_0.unwrap_or(base.nu_0),
            raw.k.unwrap_or(base.k),
            raw.r.unwrap_or(base.r),
        )
        .map_err(|e| check.fail(Some(section), "r", e))
    };
    if let Some(f) = raw.fluid {
        for (name, present) in [("kappa", f.kappa), ("storage", f.storage), ("eta", f.eta), ("p_out", f.p_out)] {
            if present.is_some() {
                return Err(check.fail(Some("fluid"), name, "unknown key in the fluid table"));
            }
        }
        cfg.physics.fluid_viscosity = viscous("fluid", cfg.physics.fluid_viscosity, &f)?;
        cfg.physics.c_bjs = f.c_bjs.unwrap_or(cfg.physics.c_bjs);
        cfg.physics.p_in = f.p_in.unwrap_or(cfg.physics.p_in);
        if !(cfg.physics.c_bjs >= 0.0) {
            return Err(check.fail(Some("fluid"), "c_bjs", "must be non-negative"));
        }
    }
    if let Some(p) = raw.porous {
        for (name, present) in [("c_bjs", p.c_bjs), ("p_in", p.p_in)] {
            if present.is_some() {
                return Err(check.fail(Some("porous"), name, "unknown key in the porous table"));
            }
        }
        cfg.physics.porous_viscosity = viscous("porous", cfg.physics.porous_viscosity, &p)?;
        cfg.physics.kappa = p.kappa.unwrap_or(cfg.physics.kappa);
        cfg.physics.storage = p.storage.unwrap_or(cfg.physics.storage);
        cfg.physics.eta = p.eta.unwrap_or(cfg.physics.eta);
        cfg.physics.p_out = p.p_out.unwrap_or(cfg.physics.p_out);
        check.positive("porous", "kappa", cfg.physics.kappa)?;
        if !(cfg.physics.storage >= 0.0) {
            return Err(check.fail(Some("porous"), "storage", "must be non-negative"));
        }
        if !(cfg.physics.eta >= 0.0) {
            return Err(check.fail(Some("porous"), "eta", "must be non-negative"));
        }
    }
    if let Some(s) = raw.solver {
        let o = &mut cfg.outer;
        o.newton_maxit = s.newton_maxit.unwrap_or(o.newton_maxit);
        o.newton_tol = s.newton_tol.unwrap_or(o.newton_tol);
        o.gmres_tol = s.gmres_tol.unwrap_or(o.gmres_tol);
        o.gmres_maxit = s.gmres_maxit.unwrap_or(o.gmres_maxit);
        o.precondition = s.precondition.unwrap_or(o.precondition);
        let i = &mut cfg.inner;
        i.tol = s.inner_tol.unwrap_or(i.tol);
        i.residual_tol = s.inner_residual_tol.unwrap_or(i.residual_tol);
        i.maxit = s.inner_maxit.unwrap_or(i.maxit);
        cfg.parallel = s.parallel.unwrap_or(cfg.parallel);
        check.positive("solver", "newton_tol", o.newton_tol)?;
        check.positive("solver", "gmres_tol", o.gmres_tol)?;
        check.positive("solver", "inner_tol", i.tol)?;
        check.positive("solver", "inner_residual_tol", i.residual_tol)?;
        for (key, v) in [("newton_maxit", o.newton_maxit), ("gmres_maxit", o.gmres_maxit), ("inner_maxit", i.maxit)] {
            if v == 0 {
                return Err(check.fail(Some("solver"), key, "must be at least 1"));
            }
        }
    }
    if let Some(s) = raw.study {
        let d = &mut cfg.study;
        if let Some(v) = s.resolutions {
            d.resolutions = v;
        }
        if let Some(v) = s.exponents {
            d.exponents = v;
        }
        if let Some(v) = s.dt_coarse {
            d.dt_coarse = v;
        }
        if let Some(v) = s.dt_porous {
            d.dt_porous = v;
        }
        d.time_resolution = s.time_resolution.unwrap_or(d.time_resolution);
        d.time_t_final = s.time_t_final.unwrap_or(d.time_t_final);
        d.gmres_tol = s.gmres_tol.unwrap_or(d.gmres_tol);
        d.reference_dt = s.reference_dt.unwrap_or(d.reference_dt);
        d.reference_resolution = s.reference_resolution.unwrap_or(d.reference_resolution);
        d.comparison_dt = s.comparison_dt.unwrap_or(d.comparison_dt);
    }
    let d = &cfg.study;
    if d.resolutions.contains(&0) || d.time_resolution == 0 || d.reference_resolution == 0 {
        return Err(check.fail(Some("study"), "resolutions", "resolutions must be at least 1"));
    }
    for &r in &d.exponents {
        if !(r > 1.0 && r <= 2.0) {
            return Err(check.fail(Some("study"), "exponents", format!("exponent {r} outside (1, 2]")));
        }
    }
    check.positive("study", "gmres_tol", d.gmres_tol)?;
    check.positive("study", "time_t_final", d.time_t_final)?;
    for &dt in &d.dt_coarse {
        check.divides("study", "dt_coarse", d.time_t_final, dt)?;
        check.divides("study", "dt_coarse", d.time_t_final, dt / 2.0)?;
    }
    for &dt in &d.dt_porous {
        check.divides("study", "dt_porous", cfg.time.t_final, dt)?;
        check.divides("study", "dt_porous", cfg.time.t_final, dt / 2.0)?;
    }
    if !cfg.case.has_exact_solution() {
        check.divides("study", "reference_dt", cfg.time.t_final, d.reference_dt)?;
        check.divides("study", "comparison_dt", cfg.time.t_final, d.comparison_dt)?;
        check.divides("study", "comparison_dt", cfg.time.t_final, d.comparison_dt / 2.0)?;
    }
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let source = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&source)
}
