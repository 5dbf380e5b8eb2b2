//! Acceptance criteria of the solver, one test per criterion. Each test
//! prints a `[PASS]` or `[FAIL]` line with the measured quantities. Failures
//! are only fatal with `ACCEPTANCE_STRICT=1`, so that the report of the
//! whole suite is always produced.

use std::io::Write;
use std::sync::{Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stokes_darcy::interface::{
    apply_psi_prime, evaluate_psi, field_norm, newton_solve, OuterConfig, PsiEvaluation,
};
use stokes_darcy::subdomain::CoupledProblem;
use stokes_darcy::time_grid::{project, PiecewiseConstantField, TimeGrid};
use stokes_darcy_experiments::cases::CaseKind;
use stokes_darcy_experiments::config::ExperimentConfig;
use stokes_darcy_experiments::drivers::{
    build_problem, exact_errors, grid_kinds, initial_guess, reference_errors, run_convergence_space,
    run_convergence_time, run_gmres_count_study, solve, ErrorReport, RunSpec, COARSE_CONFORMING,
    FINE_CONFORMING, NONCONFORMING,
};
use stokes_darcy_experiments::norms::observed_order;

/// Serializes the heavy runs so that wall-clock measurements are not disturbed.
static LOCK: Mutex<()> = Mutex::new(());

fn lock() -> std::sync::MutexGuard<'static, ()> {
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

/// Prints the verdict past the test harness capture.
fn verdict(id: u32, name: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "[{tag}] criterion {id} ({name}): {detail}");
    if std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        assert!(pass, "criterion {id} ({name}) failed: {detail}");
    }
}

fn within(x: f64, lo: f64, hi: f64) -> bool {
    x >= lo && x <= hi
}

fn manufactured() -> ExperimentConfig {
    let mut c = ExperimentConfig::for_case(CaseKind::Manufactured);
    c.parallel = false;
    c
}

fn fmt_orders(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join("/")
}

#[test]
fn criterion_01_spatial_convergence() {
    let _g = lock();
    let mut cfg = manufactured();
    cfg.study.resolutions = vec![8, 16, 32];
    cfg.study.exponents = vec![2.0, 1.5];
    let rows = run_convergence_space(&cfg).expect("spatial sweep");
    let mut pass = true;
    let mut detail = Vec::new();
    for r in [2.0, 1.5] {
        let series: Vec<&ErrorReport> = rows.iter().filter(|x| x.r_fluid == r).collect();
        let ord = |k: usize| -> Vec<f64> {
            series.windows(2).map(|w| observed_order(w[0].columns()[k], w[1].columns()[k])).collect()
        };
        let (l2, h1, pp) = (ord(0), ord(1), ord(6));
        let ok = l2.iter().all(|&o| o >= 2.5)
            && h1.iter().all(|&o| within(o, 1.7, 2.4))
            && pp.iter().all(|&o| within(o, 1.7, 2.4));
        pass &= ok;
        detail.push(format!(
            "r={r}: uf L2 orders {}, uf H1 orders {}, pp L2 orders {}",
            fmt_orders(&l2),
            fmt_orders(&h1),
            fmt_orders(&pp)
        ));
    }
    let e8 = rows.iter().find(|x| x.r_fluid == 2.0 && x.h == 0.125).unwrap().fluid.velocity_l2;
    let ratio = e8 / 9.33e-5;
    pass &= within(ratio, 0.5, 2.0);
    detail.push(format!("uf L2 at h=1/8: {e8:.3e} (ratio {ratio:.2} to 9.33e-5)"));
    verdict(1, "spatial convergence", pass, &detail.join("; "));
}

/// Time study at h = 1/32, T = 0.2, shared by criteria 2, 3 and 10.
fn time_study() -> &'static Vec<ErrorReport> {
    static ROWS: OnceLock<Vec<ErrorReport>> = OnceLock::new();
    ROWS.get_or_init(|| {
        let mut cfg = manufactured();
        cfg.study.dt_coarse = vec![0.2, 0.1, 0.05];
        cfg.study.time_resolution = 32;
        cfg.study.time_t_final = 0.2;
        run_convergence_time(&cfg).expect("time study")
    })
}

fn series<'a>(rows: &'a [ErrorReport], label: &str) -> Vec<&'a ErrorReport> {
    rows.iter().filter(|r| r.label == label).collect()
}

#[test]
fn criterion_02_temporal_convergence() {
    let _g = lock();
    let rows = time_study();
    // the conforming runs with dt in {0.2, 0.1, 0.05}
    let mut conforming: Vec<&ErrorReport> = series(rows, COARSE_CONFORMING);
    conforming.sort_by(|a, b| b.dt_fluid.partial_cmp(&a.dt_fluid).unwrap());
    let names = ["uf L2", "uf H1", "uf H1semi", "pf L2", "up L2", "up Hdiv", "pp L2"];
    let mut pass = true;
    let mut detail = Vec::new();
    for (k, name) in names.iter().enumerate() {
        if k == 2 {
            continue;
        }
        let o: Vec<f64> = conforming
            .windows(2)
            .map(|w| observed_order(w[0].columns()[k], w[1].columns()[k]))
            .collect();
        let ok = o.iter().all(|&x| within(x, 0.8, 1.2));
        pass &= ok;
        detail.push(format!("{name} {}{}", fmt_orders(&o), if ok { "" } else { " (out of band)" }));
    }
    verdict(2, "temporal convergence", pass, &detail.join(", "));
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b
}

fn test2_comparison() -> Vec<ErrorReport> {
    let mut cfg = ExperimentConfig::for_case(CaseKind::PressureDrop);
    cfg.parallel = false;
    let n = 8;
    let spec = |dt_f: f64, dt_p: f64| RunSpec {
        resolution: n,
        t_final: 1.0,
        dt_fluid: dt_f,
        dt_porous: dt_p,
    };
    let reference = solve(&cfg, &spec(0.01, 0.01)).expect("reference run");
    grid_kinds(0.125, true)
        .into_iter()
        .map(|(label, dt_f, dt_p)| {
            let s = spec(dt_f, dt_p);
            let run = solve(&cfg, &s).expect("comparison run");
            let (f, p) = reference_errors(&run, &reference);
            ErrorReport {
                study: "testcase2".into(),
                label: label.into(),
                h: 1.0 / n as f64,
                dt_fluid: dt_f,
                dt_porous: dt_p,
                r_fluid: cfg.physics.fluid_viscosity.r,
                r_porous: cfg.physics.porous_viscosity.r,
                precondition: cfg.outer.precondition,
                fluid: f,
                porous: p,
                orders: None,
                outer_iterations: run.outcome.iterations.len(),
                gmres_iterations: run.outcome.iterations.iter().map(|i| i.gmres_iterations).collect(),
                converged: run.outcome.converged,
                seconds: run.seconds,
            }
        })
        .collect()
}

#[test]
fn criterion_03_nonconforming_sandwich() {
    let _g = lock();
    let rows = time_study();
    let mut pass = true;
    let mut detail = Vec::new();
    for &coarse in &[0.2, 0.1, 0.05] {
        let pick = |label: &str| {
            rows.iter()
                .find(|r| r.label == label && (r.dt_fluid.max(r.dt_porous) - coarse).abs() < 1e-12 || {
                    r.label == label && label == FINE_CONFORMING && (r.dt_fluid - coarse / 2.0).abs() < 1e-12
                })
                .unwrap()
        };
        let (c, m, f) = (pick(COARSE_CONFORMING), pick(NONCONFORMING), pick(FINE_CONFORMING));
        let (mc, mm, mf) = (c.columns(), m.columns(), f.columns());
        let stokes: Vec<f64> = [0, 1, 3].iter().map(|&k| rel(mm[k], mc[k])).collect();
        let darcy: Vec<f64> = [4, 5, 6].iter().map(|&k| rel(mm[k], mf[k])).collect();
        let ok = stokes.iter().chain(&darcy).all(|&x| x <= 0.25);
        pass &= ok;
        detail.push(format!(
            "dt={coarse}: Stokes vs coarse {} , Darcy vs fine {}",
            fmt_orders(&stokes),
            fmt_orders(&darcy)
        ));
    }
    let t2 = test2_comparison();
    let fine = t2.iter().find(|r| r.label == FINE_CONFORMING).unwrap();
    let non = t2.iter().find(|r| r.label == NONCONFORMING).unwrap();
    let coarse = t2.iter().find(|r| r.label == COARSE_CONFORMING).unwrap();
    let d_l2 = rel(non.fluid.velocity_l2, fine.fluid.velocity_l2);
    let d_h1 = rel(non.fluid.velocity_h1, fine.fluid.velocity_h1);
    pass &= d_l2 <= 0.25 && d_h1 <= 0.25;
    detail.push(format!(
        "pressure drop (h=1/8): uf L2 coarse/non/fine {:.2e}/{:.2e}/{:.2e}, uf H1 {:.2e}/{:.2e}/{:.2e}, deviations {:.2}/{:.2}",
        coarse.fluid.velocity_l2,
        non.fluid.velocity_l2,
        fine.fluid.velocity_l2,
        coarse.fluid.velocity_h1,
        non.fluid.velocity_h1,
        fine.fluid.velocity_h1,
        d_l2,
        d_h1
    ));
    verdict(3, "nonconforming sandwich", pass, &detail.join("; "));
}

#[test]
fn criterion_04_gmres_behaviour() {
    let _g = lock();
    let mut cfg = manufactured();
    cfg.study.resolutions = vec![8, 16, 32];
    cfg.study.exponents = vec![2.0];
    cfg.study.gmres_tol = 1e-10;
    let rows = run_gmres_count_study(&cfg).expect("gmres study");
    let counts = |on: bool| -> Vec<usize> {
        rows.iter().filter(|r| r.precondition == on).map(|r| r.gmres_iterations[0]).collect()
    };
    let (off, on) = (counts(false), counts(true));
    let increasing = off.windows(2).all(|w| w[1] > w[0]);
    let ratio = on[2] as f64 / off[2] as f64;
    let pass = increasing && ratio <= 0.6;
    verdict(
        4,
        "GMRES behaviour",
        pass,
        &format!(
            "unpreconditioned {off:?} (strictly increasing: {increasing}), preconditioned {on:?}, ratio at h=1/32 {ratio:.2} (needs <= 0.60)"
        ),
    );
}

fn random_field(problem: &CoupledProblem, rng: &mut ChaCha8Rng) -> PiecewiseConstantField {
    let nl = problem.n_multipliers();
    let slabs = (0..problem.fluid_grid.n_intervals())
        .map(|_| (0..nl).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    PiecewiseConstantField::new(problem.fluid_grid.clone(), slabs).unwrap()
}

fn shifted(a: &PiecewiseConstantField, b: &PiecewiseConstantField, s: f64) -> PiecewiseConstantField {
    let flat: Vec<f64> = a.flatten().iter().zip(b.flatten()).map(|(x, y)| x + s * y).collect();
    PiecewiseConstantField::from_flat(a.grid.clone(), a.width(), &flat).unwrap()
}

fn remainder(base: &PsiEvaluation, moved: &PsiEvaluation, lin: &PiecewiseConstantField, s: f64) -> f64 {
    let r: Vec<f64> = moved
        .residual
        .flatten()
        .iter()
        .zip(base.residual.flatten())
        .zip(lin.flatten())
        .map(|((m, b), l)| m - b - s * l)
        .collect();
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[test]
fn criterion_05_affine_exactness() {
    let _g = lock();
    let cfg = manufactured();
    let problem = build_problem(&cfg, &RunSpec::from_config(&cfg)).unwrap();
    let lambda = initial_guess(&problem);
    let base = evaluate_psi(&problem, &lambda).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let h = random_field(&problem, &mut rng);
        let lin = apply_psi_prime(&problem, &base, &h).unwrap();
        let moved = evaluate_psi(&problem, &shifted(&lambda, &h, 1.0)).unwrap();
        worst = worst.max(remainder(&base, &moved, &lin, 1.0) / field_norm(&lin));
    }
    let config = OuterConfig {
        newton_maxit: 1,
        ..cfg.outer
    };
    let out = newton_solve(&problem, Some(lambda), &config).unwrap();
    let bound = config.gmres_tol * out.initial_psi_norm * 10.0;
    let pass = worst <= 1e-8 && out.final_psi_norm() < bound;
    verdict(
        5,
        "affine exactness",
        pass,
        &format!(
            "max relative remainder {worst:.2e} (<= 1e-8); |Psi| after one iteration {:.2e} (< {bound:.2e})",
            out.final_psi_norm()
        ),
    );
}

#[test]
fn criterion_06_linearization_consistency() {
    let _g = lock();
    let cfg = manufactured().with_exponent(1.5).unwrap();
    let mut problem = build_problem(&cfg, &RunSpec::from_config(&cfg)).unwrap();
    problem.inner.tol = 1e-13;
    problem.inner.residual_tol = 1e-13;
    let lambda = initial_guess(&problem);
    let base = evaluate_psi(&problem, &lambda).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let h = random_field(&problem, &mut rng);
    let lin = apply_psi_prime(&problem, &base, &h).unwrap();
    let rems: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
        .iter()
        .map(|&eps| {
            let moved = evaluate_psi(&problem, &shifted(&lambda, &h, eps)).unwrap();
            remainder(&base, &moved, &lin, eps)
        })
        .collect();
    let ratios = [rems[0] / rems[1], rems[1] / rems[2]];
    let pass = ratios.iter().all(|&r| within(r, 3.3, 4.7));
    verdict(
        6,
        "linearization consistency",
        pass,
        &format!("remainders {:.3e}/{:.3e}/{:.3e}, ratios {}", rems[0], rems[1], rems[2], fmt_orders(&ratios)),
    );
}

fn random_grid(rng: &mut ChaCha8Rng, t: f64) -> TimeGrid {
    let n = rng.gen_range(1..=20);
    let mut pts: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.0..t)).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * t);
    pts.retain(|&p| p > 1e-9 * t && p < t * (1.0 - 1e-9));
    let mut all = vec![0.0];
    all.extend(pts);
    all.push(t);
    TimeGrid::new(all).unwrap()
}

/// Overlap-integration oracle: every target interval against every source one.
fn brute_force(source: &PiecewiseConstantField, target: &TimeGrid) -> Vec<Vec<f64>> {
    let w = source.width();
    (0..target.n_intervals())
        .map(|i| {
            let (a, b) = target.interval(i);
            let mut acc = vec![0.0; w];
            for j in 0..source.grid.n_intervals() {
                let (c, d) = source.grid.interval(j);
                let overlap = (b.min(d) - a.max(c)).max(0.0);
                for (x, v) in acc.iter_mut().zip(&source.slabs[j]) {
                    *x += overlap * v;
                }
            }
            acc.iter().map(|x| x / (b - a)).collect()
        })
        .collect()
}

#[test]
fn criterion_07_projection_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut worst, mut identity, mut constant, mut integral) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..200 {
        let t = rng.gen_range(0.1..10.0);
        let (g1, g2) = (random_grid(&mut rng, t), random_grid(&mut rng, t));
        let width = rng.gen_range(1..4);
        let slabs = (0..g1.n_intervals()).map(|_| (0..width).map(|_| rng.gen_range(-5.0..5.0)).collect()).collect();
        let f = PiecewiseConstantField::new(g1.clone(), slabs).unwrap();
        let p = project(&f, &g2).unwrap();
        let oracle = brute_force(&f, &g2);
        let scale = f.flatten().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (x, y) in p.slabs.iter().flatten().zip(oracle.iter().flatten()) {
            worst = worst.max((x - y).abs() / scale);
        }
        let same = project(&f, &g1).unwrap();
        for (x, y) in same.flatten().iter().zip(f.flatten()) {
            identity = identity.max((x - y).abs() / scale);
        }
        let c = PiecewiseConstantField::constant(g1.clone(), &vec![3.25; width]);
        for v in project(&c, &g2).unwrap().flatten() {
            constant = constant.max((v - 3.25).abs() / 3.25);
        }
        for (a, b) in f.time_integral().iter().zip(p.time_integral()) {
            integral = integral.max((a - b).abs() / (scale * t));
        }
    }
    let pass = worst <= 1e-12 && identity <= 1e-12 && constant <= 1e-12 && integral <= 1e-12;
    verdict(
        7,
        "projection oracle",
        pass,
        &format!(
            "200 grid pairs: oracle {worst:.1e}, identity {identity:.1e}, constants {constant:.1e}, integrals {integral:.1e}"
        ),
    );
}

#[test]
fn criterion_08_interface_mass_conservation() {
    let _g = lock();
    let cfg = manufactured();
    let spec = RunSpec {
        resolution: 16,
        ..RunSpec::from_config(&cfg)
    };
    let run = solve(&cfg, &spec).unwrap();
    let residual = &run.outcome.evaluation.residual;
    let defect = residual.flatten().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let bound = 10.0 * cfg.outer.gmres_tol * run.outcome.initial_psi_norm;
    let pass = run.outcome.converged && defect <= bound;
    let (f, p) = exact_errors(&run);
    verdict(
        8,
        "interface mass conservation",
        pass,
        &format!(
            "largest per-slab weak defect {defect:.2e} (<= {bound:.2e}), converged {}, uf L2 {:.2e}, pp L2 {:.2e}",
            run.outcome.converged, f.velocity_l2, p.pressure_l2
        ),
    );
}

#[test]
fn criterion_09_equilibrium_fixed_point() {
    let _g = lock();
    let c = 0.75;
    let mut cfg = ExperimentConfig::for_case(CaseKind::PressureDrop);
    cfg.physics.p_in = c;
    cfg.physics.p_out = c;
    let spec = RunSpec {
        resolution: 4,
        t_final: 1.0,
        dt_fluid: 0.25,
        dt_porous: 0.5,
    };
    let problem = build_problem(&cfg, &spec).unwrap();
    let lambda = PiecewiseConstantField::constant(problem.fluid_grid.clone(), &vec![c; problem.n_multipliers()]);
    let ev = evaluate_psi(&problem, &lambda).unwrap();
    let psi = field_norm(&ev.residual);
    let nodes_f = 2 * problem.fluid.n_nodes;
    let nodes_p = 2 * problem.porous.n_nodes;
    let speed = ev
        .stokes
        .states
        .iter()
        .flat_map(|s| s[..nodes_f].iter())
        .chain(ev.darcy.states.iter().flat_map(|s| s[..nodes_p].iter()))
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let pass = psi <= 1e-12 && speed <= 1e-12;
    verdict(9, "equilibrium fixed point", pass, &format!("|Psi(c)| = {psi:.2e}, max |u| = {speed:.2e}"));
}

#[test]
fn criterion_10_runtime_ordering() {
    let _g = lock();
    let rows = time_study();
    let mut pass = true;
    let mut detail = Vec::new();
    for &coarse in &[0.2, 0.1, 0.05] {
        let t = |label: &str, dt_f: f64, dt_p: f64| {
            rows.iter()
                .find(|r| r.label == label && (r.dt_fluid - dt_f).abs() < 1e-12 && (r.dt_porous - dt_p).abs() < 1e-12)
                .unwrap()
                .seconds
        };
        let tc = t(COARSE_CONFORMING, coarse, coarse);
        let tn = t(NONCONFORMING, coarse, coarse / 2.0);
        let tf = t(FINE_CONFORMING, coarse / 2.0, coarse / 2.0);
        let ok = tc < tn && tn < tf;
        pass &= ok;
        detail.push(format!("dt={coarse}: {tc:.2}s < {tn:.2}s < {tf:.2}s {}", if ok { "" } else { "(violated)" }));
    }
    verdict(10, "runtime ordering", pass, &detail.join(", "));
}
