use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::{error, info};
use stokes_darcy_experiments::cases::CaseKind;
use stokes_darcy_experiments::config::{parse_config, ExperimentConfig};
use stokes_darcy_experiments::drivers::{
    exact_errors, net_interface_flux, run_convergence_space, run_convergence_time, run_gmres_count_study,
    run_testcase2, solve, ErrorReport, RunSpec,
};
use stokes_darcy_experiments::report::{write_history, write_reports_file, write_state_vtk};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Debug, Parser)]
#[command(version, about = "Space-time domain decomposition experiments for coupled Stokes-Darcy flow")]
struct Cli {
    /// Configuration file (TOML); defaults of the selected case otherwise.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the configuration.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// GMRES preconditioner.
    #[arg(long, global = true)]
    precond: Option<Switch>,
    /// Cap on outer Newton iterations.
    #[arg(long, global = true)]
    newton_iters: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Errors and orders under mesh refinement (manufactured case).
    ConvergenceSpace,
    /// Conforming and nonconforming time grids (manufactured case).
    ConvergenceTime,
    /// GMRES iteration counts with and without preconditioner.
    GmresStudy,
    /// Pressure-driven flow and its discontinuous-parameter variant.
    Testcase2,
    /// A single run described by a configuration file.
    Run { config: PathBuf },
}

fn load(cli: &Cli, path: Option<&Path>, case: CaseKind) -> Result<ExperimentConfig, String> {
    let mut cfg = match path {
        Some(p) => parse_config(p).map_err(|e| format!("{}: {e}", p.display()))?,
        None => ExperimentConfig::for_case(case),
    };
    if let Some(out) = &cli.out {
        cfg.output = out.clone();
    }
    if let Some(p) = cli.precond {
        cfg.outer.precondition = matches!(p, Switch::On);
    }
    if let Some(k) = cli.newton_iters {
        if k == 0 {
            return Err("--newton-iters must be at least 1".into());
        }
        cfg.outer.newton_maxit = k;
    }
    fs::create_dir_all(&cfg.output).map_err(|e| format!("{}: {e}", cfg.output.display()))?;
    Ok(cfg)
}

fn save(cfg: &ExperimentConfig, name: &str, rows: &[ErrorReport]) -> Result<(), String> {
    let path = cfg.output.join(name);
    write_reports_file(&path, rows).map_err(|e| format!("{}: {e}", path.display()))?;
    info!("wrote {}", path.display());
    Ok(())
}

fn run(cli: &Cli) -> Result<(), String> {
    let err = |e: stokes_darcy_experiments::drivers::DriverError| e.to_string();
    match &cli.command {
        Command::ConvergenceSpace => {
            let cfg = load(cli, cli.config.as_deref(), CaseKind::Manufactured)?;
            save(&cfg, "convergence_space.csv", &run_convergence_space(&cfg).map_err(err)?)
        }
        Command::ConvergenceTime => {
            let cfg = load(cli, cli.config.as_deref(), CaseKind::Manufactured)?;
            save(&cfg, "convergence_time.csv", &run_convergence_time(&cfg).map_err(err)?)
        }
        Command::GmresStudy => {
            let cfg = load(cli, cli.config.as_deref(), CaseKind::Manufactured)?;
            save(&cfg, "gmres_study.csv", &run_gmres_count_study(&cfg).map_err(err)?)
        }
        Command::Testcase2 => {
            let cases: Vec<ExperimentConfig> = match &cli.config {
                Some(p) => vec![load(cli, Some(p), CaseKind::PressureDrop)?],
                None => vec![
                    load(cli, None, CaseKind::PressureDrop)?,
                    load(cli, None, CaseKind::Discontinuous)?,
                ],
            };
            for cfg in cases {
                let out = run_testcase2(&cfg).map_err(err)?;
                let name = format!("{}.csv", out.rows[0].study);
                save(&cfg, &name, &out.rows)?;
                let r = &out.reference;
                let ev = &r.outcome.evaluation;
                info!(
                    "reference net flux into the porous medium at T: {:.6e}",
                    net_interface_flux(&r.problem.fluid, ev.stokes.final_state())
                );
                let stem = &out.rows[0].study;
                dump(&cfg, stem, r)?;
            }
            Ok(())
        }
        Command::Run { config } => {
            let cfg = load(cli, Some(config), CaseKind::Manufactured)?;
            let spec = RunSpec::from_config(&cfg);
            let r = solve(&cfg, &spec).map_err(err)?;
            let path = cfg.output.join("history.csv");
            let file = fs::File::create(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            write_history(file, &r.outcome).map_err(|e| e.to_string())?;
            if cfg.case.has_exact_solution() {
                let (f, p) = exact_errors(&r);
                println!("fluid  {f:?}\nporous {p:?}");
            }
            dump(&cfg, "run", &r)
        }
    }
}

fn dump(cfg: &ExperimentConfig, stem: &str, r: &stokes_darcy_experiments::drivers::Run) -> Result<(), String> {
    let ev = &r.outcome.evaluation;
    for (suffix, space, state) in [
        ("fluid", &r.problem.fluid, ev.stokes.final_state()),
        ("porous", &r.problem.porous, ev.darcy.final_state()),
    ] {
        let path = cfg.output.join(format!("{stem}_{suffix}.vtk"));
        write_state_vtk(&path, space, state).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            ExitCode::FAILURE
        }
    }
}
