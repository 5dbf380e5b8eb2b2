use stokes_darcy_experiments::cases::CaseKind;
use stokes_darcy_experiments::config::ExperimentConfig;
use stokes_darcy_experiments::drivers::run_convergence_space;
use stokes_darcy_experiments::report::write_reports;

fn csv_without_timings(cfg: &ExperimentConfig) -> Vec<Vec<String>> {
    let rows = run_convergence_space(cfg).unwrap();
    let mut buf = Vec::new();
    write_reports(&mut buf, &rows).unwrap();
    let mut reader = csv::Reader::from_reader(buf.as_slice());
    let header = reader.headers().unwrap().clone();
    let skip = header.iter().position(|h| h == "seconds").expect("timing column");
    reader
        .records()
        .map(|r| r.unwrap().iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, v)| v.to_string()).collect())
        .collect()
}

#[test]
fn identical_configs_give_identical_tables() {
    let mut cfg = ExperimentConfig::for_case(CaseKind::Manufactured);
    cfg.study.resolutions = vec![2, 4];
    cfg.study.exponents = vec![2.0, 1.5];
    let serial = csv_without_timings(&cfg);
    cfg.parallel = false;
    let again = csv_without_timings(&cfg);
    assert_eq!(serial.len(), 4);
    assert_eq!(serial, again);
}
