//! Config parsing, artifact layout, comparison and the `boltzmann` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use spectral_boltzmann::cli::{compare_tables, run, time_label, Scale, Table, EXIT_ACCEPTANCE, EXIT_OK, EXIT_VALIDATION};
use spectral_boltzmann::config::ScenarioConfig;
use spectral_boltzmann::observables::MOMENT_COLUMNS;
use spectral_boltzmann::reference::bkw_t0;

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("boltzmann-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

fn config(text: &str, out: &Path) -> ScenarioConfig {
    ScenarioConfig::parse_str(text, &[("output.dir".into(), out.display().to_string())]).unwrap()
}

#[test]
fn config_validation() {
    let ok = ScenarioConfig::parse_str("scenario = bkw\n", &[]).unwrap();
    assert!((ok.t_start - bkw_t0()).abs() < 1e-12);
    assert!(ScenarioConfig::parse_str("scenario = maxwell-elastic\nkernel.e = 0.5\n", &[]).is_err());
    assert!(ScenarioConfig::parse_str("scenario = bkw\ngrid.N = 15\n", &[]).is_err());
    assert!(ScenarioConfig::parse_str("scenario = bkw\nno.such.key = 1\n", &[]).is_err());
    assert!(ScenarioConfig::parse_str("scenario = nonsense\n", &[]).is_err());
    let over = ScenarioConfig::parse_str("scenario = bkw\n", &[("grid.N".into(), "12".into())]).unwrap();
    assert_eq!(over.n, 12);
    let round = ScenarioConfig::parse_str(&over.to_text(), &[]).unwrap();
    assert_eq!(round, over);
}

#[test]
fn bkw_artifacts_are_complete_and_reproducible() {
    let t0 = bkw_t0();
    let text = format!(
        "scenario = bkw\ngrid.N = 8\ntime.t_final = {}\ntime.dt = 0.05\noutput.snapshot_times = {t0}, {}\n",
        t0 + 0.2,
        t0 + 0.2
    );
    let a = scratch("bkw-a");
    let b = scratch("bkw-b");
    let out = run(&config(&text, &a)).unwrap();
    run(&config(&text, &b)).unwrap();
    assert!(out.aborted.is_none());
    assert_eq!(header(&a.join("moments.csv")), MOMENT_COLUMNS.join(","));
    assert_eq!(header(&a.join("report.csv")), "t,v,f_computed,f_exact,abs_err,rel_err");
    let slices: Vec<_> = fs::read_dir(a.join("slices")).unwrap().collect();
    assert_eq!(slices.len(), 2);
    let slice = format!("slices/{}.csv", time_label(t0 + 0.2));
    for name in ["moments.csv", "report.csv", slice.as_str()] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    // configs differ only in the output directory
    let strip = |d: &Path| fs::read_to_string(d.join("config.txt")).unwrap().replace(&d.display().to_string(), "");
    assert_eq!(strip(&a), strip(&b));
    let report = Table::read(&a.join("report.csv")).unwrap();
    assert!(report.column("rel_err").unwrap().iter().all(|&r| r.is_finite() && r >= 0.0));
}

#[test]
fn maxwell_moment_series_and_slowdown_mq() {
    let d = scratch("maxwell");
    run(&config("scenario = maxwell-elastic\ngrid.N = 8\ntime.t_final = 0.2\n", &d)).unwrap();
    assert_eq!(header(&d.join("series.csv")), "t,M11,M12,M22,M33,r1,r2");
    assert_eq!(header(&d.join("reference.csv")), "t,M11,M12,M22,M33,r1,r2");
    assert_eq!(header(&d.join("report.csv")), "t,quantity,computed,exact,abs_err,rel_err");

    let d = scratch("slowdown");
    run(&config("scenario = slowdown-const-T\ngrid.N = 8\ntime.t_final = 0.5\n", &d)).unwrap();
    assert_eq!(header(&d.join("mq.csv")), "t,q=1.0,q=1.3,q=1.45,q=1.5,q=1.55,q=1.7,q=2.0");
    assert!(d.join("report.csv").exists());
}

#[test]
fn compare_flags_failing_rows() {
    let mut a = Table::new(["t", "x"]);
    let mut b = Table::new(["t", "x"]);
    for (i, (x, y)) in [(1.0, 1.0), (2.0, 2.1), (3.0, 3.0)].into_iter().enumerate() {
        a.push(vec![i as f64, x]);
        b.push(vec![i as f64, y]);
    }
    let rep = compare_tables(&a, &b, 0.01, |_| Scale::Pointwise).unwrap();
    assert!(!rep.passed());
    assert_eq!(rep.columns[0].failed_rows, vec![1]);
    assert!(compare_tables(&a, &b, 0.05, |_| Scale::Pointwise).unwrap().passed());

    let mut shifted = b.clone();
    shifted.rows[2][0] = 2.5;
    assert!(compare_tables(&a, &shifted, 1.0, |_| Scale::Pointwise).is_err());
}

fn binary(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_boltzmann")).args(args).output().unwrap().status.code().unwrap()
}

#[test]
fn binary_exit_codes() {
    let d = scratch("bin");
    let p = |n: &str| d.join(n).display().to_string();
    fs::write(d.join("a.csv"), "t,x\n0,1.0\n1,2.0\n").unwrap();
    fs::write(d.join("b.csv"), "t,x\n0,1.0\n1,2.0000001\n").unwrap();
    fs::write(d.join("c.csv"), "t,x\n0,1.0\n1,3.0\n").unwrap();
    assert_eq!(binary(&["compare", &p("a.csv"), &p("b.csv"), "--tol", "1e-3"]), EXIT_OK);
    assert_eq!(binary(&["compare", &p("a.csv"), &p("c.csv"), "--tol", "1e-3"]), EXIT_ACCEPTANCE);
    assert_eq!(binary(&["compare", &p("a.csv"), &p("missing.csv"), "--tol", "1e-3"]), EXIT_VALIDATION);

    fs::write(d.join("odd.cfg"), "scenario = bkw\ngrid.N = 9\n").unwrap();
    assert_eq!(binary(&["solve", &p("odd.cfg"), "--out", &p("odd")]), EXIT_VALIDATION);
    fs::write(d.join("bkw.cfg"), "scenario = bkw\ngrid.N = 8\n").unwrap();
    let t_final = format!("time.t_final={}", bkw_t0() + 0.1);
    assert_eq!(binary(&["solve", &p("bkw.cfg"), "--set", &t_final, "--out", &p("bkw")]), EXIT_OK);
    assert!(d.join("bkw").join("report.csv").exists());
}
