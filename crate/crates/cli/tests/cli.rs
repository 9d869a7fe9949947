//! End-to-end checks of the command-line harness: exit codes, CSV shape,
//! determinism, and config precedence.

use std::path::Path;
use std::process::{Command, Output};

fn tracedown() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tracedown"))
}

fn run(args: &[&str]) -> Output {
    tracedown()
        .args(args)
        .env_remove("TRACEDOWN_CONFIG")
        .output()
        .expect("binary should run")
}

fn data_rows(csv: &str) -> usize {
    csv.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .count()
        .saturating_sub(1) // column header
}

#[test]
fn every_subcommand_passes_with_defaults() {
    for args in [
        vec!["naive-distance"],
        vec!["weighted-distance"],
        vec!["erasure"],
        vec!["divisibility", "pdl"],
        vec!["divisibility", "negative-rate-demo"],
    ] {
        let out = run(&args);
        assert!(
            out.status.success(),
            "{args:?} failed:\n{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn csv_layout_and_row_count() {
    let out = run(&["naive-distance"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("# tracedown v"));
    assert!(csv.contains("# gate: "));
    assert!(csv.contains("t,naive_dist_simulated,naive_dist_closed_form,abs_error"));
    assert_eq!(data_rows(&csv), 301);

    // t = 0 row carries the 1/sqrt(2) value in both columns
    let first_data = csv
        .lines()
        .find(|l| l.starts_with("0.00000000000e0,"))
        .expect("t = 0 row");
    assert!(first_data.contains("7.07106781187e-1"));
}

#[test]
fn identical_config_gives_byte_identical_output() {
    let dir = std::env::temp_dir().join(format!("tracedown-det-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    for (path, _) in [(&a, 0), (&b, 1)] {
        let out = run(&[
            "dynamics",
            "--steps",
            "101",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap(),
        "reruns must be byte-identical"
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn failing_gate_yields_nonzero_exit() {
    // an impossible agreement tolerance trips the closed-form gate
    let out = run(&["naive-distance", "--tol", "1e-20"]);
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("FAIL"), "stderr was: {stderr}");
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = std::env::temp_dir().join(format!("tracedown-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "steps = 11\ngamma_h = 2.5 # overriding comment\n").unwrap();

    // file value applies
    let out = run(&["naive-distance", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(data_rows(&csv), 11);
    assert!(csv.contains("# gamma_h = 2.50000000000e0"));

    // flag wins over the file
    let out = run(&[
        "naive-distance",
        "--config",
        cfg.to_str().unwrap(),
        "--steps",
        "21",
    ]);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(data_rows(&csv), 21);

    // the environment variable names the fallback config file
    let out = tracedown()
        .args(["naive-distance"])
        .env("TRACEDOWN_CONFIG", cfg.to_str().unwrap())
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(data_rows(&csv), 11);

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn same_states_override_zeroes_the_series() {
    let out = run(&["naive-distance", "--same-states", "--steps", "5"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    for line in csv
        .lines()
        .filter(|l| !l.starts_with('#') && l.contains(','))
    {
        if line.starts_with('t') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let simulated: f64 = fields[1].parse().unwrap();
        assert!(simulated.abs() < 1e-12);
    }
}

#[test]
fn entanglement_and_depol_divisibility_pass() {
    let dir = std::env::temp_dir().join(format!("tracedown-ent-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let ent = dir.join("ent.csv");

    let out = run(&[
        "entanglement",
        "--steps",
        "241",
        "--out",
        ent.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "entanglement failed: {}",
        String::from_utf8_lossy(&out.stdout)
    );
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(report.contains("death time: "));
    assert!(report.contains("revival detected: false"));
    assert!(Path::new(&ent).exists());

    let out = run(&["divisibility", "pdl-depol", "--steps", "101"]);
    assert!(out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("verdict: CP-divisible"), "stderr: {stderr}");

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn reversed_rates_are_recorded_without_a_monotonicity_gate() {
    // gamma_H < gamma_V: the distances decrease; only the closed-form
    // agreement is gated
    let out = run(&[
        "weighted-distance",
        "--gamma-h",
        "1",
        "--gamma-v",
        "2",
        "--steps",
        "51",
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(
        stderr.contains("closed-form agreement: pass"),
        "stderr: {stderr}"
    );
}

#[test]
fn entanglement_without_depolarization_reports_no_death() {
    let out = run(&["entanglement", "--lambda", "0", "--steps", "121"]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("death time: none"), "stderr: {stderr}");
    assert!(stderr.contains("revival detected: false"));
}
