//! End-to-end tests for the `qstancu` binary: exit codes, output files, and
//! byte-identical reruns.

use std::path::Path;
use std::process::Command;

fn run(config: &str, cmd: &str, out: &Path) -> std::process::Output {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("config.toml");
    std::fs::write(&cfg_path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_qstancu"))
        .arg(cmd)
        .arg("--config")
        .arg(&cfg_path)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(out: &std::process::Output) -> i32 {
    out.status.code().expect("no signal")
}

const MOMENTS_CFG: &str = r#"
[operator]
n = [5, 10]
q = [0.5, 0.9]
alpha = 1.0
beta = 2.0

[domain]
max = 2.0
step = 0.5
"#;

#[test]
fn moments_happy_path_and_byte_identical_rerun() {
    let out1 = tempfile::tempdir().unwrap();
    let out2 = tempfile::tempdir().unwrap();
    let r1 = run(MOMENTS_CFG, "moments", out1.path());
    assert_eq!(code(&r1), 0, "stderr: {}", String::from_utf8_lossy(&r1.stderr));
    let stdout = String::from_utf8_lossy(&r1.stdout);
    assert!(stdout.contains("PASS"), "stdout: {stdout}");

    let csv1 = std::fs::read(out1.path().join("moments.csv")).unwrap();
    let text = String::from_utf8(csv1.clone()).unwrap();
    assert!(text.starts_with('#'), "provenance comment first");
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(header.split(',').count() >= 4, "header row: {header}");

    let r2 = run(MOMENTS_CFG, "moments", out2.path());
    assert_eq!(code(&r2), 0);
    let csv2 = std::fs::read(out2.path().join("moments.csv")).unwrap();
    assert_eq!(csv1, csv2, "reruns must be byte-identical");
}

#[test]
fn invalid_params_exit_2() {
    // alpha > beta is rejected at config validation
    let cfg = MOMENTS_CFG.replace("alpha = 1.0", "alpha = 3.0");
    let out = tempfile::tempdir().unwrap();
    let r = run(&cfg, "moments", out.path());
    assert_eq!(code(&r), 2, "stderr: {}", String::from_utf8_lossy(&r.stderr));
}

#[test]
fn unknown_field_exit_2() {
    let cfg = format!("{MOMENTS_CFG}\n[run]\nbogus = 1\n");
    let out = tempfile::tempdir().unwrap();
    let r = run(&cfg, "moments", out.path());
    assert_eq!(code(&r), 2);
}

#[test]
fn missing_config_exit_2() {
    let out = tempfile::tempdir().unwrap();
    let r = Command::new(env!("CARGO_BIN_EXE_qstancu"))
        .args(["moments", "--config", "/nonexistent/x.toml", "--out"])
        .arg(out.path())
        .output()
        .unwrap();
    assert_eq!(code(&r), 2);
}

#[test]
fn unattainable_tolerance_exit_1() {
    let cfg = format!("{MOMENTS_CFG}\n[run]\ntolerance = 1e-30\n");
    let out = tempfile::tempdir().unwrap();
    let r = run(&cfg, "moments", out.path());
    assert_eq!(code(&r), 1, "stderr: {}", String::from_utf8_lossy(&r.stderr));
    let stdout = String::from_utf8_lossy(&r.stdout);
    assert!(stdout.contains("FAIL"), "stdout: {stdout}");
    // outputs are still written on tolerance failure
    assert!(out.path().join("moments.csv").exists());
}

#[test]
fn rates_false_lipschitz_declaration_exit_3() {
    let cfg = r#"
[operator]
n = [10]
q = [0.9]
alpha = 0.0
beta = 0.0

[domain]
max = 2.0
step = 0.5

[run]
function = "sqrt"

[lipschitz]
m = 1.0
a = 1.0
"#;
    let out = tempfile::tempdir().unwrap();
    let r = run(cfg, "rates", out.path());
    assert_eq!(code(&r), 3, "stderr: {}", String::from_utf8_lossy(&r.stderr));
}

#[test]
fn rates_happy_path() {
    let cfg = r#"
[operator]
n = [10, 20]
q = [0.9]
alpha = 0.0
beta = 0.0

[domain]
max = 2.0
step = 0.25

[run]
function = "sqrt"

[lipschitz]
m = 1.0
a = 0.5
"#;
    let out = tempfile::tempdir().unwrap();
    let r = run(cfg, "rates", out.path());
    assert_eq!(code(&r), 0, "stderr: {}", String::from_utf8_lossy(&r.stderr));
    let text = std::fs::read_to_string(out.path().join("rates.csv")).unwrap();
    assert!(text.contains("modulus") && text.contains("lipschitz"), "{text}");
}

#[test]
fn converge_requires_qseq() {
    let out = tempfile::tempdir().unwrap();
    let r = run(MOMENTS_CFG, "converge", out.path());
    assert_eq!(code(&r), 2);
}

#[test]
fn converge_happy_path_with_seed_override() {
    let cfg = r#"
[operator]
qseq = "square-exceptional"
alpha = 0.0
beta = 0.0

[domain]
max = 2.0
step = 0.1

[run]
function = "x_over_1px"
n_max = 120
epsilons = [0.05]
"#;
    let out = tempfile::tempdir().unwrap();
    let r = Command::new(env!("CARGO_BIN_EXE_qstancu"))
        .arg("converge")
        .arg("--config")
        .arg({
            let p = out.path().join("config.toml");
            std::fs::write(&p, cfg).unwrap();
            p
        })
        .arg("--out")
        .arg(out.path())
        .args(["--seed", "7", "--threads", "2"])
        .output()
        .unwrap();
    assert_eq!(code(&r), 0, "stderr: {}", String::from_utf8_lossy(&r.stderr));
    for f in ["converge_errors.csv", "converge_density.csv", "converge_plot.svg"] {
        assert!(out.path().join(f).exists(), "{f} missing");
    }
    let svg = std::fs::read_to_string(out.path().join("converge_plot.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn bivariate_happy_path() {
    let cfg = r#"
[operator]
q = [0.9]
alpha = 0.0
beta = 0.0

[domain]
max = 2.0
step = 0.1

[run]
function = "e1"

[bivariate]
n1 = [8]
n2 = [8]
points = [[0.5, 0.5], [1.0, 1.0]]
function = "xy"
"#;
    let out = tempfile::tempdir().unwrap();
    let r = run(cfg, "bivariate", out.path());
    assert_eq!(code(&r), 0, "stderr: {}", String::from_utf8_lossy(&r.stderr));
    assert!(out.path().join("bivariate_moments.csv").exists());
    assert!(out.path().join("bivariate_bounds.csv").exists());
}

#[test]
fn bivariate_without_section_exit_2() {
    let out = tempfile::tempdir().unwrap();
    let r = run(MOMENTS_CFG, "bivariate", out.path());
    assert_eq!(code(&r), 2);
}
