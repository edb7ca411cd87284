use std::path::Path;
use std::process::{Command, Output};

fn nonlocal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonlocal")).args(args).output().expect("binary runs")
}

fn write_spec(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn field<'a>(report: &'a str, key: &str) -> &'a str {
    report
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(" = ")))
        .unwrap_or_else(|| panic!("no `{key}` in report:\n{report}"))
}

#[test]
fn classify_three_quarter_laplacian_is_affine() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "frac.spec",
        "[operator]\nkind = fractional_laplacian\ndim = 2\ns = 0.75\n\n[job]\nkind = classify\n",
    );
    let out = nonlocal(&["classify", "--spec", &spec]);
    assert_eq!(out.status.code(), Some(0));
    let report = String::from_utf8(out.stdout).unwrap();
    assert_eq!(field(&report, "conclusion"), "affine");
    assert_eq!(field(&report, "zero_set.g_subset_origin"), "true");
    assert!(field(&report, "zero_set.certificate").contains("evidence, not proof"));
}

#[test]
fn positivity_failure_exits_with_status_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "cos2.spec",
        "[operator]\nkind = anisotropic\ndim = 2\ns = 0.5\nanisotropy = [0, 0, 0, 1, 0]\n\n[job]\nkind = classify\n",
    );
    let out = nonlocal(&["classify", "--spec", &spec]);
    assert_eq!(out.status.code(), Some(2));
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(field(&report, "error").contains("positivity"));
}

#[test]
fn duality_on_the_line_writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "dual.spec",
        "[operator]\nkind = fractional_laplacian\ndim = 1\ns = 0.5\n\n[job]\nkind = duality\n",
    );
    let report_path = dir.path().join("report.txt");
    let out = nonlocal(&["duality", "--spec", &spec, "--out", report_path.to_str().unwrap(), "--threads", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let report = std::fs::read_to_string(report_path).unwrap();
    let err: f64 = field(&report, "max_rel_err").parse().unwrap();
    assert!(err <= 1e-3, "{err}");
    assert_eq!(field(&report, "grid"), "2048");
}

#[test]
fn small_duality_box_is_a_tolerance_failure() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "dual.spec",
        "[operator]\nkind = fractional_laplacian\ndim = 1\ns = 0.5\n\n[job]\nkind = duality\n\n[options]\nhalf_width = 5\n",
    );
    let out = nonlocal(&["duality", "--spec", &spec, "--grid", "512"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stdout).unwrap().contains("boundary leakage"));
}

#[test]
fn parse_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "bad.spec",
        "[operator]\nkind = fractional_laplacian\ndim = 1\ns = 1.5\ncolour = red\n\n[job]\nkind = classify\n",
    );
    let out = nonlocal(&["classify", "--spec", &spec]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 4") && err.contains("(0, 1)"), "{err}");
    assert!(err.contains("line 5") && err.contains("unknown key `colour`"), "{err}");
}

#[test]
fn symbol_job_cross_checks_quadrature() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "rel.spec",
        "[operator]\nkind = relativistic\ndim = 1\ns = 0.5\n\n[job]\nkind = symbol\npoints = [[0.5], [2.0]]\n",
    );
    let out = nonlocal(&["symbol", "--spec", &spec]);
    assert_eq!(out.status.code(), Some(0));
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(field(&report, "value.2").contains("re 1.236067977"), "{report}");
}

#[test]
fn check_verifies_a_helmholtz_witness() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "helm.spec",
        "[operator]\nkind = fractional_laplacian\ndim = 1\ns = 0.4\n\n[polynomial]\ncoef[0] = -1\n\n[job]\nkind = check\n\n[candidate]\ntrig = [[1, 1, 0]]\n",
    );
    let out = nonlocal(&["check", "--spec", &spec]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report = String::from_utf8(out.stdout).unwrap();
    assert_eq!(field(&report, "candidate.verified"), "true");
    assert_eq!(field(&report, "decay_bound.passed"), "true");
}
