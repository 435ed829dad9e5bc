//! End-to-end runs of the `taugeo` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use taugeo::report::Report;
use taugeo_core::algebra::Algebra;
use taugeo_core::presets::build_qplane;
use taugeo_core::Status;

fn taugeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_taugeo")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const QPLANE_SMALL: &str = "preset = \"qplane\"\nseed = 42\nsamples = 12\ntables = 2\n";

fn verify_to_json(config: &Path, extra: &[&str], out: &Path) -> (Output, Report) {
    let mut args = vec!["verify", config.to_str().unwrap(), "--output", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let output = taugeo(&args);
    let report = Report::load(out).unwrap_or_else(|e| panic!("{e}\n{}", stderr(&output)));
    (output, report)
}

#[test]
fn qplane_demo_prints_closed_form_curvature() {
    let out = taugeo(&["demo", "qplane", "--n", "1", "--m", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("Curv(X₁,X₂)(xye₁) = −q³x²y²e₁ − q²[1]_q xy e₂"), "{}", stdout(&out));
}

#[test]
fn matrix_demo_reports_zero_rank_one_curvature() {
    let out = taugeo(&["demo", "matrix", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("curvature identically 0"));
    let float = taugeo(&["demo", "matrix", "--n", "3", "--scalar", "float"]);
    assert_eq!(float.status.code(), Some(0), "{}", stderr(&float));
}

#[test]
fn sphere_demo_prints_y_table_and_differentials() {
    let out = taugeo(&["demo", "sphere", "--solve", "--samples", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    for needle in ["Y1(a) =", "Y3(cstar) =", "d(a) =", "d(c) =", "bimodule relations eta_a f = K^n_a(f) eta_a: hold"] {
        assert!(text.contains(needle), "missing {needle}:\n{text}");
    }
}

#[test]
fn missing_arguments_and_empty_config_are_usage_errors() {
    assert_eq!(taugeo(&[]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let empty = write_config(dir.path(), "empty.toml", "");
    let out = taugeo(&["verify", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("missing field `preset`"), "{}", stderr(&out));
}

#[test]
fn unknown_config_keys_report_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "bad.toml", "preset = \"qplane\"\nsamples = 5\nsampels = 6\n");
    let out = taugeo(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("line 3") && err.contains("unknown field `sampels`"), "{err}");
}

#[test]
fn qplane_suite_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "q.toml", QPLANE_SMALL);
    let (out1, first) = verify_to_json(&config, &[], &dir.path().join("a.json"));
    let (_, second) = verify_to_json(&config, &[], &dir.path().join("b.json"));
    assert_eq!(out1.status.code(), Some(0));
    assert_eq!(first.summary.failed, 0);
    assert_eq!(first.summary.total, first.summary.passed);
    assert_eq!(first.to_json_without_timing(), second.to_json_without_timing());
    let names: Vec<_> = first.checks.iter().map(|c| c.name.clone()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(names, sorted, "checks sorted by name, each exactly once");
}

#[test]
fn corrupted_gamma_gives_targeted_failures_and_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "q.toml", QPLANE_SMALL);
    let (out, report) = verify_to_json(&config, &["--inject-corrupt-gamma"], &dir.path().join("r.json"));
    assert_eq!(out.status.code(), Some(1));
    let failed: Vec<_> = report.checks.iter().filter(|c| c.status == Status::Fail).collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|c| c.witness.as_deref().is_some_and(|w| !w.is_empty())));
    assert!(failed.iter().all(|c| c.name.contains("curvature") || c.name.contains("torsion") || c.name.contains("metric")));
    // The witness renders elements in the canonical syntax.
    let (alg, _) = build_qplane().unwrap();
    let expected = alg.render(&alg.parse("q*x*y").unwrap());
    let curvature = failed.iter().find(|c| c.name == "qplane.curvature").expect("curvature check fails");
    assert!(curvature.witness.as_deref().unwrap().contains(&expected), "{:?}", curvature.witness);
}

#[test]
fn sphere_checks_skip_without_table() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "s.toml", "preset = \"sphere\"\nsamples = 10\n");
    let (out, report) = verify_to_json(&config, &[], &dir.path().join("r.json"));
    assert_eq!(out.status.code(), Some(0));
    assert!(report.summary.total > 0);
    assert_eq!(report.summary.skipped, report.summary.total);
    assert!(report.checks.iter().all(|c| c.detail.contains("--solve")));
    let (out, report) = verify_to_json(&config, &["--solve"], &dir.path().join("solved.json"));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report.summary.passed, report.summary.total);
}

#[test]
fn report_subcommand_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "m.toml", "preset = \"matrix\"\nsamples = 8\ntables = 1\n[matrix]\nsize = 2\n");
    let json = dir.path().join("r.json");
    let (out, report) = verify_to_json(&config, &[], &json);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let again = dir.path().join("again.json");
    let out = taugeo(&["report", json.to_str().unwrap(), "--format", "json", "--output", again.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(Report::load(&again).unwrap(), report);
    let text = taugeo(&["report", json.to_str().unwrap(), "--format", "text"]);
    let s = &report.summary;
    assert!(stdout(&text).contains(&format!("summary: {} total, {} passed, {} failed, {} skipped", s.total, s.passed, s.failed, s.skipped)));
}

#[test]
fn config_directory_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_taugeo"))
        .args(["verify", "shiftline.toml", "--samples", "10"])
        .env("TAUGEO_CONFIG_DIR", configs_dir())
        .current_dir(std::env::temp_dir())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("shiftline.difference"));
}

#[test]
fn shipped_configs_parse() {
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        taugeo::RunConfig::load(&path).unwrap_or_else(|e| panic!("{e}"));
    }
}
