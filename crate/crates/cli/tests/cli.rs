use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use riskforge::fixtures::{self, ModelBuilder};
use riskforge::serialize_model;
use tempfile::TempDir;

fn riskforge(args: &[&str]) -> Output {
    riskforge_env(args, "never")
}

fn riskforge_env(args: &[&str], color: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riskforge"))
        .args(args)
        .env("RISKFORGE_COLOR", color)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn camera(dir: &Path) -> String {
    write(
        dir,
        "camera.json",
        &serialize_model(&fixtures::camera_model()),
    )
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn with_orphan_component() -> String {
    let mut model = fixtures::camera_model();
    model.components.push(riskforge::model::Component {
        id: riskforge::ElementId::new("c_spare").unwrap(),
        name: "Spare connector".into(),
        concept: None,
    });
    serialize_model(&model)
}

#[test]
fn validate_clean_model() {
    let dir = TempDir::new().unwrap();
    let out = riskforge(&["validate", &camera(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("0 error(s), 0 warning(s)"));
}

#[test]
fn warnings_pass_unless_strict() {
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "orphan.json", &with_orphan_component());
    let out = riskforge(&["validate", &path]);
    assert_eq!(out.status.code(), Some(0));
    let err = stderr(&out);
    assert!(err.contains("warning: [OrphanComponent]"), "{err}");
    assert!(err.contains("orphan.json:"), "{err}");

    let strict = riskforge(&["validate", &path, "--strict"]);
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn strict_analyze_keeps_content() {
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "orphan.json", &with_orphan_component());
    let relaxed = riskforge(&["analyze", &path]);
    let strict = riskforge(&["analyze", &path, "--strict"]);
    assert_eq!(relaxed.status.code(), Some(0));
    assert_eq!(strict.status.code(), Some(1));
    assert_eq!(relaxed.stdout, strict.stdout);
}

#[test]
fn malformed_json_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "bad.json", "{\n  \"meta\": \n");
    let out = riskforge(&["validate", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bad.json:3:1"), "{}", stderr(&out));
}

#[test]
fn missing_file_is_usage_error() {
    let out = riskforge(&["validate", "/nonexistent/model.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dangling_reference_is_validation_error() {
    let dir = TempDir::new().unwrap();
    let text = serialize_model(&fixtures::camera_model()).replacen(
        "\"c_cam\"\n    ]",
        "\"c_gone\"\n    ]",
        1,
    );
    let path = write(dir.path(), "dangling.json", &text);
    let out = riskforge(&["validate", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("DanglingReference"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn unrated_component_fails_analysis() {
    let dir = TempDir::new().unwrap();
    let mut model = fixtures::camera_model();
    model.failure_modes[0].control = None;
    let path = write(dir.path(), "unrated.json", &serialize_model(&model));
    let out = riskforge(&["analyze", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).is_empty());
    assert!(stderr(&out).contains("MissingDetectionRating"));
}

#[test]
fn usage_errors() {
    assert_eq!(riskforge(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(riskforge(&["analyze"]).status.code(), Some(2));
    assert_eq!(
        riskforge(&["analyze", "m.json", "--bogus"]).status.code(),
        Some(2)
    );
    assert_eq!(
        riskforge(&["rank", "occurrence", "1:20"]).status.code(),
        Some(2)
    );
    assert_eq!(
        riskforge(&["rank", "occurrence", "0/20"]).status.code(),
        Some(2)
    );
    assert_eq!(
        riskforge(&["rank", "severity", "system", "Tolerate"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        riskforge(&["rank", "severity", "component", "Tolerate"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn analyze_writes_five_files() {
    let dir = TempDir::new().unwrap();
    let model = camera(dir.path());
    for (format, ext) in [("csv", "csv"), ("md", "md"), ("json", "json")] {
        let out_dir: PathBuf = dir.path().join(format);
        let out = riskforge(&[
            "analyze",
            &model,
            "--out",
            out_dir.to_str().unwrap(),
            "--format",
            format,
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        assert!(stdout(&out).is_empty());
        let mut names: Vec<String> = fs::read_dir(&out_dir)
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        names.sort();
        let expected: Vec<String> = [
            "fmea_component",
            "fmea_function",
            "fmea_requirement",
            "function_priority",
            "requirement_priority",
        ]
        .iter()
        .map(|n| format!("{n}.{ext}"))
        .collect();
        assert_eq!(names, expected);
    }
    let csv = fs::read_to_string(dir.path().join("csv/fmea_component.csv")).unwrap();
    assert!(csv.starts_with(
        "element_id,element_text,fm_id,category,description,effects,severity,causes,occurrence,control,detection,rpn,rank\n"
    ));
    assert!(csv.contains(",448,1\n"));
}

#[test]
fn analyze_streams_when_no_out_dir() {
    let dir = TempDir::new().unwrap();
    let model = camera(dir.path());
    let out = riskforge(&["analyze", &model]);
    let text = stdout(&out);
    let headers: Vec<&str> = text.lines().filter(|l| l.starts_with("==> ")).collect();
    assert_eq!(
        headers,
        [
            "==> requirement_priority.csv <==",
            "==> function_priority.csv <==",
            "==> fmea_component.csv <==",
            "==> fmea_function.csv <==",
            "==> fmea_requirement.csv <==",
        ]
    );
    assert_eq!(riskforge(&["analyze", &model]).stdout, out.stdout);
}

#[test]
fn detection_propagation_can_be_disabled() {
    let dir = TempDir::new().unwrap();
    let model = camera(dir.path());
    let out_dir = dir.path().join("out");
    let out = riskforge(&[
        "analyze",
        &model,
        "--out",
        out_dir.to_str().unwrap(),
        "--no-detection-propagation",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(out_dir.join("fmea_requirement.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().ends_with(",-,-,56,1"), "{csv}");
}

#[test]
fn rank_lookups() {
    let out = riskforge(&["rank", "occurrence", "1/5000"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "band: 5-6\nrepresentative: 6\n");
    let out = riskforge(&["rank", "occurrence", "1/1000000"]);
    assert_eq!(stdout(&out), "band: 1\nrepresentative: 1\n");
    let out = riskforge(&["rank", "severity", "component", "PrimaryFunctionEffect"]);
    assert_eq!(stdout(&out), "band: 7-8\nrepresentative: 8\n");
    let out = riskforge(&["rank", "detection", "RealLifeProductTest"]);
    assert_eq!(stdout(&out), "band: 1\nrepresentative: 1\n");
}

#[test]
fn trace_unknown_failure_mode() {
    let dir = TempDir::new().unwrap();
    let out = riskforge(&[
        "trace",
        &camera(dir.path()),
        "--fm",
        "fm_nope",
        "--direction",
        "causes",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unknown failure mode fm_nope"));
}

#[test]
fn diff_reports_moves() {
    let dir = TempDir::new().unwrap();
    let old = ModelBuilder::new()
        .component("c1")
        .component("c2")
        .component_mode("fm_1", "c1", &[5], &[5], Some(5))
        .component_mode("fm_2", "c2", &[4], &[4], Some(4))
        .build();
    let mut new = old.clone();
    new.failure_modes[1].effects[0].severity_rank = riskforge::Rank::new(10).ok();
    new.failure_modes[1].effects[0].severity_class = None;
    for cause in &mut new.failure_modes[1].causes {
        cause.occurrence_rank = riskforge::Rank::new(10).ok();
    }
    let old_path = write(dir.path(), "old.json", &serialize_model(&old));
    let new_path = write(dir.path(), "new.json", &serialize_model(&new));
    let out = riskforge(&["diff", &old_path, &new_path]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(
        stdout(&out),
        "fm_id,old_rpn,new_rpn,delta,old_rank,new_rank,move\n\
         fm_1,125,125,0,1,2,down\n\
         fm_2,64,400,336,2,1,up\n"
    );
}

#[test]
fn color_follows_environment() {
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "orphan.json", &with_orphan_component());
    let colored = riskforge_env(&["validate", &path], "always");
    assert!(stderr(&colored).contains("\x1b["));
    let plain = riskforge_env(&["validate", &path], "never");
    assert!(!stderr(&plain).contains("\x1b["));
    assert_eq!(colored.stdout, plain.stdout);
}
