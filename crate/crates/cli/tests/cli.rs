//! End-to-end tests of the binary: exit-code contract (0 success,
//! 1 verification failure, 2 input error), report content, rendering
//! determinism, and round-tripping of printed values.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ridgeline"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn describe_reports_the_class_constant() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("c.json");
    std::fs::write(
        &file,
        r#"{"hat_class":"C","M":"1","w":"1 + 1*sqrt(2)","alphas":["3/4"],"d":2,
           "epsilon":"1/100","end_types":["Three","Two"]}"#,
    )
    .unwrap();
    let out = run(&["describe", "--input", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("k = 8"), "{text}");
    assert!(text.contains("1 + 1*sqrt(2)"));
}

#[test]
fn describe_rejects_invalid_invariants_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.json");
    // a parked height above the ridge
    std::fs::write(
        &file,
        r#"{"hat_class":"B","M":"1","w":"1","alphas":["3/2"],"d":2,
           "epsilon":"1/100","end_types":["Two","Two"]}"#,
    )
    .unwrap();
    let out = run(&["describe", "--input", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("0 < alpha < M"), "message names the invariant: {err}");
}

#[test]
fn describe_zero_width_class_e() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("e.json");
    std::fs::write(
        &file,
        r#"{"hat_class":"E","M":"1","w":"0","alphas":[],"d":2,
           "epsilon":"1/100","end_types":["Two","Two"]}"#,
    )
    .unwrap();
    let out = run(&["describe", "--input", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("k = 6"));
    assert!(text.contains("width w        0"));
}

/// Acceptance criterion 9: the shipped quadratic instance verifies with
/// exit 0, and a corrupted config exits 2.
#[test]
fn acceptance_9_end_to_end() {
    let config = configs().join("s2xs2_sqrt2.json");
    let out = run(&[
        "verify",
        "--input",
        config.to_str().unwrap(),
        "--samples",
        "300",
        "--resolution",
        "8",
        "--horizon",
        "1000",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("NonRecurrent at all sampled heights"), "{text}");

    let dir = tempfile::tempdir().unwrap();
    let corrupt = dir.path().join("corrupt.json");
    std::fs::write(&corrupt, "{\"hat_class\": \"B\", \"M\": ").unwrap();
    let out = run(&["verify", "--input", corrupt.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    println!("ACCEPTANCE 9 end-to-end: PASS (verify exit 0; corrupted config exit 2)");
}

#[test]
fn verify_zero_width_reports_the_periodic_advisory() {
    let config = configs().join("monotone_w0.json");
    let out = run(&[
        "verify",
        "--input",
        config.to_str().unwrap(),
        "--samples",
        "100",
        "--resolution",
        "6",
        "--horizon",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("Periodic(4)"), "{text}");
    assert!(text.contains("advisory"), "{text}");
}

#[test]
fn scan_counts_match_the_resolution_for_the_quadratic_instance() {
    let config = configs().join("s2xs2_sqrt2.json");
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("scan.json");
    let out = run(&[
        "scan",
        "--input",
        config.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
        "--resolution",
        "20",
        "--horizon",
        "500",
        "--qmax",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let summary = &report["summary"];
    assert_eq!(summary["periodic_count"], 0);
    assert_eq!(
        summary["non_recurrent_count"].as_u64().unwrap(),
        report["entries"].as_array().unwrap().len() as u64
    );
    assert_eq!(summary["recurrent_set_kind"], "finite");
    // printed values re-parse to equal values through the core library
    for entry in report["entries"].as_array().unwrap() {
        let h: ridgeline::exact::QuadraticNumber =
            entry["h"].as_str().unwrap().parse().unwrap();
        let again: ridgeline::exact::QuadraticNumber = h.to_string().parse().unwrap();
        assert_eq!(h, again);
    }
}

#[test]
fn orbit_gap_statistics() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("orbit.json");
    std::fs::write(&file, r#"{"rho":"1/6","n":6}"#).unwrap();
    let out = run(&["orbit", "--input", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let gaps = report["distinct_gaps"].as_array().unwrap();
    assert_eq!(gaps.len(), 1);
    assert_eq!(gaps[0]["gap"], "1/6");
    assert_eq!(gaps[0]["count"], 6);

    std::fs::write(&file, r#"{"rho":"-1 + 1*sqrt(2)","n":100}"#).unwrap();
    let out = run(&["orbit", "--input", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report["distinct_gaps"].as_array().unwrap().len() <= 3);
}

#[test]
fn render_is_deterministic_and_counts_markers() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("n1.json");
    std::fs::write(
        &file,
        r#"{"hat_class":"B","M":"1","w":"1","alphas":["1/2"],"d":2,
           "epsilon":"1/100","end_types":["Two","Two"]}"#,
    )
    .unwrap();
    let a = run(&["render", "--input", file.to_str().unwrap()]);
    let b = run(&["render", "--input", file.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "identical input must give identical bytes");
    let svg = stdout(&a);
    assert_eq!(svg.matches("node-cross parked").count(), 1);
    assert_eq!(svg.matches("node-cross hat").count(), 4);
    assert_eq!(svg.matches("class=\"level\"").count(), 8);

    // levels 0 leaves only the outline (and the ridge highlight)
    let bare = run(&[
        "render",
        "--input",
        file.to_str().unwrap(),
        "--levels",
        "0",
    ]);
    let svg = stdout(&bare);
    assert_eq!(svg.matches("class=\"level\"").count(), 0);
    assert_eq!(svg.matches("class=\"domain\"").count(), 1);
}

#[test]
fn render_accepts_a_serialized_chart() {
    let ty = ridgeline::canonical::CanonicalType::new(
        ridgeline::canonical::HatClass::D,
        (
            ridgeline::canonical::EndType::ThreeNodes,
            ridgeline::canonical::EndType::TwoNodes,
        ),
        "3/2".parse().unwrap(),
        "2/5".parse().unwrap(),
        vec!["3/4".parse().unwrap()],
        2,
        "1/50".parse().unwrap(),
    )
    .unwrap();
    let chart = ridgeline::chart::NodalChart::natural(&ty).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("chart.json");
    std::fs::write(&file, chart.to_json()).unwrap();
    let out = run(&["render", "--input", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).matches("class=\"node-cross").count(), 6);
}

#[test]
fn missing_input_file_exits_2() {
    let out = run(&["describe", "--input", "/nonexistent/nope.json"]);
    assert_eq!(out.status.code(), Some(2));
}
