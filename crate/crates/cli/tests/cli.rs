use std::path::Path;
use std::process::{Command, Output};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/fixtures");

fn cscp(args: &[&str]) -> Output {
    cscp_in(args, None)
}

fn cscp_in(args: &[&str], workspace_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cscp"));
    cmd.args(args).env_remove("CSCP_WORKSPACE");
    if let Some(ws) = workspace_env {
        cmd.env("CSCP_WORKSPACE", ws);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Fewest controls over every (s, b) with b even and s * b/2 >= n.
fn matrix_oracle(n: usize) -> usize {
    (1..=n)
        .flat_map(|s| (1..=n).map(move |p| (s, 2 * p)))
        .filter(|(s, b)| s * (b / 2) >= n)
        .map(|(s, b)| s + b)
        .min()
        .unwrap()
}

#[test]
fn synth_matrix_fifty() {
    let o = cscp(&["synth", "matrix", "--units", "50"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "s=10 b=10 controls=20");
    assert_eq!(matrix_oracle(50), 20);
}

#[test]
fn synth_matrix_matches_oracle() {
    for n in [1, 7, 12, 33, 96, 150] {
        let o = cscp(&["synth", "matrix", "--units", &n.to_string(), "--json"]);
        assert!(o.status.success());
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["total_controls"].as_u64().unwrap() as usize, matrix_oracle(n), "n={n}");
    }
}

#[test]
fn synth_subcommands_save_results() {
    let dir = tempfile::tempdir().unwrap();
    for (family, extra) in [("hierarchy", "81"), ("address", "81"), ("scale", "192"), ("choose", "192")] {
        let out = dir.path().join(format!("{family}.json"));
        let o = cscp(&["synth", family, "--units", extra, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{family}: {}", String::from_utf8_lossy(&o.stderr));
        let saved: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert!(!saved.is_null());
    }
    let o = cscp(&["synth", "hierarchy", "--units", "81"]);
    assert!(stdout(&o).contains("branching=3x3x3x3"));
}

#[test]
fn infeasible_choice_is_a_domain_error() {
    let o = cscp(&["synth", "choose", "--units", "192", "--max-controls", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "synthesis");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(cscp(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(cscp(&["synth", "matrix", "--units", "5", "--bogus"]).status.code(), Some(2));
    assert_eq!(cscp(&["synth", "matrix"]).status.code(), Some(2));
}

#[test]
fn lint_reports_the_violation() {
    let o = cscp(&["lint", "defect-01"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("defect-01: 1 violation(s)"));
    let file = format!("{FIXTURES}/lint/clean-01.lint.json");
    let o = cscp(&["lint", &file]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn replay_every_shipped_session() {
    let o = cscp(&["replay", "--all"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 9);
    assert!(out.lines().all(|l| l.contains(": identical ")));
}

#[test]
fn simulate_then_replay() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.log.json");
    let o = cscp(&[
        "simulate",
        "--panel",
        "mm-81",
        "--plant",
        "std-81",
        "--scenario",
        "std-tasks",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = cscp(&["replay", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("identical"));

    // A tampered log no longer replays identically.
    let text = std::fs::read_to_string(&out).unwrap();
    let tampered = text.replacen("\"total_time\": ", "\"total_time\": 1", 1);
    std::fs::write(&out, tampered).unwrap();
    let o = cscp(&["replay", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn compare_tables_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = cscp(&["compare-metrics", "--out-dir", d]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
    let baseline = csv.lines().find(|l| l.starts_with("csd-r,")).unwrap();
    assert!(baseline.ends_with("1.000000,1.000000,1.000000,1.000000,1.000000"));
    assert!(std::fs::read_to_string(dir.path().join("metrics.json"))
        .unwrap()
        .contains("cscp.metrics/1"));

    let o = cscp(&["compare-times", "--out-dir", d]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("response.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10);
    assert!(dir.path().join("response.json").exists());

    let o = cscp(&["compare-metrics", "--baseline", "nope", "--out-dir", d]);
    assert_eq!(o.status.code(), Some(1));
}

fn workspace(dir: &Path) -> std::path::PathBuf {
    for (sub, name) in [
        ("plants", "std-81.plant.json"),
        ("panels", "mm-81.panel.json"),
        ("scenarios", "std-tasks.scn.json"),
    ] {
        std::fs::copy(format!("{FIXTURES}/{sub}/{name}"), dir.join(name)).unwrap();
    }
    let cfg = dir.join("workspace.json");
    std::fs::write(
        &cfg,
        r#"{
  "format": "cscp.workspace/1",
  "body": {
    "plant": "std-81.plant.json",
    "panels": ["mm-81.panel.json"],
    "scenarios": ["std-tasks.scn.json"],
    "output_dir": "out"
  }
}
"#,
    )
    .unwrap();
    cfg
}

#[test]
fn workspace_env_overrides_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = workspace(dir.path());
    let args = [
        "--workspace",
        "/nonexistent/workspace.json",
        "simulate",
        "--panel",
        "mm-81",
        "--scenario",
        "std-tasks",
    ];
    let o = cscp_in(&args, Some(&cfg));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("out/std-tasks--mm-81.log.json").exists());

    let o = cscp(&args);
    assert_eq!(o.status.code(), Some(1));
}
