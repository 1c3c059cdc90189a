//! End-to-end tests of the txnet binary: exit codes, atomic outputs,
//! snapshot nesting, and byte-exact reproduction of the bundled goldens.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn txnet() -> Command {
    Command::new(env!("CARGO_BIN_EXE_txnet"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    txnet().args(args).output().expect("spawn txnet")
}

fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "txnet {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn path_str(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = run(&["metrics", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn help_prints_on_stdout_and_succeeds() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("capture"));
}

#[test]
fn missing_input_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "metrics",
        "--in",
        &path_str(&dir.path().join("nope.csv")),
        "--out",
        &path_str(&dir.path().join("r.json")),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn malformed_csv_is_data_error_and_leaves_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "not,a,real,header\nA,B,1.0,5\n").unwrap();
    let out_path = dir.path().join("r.json");
    let out = run(&[
        "metrics",
        "--in",
        &path_str(&bad),
        "--out",
        &path_str(&out_path),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_path.exists(), "partial output left behind");
}

#[test]
fn summary_line_carries_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("pa.csv");
    run_ok(&["synth", "--kind", "pa", "--n", "50", "--m", "1", "--seed", "3", "--out", &path_str(&csv)]);
    let out = run_ok(&[
        "metrics",
        "--in",
        &path_str(&csv),
        "--out",
        &path_str(&dir.path().join("r.json")),
    ]);
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["manifest"]["command"], "metrics");
    assert_eq!(summary["manifest"]["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert!(summary["outputs"][0].as_str().unwrap().ends_with("r.json"));
}

#[test]
fn snapshot_windows_nest_as_prefixes() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("1h.csv");
    let two = dir.path().join("2h.csv");
    let log = path_str(&fixture("capture_6h.log"));
    run_ok(&["snapshot", "--in", &log, "--t0", "0", "--duration", "1h", "--out", &path_str(&one)]);
    run_ok(&["snapshot", "--in", &log, "--t0", "0", "--duration", "2h", "--out", &path_str(&two)]);
    let one = std::fs::read_to_string(&one).unwrap();
    let two = std::fs::read_to_string(&two).unwrap();
    assert!(one.len() < two.len());
    assert!(two.starts_with(&one), "1h rows are not a prefix of 2h rows");
}

#[test]
fn replay_equals_full_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let log = path_str(&fixture("capture_6h.log"));
    let replayed = dir.path().join("all.csv");
    let six = dir.path().join("6h.csv");
    run_ok(&["replay", "--in", &log, "--out", &path_str(&replayed)]);
    run_ok(&["snapshot", "--in", &log, "--t0", "0", "--duration", "6h", "--out", &path_str(&six)]);
    assert_eq!(
        std::fs::read(&replayed).unwrap(),
        std::fs::read(&six).unwrap()
    );
}

#[test]
fn commands_reproduce_goldens_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let log = path_str(&fixture("capture_6h.log"));
    let six = dir.path().join("6h.csv");
    run_ok(&["snapshot", "--in", &log, "--t0", "0", "--duration", "6h", "--out", &path_str(&six)]);

    // metrics golden
    let report = dir.path().join("metrics.json");
    run_ok(&[
        "metrics", "--in", &path_str(&six), "--label", "6h", "--out", &path_str(&report),
    ]);
    assert_eq!(
        std::fs::read(&report).unwrap(),
        std::fs::read(fixture("golden/metrics_6h.json")).unwrap(),
        "metrics output drifted from golden"
    );

    // fit golden (xmin = 4, 100 bootstrap replicates, seed 42)
    let fit = dir.path().join("fit.json");
    run_ok(&[
        "fit", "--in", &path_str(&six), "--family", "power-law", "--xmin", "4",
        "--replicates", "100", "--seed", "42", "--out", &path_str(&fit),
    ]);
    assert_eq!(
        std::fs::read(&fit).unwrap(),
        std::fs::read(fixture("golden/fit_6h.json")).unwrap(),
        "fit output drifted from golden"
    );

    // communities golden (six-hour giant component)
    let giant = dir.path().join("giant.csv");
    run_ok(&["giant", "--in", &path_str(&six), "--out", &path_str(&giant)]);
    let communities = dir.path().join("communities.json");
    run_ok(&["communities", "--in", &path_str(&giant), "--out", &path_str(&communities)]);
    assert_eq!(
        std::fs::read(&communities).unwrap(),
        std::fs::read(fixture("golden/communities_6h.json")).unwrap(),
        "communities output drifted from golden"
    );
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("pa.csv");
    run_ok(&["synth", "--kind", "pa", "--n", "300", "--m", "2", "--seed", "11", "--out", &path_str(&csv)]);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        run_ok(&[
            "fit", "--in", &path_str(&csv), "--xmin", "auto",
            "--replicates", "30", "--seed", "5", "--out", &path_str(out),
        ]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn growth_emits_csv_or_json_by_extension() {
    let dir = tempfile::tempdir().unwrap();
    let log = path_str(&fixture("capture_6h.log"));
    let six = dir.path().join("6h.csv");
    run_ok(&["snapshot", "--in", &log, "--t0", "0", "--duration", "6h", "--out", &path_str(&six)]);

    let csv = dir.path().join("growth.csv");
    run_ok(&["growth", "--in", &path_str(&six), "--bin", "60s", "--out", &path_str(&csv)]);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("t_s,cumulative_nodes,cumulative_edges\n"));
    assert_eq!(text.lines().count(), 361); // 6h of 60s bins + header

    let json = dir.path().join("growth.json");
    let out = run_ok(&["growth", "--in", &path_str(&six), "--bin", "60s", "--out", &path_str(&json)]);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!(doc["node_fit"]["r_squared"].as_f64().unwrap() > 0.9);
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(summary["result"]["edge_r_squared"].as_f64().unwrap() > 0.9);
}

#[test]
fn export_graphml_reimports_with_same_counts() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("pa.csv");
    run_ok(&["synth", "--kind", "pa", "--n", "120", "--m", "2", "--seed", "9", "--out", &path_str(&csv)]);
    let gml = dir.path().join("pa.graphml");
    run_ok(&["export-graphml", "--in", &path_str(&csv), "--out", &path_str(&gml)]);
    let imported = txnet::graphml::import_graphml(&gml).unwrap();
    assert_eq!(imported.node_count(), 120);
    assert_eq!(imported.arc_count(), 1 + 118 * 2);
}

#[test]
fn synth_power_law_sample_writes_value_column() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sample.csv");
    run_ok(&[
        "synth", "--kind", "power-law-sample", "--alpha", "2.5", "--xmin", "5",
        "--n", "200", "--seed", "2", "--out", &path_str(&out_path),
    ]);
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("value"));
    assert!(lines.clone().count() == 200);
    assert!(lines.all(|l| l.parse::<u64>().unwrap() >= 5));
}

#[test]
fn capture_rejects_unreachable_endpoint_with_io_code() {
    let dir = tempfile::tempdir().unwrap();
    // a port that nothing listens on
    let port = {
        let l = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
        l.local_addr().unwrap().port()
    };
    let out = run(&[
        "capture",
        "--endpoint",
        &format!("ws://127.0.0.1:{port}"),
        "--duration",
        "1s",
        "--out",
        &path_str(&dir.path().join("c.log")),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!dir.path().join("c.log").exists());
}

#[test]
fn report_aggregates_snapshot_columns() {
    let dir = tempfile::tempdir().unwrap();
    let log = path_str(&fixture("capture_6h.log"));
    let one = dir.path().join("1h.csv");
    let two = dir.path().join("2h.csv");
    run_ok(&["snapshot", "--in", &log, "--t0", "0", "--duration", "1h", "--out", &path_str(&one)]);
    run_ok(&["snapshot", "--in", &log, "--t0", "0", "--duration", "2h", "--out", &path_str(&two)]);
    let report = dir.path().join("report.json");
    run_ok(&[
        "report", "--in", &path_str(&one), "--in", &path_str(&two), "--out", &path_str(&report),
    ]);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let snapshots = doc["snapshots"].as_array().unwrap();
    assert_eq!(snapshots.len(), 2);
    assert_eq!(snapshots[0]["label"], "1h");
    assert!(snapshots[0]["graph"]["nodes"].as_u64().unwrap() > 0);
    assert!(
        snapshots[0]["giant_component"]["nodes"].as_u64().unwrap()
            <= snapshots[0]["graph"]["nodes"].as_u64().unwrap()
    );
    // nested snapshots only grow
    assert!(
        snapshots[0]["graph"]["edges"].as_u64().unwrap()
            < snapshots[1]["graph"]["edges"].as_u64().unwrap()
    );
}
