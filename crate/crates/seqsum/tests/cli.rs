use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use seqsum::summary_json::from_json;
use seqsum_testkit as tk;

const WORKED: &str = r#"{"name": "worked", "sequences": [
  {"id": "s1", "events": ["A", "B", "C"]},
  {"id": "s2", "events": ["A", "B", "D"]},
  {"id": "s3", "events": ["A", "C", "D"]}
]}"#;

fn seqsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqsum")).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn mine_coreflow_matches_reference() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("d.json");
    let output = dir.path().join("s.json");
    fs::write(&input, WORKED).unwrap();
    for f in ["0.30", "0.5"] {
        let out = seqsum(&["mine", "--technique", "coreflow", "--min-support", f, "--input", s(&input), "--output", s(&output)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let summary = from_json(&fs::read_to_string(&output).unwrap()).unwrap();
        let d = seqsum::io::load_dataset(&input).unwrap();
        let threshold = seqsum_core::MinSupport::new(f.parse().unwrap()).unwrap().absolute_threshold(3);
        assert_eq!(tk::tree_view(&summary), tk::reference_coreflow(&tk::raw(&d), threshold), "at {f}");
    }
    let summary = from_json(&fs::read_to_string(&output).unwrap()).unwrap();
    let supports: Vec<usize> = summary.nodes.iter().map(|n| n.support).collect();
    assert_eq!(supports, [3, 3, 2]);
}

#[test]
fn render_twice_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("d.csv");
    fs::write(&input, "sequence_id,event\na,X\na,Y\nb,X\nb,Z\nc,X\nc,Y\n").unwrap();
    let summary = dir.path().join("s.json");
    for technique in [["sententree", "--min-support", "0.3"], ["synopsis", "--lambda", "0.6"]] {
        let out = seqsum(&["mine", "--technique", technique[0], technique[1], technique[2], "--input", s(&input), "--output", s(&summary)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let (a, b) = (dir.path().join("a.svg"), dir.path().join("b.svg"));
        assert!(seqsum(&["render", "--input", s(&summary), "--output", s(&a)]).status.success());
        assert!(seqsum(&["render", "--input", s(&summary), "--output", s(&b)]).status.success());
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    }
}

#[test]
fn flag_validation() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("d.json");
    fs::write(&input, WORKED).unwrap();
    let out_path = dir.path().join("s.json");
    let out = seqsum(&["mine", "--technique", "synopsis", "--min-support", "0.1", "--input", s(&input), "--output", s(&out_path)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--lambda"));
    assert!(!out_path.exists());

    let out = seqsum(&["mine", "--technique", "coreflow", "--lambda", "0.5", "--input", s(&input), "--output", s(&out_path)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(seqsum(&["stats", "--input", s(&input), "--bogus"]).status.code(), Some(1));
    assert_eq!(seqsum(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(seqsum(&["stats", "--input", "/nonexistent/d.csv"]).status.code(), Some(1));
    assert_eq!(seqsum(&["--help"]).status.code(), Some(0));
}

#[test]
fn stats_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("d.json");
    fs::write(&input, WORKED).unwrap();
    let out = seqsum(&["stats", "--input", s(&input)]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["numSequences"], 3);
    assert_eq!(v["totalEvents"], 9);
    assert_eq!(v["uniqueEvents"], 4);
    assert_eq!(v["medianLen"], 3.0);
}

#[test]
fn invalid_summary_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("s.json");
    fs::write(
        &bad,
        r#"{"kind":"dag","meta":{"technique":"x","granularity":0.5,"dataset":"d","alphabet":["A"]},
            "nodes":[{"id":0,"event":0,"support":1,"avgIndex":0,"hidden":false},{"id":1,"event":0,"support":1,"avgIndex":1,"hidden":false}],
            "edges":[{"source":0,"target":1,"support":1},{"source":1,"target":0,"support":1}],"patterns":[]}"#,
    )
    .unwrap();
    let out = seqsum(&["render", "--input", s(&bad), "--output", s(&dir.path().join("o.svg"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cycle"));
}

#[test]
fn pipeline_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("d.json");
    fs::write(&input, WORKED).unwrap();
    let insights = dir.path().join("q.json");
    fs::write(
        &insights,
        r#"[{"events":["A","B"],"expectedCount":2,"description":"two go from A to B"},
            {"type":"absence","description":"nothing afterwards"}]"#,
    )
    .unwrap();
    let mut runs = Vec::new();
    for k in 0..2 {
        let summary = dir.path().join(format!("s{k}.json"));
        let svg = dir.path().join(format!("s{k}.svg"));
        let report = dir.path().join(format!("r{k}.json"));
        assert!(seqsum(&["mine", "--technique", "coreflow", "--min-support", "0.5", "--input", s(&input), "--output", s(&summary)]).status.success());
        assert!(seqsum(&["render", "--input", s(&summary), "--output", s(&svg)]).status.success());
        let out = seqsum(&["eval", "--summary", s(&summary), "--insights", s(&insights), "--report", s(&report)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        runs.push([fs::read(&summary).unwrap(), fs::read(&svg).unwrap(), fs::read(&report).unwrap()]);
    }
    assert_eq!(runs[0], runs[1]);
    let report: serde_json::Value = serde_json::from_slice(&runs[0][2]).unwrap();
    assert_eq!(report["queries"][0]["matchedCount"], 2);
    assert_eq!(report["queries"][0]["numbersMatch"], true);
    assert_eq!(report["queries"][1]["status"], "unsupported");
    assert_eq!(report["containsFraction"], 1.0);
}

#[test]
fn bench_on_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    fs::create_dir(&data).unwrap();
    fs::write(data.join("worked.json"), WORKED).unwrap();
    let out_dir = dir.path().join("out");
    let out = seqsum(&["bench", "--datasets", s(&data), "--repeats", "1", "--seed", "1", "--out-dir", s(&out_dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let records = seqsum::bench::records_from_csv(&fs::read_to_string(out_dir.join("bench.csv")).unwrap()).unwrap();
    assert_eq!(records.len(), 18);
    assert!(records.iter().all(|r| r.is_ok() && r.dataset == "worked"));
    assert!(fs::read_to_string(out_dir.join("bench.svg")).unwrap().ends_with("</svg>\n"));
}
