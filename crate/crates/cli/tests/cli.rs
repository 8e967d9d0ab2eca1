use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use congruence_core::{load_dataset, Dataset64, Format};
use tempfile::TempDir;

fn congruence(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_congruence"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_csv(dir: &Path, name: &str, rows: &[&str]) -> String {
    let path = dir.join(name);
    let mut text = String::from("dim0,dim1\n");
    for r in rows {
        text.push_str(r);
        text.push('\n');
    }
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

/// CSV rows after the schema line and the header.
fn data_rows(report: &str) -> Vec<Vec<String>> {
    let mut lines = report.lines();
    assert_eq!(lines.next(), Some("# schema=1"));
    lines.next().expect("header");
    lines.map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn dist_on_two_point_pair() {
    let dir = TempDir::new().unwrap();
    let s = write_csv(dir.path(), "s.csv", &["0,0", "1,0"]);
    let t = write_csv(dir.path(), "t.csv", &["0,0", "2,0"]);
    let out = congruence(&["dist", &s, &t, "--measure", "delta"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "1.000000000");
}

#[test]
fn dist_all_on_identical_series() {
    let dir = TempDir::new().unwrap();
    let s = write_csv(dir.path(), "s.csv", &["0,0", "1,0", "1,2", "-3,0.5"]);
    let out = congruence(&["dist", &s, &s, "--measure", "all"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let values: Vec<&str> = text.lines().map(|l| l.split_whitespace().last().unwrap()).collect();
    assert_eq!(values, ["0.000000000"; 5]);
}

#[test]
fn dist_rejects_mismatched_lengths() {
    let dir = TempDir::new().unwrap();
    let s = write_csv(dir.path(), "s.csv", &["0,0", "1,0"]);
    let t = write_csv(dir.path(), "t.csv", &["0,0", "2,0", "3,3"]);
    let out = congruence(&["dist", &s, &t, "--measure", "delta"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    // dtw accepts unequal lengths
    let out = congruence(&["dist", &s, &t, "--measure", "dtw"]);
    assert!(out.status.success());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(congruence(&["dist"]).status.code(), Some(2));
    assert_eq!(congruence(&["sanity", "--multistart", "0"]).status.code(), Some(2));
}

#[test]
fn sanity_report_shape_and_one_dimension() {
    let out = congruence(&["sanity", "--k", "1,2", "--n", "8", "--trials", "3", "--multistart", "4"]);
    assert!(out.status.success());
    let rows = data_rows(&stdout(&out));
    assert_eq!(rows.len(), 3 * 2);
    for r in rows.iter().filter(|r| r[1] == "1") {
        let value: f64 = r[3].parse().unwrap();
        assert!(value <= 1e-6, "k=1 trial {}: {value}", r[0]);
    }
}

#[test]
fn sanity_recovers_planar_congruences() {
    let out = congruence(&["sanity", "--k", "2", "--n", "16", "--trials", "20", "--seed", "11"]);
    assert!(out.status.success());
    let rows = data_rows(&stdout(&out));
    assert_eq!(rows.len(), 20);
    let recovered = rows.iter().filter(|r| r[3].parse::<f64>().unwrap() <= 1e-3).count();
    assert!(recovered >= 18, "{recovered}/20");
}

#[test]
fn gen_then_dewarp() {
    let dir = TempDir::new().unwrap();
    let raw = dir.path().join("walks.jsonl");
    let flat = dir.path().join("flat.jsonl");
    let out = congruence(&["gen", "--k", "3", "--n", "40", "--count", "4", "--output", raw.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let ds: Dataset64 = load_dataset(&raw, Format::JsonlCollection).unwrap();
    assert_eq!(ds.len(), 4);
    assert_eq!(ds.dim(), Some(3));

    let out = congruence(&["dewarp", raw.to_str().unwrap(), "--n", "25", "--output", flat.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let ds: Dataset64 = load_dataset(&flat, Format::JsonlCollection).unwrap();
    for e in ds.iter() {
        assert_eq!(e.series.len(), 25);
        let chords: Vec<f64> = (0..24).map(|i| e.series.point_distance(i, i + 1)).collect();
        let total: f64 = chords.iter().sum();
        for w in chords.windows(2) {
            assert!((w[0] - w[1]).abs() <= 1e-9 * total);
        }
    }

    let single = dir.path().join("one.csv");
    let out = congruence(&["gen", "--count", "2", "--output", single.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "csv-single holds one series");
}

#[test]
fn tightness_on_congruent_pairs_leaves_ratios_empty() {
    let dir = TempDir::new().unwrap();
    let s = ["0,0", "1,0", "1,1", "3,2", "2,5"];
    // t = s rotated by 90 degrees and shifted
    let t = ["4,1", "4,2", "3,2", "2,4", "-1,3"];
    let mut text = String::new();
    for (id, rows) in [("a", &s), ("b", &t)] {
        let pts: Vec<String> = rows.iter().map(|r| format!("[{r}]")).collect();
        text.push_str(&format!("{{\"id\":\"{id}\",\"label\":null,\"points\":[{}]}}\n", pts.join(",")));
    }
    let input = dir.path().join("pair.jsonl");
    fs::write(&input, text).unwrap();
    let out = congruence(&["bench-tightness", "--input", input.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_rows(&stdout(&out));
    assert_eq!(rows.len(), 1);
    let row = &rows[0];
    let d_opt: f64 = row[3].parse().unwrap();
    assert!(d_opt <= 1e-9, "{d_opt}");
    assert!(row[13..17].iter().all(|r| r.is_empty()), "{row:?}");
    assert_eq!(row[17..], ["true".to_string(), "false".to_string()]);
}

#[test]
fn speedup_report_has_positive_speedups() {
    let out = congruence(&["bench-speedup", "--k", "2", "--n", "16", "--trials", "2", "--reps", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_rows(&stdout(&out));
    assert_eq!(rows.len(), 2);
    for r in rows {
        for s in &r[13..17] {
            assert!(s.parse::<f64>().unwrap() > 0.0);
        }
    }
}
