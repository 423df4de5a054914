use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::tempdir;
use treepp::io::{generate_random_dataset, write_tu_dataset};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn treepp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treepp")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fig3() -> String {
    fixtures().join("fig3").to_str().unwrap().to_string()
}

#[test]
fn compute_worked_example() {
    let o = treepp(&["compute", "--dataset", &fig3(), "--format", "tud", "--d", "1", "--k", "0", "--no-normalize"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "50.000000000000000,42.000000000000000\n42.000000000000000,42.000000000000000\n");
}

#[test]
fn compute_writes_matrix_and_sidecar() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("k.json");
    let o = treepp(&[
        "compute", "--dataset", &fig3(), "--d", "1", "--k", "2", "--out", out.to_str().unwrap(), "--matrix-format", "json",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(m["n"], 2);
    assert_eq!(m["normalized"], true);
    assert_eq!(m["rows"][0][0].as_f64(), Some(1.0));
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("k.json.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["params"]["d"], 1);
    assert_eq!(meta["params"]["k"], 2);
    assert_eq!(meta["vocab_sizes"].as_array().unwrap().len(), 3);
    assert_eq!(meta["vocab_sizes"][0], 9);
    assert!(meta["phase_timings_ms"]["gram"].is_number());
    assert_eq!(meta["tool_version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn depth_zero_is_label_histogram() {
    let o = treepp(&["compute", "--dataset", &fig3(), "--d", "0", "--k", "0", "--no-normalize"]);
    // G1 labels {1,1,3,3,4,2}, G2 labels {1,1,3,2,4,3}
    assert_eq!(stdout(&o), "10.000000000000000,10.000000000000000\n10.000000000000000,10.000000000000000\n");
}

#[test]
fn thread_count_does_not_change_bytes() {
    let dir = tempdir().unwrap();
    let ds = generate_random_dataset("corpus", 30, 3..=12, 0.3, 3, 8).unwrap();
    write_tu_dataset(&ds, &dir.path().join("corpus")).unwrap();
    let data = dir.path().join("corpus");
    let run = |threads: &str| {
        let out = dir.path().join(format!("k{threads}.csv"));
        let o = treepp(&[
            "compute", "--dataset", data.to_str().unwrap(), "--d", "3", "--k", "2", "--threads", threads,
            "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        fs::read(out).unwrap()
    };
    assert_eq!(run("1"), run("8"));
}

#[test]
fn classify_two_blocks() {
    let dir = tempdir().unwrap();
    let n = 24;
    let mut kernel = String::new();
    let mut labels = String::new();
    for i in 0..n {
        let row: Vec<&str> = (0..n).map(|j| if i % 2 == j % 2 { "1.0" } else { "0.0" }).collect();
        kernel.push_str(&row.join(","));
        kernel.push('\n');
        labels.push_str(&format!("{}\n", i % 2));
    }
    fs::write(dir.path().join("k.csv"), kernel).unwrap();
    fs::write(dir.path().join("y.txt"), labels).unwrap();
    let o = treepp(&[
        "classify",
        "--kernel",
        dir.path().join("k.csv").to_str().unwrap(),
        "--labels",
        dir.path().join("y.txt").to_str().unwrap(),
        "--repeats",
        "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(r["mean_accuracy"].as_f64(), Some(100.0));
    assert_eq!(r["std_dev"].as_f64(), Some(0.0));
    assert_eq!(r["per_repeat"].as_array().unwrap().len(), 2);
}

#[test]
fn classify_k_sweep_emits_one_record_per_k() {
    let dir = tempdir().unwrap();
    let ds = generate_random_dataset("small", 24, 4..=9, 0.3, 3, 2).unwrap();
    write_tu_dataset(&ds, &dir.path().join("small")).unwrap();
    let o = treepp(&[
        "classify", "--dataset", dir.path().join("small").to_str().unwrap(), "--k-sweep", "0..7", "--d", "7",
        "--repeats", "1", "--folds", "3", "--C-grid", "1,10",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let records: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records.len(), 8);
    for (k, r) in records.iter().enumerate() {
        assert_eq!(r["k"], k);
        assert_eq!(r["d"], 7);
        assert_eq!(r["dataset"], "small");
        let acc = r["mean_accuracy"].as_f64().unwrap();
        assert!((0.0..=100.0).contains(&acc));
    }
}

#[test]
fn inspect_hub_and_leaf() {
    let g1 = fixtures().join("edgelist/g1.txt");
    let o = treepp(&["inspect", "--graph", g1.to_str().unwrap(), "--vertex", "4", "--d", "1", "--k", "0"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let patterns: Vec<&str> = text
        .lines()
        .skip_while(|l| *l != "patterns")
        .skip(1)
        .take_while(|l| l.starts_with("  "))
        .map(str::trim)
        .collect();
    assert_eq!(patterns, ["(4)", "(4,1)", "(4,1)", "(4,3)", "(4,3)"]);

    let o = treepp(&["inspect", "--graph", g1.to_str().unwrap(), "--vertex", "0", "--d", "0", "--k", "2"]);
    let text = stdout(&o);
    assert!(text.contains("patterns\n  (1)\nsignature"));
    assert!(text.contains("(1,4,1,3,3)"));

    let o = treepp(&["inspect", "--graph", g1.to_str().unwrap(), "--vertex", "6"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn inspect_from_dataset() {
    let o = treepp(&["inspect", "--dataset", &fig3(), "--index", "0", "--vertex", "3", "--k", "2"]);
    assert!(stdout(&o).contains("(3,3,4,2,1,1)"));
}

#[test]
fn stats_table() {
    let o = treepp(&["stats", "--dataset", &fig3()]);
    assert!(o.status.success());
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split_whitespace().collect();
    assert_eq!(row, ["fig3", "2", "2", "6.00", "6.00", "4"]);
}

#[test]
fn exit_codes() {
    let empty = tempdir().unwrap();
    let o = treepp(&["stats", "--dataset", empty.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());

    let o = treepp(&["compute", "--dataset", &fig3(), "--unknown-flag"]);
    assert_eq!(o.status.code(), Some(1));

    let o = treepp(&["compute", "--dataset", &fig3(), "--d", "17"]);
    assert_eq!(o.status.code(), Some(1));

    // a graph id with no vertices parses but cannot be computed
    let dir = tempdir().unwrap();
    for (suffix, body) in [("A", "1, 2\n"), ("graph_indicator", "1\n1\n"), ("graph_labels", "0\n1\n"), ("node_labels", "1\n1\n")] {
        fs::write(dir.path().join(format!("x_{suffix}.txt")), body).unwrap();
    }
    let o = treepp(&["compute", "--dataset", dir.path().to_str().unwrap(), "--name", "x"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_lists_every_flag() {
    let o = treepp(&["compute", "--help"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for flag in ["--dataset", "--format", "--d", "--k", "--normalize", "--no-normalize", "--out", "--seed", "--threads"] {
        assert!(text.contains(flag), "{flag}");
    }
    let text = stdout(&treepp(&["classify", "--help"]));
    for flag in ["--k-sweep", "--C-grid", "--folds", "--repeats", "--kernel", "--labels"] {
        assert!(text.contains(flag), "{flag}");
    }
}
