use std::fs;
use std::path::Path;

use proptest::prelude::*;
use tempfile::tempdir;
use treepp::io::{
    format_matrix, generate_random_dataset, load_edgelist_graph, load_tu_dataset, read_matrix, write_edgelist_graph,
    write_matrix, write_tu_dataset, MatrixFormat,
};
use treepp::{example_pair, Dataset, Error, KernelMatrix};

fn fixtures() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn write_files(dir: &Path, name: &str, files: &[(&str, &str)]) {
    for (suffix, body) in files {
        fs::write(dir.join(format!("{name}_{suffix}.txt")), body).unwrap();
    }
}

#[test]
fn fig3_fixture_matches_example_pair() {
    let (ds, report) = load_tu_dataset(&fixtures().join("fig3"), "fig3").unwrap();
    let (g1, g2) = example_pair();
    assert_eq!(ds.graphs, vec![g1, g2]);
    assert_eq!(ds.class_labels, vec![1, 2]);
    assert_eq!(report.graphs_read, 2);
    assert_eq!(report.edges_deduplicated, 0);
    assert!(report.warnings.is_empty());
}

#[test]
fn edgelist_fixtures_match_example_pair() {
    let (g1, g2) = example_pair();
    assert_eq!(load_edgelist_graph(&fixtures().join("edgelist/g1.txt")).unwrap(), g1);
    assert_eq!(load_edgelist_graph(&fixtures().join("edgelist/g2.txt")).unwrap(), g2);
}

#[test]
fn tu_round_trip() {
    let ds = generate_random_dataset("rt", 12, 1..=9, 0.4, 3, 5).unwrap();
    let dir = tempdir().unwrap();
    write_tu_dataset(&ds, dir.path()).unwrap();
    let (back, report) = load_tu_dataset(dir.path(), "rt").unwrap();
    assert_eq!(back, ds);
    assert_eq!(report.edges_deduplicated, 0);
}

#[test]
fn edgelist_round_trip() {
    let (g1, _) = example_pair();
    let dir = tempdir().unwrap();
    let path = dir.path().join("g.txt");
    write_edgelist_graph(&g1, &path).unwrap();
    assert_eq!(load_edgelist_graph(&path).unwrap(), g1);
}

#[test]
fn edgelist_string_labels() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("g.txt");
    fs::write(&path, "3\nC O C\n0 1\n1 2\n").unwrap();
    let g = load_edgelist_graph(&path).unwrap();
    assert_eq!(g.labels(), &[1, 2, 1]);
}

#[test]
fn edgelist_errors_carry_line_numbers() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("g.txt");
    fs::write(&path, "3\n1 2 3\n0 1\n1 x\n").unwrap();
    match load_edgelist_graph(&path) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("{other:?}"),
    }
    fs::write(&path, "3\n1 2\n").unwrap();
    assert!(matches!(load_edgelist_graph(&path), Err(Error::Parse { line: 2, .. })));
    fs::write(&path, "2\n1 2\n0 5\n").unwrap();
    assert!(matches!(load_edgelist_graph(&path), Err(Error::Parse { line: 3, .. })));
}

#[test]
fn missing_and_inconsistent_files() {
    let dir = tempdir().unwrap();
    assert!(matches!(load_tu_dataset(dir.path(), "x"), Err(Error::MissingFile(_))));
    write_files(
        dir.path(),
        "x",
        &[("A", "1, 2\n"), ("graph_indicator", "1\n1\n1\n"), ("graph_labels", "0\n"), ("node_labels", "1\n2\n")],
    );
    assert!(matches!(load_tu_dataset(dir.path(), "x"), Err(Error::InconsistentCounts(_))));
}

#[test]
fn cross_graph_edge_rejected() {
    let dir = tempdir().unwrap();
    write_files(
        dir.path(),
        "x",
        &[("A", "1, 2\n2, 3\n"), ("graph_indicator", "1\n1\n2\n"), ("graph_labels", "0\n1\n"), ("node_labels", "1\n1\n1\n")],
    );
    assert!(matches!(
        load_tu_dataset(dir.path(), "x"),
        Err(Error::CrossGraphEdge { u: 2, v: 3, graph_u: 1, graph_v: 2 })
    ));
}

#[test]
fn non_integer_token_reports_line() {
    let dir = tempdir().unwrap();
    write_files(
        dir.path(),
        "x",
        &[("A", "1, 2\n2, 1\n"), ("graph_indicator", "1\n1\n"), ("graph_labels", "0\n"), ("node_labels", "1\nC\n")],
    );
    assert!(matches!(load_tu_dataset(dir.path(), "x"), Err(Error::Parse { line: 2, .. })));
}

#[test]
fn zero_based_labels_shift_and_extras_warn() {
    let dir = tempdir().unwrap();
    write_files(
        dir.path(),
        "x",
        &[
            ("A", "1, 2\n2, 1\n1, 2\n3, 3\n"),
            ("graph_indicator", "1\n1\n1\n"),
            ("graph_labels", "-1\n"),
            ("node_labels", "0\n2\n0\n"),
            ("edge_labels", "1\n1\n"),
        ],
    );
    let (ds, report) = load_tu_dataset(dir.path(), "x").unwrap();
    assert_eq!(ds.graphs[0].labels(), &[1, 3, 1]);
    assert_eq!(ds.graphs[0].num_edges(), 1);
    assert_eq!(report.edges_deduplicated, 1);
    assert_eq!(report.warnings.len(), 3);
    assert_eq!(ds.class_labels, vec![-1]);
}

#[test]
fn empty_edge_file_is_fine() {
    let dir = tempdir().unwrap();
    write_files(
        dir.path(),
        "x",
        &[("A", ""), ("graph_indicator", "1\n2\n"), ("graph_labels", "0\n1\n"), ("node_labels", "4\n4\n")],
    );
    let (ds, _) = load_tu_dataset(dir.path(), "x").unwrap();
    assert_eq!(ds.len(), 2);
    assert!(ds.graphs.iter().all(|g| g.num_vertices() == 1 && g.num_edges() == 0));
}

#[test]
fn matrix_files_round_trip() {
    let m = KernelMatrix::from_rows(&[vec![1.0, 0.1 + 0.2], vec![0.1 + 0.2, 1.0]], true).unwrap();
    let dir = tempdir().unwrap();
    for (fmt, file) in [(MatrixFormat::Csv, "k.csv"), (MatrixFormat::Json, "k.json")] {
        let path = dir.path().join(file);
        write_matrix(&m, &path, fmt).unwrap();
        let back = read_matrix(&path).unwrap();
        assert_eq!(back.entries(), m.entries());
        assert!(back.is_normalized());
    }
    let text = fs::read_to_string(dir.path().join("k.csv")).unwrap();
    assert_eq!(text, "1.0000000000000000,0.30000000000000004\n0.30000000000000004,1.0000000000000000\n");
}

#[test]
fn non_finite_matrix_not_written() {
    let m = KernelMatrix::from_rows(&[vec![f64::NAN]], false).unwrap();
    let dir = tempdir().unwrap();
    assert!(matches!(
        write_matrix(&m, &dir.path().join("k.csv"), MatrixFormat::Csv),
        Err(Error::NonFiniteKernel { row: 0, col: 0 })
    ));
}

#[test]
fn unlabeled_dataset_has_one_class() {
    let (g1, g2) = example_pair();
    let ds = Dataset::unlabeled("u", vec![g1, g2]);
    assert_eq!(ds.classes(), vec![0]);
}

proptest! {
    #[test]
    fn csv_round_trip(values in proptest::collection::vec(-1e6f64..1e6, 9)) {
        let m = KernelMatrix::new(3, values, false).unwrap();
        let dir = tempdir().unwrap();
        let path = dir.path().join("k.csv");
        write_matrix(&m, &path, MatrixFormat::Csv).unwrap();
        let back = read_matrix(&path).unwrap();
        prop_assert_eq!(back.entries(), m.entries());
        prop_assert_eq!(format_matrix(&back, MatrixFormat::Csv), format_matrix(&m, MatrixFormat::Csv));
    }
}
