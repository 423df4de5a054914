//! Reading and writing graphs, datasets, and kernel matrices.
//!
//! Two graph formats are supported:
//!
//! * the benchmark directory layout, `<name>_A.txt` (edges as `i, j` over
//!   1-based global vertex ids), `<name>_graph_indicator.txt`,
//!   `<name>_graph_labels.txt` and `<name>_node_labels.txt`;
//! * a single-graph edge list: vertex count, then a line of labels, then one
//!   `u v` pair (0-based) per line.
//!
//! Kernel matrices are written as CSV or JSON with every entry printed to 17
//! significant digits, which round-trips `f64` exactly.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_graph, Dataset, Graph};
use crate::kernel::KernelMatrix;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ParseReport {
    pub graphs_read: usize,
    pub edges_deduplicated: usize,
    pub warnings: Vec<String>,
}

const OPTIONAL_SUFFIXES: [&str; 4] = [
    "edge_labels",
    "edge_attributes",
    "node_attributes",
    "graph_attributes",
];

fn read_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim().to_string()))
        .filter(|(_, l)| !l.is_empty())
        .collect())
}

fn parse_int(path: &Path, line: usize, token: &str) -> Result<i64> {
    token
        .trim()
        .parse::<i64>()
        .map_err(|_| Error::parse(path, line, format!("non-integer token {token:?}")))
}

fn parse_column(path: &Path) -> Result<Vec<i64>> {
    read_lines(path)?
        .iter()
        .map(|(line, text)| parse_int(path, *line, text))
        .collect()
}

/// Loads `<dir>/<name>_*.txt`.
///
/// Vertices keep their global order inside each graph. Vertex labels below 1
/// are shifted up uniformly so the smallest becomes 1; label order is kept.
pub fn load_tu_dataset(dir: &Path, name: &str) -> Result<(Dataset, ParseReport)> {
    let file = |suffix: &str| dir.join(format!("{name}_{suffix}.txt"));
    let mut report = ParseReport::default();

    let indicator_path = file("graph_indicator");
    let indicator = parse_column(&indicator_path)?;
    let classes = parse_column(&file("graph_labels"))?;
    let node_labels_path = file("node_labels");
    let mut node_labels = parse_column(&node_labels_path)?;
    let edge_path = file("A");
    let edge_lines = read_lines(&edge_path)?;

    for suffix in OPTIONAL_SUFFIXES {
        if file(suffix).exists() {
            report
                .warnings
                .push(format!("ignoring {}", file(suffix).display()));
        }
    }

    if node_labels.len() != indicator.len() {
        return Err(Error::InconsistentCounts(format!(
            "{} node labels for {} vertices",
            node_labels.len(),
            indicator.len()
        )));
    }
    let num_graphs = classes.len();
    let mut local_index = Vec::with_capacity(indicator.len());
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); num_graphs];
    for (vertex, &gid) in indicator.iter().enumerate() {
        if gid < 1 || gid as usize > num_graphs {
            return Err(Error::InconsistentCounts(format!(
                "vertex {} assigned to graph {gid} but only {num_graphs} graph labels exist",
                vertex + 1
            )));
        }
        let g = gid as usize - 1;
        local_index.push(members[g].len());
        members[g].push(vertex);
    }
    if let Some(min) = node_labels.iter().copied().min() {
        if min < 1 {
            let shift = 1 - min;
            for l in &mut node_labels {
                *l += shift;
            }
            report
                .warnings
                .push(format!("vertex labels shifted by {shift} to start at 1"));
        }
    }

    // the format lists each edge once per direction; only repeats of the same
    // directed entry count as duplicates
    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); num_graphs];
    let mut seen = std::collections::HashSet::new();
    let mut self_loops = 0;
    for (line, text) in &edge_lines {
        let mut parts = text.split(',');
        let (a, b) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(Error::parse(&edge_path, *line, "expected \"i, j\"")),
        };
        let (u, v) = (parse_int(&edge_path, *line, a)?, parse_int(&edge_path, *line, b)?);
        for x in [u, v] {
            if x < 1 || x as usize > indicator.len() {
                return Err(Error::parse(
                    &edge_path,
                    *line,
                    format!("vertex id {x} outside 1..={}", indicator.len()),
                ));
            }
        }
        let (u, v) = (u as usize - 1, v as usize - 1);
        let (gu, gv) = (indicator[u] as usize - 1, indicator[v] as usize - 1);
        if gu != gv {
            return Err(Error::CrossGraphEdge {
                u: u + 1,
                v: v + 1,
                graph_u: gu + 1,
                graph_v: gv + 1,
            });
        }
        if u == v {
            self_loops += 1;
            continue;
        }
        if seen.insert((u, v)) {
            edges[gu].push((local_index[u], local_index[v]));
        } else {
            report.edges_deduplicated += 1;
        }
    }
    if self_loops > 0 {
        report
            .warnings
            .push(format!("dropped {self_loops} self-loop edges"));
    }

    let mut graphs = Vec::with_capacity(num_graphs);
    for (g, vertices) in members.iter().enumerate() {
        let labels: Vec<i64> = vertices.iter().map(|&v| node_labels[v]).collect();
        graphs.push(build_graph(&edges[g], &labels)?);
    }
    report.graphs_read = graphs.len();
    let ds = Dataset::new(name, graphs, classes)?;
    Ok((ds, report))
}

/// Writes `ds` in the benchmark directory layout, each edge listed in both
/// directions.
pub fn write_tu_dataset(ds: &Dataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut a = String::new();
    let mut indicator = String::new();
    let mut node_labels = String::new();
    let mut offset = 0;
    for (gi, g) in ds.graphs.iter().enumerate() {
        for v in 0..g.num_vertices() {
            indicator.push_str(&format!("{}\n", gi + 1));
            node_labels.push_str(&format!("{}\n", g.label(v)));
            for &u in g.neighbors(v) {
                a.push_str(&format!("{}, {}\n", offset + v + 1, offset + u + 1));
            }
        }
        offset += g.num_vertices();
    }
    let classes: String = ds.class_labels.iter().map(|c| format!("{c}\n")).collect();
    let name = &ds.name;
    for (suffix, body) in [
        ("A", a),
        ("graph_indicator", indicator),
        ("graph_labels", classes),
        ("node_labels", node_labels),
    ] {
        let path = dir.join(format!("{name}_{suffix}.txt"));
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

/// Label tokens taken as integers when they all parse, otherwise interned to
/// `1, 2, ...` by first occurrence.
fn label_values(tokens: &[&str]) -> Vec<i64> {
    let ints: Option<Vec<i64>> = tokens.iter().map(|t| t.parse().ok()).collect();
    ints.unwrap_or_else(|| {
        let mut ids: HashMap<&str, i64> = HashMap::new();
        tokens
            .iter()
            .map(|t| {
                let next = ids.len() as i64 + 1;
                *ids.entry(t).or_insert(next)
            })
            .collect()
    })
}

pub fn load_edgelist_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (line, first) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "missing vertex count"))?;
    let n: usize = first
        .parse()
        .map_err(|_| Error::parse(path, line, format!("bad vertex count {first:?}")))?;
    let (line, label_line) = lines.next().unwrap_or((2, ""));
    let tokens: Vec<&str> = label_line.split_whitespace().collect();
    if tokens.len() != n {
        return Err(Error::parse(
            path,
            line,
            format!("expected {n} labels, found {}", tokens.len()),
        ));
    }
    let labels = label_values(&tokens);
    let mut edges = Vec::new();
    for (line, text) in lines {
        if text.is_empty() {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        let parsed: Vec<usize> = fields.iter().filter_map(|f| f.parse().ok()).collect();
        if fields.len() != 2 || parsed.len() != 2 {
            return Err(Error::parse(path, line, format!("expected \"u v\", found {text:?}")));
        }
        let (u, v) = (parsed[0], parsed[1]);
        if u >= n || v >= n {
            return Err(Error::parse(
                path,
                line,
                format!("vertex index out of range for {n} vertices"),
            ));
        }
        if u == v {
            return Err(Error::parse(path, line, format!("self-loop on vertex {u}")));
        }
        edges.push((u, v));
    }
    build_graph(&edges, &labels)
}

pub fn write_edgelist_graph(g: &Graph, path: &Path) -> Result<()> {
    let mut out = format!("{}\n", g.num_vertices());
    let labels: Vec<String> = g.labels().iter().map(u32::to_string).collect();
    out.push_str(&labels.join(" "));
    out.push('\n');
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// `.txt`/`.edgelist` files in `dir`, sorted by file name, as one unlabeled dataset.
pub fn load_edgelist_dir(dir: &Path) -> Result<Dataset> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && matches!(
                    p.extension().and_then(|e| e.to_str()),
                    Some("txt") | Some("edgelist")
                )
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let graphs = files
        .iter()
        .map(|p| load_edgelist_graph(p))
        .collect::<Result<Vec<_>>>()?;
    let name = dir
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("dataset");
    Ok(Dataset::unlabeled(name, graphs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum MatrixFormat {
    #[default]
    Csv,
    Json,
}

/// 17 significant digits: positional for exponents in `-5..=16`, scientific
/// otherwise.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0.0000000000000000".to_string();
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if (-5..=16).contains(&exp) {
        format!("{:.*}", (16 - exp) as usize, x)
    } else {
        sci
    }
}

fn row_text(row: &[f64]) -> String {
    row.iter().map(|&x| format_float(x)).collect::<Vec<_>>().join(",")
}

pub fn format_matrix(m: &KernelMatrix, format: MatrixFormat) -> String {
    match format {
        MatrixFormat::Csv => m.rows().map(|r| row_text(r) + "\n").collect(),
        MatrixFormat::Json => {
            let rows: Vec<String> = m.rows().map(|r| format!("[{}]", row_text(r))).collect();
            format!(
                "{{\"n\":{},\"normalized\":{},\"rows\":[\n{}\n]}}\n",
                m.n(),
                m.is_normalized(),
                rows.join(",\n")
            )
        }
    }
}

pub fn write_matrix(m: &KernelMatrix, path: &Path, format: MatrixFormat) -> Result<()> {
    if let Some((i, _)) = m.entries().iter().enumerate().find(|(_, x)| !x.is_finite()) {
        return Err(Error::NonFiniteKernel {
            row: i / m.n(),
            col: i % m.n(),
        });
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(format_matrix(m, format).as_bytes())
        .map_err(|e| Error::io(path, e))
}

#[derive(Deserialize)]
struct JsonMatrix {
    n: usize,
    normalized: bool,
    rows: Vec<Vec<f64>>,
}

/// Reads a matrix written by [`write_matrix`]. CSV input is assumed
/// normalized only when every diagonal entry is exactly 1.
pub fn read_matrix(path: &Path) -> Result<KernelMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if text.trim_start().starts_with('{') {
        let parsed: JsonMatrix =
            serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line(), e.to_string()))?;
        if parsed.rows.len() != parsed.n {
            return Err(Error::InconsistentCounts(format!(
                "n={} but {} rows",
                parsed.n,
                parsed.rows.len()
            )));
        }
        return KernelMatrix::from_rows(&parsed.rows, parsed.normalized);
    }
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::parse(path, i + 1, format!("bad number {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let normalized = rows.iter().enumerate().all(|(i, r)| r.get(i) == Some(&1.0));
    KernelMatrix::from_rows(&rows, normalized)
}

/// One class value per non-empty line.
pub fn read_class_labels(path: &Path) -> Result<Vec<i64>> {
    parse_column(path)
}

/// Erdős–Rényi graph with labels uniform over `1..=alphabet`.
pub fn generate_random_graph(n: usize, p: f64, alphabet: u32, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    if n == 0 || alphabet == 0 {
        return Err(Error::InvalidGenerator(format!(
            "need n >= 1 and alphabet >= 1, got n={n} alphabet={alphabet}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<i64> = (0..n)
        .map(|_| rng.random_range(1..=alphabet) as i64)
        .collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    build_graph(&edges, &labels)
}

/// `count` random graphs with sizes uniform in `sizes` and random binary classes.
pub fn generate_random_dataset(
    name: &str,
    count: usize,
    sizes: std::ops::RangeInclusive<usize>,
    p: f64,
    alphabet: u32,
    seed: u64,
) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut graphs = Vec::with_capacity(count);
    let mut classes = Vec::with_capacity(count);
    for _ in 0..count {
        let n = rng.random_range(sizes.clone());
        graphs.push(generate_random_graph(n, p, alphabet, rng.random())?);
        classes.push(rng.random_range(0..2));
    }
    Dataset::new(name, graphs, classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn float_formatting() {
        assert_eq!(format_float(1.0), "1.0000000000000000");
        assert_eq!(format_float(42.0), "42.000000000000000");
        assert_eq!(format_float(0.0), "0.0000000000000000");
        assert_eq!(format_float(0.5), "0.50000000000000000");
        assert_eq!(format_float(-2.5), "-2.5000000000000000");
        assert_eq!(format_float(0.5f64.powi(70)), "8.4703294725430034e-22");
        assert_eq!(format_float(1e-20), "9.9999999999999995e-21");
        assert_eq!(format_float(1e20), "1.0000000000000000e20");
    }

    #[test]
    fn one_by_one_csv() {
        let m = KernelMatrix::identity(1);
        assert_eq!(format_matrix(&m, MatrixFormat::Csv), "1.0000000000000000\n");
    }

    #[test]
    fn json_layout() {
        let m = KernelMatrix::from_rows(&[vec![50.0, 42.0], vec![42.0, 42.0]], false).unwrap();
        let text = format_matrix(&m, MatrixFormat::Json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["n"], 2);
        assert_eq!(v["normalized"], false);
        assert_eq!(v["rows"][0][1].as_f64(), Some(42.0));
    }

    #[test]
    fn random_graph_edge_cases() {
        let g = generate_random_graph(1, 0.9, 3, 7).unwrap();
        assert_eq!(g.num_vertices(), 1);
        let g = generate_random_graph(10, 0.0, 3, 7).unwrap();
        assert_eq!(g.num_edges(), 0);
        let g = generate_random_graph(6, 1.0, 3, 7).unwrap();
        assert_eq!(g.num_edges(), 15);
        assert!(g.labels().iter().all(|&l| (1..=3).contains(&l)));
        assert_eq!(
            generate_random_graph(8, 0.4, 4, 99).unwrap(),
            generate_random_graph(8, 0.4, 4, 99).unwrap()
        );
        assert!(matches!(
            generate_random_graph(3, 1.5, 2, 0),
            Err(Error::InvalidProbability(_))
        ));
        assert!(matches!(
            generate_random_graph(3, f64::NAN, 2, 0),
            Err(Error::InvalidProbability(_))
        ));
        assert!(generate_random_graph(0, 0.5, 2, 0).is_err());
    }

    #[test]
    fn string_labels_are_interned() {
        assert_eq!(label_values(&["C", "O", "C", "N"]), vec![1, 2, 1, 3]);
        assert_eq!(label_values(&["3", "1"]), vec![3, 1]);
    }

    proptest! {
        #[test]
        fn float_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let s = format_float(x);
            prop_assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }
}
