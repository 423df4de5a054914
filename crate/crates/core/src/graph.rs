//! Undirected vertex-labeled graphs and labeled graph collections.
//!
//! Vertices are dense `0..n` indices. Adjacency lists are sorted and free of
//! duplicates, so two graphs built from the same edge set compare equal no
//! matter how the edges were listed.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};

/// Vertex label. Always `>= 1`; the value 0 is reserved as a separator token
/// in tree signatures.
pub type Label = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    labels: Vec<Label>,
    num_edges: usize,
}

impl Graph {
    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Sorted neighbors of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn label(&self, v: usize) -> Label {
        self.labels[v]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, nbrs)| {
            nbrs.iter().copied().filter(move |&v| u < v).map(move |v| (u, v))
        })
    }

    /// Relabels vertex `v` as `perm[v]`. `perm` must be a permutation of `0..n`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        let n = self.num_vertices();
        assert_eq!(perm.len(), n, "permutation length must match vertex count");
        let mut labels = vec![0; n];
        for v in 0..n {
            labels[perm[v]] = self.labels[v];
        }
        let mut adjacency = vec![Vec::new(); n];
        for v in 0..n {
            let mut nbrs: Vec<usize> = self.adjacency[v].iter().map(|&u| perm[u]).collect();
            nbrs.sort_unstable();
            adjacency[perm[v]] = nbrs;
        }
        Graph {
            adjacency,
            labels,
            num_edges: self.num_edges,
        }
    }
}

/// Builds a canonical graph and reports how many duplicate edges were dropped.
///
/// An edge listed as both `(u, v)` and `(v, u)` counts as one duplicate.
pub fn build_graph_counting(edges: &[(usize, usize)], labels: &[i64]) -> Result<(Graph, usize)> {
    let n = labels.len();
    let mut checked = Vec::with_capacity(labels.len());
    for (vertex, &label) in labels.iter().enumerate() {
        if label < 1 || label > Label::MAX as i64 {
            return Err(Error::InvalidLabel { vertex, label });
        }
        checked.push(label as Label);
    }
    let mut adjacency = vec![Vec::new(); n];
    for &(u, v) in edges {
        for index in [u, v] {
            if index >= n {
                return Err(Error::VertexOutOfRange {
                    index,
                    num_vertices: n,
                });
            }
        }
        if u == v {
            return Err(Error::SelfLoop { vertex: u });
        }
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    let mut total = 0;
    for nbrs in &mut adjacency {
        nbrs.sort_unstable();
        nbrs.dedup();
        total += nbrs.len();
    }
    let num_edges = total / 2;
    Ok((
        Graph {
            adjacency,
            labels: checked,
            num_edges,
        },
        edges.len() - num_edges,
    ))
}

/// Builds a canonical graph from an edge list and per-vertex labels.
pub fn build_graph(edges: &[(usize, usize)], labels: &[i64]) -> Result<Graph> {
    build_graph_counting(edges, labels).map(|(g, _)| g)
}

/// A named collection of graphs with one class label per graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub graphs: Vec<Graph>,
    pub class_labels: Vec<i64>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, graphs: Vec<Graph>, class_labels: Vec<i64>) -> Result<Self> {
        if graphs.len() != class_labels.len() {
            return Err(Error::ClassCountMismatch {
                graphs: graphs.len(),
                classes: class_labels.len(),
            });
        }
        Ok(Dataset {
            name: name.into(),
            graphs,
            class_labels,
        })
    }

    /// A dataset whose graphs all share class 0.
    pub fn unlabeled(name: impl Into<String>, graphs: Vec<Graph>) -> Self {
        let class_labels = vec![0; graphs.len()];
        Dataset {
            name: name.into(),
            graphs,
            class_labels,
        }
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    /// Distinct class values in ascending order.
    pub fn classes(&self) -> Vec<i64> {
        let set: BTreeSet<i64> = self.class_labels.iter().copied().collect();
        set.into_iter().collect()
    }

    /// Checks the classification precondition of at least two classes.
    pub fn check_classifiable(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if self.classes().len() < 2 {
            return Err(Error::SingleClass);
        }
        Ok(())
    }
}

/// Corpus summary in the layout of the usual benchmark statistics tables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetStats {
    pub name: String,
    pub size: usize,
    pub classes: usize,
    pub avg_nodes: f64,
    pub avg_edges: f64,
    pub labels: usize,
}

pub fn graph_stats(dataset: &Dataset) -> Result<DatasetStats> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let size = dataset.len();
    let nodes: usize = dataset.graphs.iter().map(Graph::num_vertices).sum();
    let edges: usize = dataset.graphs.iter().map(Graph::num_edges).sum();
    let alphabet: BTreeSet<Label> = dataset
        .graphs
        .iter()
        .flat_map(|g| g.labels().iter().copied())
        .collect();
    Ok(DatasetStats {
        name: dataset.name.clone(),
        size,
        classes: dataset.classes().len(),
        avg_nodes: nodes as f64 / size as f64,
        avg_edges: edges as f64 / size as f64,
        labels: alphabet.len(),
    })
}

/// The two six-vertex graphs used throughout the worked example.
///
/// Vertex order follows the drawing: the two label-1 vertices first, then the
/// right-hand label-3 vertex, the upper-left vertex, the label-4 hub, and the
/// upper-right vertex.
pub fn example_pair() -> (Graph, Graph) {
    let g1 = build_graph(
        &[(3, 4), (4, 0), (1, 4), (2, 3), (4, 2), (5, 2)],
        &[1, 1, 3, 3, 4, 2],
    )
    .expect("static example graph");
    let g2 = build_graph(
        &[(5, 3), (4, 0), (1, 0), (4, 5), (4, 2), (5, 2)],
        &[1, 1, 3, 2, 4, 3],
    )
    .expect("static example graph");
    (g1, g2)
}
