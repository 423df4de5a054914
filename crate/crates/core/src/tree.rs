//! Truncated BFS trees, path patterns, tree signatures, and super paths.
//!
//! Children of a tree vertex are its unvisited neighbors, taken in a fixed
//! per-vertex order: ascending label, then ascending eigenvector centrality
//! (scores within [`TIE_TOLERANCE`] of their predecessor count as tied), then
//! ascending vertex index. The order is computed once over the full
//! neighborhood, so a vertex's children keep their relative order no matter
//! which neighbors were already visited.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::centrality::{CentralityVector, TIE_TOLERANCE};
use crate::error::{Error, Result};
use crate::graph::{Graph, Label};

/// Separator between BFS levels inside a [`TreeSignature`]. Never a label.
pub const LEVEL_SEPARATOR: u32 = 0;

/// Per-vertex neighbor lists in child order.
#[derive(Debug, Clone)]
pub struct ChildOrder<'g> {
    graph: &'g Graph,
    sorted: Vec<Vec<usize>>,
}

impl<'g> ChildOrder<'g> {
    pub fn new(graph: &'g Graph, centrality: &CentralityVector) -> Self {
        assert_eq!(
            centrality.len(),
            graph.num_vertices(),
            "centrality vector does not match graph"
        );
        let sorted = (0..graph.num_vertices())
            .map(|v| ordered_neighbors(graph, centrality, v))
            .collect();
        ChildOrder { graph, sorted }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.sorted[v]
    }

    pub fn tree(&self, root: usize, depth: usize) -> Result<BfsTree> {
        let n = self.graph.num_vertices();
        if root >= n {
            return Err(Error::InvalidRoot {
                root,
                num_vertices: n,
            });
        }
        let mut visited = vec![false; n];
        let mut order = vec![root];
        let mut parent = vec![None];
        let mut level = vec![0];
        visited[root] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(pos) = queue.pop_front() {
            if level[pos] == depth {
                continue;
            }
            let v = order[pos];
            for &u in &self.sorted[v] {
                if !visited[u] {
                    visited[u] = true;
                    queue.push_back(order.len());
                    order.push(u);
                    parent.push(Some(pos));
                    level.push(level[pos] + 1);
                }
            }
        }
        Ok(BfsTree {
            root,
            depth,
            order,
            parent,
            level,
        })
    }

    pub fn signature(&self, root: usize, depth: usize) -> Result<TreeSignature> {
        let tree = self.tree(root, depth)?;
        Ok(TreeSignature::from_tree(self.graph, &tree))
    }
}

fn ordered_neighbors(g: &Graph, c: &CentralityVector, v: usize) -> Vec<usize> {
    let mut nbrs = g.neighbors(v).to_vec();
    nbrs.sort_by(|&a, &b| {
        g.label(a)
            .cmp(&g.label(b))
            .then(c.score(a).total_cmp(&c.score(b)))
            .then(a.cmp(&b))
    });
    // Tied runs (same label, scores chained within tolerance) fall back to index.
    let mut start = 0;
    while start < nbrs.len() {
        let mut end = start + 1;
        while end < nbrs.len()
            && g.label(nbrs[end]) == g.label(nbrs[start])
            && c.score(nbrs[end]) - c.score(nbrs[end - 1]) <= TIE_TOLERANCE
        {
            end += 1;
        }
        nbrs[start..end].sort_unstable();
        start = end;
    }
    nbrs
}

/// A breadth-first tree truncated at `depth`.
///
/// Vertices are stored by visit position: `order[i]` is the graph vertex at
/// position `i`, `parent[i]` the position of its parent and `level[i]` its
/// distance from the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BfsTree {
    pub root: usize,
    pub depth: usize,
    pub order: Vec<usize>,
    pub parent: Vec<Option<usize>>,
    pub level: Vec<usize>,
}

impl BfsTree {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Graph vertex of the parent of the vertex at `pos`.
    pub fn parent_vertex(&self, pos: usize) -> Option<usize> {
        self.parent[pos].map(|p| self.order[p])
    }

    /// Positions of the children of the vertex at `pos`, in child order.
    pub fn children(&self, pos: usize) -> impl Iterator<Item = usize> + '_ {
        (pos + 1..self.len()).filter(move |&i| self.parent[i] == Some(pos))
    }

    /// Root-to-vertex path ending at position `pos`.
    pub fn path_to(&self, pos: usize) -> Vec<usize> {
        let mut path = vec![self.order[pos]];
        let mut cur = pos;
        while let Some(p) = self.parent[cur] {
            path.push(self.order[p]);
            cur = p;
        }
        path.reverse();
        path
    }
}

pub fn build_bfs_tree(
    g: &Graph,
    root: usize,
    depth: usize,
    centrality: &CentralityVector,
) -> Result<BfsTree> {
    if root >= g.num_vertices() {
        return Err(Error::InvalidRoot {
            root,
            num_vertices: g.num_vertices(),
        });
    }
    ChildOrder::new(g, centrality).tree(root, depth)
}

/// One root-to-vertex path per tree vertex, in visit order.
pub fn enumerate_paths(tree: &BfsTree) -> Vec<Vec<usize>> {
    let mut paths: Vec<Vec<usize>> = Vec::with_capacity(tree.len());
    for (pos, &v) in tree.order.iter().enumerate() {
        let mut path = match tree.parent[pos] {
            Some(p) => paths[p].clone(),
            None => Vec::new(),
        };
        path.push(v);
        paths.push(path);
    }
    paths
}

/// A label sequence identified with its reverse; stored as the smaller of the two.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathPattern(Vec<u32>);

impl PathPattern {
    pub fn labels(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn from_canonical(labels: Vec<u32>) -> Self {
        PathPattern(labels)
    }
}

impl fmt::Display for PathPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.0)
    }
}

pub(crate) fn write_tuple(f: &mut impl fmt::Write, items: &[u32]) -> fmt::Result {
    f.write_char('(')?;
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            f.write_char(',')?;
        }
        write!(f, "{x}")?;
    }
    f.write_char(')')
}

/// True when `labels` is no greater than its reverse.
pub(crate) fn is_canonical(labels: &[u32]) -> bool {
    labels.iter().cmp(labels.iter().rev()) != std::cmp::Ordering::Greater
}

pub(crate) fn canonicalize_in_place(labels: &mut [u32]) {
    if !is_canonical(labels) {
        labels.reverse();
    }
}

pub fn canonical_pattern(labels: &[u32]) -> Result<PathPattern> {
    if labels.is_empty() {
        return Err(Error::EmptyPattern);
    }
    let mut v = labels.to_vec();
    canonicalize_in_place(&mut v);
    Ok(PathPattern(v))
}

/// Labels of a depth-`k` BFS tree in visit order, with [`LEVEL_SEPARATOR`]
/// between consecutive levels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeSignature {
    tokens: Vec<u32>,
    depth: usize,
}

impl TreeSignature {
    pub fn from_tree(g: &Graph, tree: &BfsTree) -> Self {
        let mut tokens = Vec::with_capacity(tree.len() + tree.depth);
        for (pos, &v) in tree.order.iter().enumerate() {
            if pos > 0 && tree.level[pos] != tree.level[pos - 1] {
                tokens.push(LEVEL_SEPARATOR);
            }
            tokens.push(g.label(v));
        }
        TreeSignature {
            tokens,
            depth: tree.depth,
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn tokens(&self) -> &[u32] {
        &self.tokens
    }

    /// The bare label sequence, separators dropped.
    pub fn labels(&self) -> Vec<Label> {
        self.tokens
            .iter()
            .copied()
            .filter(|&t| t != LEVEL_SEPARATOR)
            .collect()
    }

    pub fn root_label(&self) -> Label {
        self.tokens[0]
    }
}

impl fmt::Display for TreeSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &t) in self.tokens.iter().enumerate() {
            if t == LEVEL_SEPARATOR {
                f.write_str(" |")?;
            } else {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{t}")?;
            }
        }
        Ok(())
    }
}

pub fn tree_signature(
    g: &Graph,
    root: usize,
    k: usize,
    centrality: &CentralityVector,
) -> Result<TreeSignature> {
    let tree = build_bfs_tree(g, root, k, centrality)?;
    Ok(TreeSignature::from_tree(g, &tree))
}

/// Dataset-wide map from depth-`k` tree signatures to ids `1..=len`, assigned
/// in ascending signature order.
#[derive(Debug, Clone)]
pub struct SignatureInterner {
    depth: usize,
    ids: HashMap<TreeSignature, u32>,
    sorted: Vec<TreeSignature>,
}

impl SignatureInterner {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn id(&self, sig: &TreeSignature) -> Option<u32> {
        self.ids.get(sig).copied()
    }

    pub fn signature(&self, id: u32) -> Option<&TreeSignature> {
        (id as usize).checked_sub(1).and_then(|i| self.sorted.get(i))
    }

    /// Signatures in id order.
    pub fn signatures(&self) -> &[TreeSignature] {
        &self.sorted
    }
}

pub fn intern_signatures<'a, I>(depth: usize, signatures: I) -> Result<SignatureInterner>
where
    I: IntoIterator<Item = &'a TreeSignature>,
{
    let mut sorted = Vec::new();
    for sig in signatures {
        if sig.depth != depth {
            return Err(Error::MixedDepths {
                expected: depth,
                found: sig.depth,
            });
        }
        sorted.push(sig.clone());
    }
    sorted.sort_unstable();
    sorted.dedup();
    let ids = sorted
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i as u32 + 1))
        .collect();
    Ok(SignatureInterner { depth, ids, sorted })
}

/// Per-vertex labels at granularity `k`: raw vertex labels when `k == 0`,
/// otherwise the interned id of each vertex's depth-`k` signature.
pub fn vertex_level_labels(order: &ChildOrder<'_>, k: usize, interner: &SignatureInterner) -> Result<Vec<u32>> {
    if interner.depth() != k {
        return Err(Error::MixedDepths {
            expected: interner.depth(),
            found: k,
        });
    }
    let g = order.graph();
    if k == 0 {
        return Ok(g.labels().to_vec());
    }
    (0..g.num_vertices())
        .map(|v| {
            let sig = order.signature(v, k)?;
            interner.id(&sig).ok_or(Error::UnknownSignature { vertex: v })
        })
        .collect()
}

/// Replaces every vertex of `path` by its depth-`k` signature id and
/// canonicalizes the result. At `k == 0` the vertex labels are used as-is,
/// which makes a super path of depth-0 trees an ordinary path pattern.
pub fn super_path_pattern(
    path: &[usize],
    g: &Graph,
    k: usize,
    interner: &SignatureInterner,
    centrality: &CentralityVector,
) -> Result<PathPattern> {
    if interner.depth() != k {
        return Err(Error::MixedDepths {
            expected: interner.depth(),
            found: k,
        });
    }
    let mut seen = std::collections::HashSet::with_capacity(path.len());
    for &v in path {
        if v >= g.num_vertices() {
            return Err(Error::VertexOutOfRange {
                index: v,
                num_vertices: g.num_vertices(),
            });
        }
        if !seen.insert(v) {
            return Err(Error::RepeatedVertex { vertex: v });
        }
    }
    if k == 0 {
        let labels: Vec<u32> = path.iter().map(|&v| g.label(v)).collect();
        return canonical_pattern(&labels);
    }
    let order = ChildOrder::new(g, centrality);
    let ids = path
        .iter()
        .map(|&v| {
            let sig = order.signature(v, k)?;
            interner.id(&sig).ok_or(Error::UnknownSignature { vertex: v })
        })
        .collect::<Result<Vec<_>>>()?;
    canonical_pattern(&ids)
}
