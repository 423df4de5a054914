//! The Tree++ graph kernel.
//!
//! Every vertex roots a depth-`d` BFS tree; every root-to-vertex path in it is
//! a feature. At granularity level `i` each path vertex is replaced by the id
//! of its depth-`i` tree signature, and the level kernel is the dot product of
//! pattern counts. The full kernel sums levels `0..=k`.
//!
//! Dataset computation runs in two phases per level: graphs are counted
//! independently (in parallel), then the pattern vocabulary is merged in
//! sorted order and the Gram matrix is accumulated in checked `u64`
//! arithmetic. Results do not depend on the thread count.

mod matrix;
pub mod oracle;
pub mod wl;

use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::centrality::{default_centrality, CentralityVector};
use crate::error::{Error, Result};
use crate::graph::{Dataset, Graph};
use crate::tree::{
    canonicalize_in_place, intern_signatures, vertex_level_labels, BfsTree, ChildOrder, PathPattern,
    SignatureInterner, TreeSignature,
};

pub use matrix::{normalize_matrix, KernelMatrix};
pub use oracle::oracle_kernel;
pub use wl::wl_subtree_kernel_matrix;

/// Upper bound for both `d` and `k`.
pub const MAX_DEPTH: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TreeppParams {
    /// Depth of the path-generating BFS trees.
    pub d: usize,
    /// Largest super-path signature depth; levels `0..=k` are summed.
    pub k: usize,
    pub normalize: bool,
}

impl TreeppParams {
    pub fn new(d: usize, k: usize, normalize: bool) -> Self {
        TreeppParams { d, k, normalize }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d > MAX_DEPTH || self.k > MAX_DEPTH {
            return Err(Error::InvalidParams(format!(
                "d={} k={} (both must be at most {MAX_DEPTH})",
                self.d, self.k
            )));
        }
        Ok(())
    }
}

/// Pattern counts of one graph at one `(d, level)` configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureMap {
    pub d: usize,
    pub level: usize,
    counts: HashMap<PathPattern, u64>,
}

impl FeatureMap {
    pub fn count(&self, pattern: &PathPattern) -> u64 {
        self.counts.get(pattern).copied().unwrap_or(0)
    }

    /// Number of distinct patterns.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Number of enumerated paths.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PathPattern, u64)> {
        self.counts.iter().map(|(p, &c)| (p, c))
    }

    /// Patterns with counts, in ascending pattern order.
    pub fn sorted(&self) -> Vec<(PathPattern, u64)> {
        let mut v: Vec<_> = self.counts.iter().map(|(p, &c)| (p.clone(), c)).collect();
        v.sort_unstable();
        v
    }
}

/// Depth-`d` trees rooted at every vertex.
fn rooted_trees(order: &ChildOrder<'_>, d: usize) -> Vec<BfsTree> {
    (0..order.graph().num_vertices())
        .map(|root| order.tree(root, d).expect("root in range"))
        .collect()
}

/// Counts canonical patterns over all root-to-vertex paths of `trees`, with
/// each vertex `v` written as `vertex_labels[v]`.
fn count_patterns(trees: &[BfsTree], vertex_labels: &[u32]) -> HashMap<Vec<u32>, u64> {
    let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
    let mut prefixes: Vec<Vec<u32>> = Vec::new();
    for tree in trees {
        prefixes.clear();
        for (pos, &v) in tree.order.iter().enumerate() {
            let mut seq = match tree.parent[pos] {
                Some(p) => prefixes[p].clone(),
                None => Vec::with_capacity(tree.depth + 1),
            };
            seq.push(vertex_labels[v]);
            let mut key = seq.clone();
            canonicalize_in_place(&mut key);
            *counts.entry(key).or_insert(0) += 1;
            prefixes.push(seq);
        }
    }
    counts
}

/// Pattern counts of `g` at granularity `level` with depth-`d` path trees.
///
/// `interner` must hold the depth-`level` signatures of the enclosing dataset.
pub fn extract_features(
    g: &Graph,
    d: usize,
    level: usize,
    interner: &SignatureInterner,
    centrality: &CentralityVector,
) -> Result<FeatureMap> {
    let order = ChildOrder::new(g, centrality);
    let labels = vertex_level_labels(&order, level, interner)?;
    let trees = rooted_trees(&order, d);
    let counts = count_patterns(&trees, &labels)
        .into_iter()
        .map(|(k, c)| (PathPattern::from_canonical(k), c))
        .collect();
    Ok(FeatureMap { d, level, counts })
}

/// Dot product of two count vectors over their shared patterns.
pub fn kernel_level(f1: &FeatureMap, f2: &FeatureMap) -> Result<u64> {
    if (f1.d, f1.level) != (f2.d, f2.level) {
        return Err(Error::ProvenanceMismatch(format!(
            "d={} level={} vs d={} level={}",
            f1.d, f1.level, f2.d, f2.level
        )));
    }
    let (small, large) = if f1.len() <= f2.len() { (f1, f2) } else { (f2, f1) };
    small.counts.iter().try_fold(0u64, |acc, (p, &c)| {
        let other = large.count(p);
        c.checked_mul(other)
            .and_then(|x| acc.checked_add(x))
            .ok_or(Error::Overflow)
    })
}

/// Dataset-wide depth-`k` signature interner.
pub fn dataset_interner(ds: &Dataset, k: usize, centralities: &[CentralityVector]) -> Result<SignatureInterner> {
    let per_graph: Vec<Vec<TreeSignature>> = ds
        .graphs
        .par_iter()
        .zip(centralities.par_iter())
        .map(|(g, c)| {
            let order = ChildOrder::new(g, c);
            (0..g.num_vertices())
                .map(|v| order.signature(v, k))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    intern_signatures(k, per_graph.iter().flatten())
}

/// Wall-clock milliseconds spent per phase.
#[derive(Debug, Clone, Default, Serialize)]
pub struct PhaseTimings {
    pub centrality_ms: f64,
    pub paths_ms: f64,
    pub features_ms: Vec<f64>,
    pub gram_ms: f64,
    pub normalize_ms: f64,
}

/// Sparse count vectors over one level's sorted vocabulary.
#[derive(Debug, Clone)]
pub struct LevelFeatures {
    pub level: usize,
    pub vocabulary: Vec<PathPattern>,
    /// Per graph: `(vocabulary index, count)` sorted by index.
    pub vectors: Vec<Vec<(u32, u64)>>,
}

impl LevelFeatures {
    /// Dense count rows, one per graph, columns in vocabulary order.
    pub fn dense(&self) -> Vec<Vec<u64>> {
        self.vectors
            .iter()
            .map(|v| {
                let mut row = vec![0; self.vocabulary.len()];
                for &(i, c) in v {
                    row[i as usize] = c;
                }
                row
            })
            .collect()
    }
}

/// Per-level unnormalized Gram matrices with bookkeeping.
#[derive(Debug, Clone)]
pub struct LevelGrams {
    pub n: usize,
    pub d: usize,
    /// `grams[i]` is the row-major level-`i` Gram matrix.
    pub grams: Vec<Vec<u64>>,
    pub vocab_sizes: Vec<usize>,
    pub timings: PhaseTimings,
}

impl LevelGrams {
    /// Sum of levels `0..=k` as exact integers.
    pub fn cumulative(&self, k: usize) -> Result<Vec<u64>> {
        let mut total = vec![0u64; self.n * self.n];
        for gram in &self.grams[..=k] {
            for (t, &g) in total.iter_mut().zip(gram) {
                *t = t.checked_add(g).ok_or(Error::Overflow)?;
            }
        }
        Ok(total)
    }

    pub fn matrix(&self, k: usize, normalize: bool) -> Result<KernelMatrix> {
        let params = TreeppParams::new(self.d, k, false);
        let m = KernelMatrix::from_counts(self.n, &self.cumulative(k)?)?.with_params(params);
        if normalize {
            normalize_matrix(&m)
        } else {
            Ok(m)
        }
    }
}

/// Shared per-dataset state: centralities and rooted depth-`d` trees.
struct Prepared {
    centralities: Vec<CentralityVector>,
    trees: Vec<Vec<BfsTree>>,
}

fn prepare(ds: &Dataset, d: usize, timings: &mut PhaseTimings) -> Result<Prepared> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if let Some(index) = ds.graphs.iter().position(Graph::is_empty) {
        return Err(Error::EmptyGraph { index });
    }
    let t = Instant::now();
    let centralities: Vec<_> = ds.graphs.par_iter().map(default_centrality).collect();
    timings.centrality_ms = ms(t);
    let t = Instant::now();
    let trees = ds
        .graphs
        .par_iter()
        .zip(centralities.par_iter())
        .map(|(g, c)| rooted_trees(&ChildOrder::new(g, c), d))
        .collect();
    timings.paths_ms = ms(t);
    Ok(Prepared { centralities, trees })
}

fn level_features(ds: &Dataset, prepared: &Prepared, level: usize) -> Result<LevelFeatures> {
    let interner = dataset_interner(ds, level, &prepared.centralities)?;
    let counts: Vec<HashMap<Vec<u32>, u64>> = ds
        .graphs
        .par_iter()
        .zip(prepared.centralities.par_iter())
        .zip(prepared.trees.par_iter())
        .map(|((g, c), trees)| {
            let order = ChildOrder::new(g, c);
            let labels = vertex_level_labels(&order, level, &interner)?;
            Ok(count_patterns(trees, &labels))
        })
        .collect::<Result<_>>()?;

    let mut vocabulary: Vec<&Vec<u32>> = counts.iter().flat_map(|m| m.keys()).collect();
    vocabulary.par_sort_unstable();
    vocabulary.dedup();
    let index: HashMap<&Vec<u32>, u32> = vocabulary
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i as u32))
        .collect();
    let vectors = counts
        .par_iter()
        .map(|m| {
            let mut v: Vec<(u32, u64)> = m.iter().map(|(p, &c)| (index[p], c)).collect();
            v.sort_unstable();
            v
        })
        .collect();
    let vocabulary = vocabulary
        .into_iter()
        .map(|p| PathPattern::from_canonical(p.clone()))
        .collect();
    Ok(LevelFeatures {
        level,
        vocabulary,
        vectors,
    })
}

/// Sparse vectors and vocabulary of every level `0..=k`.
pub fn dataset_features(ds: &Dataset, d: usize, k: usize) -> Result<Vec<LevelFeatures>> {
    TreeppParams::new(d, k, false).validate()?;
    let prepared = prepare(ds, d, &mut PhaseTimings::default())?;
    (0..=k).map(|level| level_features(ds, &prepared, level)).collect()
}

fn sparse_dot(a: &[(u32, u64)], b: &[(u32, u64)]) -> Option<u64> {
    let (mut i, mut j) = (0, 0);
    let mut acc = 0u64;
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc = acc.checked_add(a[i].1.checked_mul(b[j].1)?)?;
                i += 1;
                j += 1;
            }
        }
    }
    Some(acc)
}

fn gram(vectors: &[Vec<(u32, u64)>]) -> Result<Vec<u64>> {
    let n = vectors.len();
    let upper: Vec<Vec<u64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| sparse_dot(&vectors[i], &vectors[j]).ok_or(Error::Overflow))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut out = vec![0u64; n * n];
    for (i, row) in upper.iter().enumerate() {
        for (offset, &v) in row.iter().enumerate() {
            let j = i + offset;
            out[i * n + j] = v;
            out[j * n + i] = v;
        }
    }
    Ok(out)
}

/// Unnormalized Gram matrices for every level `0..=k_max`.
pub fn treepp_level_grams(ds: &Dataset, d: usize, k_max: usize) -> Result<LevelGrams> {
    TreeppParams::new(d, k_max, false).validate()?;
    let mut timings = PhaseTimings::default();
    let prepared = prepare(ds, d, &mut timings)?;
    let mut grams = Vec::with_capacity(k_max + 1);
    let mut vocab_sizes = Vec::with_capacity(k_max + 1);
    for level in 0..=k_max {
        let t = Instant::now();
        let features = level_features(ds, &prepared, level)?;
        timings.features_ms.push(ms(t));
        let t = Instant::now();
        grams.push(gram(&features.vectors)?);
        timings.gram_ms += ms(t);
        vocab_sizes.push(features.vocabulary.len());
    }
    Ok(LevelGrams {
        n: ds.len(),
        d,
        grams,
        vocab_sizes,
        timings,
    })
}

/// A kernel matrix together with the statistics of its computation.
#[derive(Debug, Clone)]
pub struct KernelComputation {
    pub matrix: KernelMatrix,
    pub vocab_sizes: Vec<usize>,
    pub timings: PhaseTimings,
}

pub fn compute_treepp(ds: &Dataset, params: TreeppParams) -> Result<KernelComputation> {
    let levels = treepp_level_grams(ds, params.d, params.k)?;
    let raw = KernelMatrix::from_counts(ds.len(), &levels.cumulative(params.k)?)?
        .with_params(TreeppParams { normalize: false, ..params });
    let mut timings = levels.timings;
    let t = Instant::now();
    let matrix = if params.normalize {
        normalize_matrix(&raw)?
    } else {
        raw
    };
    timings.normalize_ms = ms(t);
    Ok(KernelComputation {
        matrix,
        vocab_sizes: levels.vocab_sizes,
        timings,
    })
}

/// `K = sum over levels 0..=k` of the level kernels, optionally cosine-normalized.
pub fn treepp_kernel_matrix(ds: &Dataset, params: TreeppParams) -> Result<KernelMatrix> {
    compute_treepp(ds, params).map(|c| c.matrix)
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, example_pair};

    fn example_dataset() -> Dataset {
        let (g1, g2) = example_pair();
        Dataset::new("fig3", vec![g1, g2], vec![0, 1]).unwrap()
    }

    fn features(g: &Graph, ds: &Dataset, d: usize, level: usize) -> FeatureMap {
        let cs: Vec<_> = ds.graphs.iter().map(default_centrality).collect();
        let interner = dataset_interner(ds, level, &cs).unwrap();
        extract_features(g, d, level, &interner, &default_centrality(g)).unwrap()
    }

    fn dense(f: &FeatureMap, vocab: &[&[u32]]) -> Vec<u64> {
        vocab
            .iter()
            .map(|p| f.count(&crate::tree::canonical_pattern(p).unwrap()))
            .collect()
    }

    const EXAMPLE_VOCAB: [&[u32]; 9] = [&[1], &[1, 1], &[1, 4], &[2], &[2, 3], &[3], &[3, 3], &[3, 4], &[4]];

    #[test]
    fn example_feature_vectors() {
        let ds = example_dataset();
        let f1 = features(&ds.graphs[0], &ds, 1, 0);
        let f2 = features(&ds.graphs[1], &ds, 1, 0);
        assert_eq!(dense(&f1, &EXAMPLE_VOCAB), vec![2, 0, 4, 1, 2, 2, 2, 4, 1]);
        assert_eq!(dense(&f2, &EXAMPLE_VOCAB), vec![2, 2, 2, 1, 2, 2, 2, 4, 1]);
        assert_eq!(f1.total(), 18);
        assert_eq!(kernel_level(&f1, &f2).unwrap(), 42);
        assert_eq!(kernel_level(&f1, &f1).unwrap(), 50);
        assert_eq!(kernel_level(&f2, &f2).unwrap(), 42);
    }

    #[test]
    fn single_vertex_features() {
        let g = build_graph(&[], &[7]).unwrap();
        let ds = Dataset::unlabeled("one", vec![g.clone()]);
        for d in 0..4 {
            let f = features(&g, &ds, d, 0);
            assert_eq!(f.sorted(), vec![(crate::tree::canonical_pattern(&[7]).unwrap(), 1)]);
        }
    }

    #[test]
    fn disjoint_alphabets_give_zero() {
        let a = build_graph(&[(0, 1)], &[1, 2]).unwrap();
        let b = build_graph(&[(0, 1)], &[3, 4]).unwrap();
        let ds = Dataset::unlabeled("ab", vec![a.clone(), b.clone()]);
        assert_eq!(kernel_level(&features(&a, &ds, 2, 0), &features(&b, &ds, 2, 0)).unwrap(), 0);
    }

    #[test]
    fn provenance_mismatch() {
        let ds = example_dataset();
        let f1 = features(&ds.graphs[0], &ds, 1, 0);
        let f2 = features(&ds.graphs[1], &ds, 2, 0);
        assert!(matches!(kernel_level(&f1, &f2), Err(Error::ProvenanceMismatch(_))));
    }

    #[test]
    fn example_matrix() {
        let ds = example_dataset();
        let m = treepp_kernel_matrix(&ds, TreeppParams::new(1, 0, false)).unwrap();
        assert_eq!(m.entries(), &[50.0, 42.0, 42.0, 42.0]);
        let levels = dataset_features(&ds, 1, 0).unwrap();
        let vocab: Vec<Vec<u32>> = levels[0].vocabulary.iter().map(|p| p.labels().to_vec()).collect();
        assert_eq!(vocab, EXAMPLE_VOCAB.iter().map(|p| p.to_vec()).collect::<Vec<_>>());
        assert_eq!(
            levels[0].dense(),
            vec![vec![2, 0, 4, 1, 2, 2, 2, 4, 1], vec![2, 2, 2, 1, 2, 2, 2, 4, 1]]
        );
    }

    #[test]
    fn example_matrix_with_one_level() {
        let ds = example_dataset();
        let m = treepp_kernel_matrix(&ds, TreeppParams::new(1, 1, false)).unwrap();
        let oracle = |a: &Graph, b: &Graph| oracle_kernel(a, b, TreeppParams::new(1, 1, false)).unwrap() as f64;
        assert_eq!(m.get(0, 1), oracle(&ds.graphs[0], &ds.graphs[1]));
        assert_eq!(m.get(0, 0), oracle(&ds.graphs[0], &ds.graphs[0]));
        // Hand count of the depth-1 signature patterns, confirmed by the oracle.
        assert_eq!(m.entries(), &[90.0, 53.0, 53.0, 72.0]);
    }

    #[test]
    fn rejects_empty_inputs() {
        let empty = Dataset::unlabeled("none", vec![]);
        assert!(matches!(
            treepp_kernel_matrix(&empty, TreeppParams::new(1, 0, false)),
            Err(Error::EmptyDataset)
        ));
        let ds = Dataset::unlabeled("hollow", vec![build_graph(&[], &[]).unwrap()]);
        assert!(matches!(
            treepp_kernel_matrix(&ds, TreeppParams::new(1, 0, false)),
            Err(Error::EmptyGraph { index: 0 })
        ));
        assert!(matches!(
            treepp_kernel_matrix(&example_dataset(), TreeppParams::new(17, 0, false)),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn sparse_dot_overflow() {
        assert_eq!(sparse_dot(&[(0, 3), (2, 5)], &[(1, 7), (2, 2)]), Some(10));
        assert_eq!(sparse_dot(&[(0, u64::MAX)], &[(0, 2)]), None);
    }
}
