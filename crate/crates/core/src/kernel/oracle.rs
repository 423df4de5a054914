//! Brute-force reference for the Tree++ kernel on small graphs.
//!
//! Nothing here is shared with the main pipeline except the centrality scores:
//! trees are grown level by level, every signature is spelled out as a string
//! and every pattern is a joined string key in an ordered map.

use std::collections::{BTreeMap, HashSet};

use crate::centrality::{default_centrality, CentralityVector, TIE_TOLERANCE};
use crate::error::{Error, Result};
use crate::graph::Graph;

use super::TreeppParams;

pub const ORACLE_MAX_VERTICES: usize = 12;

/// Unnormalized Tree++ value of one pair, exact in integers.
pub fn oracle_kernel(g1: &Graph, g2: &Graph, params: TreeppParams) -> Result<u64> {
    for g in [g1, g2] {
        if g.num_vertices() > ORACLE_MAX_VERTICES {
            return Err(Error::OracleSizeExceeded {
                max: ORACLE_MAX_VERTICES,
                found: g.num_vertices(),
            });
        }
    }
    params.validate()?;
    let mut total = 0u64;
    for level in 0..=params.k {
        let a = pattern_counts(g1, params.d, level);
        let b = pattern_counts(g2, params.d, level);
        for (pattern, ca) in &a {
            if let Some(cb) = b.get(pattern) {
                total = ca
                    .checked_mul(*cb)
                    .and_then(|x| total.checked_add(x))
                    .ok_or(Error::Overflow)?;
            }
        }
    }
    Ok(total)
}

/// Pattern multiset of `g` keyed by strings.
pub fn pattern_counts(g: &Graph, d: usize, level: usize) -> BTreeMap<String, u64> {
    let c = default_centrality(g);
    let names: Vec<String> = (0..g.num_vertices())
        .map(|v| {
            if level == 0 {
                g.label(v).to_string()
            } else {
                signature_string(g, &c, v, level)
            }
        })
        .collect();
    let mut counts = BTreeMap::new();
    for root in 0..g.num_vertices() {
        for path in tree_paths(g, &c, root, d) {
            let forward: Vec<&str> = path.iter().map(|&v| names[v].as_str()).collect();
            let backward: Vec<&str> = forward.iter().rev().copied().collect();
            let key = forward.join("/").min(backward.join("/"));
            *counts.entry(key).or_insert(0) += 1;
        }
    }
    counts
}

fn sibling_order(g: &Graph, c: &CentralityVector, v: usize) -> Vec<usize> {
    let mut by_label: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for &u in g.neighbors(v) {
        by_label.entry(g.label(u)).or_default().push(u);
    }
    let mut out = Vec::new();
    for (_, mut group) in by_label {
        group.sort_by(|&a, &b| c.scores[a].total_cmp(&c.scores[b]).then(a.cmp(&b)));
        let mut run: Vec<usize> = Vec::new();
        for u in group {
            if let Some(&last) = run.last() {
                if c.scores[u] - c.scores[last] > TIE_TOLERANCE {
                    run.sort();
                    out.append(&mut run);
                }
            }
            run.push(u);
        }
        run.sort();
        out.append(&mut run);
    }
    out
}

/// Tree levels as lists of `(vertex, path from root)`.
fn tree_levels(g: &Graph, c: &CentralityVector, root: usize, depth: usize) -> Vec<Vec<(usize, Vec<usize>)>> {
    let mut seen = HashSet::from([root]);
    let mut levels = vec![vec![(root, vec![root])]];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (v, path) in levels.last().unwrap() {
            for u in sibling_order(g, c, *v) {
                if seen.insert(u) {
                    let mut p = path.clone();
                    p.push(u);
                    next.push((u, p));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }
    levels
}

fn tree_paths(g: &Graph, c: &CentralityVector, root: usize, depth: usize) -> Vec<Vec<usize>> {
    tree_levels(g, c, root, depth)
        .into_iter()
        .flatten()
        .map(|(_, p)| p)
        .collect()
}

/// Levels joined by `|`, labels within a level by `,`.
pub fn signature_string(g: &Graph, c: &CentralityVector, root: usize, depth: usize) -> String {
    tree_levels(g, c, root, depth)
        .iter()
        .map(|level| {
            level
                .iter()
                .map(|(v, _)| g.label(*v).to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join("|")
}
