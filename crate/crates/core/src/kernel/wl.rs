//! Weisfeiler-Lehman subtree kernel, used as a reference point for the
//! degenerate Tree++ settings.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::Dataset;

use super::KernelMatrix;

fn histogram_gram(labels: &[Vec<u32>], out: &mut [u64]) -> Result<()> {
    let n = labels.len();
    let hists: Vec<HashMap<u32, u64>> = labels
        .iter()
        .map(|ls| {
            let mut h = HashMap::new();
            for &l in ls {
                *h.entry(l).or_insert(0) += 1;
            }
            h
        })
        .collect();
    for i in 0..n {
        for j in i..n {
            let mut dot = 0u64;
            for (l, &a) in &hists[i] {
                if let Some(&b) = hists[j].get(l) {
                    dot = a
                        .checked_mul(b)
                        .and_then(|x| dot.checked_add(x))
                        .ok_or(Error::Overflow)?;
                }
            }
            out[i * n + j] = out[i * n + j].checked_add(dot).ok_or(Error::Overflow)?;
            if i != j {
                out[j * n + i] = out[i * n + j];
            }
        }
    }
    Ok(())
}

/// Sum over refinement rounds `0..=h` of label-histogram dot products.
///
/// Each round relabels a vertex by its own label together with the sorted
/// multiset of neighbor labels, compressed to a fresh id shared across the
/// whole dataset.
pub fn wl_subtree_kernel_matrix(ds: &Dataset, h: usize) -> Result<KernelMatrix> {
    let n = ds.len();
    let mut labels: Vec<Vec<u32>> = ds.graphs.iter().map(|g| g.labels().to_vec()).collect();
    let mut gram = vec![0u64; n * n];
    histogram_gram(&labels, &mut gram)?;
    for _ in 0..h {
        let mut compressed: HashMap<(u32, Vec<u32>), u32> = HashMap::new();
        let next: Vec<Vec<u32>> = ds
            .graphs
            .iter()
            .zip(&labels)
            .map(|(g, current)| {
                (0..g.num_vertices())
                    .map(|v| {
                        let mut nbrs: Vec<u32> = g.neighbors(v).iter().map(|&u| current[u]).collect();
                        nbrs.sort_unstable();
                        let fresh = compressed.len() as u32 + 1;
                        *compressed.entry((current[v], nbrs)).or_insert(fresh)
                    })
                    .collect()
            })
            .collect();
        labels = next;
        histogram_gram(&labels, &mut gram)?;
    }
    KernelMatrix::from_counts(n, &gram)
}
