//! Eigenvector centrality by power iteration.
//!
//! The iteration multiplies by `A + I` rather than `A`. Both share the
//! dominant eigenvector on a connected graph, but the shifted operator has no
//! eigenvalue of equal magnitude and opposite sign, so bipartite graphs
//! converge instead of oscillating between two iterates.

use crate::graph::Graph;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 1000;

/// Two scores closer than this are treated as equal when ordering vertices.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CentralityVector {
    pub scores: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

impl CentralityVector {
    pub fn score(&self, v: usize) -> f64 {
        self.scores[v]
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Unit-norm dominant eigenvector of the adjacency operator.
///
/// Starts from the uniform vector `1/sqrt(n)` and stops once the largest
/// per-vertex change drops below `tol`, or after `max_iter` steps.
pub fn eigenvector_centrality(g: &Graph, tol: f64, max_iter: usize) -> CentralityVector {
    let n = g.num_vertices();
    if n == 0 {
        return CentralityVector {
            scores: Vec::new(),
            converged: true,
            iterations: 0,
        };
    }
    let start = 1.0 / (n as f64).sqrt();
    let mut x = vec![start; n];
    if g.num_edges() == 0 {
        return CentralityVector {
            scores: x,
            converged: true,
            iterations: 0,
        };
    }
    let mut next = vec![0.0; n];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter.max(1) {
        iterations += 1;
        for v in 0..n {
            next[v] = x[v] + g.neighbors(v).iter().map(|&u| x[u]).sum::<f64>();
        }
        let norm = next.iter().map(|s| s * s).sum::<f64>().sqrt();
        for s in &mut next {
            *s /= norm;
        }
        let change = x
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut x, &mut next);
        if change < tol {
            converged = true;
            break;
        }
    }
    CentralityVector {
        scores: x,
        converged,
        iterations,
    }
}

/// Centrality with the default tolerance and iteration cap.
pub fn default_centrality(g: &Graph) -> CentralityVector {
    eigenvector_centrality(g, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER)
}
