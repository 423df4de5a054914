//! C-SVM on a precomputed kernel, solved in the dual by SMO.
//!
//! The dual is `min 1/2 a'Qa - e'a` subject to `0 <= a_i <= C` and `y'a = 0`
//! with `Q_ij = y_i y_j K_ij`. Each step picks the maximal violating index `i`
//! and the partner `j` with the best second-order gain, then solves the
//! two-variable subproblem in closed form.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::KernelMatrix;

pub const DEFAULT_TOLERANCE: f64 = 1e-3;
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SvmModel {
    pub support_indices: Vec<usize>,
    /// `alpha_i * y_i` for each support vector.
    pub dual_coefficients: Vec<f64>,
    pub bias: f64,
    pub c: f64,
    pub train_size: usize,
    pub iterations: usize,
    pub converged: bool,
}

impl SvmModel {
    pub fn decision_value(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.train_size {
            return Err(Error::DimensionMismatch {
                expected: self.train_size,
                found: row.len(),
            });
        }
        let sum: f64 = self
            .support_indices
            .iter()
            .zip(&self.dual_coefficients)
            .map(|(&i, &a)| a * row[i])
            .sum();
        Ok(sum + self.bias)
    }
}

fn check_inputs(k: &KernelMatrix, y: &[f64], c: f64, tol: f64) -> Result<()> {
    if y.len() != k.n() {
        return Err(Error::DimensionMismatch {
            expected: k.n(),
            found: y.len(),
        });
    }
    if let Some(&bad) = y.iter().find(|&&v| v != 1.0 && v != -1.0) {
        return Err(Error::InvalidSvmLabel(bad));
    }
    if !(y.contains(&1.0) && y.contains(&-1.0)) {
        return Err(Error::SingleClass);
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParams(format!("C must be positive, got {c}")));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParams(format!("tolerance must be positive, got {tol}")));
    }
    if let Some(i) = k.entries().iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteKernel {
            row: i / k.n(),
            col: i % k.n(),
        });
    }
    Ok(())
}

pub fn train_svm(k: &KernelMatrix, y: &[f64], c: f64, tol: f64) -> Result<SvmModel> {
    check_inputs(k, y, c, tol)?;
    let n = y.len();
    let mut alpha = vec![0.0f64; n];
    let mut grad = vec![-1.0f64; n];
    let at_upper = |a: f64| a >= c;
    let at_lower = |a: f64| a <= 0.0;
    let max_iter = (100 * n).max(10_000_000);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        // i: maximal violator in I_up
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            let up = if y[t] > 0.0 { !at_upper(alpha[t]) } else { !at_lower(alpha[t]) };
            if up && -y[t] * grad[t] > gmax {
                gmax = -y[t] * grad[t];
                i_sel = Some(t);
            }
        }
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_sel = None;
        let mut best = f64::INFINITY;
        if let Some(i) = i_sel {
            let ki = k.row(i);
            for t in 0..n {
                let low = if y[t] > 0.0 { !at_lower(alpha[t]) } else { !at_upper(alpha[t]) };
                if !low {
                    continue;
                }
                gmax2 = gmax2.max(y[t] * grad[t]);
                let b = gmax + y[t] * grad[t];
                if b > 0.0 {
                    let mut a = ki[i] + k.get(t, t) - 2.0 * y[i] * y[t] * ki[t];
                    if a <= 0.0 {
                        a = TAU;
                    }
                    let obj = -(b * b) / a;
                    if obj < best {
                        best = obj;
                        j_sel = Some(t);
                    }
                }
            }
        }
        if gmax + gmax2 < tol {
            converged = true;
            break;
        }
        let (Some(i), Some(j)) = (i_sel, j_sel) else {
            converged = true;
            break;
        };
        iterations += 1;

        let (ki, kj) = (k.row(i), k.row(j));
        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            // Q_ij = -K_ij when the labels differ
            let mut quad = ki[i] + kj[j] - 2.0 * ki[j];
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = ki[i] + kj[j] - 2.0 * ki[j];
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * ki[t] * di + y[j] * kj[t] * dj);
        }
    }

    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut free = 0usize;
    for t in 0..n {
        let yg = y[t] * grad[t];
        if at_upper(alpha[t]) {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if at_lower(alpha[t]) {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    let rho = if free > 0 { free_sum / free as f64 } else { (ub + lb) / 2.0 };

    let (support_indices, dual_coefficients) = (0..n)
        .filter(|&t| alpha[t] > 0.0)
        .map(|t| (t, alpha[t] * y[t]))
        .unzip();
    Ok(SvmModel {
        support_indices,
        dual_coefficients,
        bias: -rho,
        c,
        train_size: n,
        iterations,
        converged,
    })
}

/// Signs of the decision values; an exact zero counts as `+1`.
pub fn predict(model: &SvmModel, k_cross: &[Vec<f64>]) -> Result<Vec<f64>> {
    k_cross
        .iter()
        .map(|row| {
            model
                .decision_value(row)
                .map(|v| if v >= 0.0 { 1.0 } else { -1.0 })
        })
        .collect()
}
