use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::kernel::KernelMatrix;

use super::svm::{train_svm, SvmModel};

/// One binary machine per class pair; prediction by majority vote with ties
/// going to the smaller class value.
#[derive(Debug, Clone)]
pub struct OvoClassifier {
    classes: Vec<i64>,
    machines: Vec<PairMachine>,
    train_size: usize,
}

#[derive(Debug, Clone)]
struct PairMachine {
    positive: usize,
    negative: usize,
    members: Vec<usize>,
    model: SvmModel,
}

impl OvoClassifier {
    pub fn classes(&self) -> &[i64] {
        &self.classes
    }

    pub fn models(&self) -> impl Iterator<Item = &SvmModel> {
        self.machines.iter().map(|m| &m.model)
    }

    /// `k_cross` rows run over all training samples.
    pub fn predict(&self, k_cross: &[Vec<f64>]) -> Result<Vec<i64>> {
        k_cross
            .iter()
            .map(|row| {
                if row.len() != self.train_size {
                    return Err(Error::DimensionMismatch {
                        expected: self.train_size,
                        found: row.len(),
                    });
                }
                let mut votes = vec![0usize; self.classes.len()];
                for m in &self.machines {
                    let sub: Vec<f64> = m.members.iter().map(|&i| row[i]).collect();
                    if m.model.decision_value(&sub)? >= 0.0 {
                        votes[m.positive] += 1;
                    } else {
                        votes[m.negative] += 1;
                    }
                }
                let best = votes.iter().copied().max().unwrap_or(0);
                let winner = votes.iter().position(|&v| v == best).unwrap_or(0);
                Ok(self.classes[winner])
            })
            .collect()
    }
}

pub fn train_ovo(k: &KernelMatrix, y: &[i64], c: f64, tol: f64) -> Result<OvoClassifier> {
    if y.len() != k.n() {
        return Err(Error::DimensionMismatch {
            expected: k.n(),
            found: y.len(),
        });
    }
    let mut by_class: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &label) in y.iter().enumerate() {
        by_class.entry(label).or_default().push(i);
    }
    if by_class.len() < 2 {
        return Err(Error::SingleClass);
    }
    let classes: Vec<i64> = by_class.keys().copied().collect();
    let groups: Vec<&Vec<usize>> = by_class.values().collect();
    let mut machines = Vec::new();
    for a in 0..classes.len() {
        for b in a + 1..classes.len() {
            let mut members: Vec<usize> = groups[a].iter().chain(groups[b]).copied().collect();
            members.sort_unstable();
            let signs: Vec<f64> = members
                .iter()
                .map(|&i| if y[i] == classes[a] { 1.0 } else { -1.0 })
                .collect();
            let model = train_svm(&k.select(&members), &signs, c, tol)?;
            machines.push(PairMachine {
                positive: a,
                negative: b,
                members,
                model,
            });
        }
    }
    Ok(OvoClassifier {
        classes,
        machines,
        train_size: y.len(),
    })
}
