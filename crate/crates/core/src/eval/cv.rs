//! Repeated stratified k-fold cross-validation with nested selection of C.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::KernelMatrix;

use super::multiclass::train_ovo;
use super::svm::DEFAULT_TOLERANCE;

pub const DEFAULT_C_GRID: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];

#[derive(Debug, Clone, PartialEq)]
pub struct CvConfig {
    pub folds: usize,
    pub repeats: usize,
    pub c_grid: Vec<f64>,
    pub seed: u64,
    pub tol: f64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 10,
            repeats: 10,
            c_grid: DEFAULT_C_GRID.to_vec(),
            seed: 42,
            tol: DEFAULT_TOLERANCE,
        }
    }
}

/// Accuracies are percentages. `folds` is the number actually used, which can
/// be lower than requested when a class is small.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvResult {
    pub dataset: String,
    pub d: Option<usize>,
    pub k: Option<usize>,
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
    pub c_grid: Vec<f64>,
    pub mean_accuracy: f64,
    pub std_dev: f64,
    pub per_repeat: Vec<f64>,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

impl CvResult {
    pub fn with_run(mut self, dataset: &str, d: Option<usize>, k: Option<usize>) -> Self {
        self.dataset = dataset.to_string();
        self.d = d;
        self.k = k;
        self
    }
}

/// Test folds, each sorted. Every class is shuffled and dealt round-robin,
/// continuing the deal across classes so fold sizes differ by at most one.
pub fn stratified_folds(y: &[i64], folds: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut by_class: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &c) in y.iter().enumerate() {
        by_class.entry(c).or_default().push(i);
    }
    let mut out = vec![Vec::new(); folds];
    let mut next = 0;
    for members in by_class.values_mut() {
        members.shuffle(rng);
        for &i in members.iter() {
            out[next % folds].push(i);
            next += 1;
        }
    }
    for f in &mut out {
        f.sort_unstable();
    }
    out
}

fn complement(n: usize, test: &[usize]) -> Vec<usize> {
    let mut mask = vec![true; n];
    for &i in test {
        mask[i] = false;
    }
    (0..n).filter(|&i| mask[i]).collect()
}

fn min_class_count(y: &[i64]) -> usize {
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for &c in y {
        *counts.entry(c).or_insert(0) += 1;
    }
    counts.values().copied().min().unwrap_or(0)
}

fn accuracy(k: &KernelMatrix, y: &[i64], train: &[usize], test: &[usize], c: f64, tol: f64) -> Result<f64> {
    let y_train: Vec<i64> = train.iter().map(|&i| y[i]).collect();
    let clf = train_ovo(&k.select(train), &y_train, c, tol)?;
    let predicted = clf.predict(&k.cross(test, train))?;
    let correct = predicted
        .iter()
        .zip(test)
        .filter(|(p, &i)| **p == y[i])
        .count();
    Ok(100.0 * correct as f64 / test.len() as f64)
}

/// Best C on `train` by inner stratified CV; the earliest grid entry wins ties.
fn select_c(k: &KernelMatrix, y: &[i64], train: &[usize], cfg: &CvConfig, outer_folds: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let y_train: Vec<i64> = train.iter().map(|&i| y[i]).collect();
    let inner = (outer_folds - 1).min(min_class_count(&y_train));
    if cfg.c_grid.len() == 1 || inner < 2 {
        return Ok(cfg.c_grid[0]);
    }
    let k_train = k.select(train);
    let splits = stratified_folds(&y_train, inner, rng);
    let mut best = (f64::NEG_INFINITY, cfg.c_grid[0]);
    for &c in &cfg.c_grid {
        let mut total = 0.0;
        for test in &splits {
            let fit = complement(train.len(), test);
            total += accuracy(&k_train, &y_train, &fit, test, c, cfg.tol)?;
        }
        let score = total / splits.len() as f64;
        if score > best.0 {
            best = (score, c);
        }
    }
    Ok(best.1)
}

fn cmp_rows(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Sample order that depends on the samples rather than their positions:
/// by class, self-similarity, then the sorted kernel row.
fn canonical_order(k: &KernelMatrix, y: &[i64]) -> Vec<usize> {
    let keys: Vec<Vec<f64>> = (0..k.n())
        .map(|i| {
            let mut row = k.row(i).to_vec();
            row.sort_by(f64::total_cmp);
            row
        })
        .collect();
    let mut order: Vec<usize> = (0..k.n()).collect();
    order.sort_by(|&a, &b| {
        y[a].cmp(&y[b])
            .then(k.get(a, a).total_cmp(&k.get(b, b)))
            .then_with(|| cmp_rows(&keys[a], &keys[b]))
            .then(a.cmp(&b))
    });
    order
}

fn validate(k: &KernelMatrix, y: &[i64], cfg: &CvConfig) -> Result<()> {
    if y.len() != k.n() {
        return Err(Error::DimensionMismatch {
            expected: k.n(),
            found: y.len(),
        });
    }
    if cfg.folds < 2 || cfg.repeats == 0 {
        return Err(Error::InvalidParams(format!(
            "need folds >= 2 and repeats >= 1, got {} and {}",
            cfg.folds, cfg.repeats
        )));
    }
    if cfg.c_grid.is_empty() || cfg.c_grid.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
        return Err(Error::InvalidParams(format!(
            "C grid must be non-empty and positive, got {:?}",
            cfg.c_grid
        )));
    }
    if let Some(i) = k.entries().iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteKernel {
            row: i / k.n(),
            col: i % k.n(),
        });
    }
    let mut classes = y.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::SingleClass);
    }
    Ok(())
}

/// Runs `cfg.repeats` rounds of stratified `cfg.folds`-fold CV. Each outer
/// training set picks its own C by nested CV with one fold fewer.
///
/// Folds run in parallel; results are reduced in (repeat, fold) order, so
/// the output does not depend on the thread count. The sample order of `k`
/// and `y` does not affect the result either.
pub fn cross_validate(k: &KernelMatrix, y: &[i64], cfg: &CvConfig) -> Result<CvResult> {
    validate(k, y, cfg)?;
    let mut warnings = Vec::new();
    let smallest = min_class_count(y);
    if smallest < 2 {
        return Err(Error::InsufficientSamples(format!(
            "a class has {smallest} member; stratified CV needs at least 2"
        )));
    }
    let folds = if smallest < cfg.folds {
        warnings.push(format!(
            "smallest class has {smallest} members; using {smallest} folds instead of {}",
            cfg.folds
        ));
        smallest
    } else {
        cfg.folds
    };

    let order = canonical_order(k, y);
    let k = k.select(&order);
    let y: Vec<i64> = order.iter().map(|&i| y[i]).collect();

    let mut jobs = Vec::new();
    for r in 0..cfg.repeats {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(r as u64));
        for (f, test) in stratified_folds(&y, folds, &mut rng).into_iter().enumerate() {
            jobs.push((r, f, test));
        }
    }
    let accuracies: Vec<f64> = jobs
        .par_iter()
        .map(|(r, f, test)| {
            let train = complement(y.len(), test);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(*r as u64));
            rng.set_stream(*f as u64 + 1);
            let c = select_c(&k, &y, &train, cfg, folds, &mut rng)?;
            accuracy(&k, &y, &train, test, c, cfg.tol)
        })
        .collect::<Result<_>>()?;

    let per_repeat: Vec<f64> = accuracies
        .chunks(folds)
        .map(|fs| fs.iter().sum::<f64>() / folds as f64)
        .collect();
    let mean = per_repeat.iter().sum::<f64>() / per_repeat.len() as f64;
    let var = per_repeat.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / per_repeat.len() as f64;
    Ok(CvResult {
        dataset: String::new(),
        d: None,
        k: None,
        folds,
        repeats: cfg.repeats,
        seed: cfg.seed,
        c_grid: cfg.c_grid.clone(),
        mean_accuracy: mean,
        std_dev: var.sqrt(),
        per_repeat,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_blocks(per_class: usize) -> (KernelMatrix, Vec<i64>) {
        let y: Vec<i64> = (0..2 * per_class).map(|i| (i % 2) as i64).collect();
        let n = y.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if y[i] == y[j] { 1.0 } else { 0.0 }).collect())
            .collect();
        (KernelMatrix::from_rows(&rows, true).unwrap(), y)
    }

    #[test]
    fn folds_are_stratified_partitions() {
        let y: Vec<i64> = (0..37).map(|i| if i % 3 == 0 { 1 } else { 0 }).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let folds = stratified_folds(&y, 10, &mut rng);
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        assert_eq!(all, (0..37).collect::<Vec<_>>());
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        for f in &folds {
            let ones = f.iter().filter(|&&i| y[i] == 1).count();
            assert!((1..=2).contains(&ones));
        }
    }

    #[test]
    fn separable_blocks_are_perfect() {
        let (k, y) = two_blocks(15);
        let r = cross_validate(&k, &y, &CvConfig::default()).unwrap();
        assert_eq!(r.mean_accuracy, 100.0);
        assert_eq!(r.std_dev, 0.0);
        assert_eq!(r.per_repeat.len(), 10);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn small_class_reduces_folds() {
        let (k, y) = two_blocks(4);
        let r = cross_validate(&k, &y, &CvConfig::default()).unwrap();
        assert_eq!(r.folds, 4);
        assert_eq!(r.warnings.len(), 1);
        let (k, mut y) = two_blocks(4);
        y[0] = 7;
        assert!(matches!(
            cross_validate(&k, &y, &CvConfig::default()),
            Err(Error::InsufficientSamples(_))
        ));
    }

    #[test]
    fn rejects_bad_config() {
        let (k, y) = two_blocks(5);
        let cfg = CvConfig {
            c_grid: vec![],
            ..CvConfig::default()
        };
        assert!(cross_validate(&k, &y, &cfg).is_err());
        assert!(matches!(
            cross_validate(&k, &[0; 10], &CvConfig::default()),
            Err(Error::SingleClass)
        ));
    }

    #[test]
    fn result_json_fields() {
        let (k, y) = two_blocks(10);
        let cfg = CvConfig {
            repeats: 2,
            ..CvConfig::default()
        };
        let r = cross_validate(&k, &y, &cfg).unwrap().with_run("blocks", Some(6), Some(2));
        let v = serde_json::to_value(&r).unwrap();
        for key in ["dataset", "d", "k", "folds", "repeats", "seed", "mean_accuracy", "std_dev", "per_repeat"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["dataset"], "blocks");
    }
}
