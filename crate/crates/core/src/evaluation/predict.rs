use std::collections::BTreeSet;

use log::warn;
use ndarray::{Array1, ArrayView1};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learning::{HeadParams, HEAD_HIDDEN};
use crate::params::Parameters;

/// One labelled politician.
#[derive(Clone, Debug, PartialEq)]
pub struct GradeExample {
    pub politician: String,
    pub features: Array1<f64>,
    pub class: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GradePredictConfig {
    pub folds: usize,
    pub seeds: Vec<u64>,
    pub hidden: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub momentum: f64,
}

impl Default for GradePredictConfig {
    fn default() -> Self {
        GradePredictConfig {
            folds: 10,
            seeds: vec![5, 7, 11, 13, 17],
            hidden: HEAD_HIDDEN,
            epochs: 60,
            learning_rate: 0.01,
            momentum: 0.4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedScore {
    pub seed: u64,
    pub validation: f64,
    pub test: f64,
}

/// Mean and sample standard deviation over seeds of the fold-averaged
/// accuracies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradePrediction {
    pub validation_mean: f64,
    pub validation_std: f64,
    pub test_mean: f64,
    pub test_std: f64,
    pub per_seed: Vec<SeedScore>,
}

/// Stratified fold assignment: each class is shuffled and dealt round-robin,
/// continuing where the previous class stopped.
pub fn assign_folds(classes: &[usize], folds: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut fold = vec![0; classes.len()];
    let distinct: BTreeSet<usize> = classes.iter().copied().collect();
    let mut next = 0;
    for c in distinct {
        let mut idx: Vec<usize> = (0..classes.len()).filter(|&i| classes[i] == c).collect();
        idx.shuffle(rng);
        for i in idx {
            fold[i] = next % folds;
            next += 1;
        }
    }
    fold
}

/// Classifier with one hidden layer and `n_classes` outputs, trained with
/// momentum SGD at batch size 1.
struct Mlp {
    // The two-way learning head generalises to k outputs by widening w2.
    head: HeadParams,
}

impl Mlp {
    fn new(input: usize, hidden: usize, classes: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut head = HeadParams::new(input, hidden, rng);
        head.w2 = crate::tensor::xavier_uniform(hidden, classes, 1.0, rng);
        head.b2 = Array1::zeros(classes);
        Mlp { head }
    }

    fn predict(&self, x: ArrayView1<f64>) -> Result<usize> {
        let c = self.head.forward(x)?;
        Ok(argmax(&c.probs))
    }
}

fn argmax(v: &Array1<f64>) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

fn accuracy(m: &Mlp, data: &[&GradeExample]) -> Result<f64> {
    if data.is_empty() {
        return Ok(0.0);
    }
    let mut correct = 0;
    for e in data {
        correct += usize::from(m.predict(e.features.view())? == e.class);
    }
    Ok(correct as f64 / data.len() as f64)
}

fn train_mlp(
    train: &[&GradeExample],
    val: &[&GradeExample],
    classes: usize,
    cfg: &GradePredictConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Mlp> {
    let dim = train[0].features.len();
    let mut model = Mlp::new(dim, cfg.hidden, classes, rng);
    let mut velocity = model.head.zeros_like();
    let mut grads = model.head.zeros_like();
    let mut best = (accuracy(&model, val)?, model.head.clone());
    let mut order: Vec<usize> = (0..train.len()).collect();
    for _ in 0..cfg.epochs {
        order.shuffle(rng);
        for &i in &order {
            let e = train[i];
            grads.fill_zero();
            let cache = model.head.forward(e.features.view())?;
            let mut dlogits = cache.probs.clone();
            dlogits[e.class] -= 1.0;
            model.head.backward_from_logits(&cache, dlogits.view(), &mut grads);
            let gs = grads.tensors();
            for (((_, mut p), (_, mut v)), (_, g)) in model
                .head
                .tensors_mut()
                .into_iter()
                .zip(velocity.tensors_mut())
                .zip(gs)
            {
                v.zip_mut_with(&g, |vi, &gi| *vi = cfg.momentum * *vi + gi);
                p.zip_mut_with(&v, |pi, &vi| *pi -= cfg.learning_rate * vi);
            }
        }
        let acc = accuracy(&model, val)?;
        if acc > best.0 {
            best = (acc, model.head.clone());
        }
    }
    model.head = best.1;
    Ok(model)
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// k-fold cross-validated grade classification, repeated per seed.
///
/// For fold `f`, fold `f` is the test set, fold `(f + 1) mod k` the
/// validation set used to pick the best epoch, and the rest train.
pub fn grade_predict(
    examples: &[GradeExample],
    n_classes: usize,
    cfg: &GradePredictConfig,
) -> Result<GradePrediction> {
    if cfg.folds < 3 {
        return Err(Error::Evaluation("at least 3 folds are required".into()));
    }
    if cfg.seeds.is_empty() {
        return Err(Error::Evaluation("no seeds given".into()));
    }
    if examples.len() < cfg.folds {
        return Err(Error::Evaluation(format!(
            "{} labelled politicians for {} folds",
            examples.len(),
            cfg.folds
        )));
    }
    let mut seen = BTreeSet::new();
    for e in examples {
        if !seen.insert(e.politician.as_str()) {
            return Err(Error::Evaluation(format!(
                "politician {} appears more than once; folds would leak",
                e.politician
            )));
        }
        if e.class >= n_classes {
            return Err(Error::Evaluation(format!(
                "class {} of {} out of range",
                e.class, e.politician
            )));
        }
        if e.features.len() != examples[0].features.len() {
            return Err(Error::Shape("feature widths differ".into()));
        }
    }

    let classes: Vec<usize> = examples.iter().map(|e| e.class).collect();
    let mut per_seed = Vec::new();
    for &seed in &cfg.seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fold = assign_folds(&classes, cfg.folds, &mut rng);
        let (mut val_acc, mut test_acc) = (Vec::new(), Vec::new());
        for f in 0..cfg.folds {
            let v = (f + 1) % cfg.folds;
            let pick = |k: usize| -> Vec<&GradeExample> {
                examples.iter().zip(&fold).filter(|(_, &x)| x == k).map(|(e, _)| e).collect()
            };
            let test = pick(f);
            let val = pick(v);
            let train: Vec<&GradeExample> = examples
                .iter()
                .zip(&fold)
                .filter(|(_, &x)| x != f && x != v)
                .map(|(e, _)| e)
                .collect();
            let train_classes: BTreeSet<usize> = train.iter().map(|e| e.class).collect();
            let all_classes: BTreeSet<usize> = classes.iter().copied().collect();
            if train_classes != all_classes {
                warn!("seed {seed} fold {f}: training split lacks some classes");
            }
            let model = train_mlp(&train, &val, n_classes, cfg, &mut rng)?;
            val_acc.push(accuracy(&model, &val)?);
            test_acc.push(accuracy(&model, &test)?);
        }
        per_seed.push(SeedScore {
            seed,
            validation: mean_std(&val_acc).0,
            test: mean_std(&test_acc).0,
        });
    }
    let (validation_mean, validation_std) =
        mean_std(&per_seed.iter().map(|s| s.validation).collect::<Vec<_>>());
    let (test_mean, test_std) = mean_std(&per_seed.iter().map(|s| s.test).collect::<Vec<_>>());
    Ok(GradePrediction {
        validation_mean,
        validation_std,
        test_mean,
        test_std,
        per_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_are_stratified_and_balanced() {
        let classes: Vec<usize> = (0..30).map(|i| i % 3).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = assign_folds(&classes, 10, &mut rng);
        for k in 0..10 {
            assert_eq!(f.iter().filter(|&&x| x == k).count(), 3);
        }
    }

    #[test]
    fn sample_std() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert_eq!(s, 1.0);
    }

    #[test]
    fn duplicate_politician_is_degenerate() {
        let e = GradeExample {
            politician: "p".into(),
            features: Array1::zeros(2),
            class: 0,
        };
        let data = vec![e; 12];
        assert!(matches!(
            grade_predict(&data, 2, &GradePredictConfig::default()),
            Err(Error::Evaluation(_))
        ));
    }
}
