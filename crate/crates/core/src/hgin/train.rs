use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::loss::{accumulate_example, gap_penalty, gap_penalty_grad, pair_score, PairInput};
use super::Model;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Optimizer {
    /// Plain gradient descent with a fixed step.
    Sgd,
    Adam { beta1: f64, beta2: f64, epsilon: f64 },
}

impl Optimizer {
    pub fn adam() -> Self {
        Optimizer::Adam { beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub optimizer: Optimizer,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { epochs: 50, batch_size: 32, learning_rate: 1e-3, seed: 0, optimizer: Optimizer::Sgd }
    }
}

/// A validation example. `pair` is `None` when an upstream filter already
/// rejected it; such items always count as predicted negative.
#[derive(Debug, Clone)]
pub struct EvalItem {
    pub pair: Option<PairInput>,
    pub positive: bool,
}

#[derive(Debug, Clone, Default)]
pub struct TrainingData {
    pub train: Vec<(PairInput, bool)>,
    pub val: Vec<EvalItem>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean per-example loss over the epoch's batches (gap penalty included once per batch).
    pub train_loss: f64,
    pub val_accuracy: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Parameters from the epoch with the best validation accuracy.
    pub model: Model,
    pub best_epoch: usize,
    pub history: Vec<EpochStats>,
}

#[derive(Debug, Error, PartialEq)]
pub enum TrainError {
    #[error("training diverged (non-finite loss) in epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("no training examples")]
    EmptyTrainingSet,
    #[error("batch size must be positive")]
    ZeroBatch,
}

pub fn accuracy(model: &Model, items: &[EvalItem]) -> f64 {
    if items.is_empty() {
        return 0.0;
    }
    let correct = items
        .iter()
        .filter(|it| {
            let predicted = it.pair.as_ref().is_some_and(|p| pair_score(model, p) <= model.config.threshold);
            predicted == it.positive
        })
        .count();
    correct as f64 / items.len() as f64
}

struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

pub fn train(mut model: Model, data: &TrainingData, cfg: &TrainConfig) -> Result<TrainOutcome, TrainError> {
    if data.train.is_empty() {
        return Err(TrainError::EmptyTrainingSet);
    }
    if cfg.batch_size == 0 {
        return Err(TrainError::ZeroBatch);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..data.train.len()).collect();
    let mut adam = AdamState { m: vec![0.0; model.params.len()], v: vec![0.0; model.params.len()], t: 0 };

    let mut best = (accuracy(&model, &data.val), model.params.clone(), 0);
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut grad = vec![0.0; model.params.len()];

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            // Examples are reduced in batch order so the sum is reproducible.
            for &i in batch {
                let (pair, positive) = &data.train[i];
                epoch_loss += accumulate_example(&model, pair, *positive, &mut grad);
            }
            epoch_loss += gap_penalty(&model) * batch.len() as f64 / data.train.len() as f64;
            gap_penalty_grad(&model, &mut grad);
            if !epoch_loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(TrainError::Diverged { epoch });
            }
            step(&mut model.params, &grad, cfg, &mut adam);
        }
        if model.params.iter().any(|p| !p.is_finite()) {
            return Err(TrainError::Diverged { epoch });
        }
        let val_accuracy = accuracy(&model, &data.val);
        history.push(EpochStats { epoch, train_loss: epoch_loss / data.train.len() as f64, val_accuracy });
        if val_accuracy >= best.0 {
            best = (val_accuracy, model.params.clone(), epoch);
        }
    }
    model.params = best.1;
    Ok(TrainOutcome { model, best_epoch: best.2, history })
}

fn step(params: &mut [f64], grad: &[f64], cfg: &TrainConfig, adam: &mut AdamState) {
    let lr = cfg.learning_rate;
    match cfg.optimizer {
        Optimizer::Sgd => {
            for (p, g) in params.iter_mut().zip(grad) {
                *p -= lr * g;
            }
        }
        Optimizer::Adam { beta1, beta2, epsilon } => {
            adam.t += 1;
            let c1 = 1.0 - beta1.powi(adam.t);
            let c2 = 1.0 - beta2.powi(adam.t);
            for i in 0..params.len() {
                adam.m[i] = beta1 * adam.m[i] + (1.0 - beta1) * grad[i];
                adam.v[i] = beta2 * adam.v[i] + (1.0 - beta2) * grad[i] * grad[i];
                params[i] -= lr * (adam.m[i] / c1) / ((adam.v[i] / c2).sqrt() + epsilon);
            }
        }
    }
}
