//! Full-batch training with a stratified validation split, early stopping,
//! and best-checkpoint restoration.

use kg_core::{EntityId, KnowledgeGraph};
use rand::seq::SliceRandom;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

use crate::error::GnnError;
use crate::grad::{loss_and_gradients, mae};
use crate::matrix::Matrix;
use crate::model::{GnnModel, ModelSpec};

/// Number of target bins used for the stratified train/validation split,
/// matching the resolution used when histogramming scores.
pub const SPLIT_BINS: usize = 21;

/// Parameter update rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Optimizer {
    /// Plain gradient descent.
    Sgd,
    /// Adaptive moments with bias correction.
    Adam { beta1: f64, beta2: f64, epsilon: f64 },
}

impl Optimizer {
    /// Adam with the customary moment decay rates.
    pub fn default_adam() -> Self {
        Optimizer::Adam { beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }

    pub fn name(self) -> &'static str {
        match self {
            Optimizer::Sgd => "sgd",
            Optimizer::Adam { .. } => "adam",
        }
    }
}

impl FromStr for Optimizer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sgd" => Ok(Optimizer::Sgd),
            "adam" => Ok(Optimizer::default_adam()),
            other => Err(format!("unknown optimizer {other:?} (expected sgd or adam)")),
        }
    }
}

/// Hyper-parameters of one training run. The model shape itself lives in
/// [`ModelSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    /// Fraction of the labelled entities used for gradient steps; the rest
    /// form the validation split.
    pub train_fraction: f64,
    /// Consecutive epochs without a validation improvement tolerated before
    /// stopping.
    pub patience: usize,
    /// L2 penalty on weights and embeddings (biases exempt).
    pub weight_decay: f64,
    pub optimizer: Optimizer,
    /// Seeds both the parameter initialisation and the split shuffle.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            epochs: 200,
            train_fraction: 0.8,
            patience: 20,
            weight_decay: 0.0,
            optimizer: Optimizer::default_adam(),
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), GnnError> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(GnnError::InvalidConfig("learning_rate must be positive".into()));
        }
        if self.epochs == 0 {
            return Err(GnnError::InvalidConfig("epochs must be at least 1".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(GnnError::InvalidConfig("train_fraction must lie strictly between 0 and 1".into()));
        }
        if !(self.weight_decay.is_finite() && self.weight_decay >= 0.0) {
            return Err(GnnError::InvalidConfig("weight_decay must be non-negative".into()));
        }
        Ok(())
    }
}

/// One row of the training history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// Objective on the training split (MSE plus weight decay).
    pub train_loss: f64,
    /// Mean absolute error on the validation split, measured at the same
    /// parameters the loss was computed at.
    pub val_mae: f64,
}

/// A trained model together with how it got there.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    /// Parameters restored to the epoch with the best validation error.
    pub model: GnnModel,
    pub history: Vec<EpochStats>,
    pub best_val_mae: f64,
    pub best_epoch: usize,
    /// True when patience ran out before the epoch budget.
    pub stopped_early: bool,
    /// The split that was actually used, for inspection and reporting.
    pub train_labels: Vec<(EntityId, f64)>,
    pub val_labels: Vec<(EntityId, f64)>,
}

/// Quality of predictions on a labelled set.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EvalReport {
    pub n: usize,
    pub mae: f64,
    /// `1 - mae`, the headline accuracy figure.
    pub accuracy: f64,
    pub mse: f64,
}

/// Evaluate a model on a labelled set.
pub fn evaluate(
    model: &GnnModel,
    graph: &KnowledgeGraph,
    external: Option<&Matrix>,
    labels: &[(EntityId, f64)],
) -> Result<EvalReport, GnnError> {
    let predictions = model.predict(graph, external)?;
    let mae = mae(&predictions, labels);
    let mse = crate::grad::mse_loss(&predictions, labels);
    Ok(EvalReport { n: labels.len(), mae, accuracy: 1.0 - mae, mse })
}

/// Split labelled entities into train and validation sets, stratified so
/// that every occupied target bin contributes proportionally to both sides.
///
/// Labels are bucketed into [`SPLIT_BINS`] equal-width bins over `[0, 1]`,
/// each bin is shuffled with a seeded generator, and the first
/// `ceil(train_fraction * len)` of each bin go to the training side. If that
/// leaves the validation side empty, one training example is moved over.
pub fn stratified_split(
    labels: &[(EntityId, f64)],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<(EntityId, f64)>, Vec<(EntityId, f64)>), GnnError> {
    if labels.len() < 2 {
        return Err(GnnError::InsufficientLabels { needed: 2, got: labels.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x517A_11ED);
    let mut bins: Vec<Vec<(EntityId, f64)>> = vec![Vec::new(); SPLIT_BINS];
    for &(v, t) in labels {
        let clamped = t.clamp(0.0, 1.0);
        let b = ((clamped * SPLIT_BINS as f64) as usize).min(SPLIT_BINS - 1);
        bins[b].push((v, t));
    }

    let mut train = Vec::new();
    let mut val = Vec::new();
    for bin in &mut bins {
        bin.shuffle(&mut rng);
        let n_train = ((train_fraction * bin.len() as f64).ceil() as usize).min(bin.len());
        train.extend_from_slice(&bin[..n_train]);
        val.extend_from_slice(&bin[n_train..]);
    }
    if val.is_empty() {
        let moved = train.pop().expect("at least two labels were provided");
        val.push(moved);
    }
    Ok((train, val))
}

/// Train a fresh model on the labelled entities of a graph.
///
/// Runs full-batch gradient descent on the training split, tracks mean
/// absolute error on the held-out split every epoch, stops once `patience`
/// consecutive epochs bring no improvement, and returns the parameters from
/// the best validation epoch. A non-finite loss aborts with
/// [`GnnError::Diverged`].
pub fn train(
    spec: ModelSpec,
    graph: &KnowledgeGraph,
    external: Option<&Matrix>,
    labels: &[(EntityId, f64)],
    cfg: &TrainConfig,
) -> Result<TrainedModel, GnnError> {
    cfg.validate()?;
    spec.validate()?;

    let mut seen = std::collections::HashSet::new();
    for &(v, _) in labels {
        if !seen.insert(v) {
            return Err(GnnError::InvalidConfig(format!(
                "entity {} is labelled more than once",
                v.0
            )));
        }
    }

    let (train_labels, val_labels) = stratified_split(labels, cfg.train_fraction, cfg.seed)?;
    let mut model = GnnModel::init(spec, graph.entity_count(), cfg.seed)?;

    let n_params = model.parameter_count();
    let mut adam_m = vec![0.0; n_params];
    let mut adam_v = vec![0.0; n_params];
    let mut step = 0usize;

    let mut history = Vec::with_capacity(cfg.epochs);
    let mut best_val_mae = f64::INFINITY;
    let mut best_epoch = 0;
    let mut best_params = model.flatten_params();
    let mut stale = 0usize;
    let mut stopped_early = false;

    for epoch in 0..cfg.epochs {
        let (report, grads, trace) =
            loss_and_gradients(&model, graph, external, &train_labels, cfg.weight_decay)?;
        if !report.loss.is_finite() {
            return Err(GnnError::Diverged { epoch, loss: report.loss });
        }

        let val_mae = mae(&trace.outputs, &val_labels);
        history.push(EpochStats { epoch, train_loss: report.loss, val_mae });

        if val_mae < best_val_mae {
            best_val_mae = val_mae;
            best_epoch = epoch;
            best_params = model.flatten_params();
            stale = 0;
        } else {
            stale += 1;
            if stale > cfg.patience {
                stopped_early = true;
                break;
            }
        }

        let mut flat = model.flatten_params();
        let grad = grads.flatten();
        match cfg.optimizer {
            Optimizer::Sgd => {
                for (x, g) in flat.iter_mut().zip(&grad) {
                    *x -= cfg.learning_rate * g;
                }
            }
            Optimizer::Adam { beta1, beta2, epsilon } => {
                step += 1;
                let bias1 = 1.0 - beta1.powi(step as i32);
                let bias2 = 1.0 - beta2.powi(step as i32);
                for i in 0..flat.len() {
                    adam_m[i] = beta1 * adam_m[i] + (1.0 - beta1) * grad[i];
                    adam_v[i] = beta2 * adam_v[i] + (1.0 - beta2) * grad[i] * grad[i];
                    let m_hat = adam_m[i] / bias1;
                    let v_hat = adam_v[i] / bias2;
                    flat[i] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + epsilon);
                }
            }
        }
        model.load_params(&flat)?;
    }

    model.load_params(&best_params)?;
    Ok(TrainedModel {
        model,
        history,
        best_val_mae,
        best_epoch,
        stopped_early,
        train_labels,
        val_labels,
    })
}
