//! Versioned JSON checkpoints for trained models.
//!
//! A checkpoint stores the model spec, all parameters (row-major), the
//! training seed, and the entity names the model was built against, so a
//! later prediction run can verify it is looking at the same graph.

use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::GnnError;
use crate::matrix::Matrix;
use crate::model::{GnnModel, ModelSpec};

/// Current checkpoint format version.
pub const CHECKPOINT_VERSION: u32 = 1;

/// Serialised form of a trained model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub spec: ModelSpec,
    pub n_entities: usize,
    /// Seed the model was initialised and trained with.
    pub seed: u64,
    /// Entity names in id order; predictions are aligned to this order.
    pub entities: Vec<String>,
    pub embedding: Option<Matrix>,
    pub weights: Vec<Matrix>,
    pub biases: Vec<Vec<f64>>,
    pub head_w: Vec<f64>,
    pub head_b: f64,
}

impl Checkpoint {
    /// Capture a model (typically after training).
    pub fn from_model(model: &GnnModel, seed: u64, entities: Vec<String>) -> Self {
        Self {
            version: CHECKPOINT_VERSION,
            spec: model.spec.clone(),
            n_entities: model.n_entities,
            seed,
            entities,
            embedding: model.embedding.clone(),
            weights: model.weights.clone(),
            biases: model.biases.clone(),
            head_w: model.head_w.clone(),
            head_b: model.head_b,
        }
    }

    /// Validate internal consistency and reconstruct the model.
    pub fn into_model(self) -> Result<(GnnModel, CheckpointMeta), GnnError> {
        if self.version != CHECKPOINT_VERSION {
            return Err(GnnError::Checkpoint(format!(
                "unsupported checkpoint version {} (this build reads version {CHECKPOINT_VERSION})",
                self.version
            )));
        }
        self.spec.validate()?;
        if !self.entities.is_empty() && self.entities.len() != self.n_entities {
            return Err(GnnError::Checkpoint(format!(
                "checkpoint lists {} entity names but claims {} entities",
                self.entities.len(),
                self.n_entities
            )));
        }
        for m in self.weights.iter().chain(self.embedding.iter()) {
            if !m.shape_is_consistent() {
                return Err(GnnError::Checkpoint("matrix buffer does not match its shape".into()));
            }
        }

        // Rebuild a model of the right shape, then overwrite its parameters;
        // any shape drift between spec and stored tensors surfaces here.
        let reference = GnnModel::init(self.spec.clone(), self.n_entities, self.seed)?;
        let same_shape = |a: &Matrix, b: &Matrix| a.rows() == b.rows() && a.cols() == b.cols();
        let weights_ok = reference.weights.len() == self.weights.len()
            && reference.weights.iter().zip(&self.weights).all(|(a, b)| same_shape(a, b));
        let biases_ok = reference.biases.len() == self.biases.len()
            && reference.biases.iter().zip(&self.biases).all(|(a, b)| a.len() == b.len());
        let embedding_ok = match (&reference.embedding, &self.embedding) {
            (Some(a), Some(b)) => same_shape(a, b),
            (None, None) => true,
            _ => false,
        };
        if !weights_ok || !biases_ok || !embedding_ok || reference.head_w.len() != self.head_w.len()
        {
            return Err(GnnError::Checkpoint(
                "stored parameter shapes do not match the model spec".into(),
            ));
        }

        let model = GnnModel {
            spec: self.spec,
            embedding: self.embedding,
            weights: self.weights,
            biases: self.biases,
            head_w: self.head_w,
            head_b: self.head_b,
            n_entities: self.n_entities,
        };
        let meta = CheckpointMeta { seed: self.seed, entities: self.entities };
        Ok((model, meta))
    }
}

/// Non-parameter information carried by a checkpoint.
#[derive(Debug, Clone)]
pub struct CheckpointMeta {
    pub seed: u64,
    pub entities: Vec<String>,
}

/// Write a checkpoint as pretty-printed JSON.
pub fn save_checkpoint(
    model: &GnnModel,
    seed: u64,
    entities: Vec<String>,
    path: &Path,
) -> Result<(), GnnError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let checkpoint = Checkpoint::from_model(model, seed, entities);
    let file = File::create(path)?;
    let mut writer = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut writer, &checkpoint)?;
    writer.write_all(b"\n")?;
    writer.flush()?;
    Ok(())
}

/// Read and validate a checkpoint written by [`save_checkpoint`].
pub fn load_checkpoint(path: &Path) -> Result<(GnnModel, CheckpointMeta), GnnError> {
    let file = File::open(path)?;
    let checkpoint: Checkpoint = serde_json::from_reader(BufReader::new(file))?;
    checkpoint.into_model()
}
