//! Loss and analytic gradients via reverse-mode differentiation of the
//! forward pass, written out by hand layer by layer.

use kg_core::{EntityId, KnowledgeGraph};

use crate::error::GnnError;
use crate::matrix::Matrix;
use crate::model::{ForwardTrace, GnnModel, InputSpec};

/// Gradient of the loss with respect to every trainable parameter, with the
/// same shapes as the corresponding fields of [`GnnModel`].
#[derive(Debug, Clone)]
pub struct Gradients {
    pub embedding: Option<Matrix>,
    pub weights: Vec<Matrix>,
    pub biases: Vec<Vec<f64>>,
    pub head_w: Vec<f64>,
    pub head_b: f64,
}

/// Decomposition of the training objective at one evaluation point.
#[derive(Debug, Clone, Copy)]
pub struct LossReport {
    /// Full objective: data term plus weight-decay penalty.
    pub loss: f64,
    /// Mean squared error over the labelled entities.
    pub mse: f64,
    /// `weight_decay * (sum of squared weights and embeddings)`.
    pub l2_penalty: f64,
}

/// Mean squared error of `predictions` (indexed by entity id) against a
/// labelled subset.
pub fn mse_loss(predictions: &[f64], labels: &[(EntityId, f64)]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let sum: f64 = labels
        .iter()
        .map(|&(v, target)| {
            let d = predictions[v.0] - target;
            d * d
        })
        .sum();
    sum / labels.len() as f64
}

/// Mean absolute error of `predictions` against a labelled subset.
pub fn mae(predictions: &[f64], labels: &[(EntityId, f64)]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let sum: f64 = labels.iter().map(|&(v, t)| (predictions[v.0] - t).abs()).sum();
    sum / labels.len() as f64
}

/// Sum of squared regularised parameters: layer weights, head weights, and
/// the embedding table. Biases are exempt.
pub(crate) fn regularised_squared_norm(model: &GnnModel) -> f64 {
    let weights: f64 = model.weights.iter().map(Matrix::squared_norm).sum();
    let head: f64 = model.head_w.iter().map(|x| x * x).sum();
    let emb = model.embedding.as_ref().map_or(0.0, Matrix::squared_norm);
    weights + head + emb
}

/// Evaluate the objective and all parameter gradients at the model's current
/// parameters in one combined forward/backward pass over the whole graph.
///
/// The data term is the mean squared error over `labels`; `weight_decay`
/// adds an L2 penalty on weight matrices, head weights, and the embedding
/// table (never biases). Returns the forward trace alongside so callers can
/// reuse the predictions.
pub fn loss_and_gradients(
    model: &GnnModel,
    graph: &KnowledgeGraph,
    external: Option<&Matrix>,
    labels: &[(EntityId, f64)],
    weight_decay: f64,
) -> Result<(LossReport, Gradients, ForwardTrace), GnnError> {
    let n = graph.entity_count();
    for &(v, target) in labels {
        if v.0 >= n {
            return Err(GnnError::DimensionMismatch(format!(
                "label references entity {} but the graph has {n} entities",
                v.0
            )));
        }
        if !target.is_finite() {
            return Err(GnnError::InvalidConfig(format!("label for entity {} is not finite", v.0)));
        }
    }

    let trace = model.forward(graph, external)?;
    let layers = model.weights.len();

    let mse = mse_loss(&trace.outputs, labels);
    let l2_penalty = weight_decay * regularised_squared_norm(model);
    let report = LossReport { loss: mse + l2_penalty, mse, l2_penalty };

    // d(loss)/d(head_pre[v]): MSE derivative through the output squash.
    let mut dy = vec![0.0; n];
    if !labels.is_empty() {
        let scale = 2.0 / labels.len() as f64;
        for &(v, target) in labels {
            let residual = trace.outputs[v.0] - target;
            dy[v.0] = scale * residual * model.spec.squash.derivative(trace.head_pre[v.0]);
        }
    }

    // Head gradients; the final representation is the last pre-activation
    // because the last message-passing transform is linear.
    let final_h = &trace.pre_activations[layers - 1];
    let width = final_h.cols();
    let mut head_w_grad = vec![0.0; width];
    let mut head_b_grad = 0.0;
    let mut d_h = Matrix::zeros(n, width);
    for v in 0..n {
        if dy[v] != 0.0 {
            for (i, g) in head_w_grad.iter_mut().enumerate() {
                *g += dy[v] * final_h.row(v)[i];
            }
            head_b_grad += dy[v];
            d_h.add_scaled_row(v, &model.head_w, dy[v]);
        }
    }

    let mut weight_grads: Vec<Matrix> = Vec::with_capacity(layers);
    let mut bias_grads: Vec<Vec<f64>> = Vec::with_capacity(layers);

    // Walk the layers in reverse; `d_h` always holds the gradient with
    // respect to the current layer's post-activation output.
    for l in (0..layers).rev() {
        let w = &model.weights[l];
        let z = &trace.pre_activations[l];
        let m = &trace.aggregated[l];
        let hidden = l + 1 < layers; // hidden layers are rectified

        let mut d_z = d_h;
        if hidden {
            for v in 0..n {
                let z_row = z.row(v);
                for (g, &pre) in d_z.row_mut(v).iter_mut().zip(z_row) {
                    if pre <= 0.0 {
                        *g = 0.0;
                    }
                }
            }
        }

        let mut w_grad = Matrix::zeros(w.rows(), w.cols());
        let mut b_grad = vec![0.0; w.rows()];
        let mut d_m = Matrix::zeros(n, w.cols());
        for v in 0..n {
            let dz_row = d_z.row(v);
            let m_row = m.row(v);
            for (o, &g) in dz_row.iter().enumerate() {
                if g != 0.0 {
                    w_grad.add_scaled_row(o, m_row, g);
                    b_grad[o] += g;
                    d_m.add_scaled_row(v, w.row(o), g);
                }
            }
        }

        let input_width = if l == 0 { model.spec.input.dim() } else { model.weights[l - 1].rows() };
        let mut d_prev = Matrix::zeros(n, input_width);
        model.spread_adjoint(graph, &d_m, &mut d_prev);

        weight_grads.push(w_grad);
        bias_grads.push(b_grad);
        d_h = d_prev;
    }
    weight_grads.reverse();
    bias_grads.reverse();

    // Weight decay: d/dW of wd * ||W||^2 is 2 * wd * W.
    if weight_decay != 0.0 {
        for (g, w) in weight_grads.iter_mut().zip(&model.weights) {
            for (gx, wx) in g.as_mut_slice().iter_mut().zip(w.as_slice()) {
                *gx += 2.0 * weight_decay * wx;
            }
        }
        for (gx, wx) in head_w_grad.iter_mut().zip(&model.head_w) {
            *gx += 2.0 * weight_decay * wx;
        }
    }

    let embedding_grad = match model.spec.input {
        InputSpec::OneHot { .. } => {
            let mut e_grad = d_h; // gradient w.r.t. the layer-0 input
            if weight_decay != 0.0 {
                let table = model.embedding.as_ref().expect("one-hot model owns its table");
                for (gx, ex) in e_grad.as_mut_slice().iter_mut().zip(table.as_slice()) {
                    *gx += 2.0 * weight_decay * ex;
                }
            }
            Some(e_grad)
        }
        InputSpec::External { .. } => None,
    };

    let grads = Gradients {
        embedding: embedding_grad,
        weights: weight_grads,
        biases: bias_grads,
        head_w: head_w_grad,
        head_b: head_b_grad,
    };
    Ok((report, grads, trace))
}

impl GnnModel {
    /// Copy every trainable parameter into one flat vector. The order —
    /// embedding rows, then each layer's weights (row-major) and bias, then
    /// the head — is the contract shared with [`GnnModel::load_params`] and
    /// [`Gradients::flatten`].
    pub fn flatten_params(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.parameter_count());
        if let Some(e) = &self.embedding {
            flat.extend_from_slice(e.as_slice());
        }
        for (w, b) in self.weights.iter().zip(&self.biases) {
            flat.extend_from_slice(w.as_slice());
            flat.extend_from_slice(b);
        }
        flat.extend_from_slice(&self.head_w);
        flat.push(self.head_b);
        flat
    }

    /// Overwrite every trainable parameter from a flat vector produced by
    /// [`GnnModel::flatten_params`] on a model of identical shape.
    pub fn load_params(&mut self, flat: &[f64]) -> Result<(), GnnError> {
        if flat.len() != self.parameter_count() {
            return Err(GnnError::DimensionMismatch(format!(
                "flat parameter vector has {} entries, model has {}",
                flat.len(),
                self.parameter_count()
            )));
        }
        let mut at = 0;
        let mut take = |len: usize| {
            let slice = &flat[at..at + len];
            at += len;
            slice
        };
        if let Some(e) = &mut self.embedding {
            let len = e.as_slice().len();
            e.as_mut_slice().copy_from_slice(take(len));
        }
        for (w, b) in self.weights.iter_mut().zip(&mut self.biases) {
            let len = w.as_slice().len();
            w.as_mut_slice().copy_from_slice(take(len));
            let blen = b.len();
            b.copy_from_slice(take(blen));
        }
        let hlen = self.head_w.len();
        self.head_w.copy_from_slice(take(hlen));
        self.head_b = take(1)[0];
        Ok(())
    }
}

impl Gradients {
    /// Flatten in exactly the order of [`GnnModel::flatten_params`].
    pub fn flatten(&self) -> Vec<f64> {
        let mut flat = Vec::new();
        if let Some(e) = &self.embedding {
            flat.extend_from_slice(e.as_slice());
        }
        for (w, b) in self.weights.iter().zip(&self.biases) {
            flat.extend_from_slice(w.as_slice());
            flat.extend_from_slice(b);
        }
        flat.extend_from_slice(&self.head_w);
        flat.push(self.head_b);
        flat
    }
}
