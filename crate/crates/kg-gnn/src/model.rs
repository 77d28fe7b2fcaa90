//! Model definition: architecture enums, parameter container, and the
//! full-graph forward pass.
//!
//! A model is a stack of message-passing layers followed by a scalar affine
//! head and an output squash. Every layer first combines each entity's
//! feature row with its neighbours' rows (the aggregation step), then applies
//! an affine transform. Hidden layers use ReLU; the final transform is linear
//! so the head sees an unsquashed representation.

use kg_core::{EntityId, KnowledgeGraph};
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::GnnError;
use crate::matrix::{dot, Matrix};

/// Neighbourhood aggregation rule applied before each layer transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregator {
    /// Plain mean over the entity itself and its neighbours.
    MeanSelf,
    /// Symmetric-normalised sum: each neighbour `u` of `v` contributes with
    /// weight `1 / sqrt((deg(v)+1)(deg(u)+1))`, and `v` itself with
    /// `1 / (deg(v)+1)`.
    Gcn,
    /// Concatenation of the entity's own row with the mean of its
    /// neighbours' rows (zeros when it has none); doubles the layer input.
    Sage,
}

impl Aggregator {
    pub const ALL: [Aggregator; 3] = [Aggregator::MeanSelf, Aggregator::Gcn, Aggregator::Sage];

    pub fn name(self) -> &'static str {
        match self {
            Aggregator::MeanSelf => "mean",
            Aggregator::Gcn => "gcn",
            Aggregator::Sage => "sage",
        }
    }
}

impl fmt::Display for Aggregator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Aggregator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mean" | "mean-self" => Ok(Aggregator::MeanSelf),
            "gcn" => Ok(Aggregator::Gcn),
            "sage" => Ok(Aggregator::Sage),
            other => Err(format!("unknown aggregator {other:?} (expected mean, gcn, or sage)")),
        }
    }
}

/// Overall architecture: message passing over the graph, or the same layer
/// stack with the aggregation step removed (each entity sees only itself).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Arch {
    /// Message passing with the given aggregator.
    Gnn(Aggregator),
    /// Self-only baseline of identical depth and width.
    Mlp,
}

impl Arch {
    pub fn name(self) -> String {
        match self {
            Arch::Gnn(a) => format!("gnn-{}", a.name()),
            Arch::Mlp => "mlp".to_string(),
        }
    }
}

impl fmt::Display for Arch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Arch {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mlp" => Ok(Arch::Mlp),
            "gnn" => Ok(Arch::Gnn(Aggregator::MeanSelf)),
            other => match other.strip_prefix("gnn-") {
                Some(agg) => Ok(Arch::Gnn(agg.parse()?)),
                None => Err(format!("unknown architecture {other:?} (expected mlp, gnn, or gnn-<aggregator>)")),
            },
        }
    }
}

/// Output squash applied to the scalar head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Squash {
    /// Hard clamp to `[0, 1]`; gradient 1 strictly inside, 0 at and beyond
    /// the boundaries.
    Clamp,
    /// Logistic squash.
    Sigmoid,
    /// Identity (diagnostic; predictions may leave `[0, 1]`).
    Linear,
}

impl Squash {
    pub fn name(self) -> &'static str {
        match self {
            Squash::Clamp => "clamp",
            Squash::Sigmoid => "sigmoid",
            Squash::Linear => "linear",
        }
    }

    /// Squash a pre-activation value.
    pub fn apply(self, y: f64) -> f64 {
        match self {
            Squash::Clamp => y.clamp(0.0, 1.0),
            Squash::Sigmoid => 1.0 / (1.0 + (-y).exp()),
            Squash::Linear => y,
        }
    }

    /// Derivative with respect to the pre-activation value.
    pub fn derivative(self, y: f64) -> f64 {
        match self {
            Squash::Clamp => {
                if y > 0.0 && y < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Squash::Sigmoid => {
                let s = self.apply(y);
                s * (1.0 - s)
            }
            Squash::Linear => 1.0,
        }
    }

    /// Head-bias initialisation that centres initial predictions inside the
    /// output range, keeping gradients alive at the first step (a clamp at
    /// exactly 0 would otherwise start half the runs on a dead boundary).
    pub fn centering_bias(self) -> f64 {
        match self {
            Squash::Clamp => 0.5,
            Squash::Sigmoid => 0.0,
            Squash::Linear => 0.5,
        }
    }
}

impl fmt::Display for Squash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Squash {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "clamp" => Ok(Squash::Clamp),
            "sigmoid" => Ok(Squash::Sigmoid),
            "linear" => Ok(Squash::Linear),
            other => Err(format!("unknown squash {other:?} (expected clamp, sigmoid, or linear)")),
        }
    }
}

/// Where the layer-0 input features come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputSpec {
    /// A trainable embedding table with one row per entity; the row is the
    /// entity's input feature vector and is updated by gradient descent.
    OneHot { dim: usize },
    /// Fixed externally supplied features of the given width; never updated.
    External { dim: usize },
}

impl InputSpec {
    pub fn dim(self) -> usize {
        match self {
            InputSpec::OneHot { dim } | InputSpec::External { dim } => dim,
        }
    }
}

/// Everything needed to build a fresh, untrained model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub arch: Arch,
    pub squash: Squash,
    pub input: InputSpec,
    /// Output width of each message-passing layer, in order. Must be
    /// non-empty; the last entry is the representation width seen by the head.
    pub hidden_dims: Vec<usize>,
}

impl ModelSpec {
    /// Validate the spec in isolation (graph-dependent checks happen later).
    pub fn validate(&self) -> Result<(), GnnError> {
        if self.hidden_dims.is_empty() {
            return Err(GnnError::InvalidConfig("hidden_dims must contain at least one layer".into()));
        }
        if self.hidden_dims.iter().any(|&d| d == 0) {
            return Err(GnnError::InvalidConfig("hidden layer widths must be positive".into()));
        }
        if self.input.dim() == 0 {
            return Err(GnnError::InvalidConfig("input feature width must be positive".into()));
        }
        Ok(())
    }

    /// Width of the aggregated vector entering layer `l`'s affine transform.
    fn layer_input_width(&self, layer_input_dim: usize) -> usize {
        match self.arch {
            Arch::Gnn(Aggregator::Sage) => 2 * layer_input_dim,
            _ => layer_input_dim,
        }
    }
}

/// All intermediate values of one full-graph forward pass, kept so the
/// backward pass can reuse them.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    /// Aggregated inputs `M^l` per layer (entities x layer input width).
    pub aggregated: Vec<Matrix>,
    /// Pre-activations `Z^l` per layer (entities x layer output width).
    pub pre_activations: Vec<Matrix>,
    /// Scalar head pre-squash value per entity.
    pub head_pre: Vec<f64>,
    /// Final squashed prediction per entity.
    pub outputs: Vec<f64>,
}

/// A message-passing regressor with explicit parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GnnModel {
    pub spec: ModelSpec,
    /// Trainable input table for [`InputSpec::OneHot`]; `None` for external
    /// features.
    pub embedding: Option<Matrix>,
    /// Per-layer weight matrices, shape `(out_width, aggregated_in_width)`.
    pub weights: Vec<Matrix>,
    /// Per-layer bias vectors, length `out_width`.
    pub biases: Vec<Vec<f64>>,
    /// Scalar head weights over the final representation.
    pub head_w: Vec<f64>,
    /// Scalar head bias.
    pub head_b: f64,
    /// Number of entities the model was built for.
    pub n_entities: usize,
}

impl GnnModel {
    /// Initialise a fresh model with seeded uniform Glorot weights
    /// (`U(-s, s)`, `s = sqrt(6 / (fan_in + fan_out))`), zero layer biases,
    /// and a head bias centring initial predictions (see
    /// [`Squash::centering_bias`]).
    pub fn init(spec: ModelSpec, n_entities: usize, seed: u64) -> Result<Self, GnnError> {
        spec.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let uniform = |bound: f64, rng: &mut ChaCha8Rng| rng.random_range(-bound..bound);

        let embedding = match spec.input {
            InputSpec::OneHot { dim } => {
                Some(Matrix::from_fn(n_entities, dim, |_, _| uniform(0.5, &mut rng)))
            }
            InputSpec::External { .. } => None,
        };

        let mut weights = Vec::with_capacity(spec.hidden_dims.len());
        let mut biases = Vec::with_capacity(spec.hidden_dims.len());
        let mut in_dim = spec.input.dim();
        for &out_dim in &spec.hidden_dims {
            let fan_in = spec.layer_input_width(in_dim);
            let bound = (6.0 / (fan_in + out_dim) as f64).sqrt();
            weights.push(Matrix::from_fn(out_dim, fan_in, |_, _| uniform(bound, &mut rng)));
            biases.push(vec![0.0; out_dim]);
            in_dim = out_dim;
        }

        let head_in = *spec.hidden_dims.last().expect("validated non-empty");
        let head_bound = (6.0 / (head_in + 1) as f64).sqrt();
        let head_w = (0..head_in).map(|_| uniform(head_bound, &mut rng)).collect();
        let head_b = spec.squash.centering_bias();

        Ok(Self { spec, embedding, weights, biases, head_w, head_b, n_entities })
    }

    /// Resolve the layer-0 feature matrix: the internal embedding for
    /// one-hot input, or the caller's matrix for external input. Checks that
    /// exactly the right one was supplied and that shapes match the graph.
    pub fn input_features<'a>(
        &'a self,
        graph: &KnowledgeGraph,
        external: Option<&'a Matrix>,
    ) -> Result<&'a Matrix, GnnError> {
        if graph.entity_count() != self.n_entities {
            return Err(GnnError::DimensionMismatch(format!(
                "model was built for {} entities but the graph has {}",
                self.n_entities,
                graph.entity_count()
            )));
        }
        match (self.spec.input, &self.embedding, external) {
            (InputSpec::OneHot { .. }, Some(table), None) => Ok(table),
            (InputSpec::OneHot { .. }, _, Some(_)) => Err(GnnError::InvalidConfig(
                "model trains its own input table; external features were also supplied".into(),
            )),
            (InputSpec::External { dim }, None, Some(m)) => {
                if m.rows() != graph.entity_count() || m.cols() != dim {
                    return Err(GnnError::DimensionMismatch(format!(
                        "external features are {}x{} but the model expects {}x{}",
                        m.rows(),
                        m.cols(),
                        graph.entity_count(),
                        dim
                    )));
                }
                Ok(m)
            }
            (InputSpec::External { .. }, _, None) => Err(GnnError::InvalidConfig(
                "model expects external features but none were supplied".into(),
            )),
            _ => Err(GnnError::InvalidConfig("inconsistent feature configuration".into())),
        }
    }

    /// Aggregate feature matrix `h` into `out` (pre-sized) according to the
    /// architecture. `out[v]` becomes the combined neighbourhood vector that
    /// layer `l`'s affine transform consumes.
    fn aggregate(&self, graph: &KnowledgeGraph, h: &Matrix, out: &mut Matrix) {
        let width = h.cols();
        for v in 0..graph.entity_count() {
            let id = EntityId(v);
            match self.spec.arch {
                Arch::Mlp => {
                    out.row_mut(v).copy_from_slice(h.row(v));
                }
                Arch::Gnn(Aggregator::MeanSelf) => {
                    let scale = 1.0 / (graph.neighbor_degree(id) + 1) as f64;
                    out.add_scaled_row(v, h.row(v), scale);
                    for &u in graph.neighbors(id) {
                        out.add_scaled_row(v, h.row(u.0), scale);
                    }
                }
                Arch::Gnn(Aggregator::Gcn) => {
                    let dv = (graph.neighbor_degree(id) + 1) as f64;
                    out.add_scaled_row(v, h.row(v), 1.0 / dv);
                    for &u in graph.neighbors(id) {
                        let du = (graph.neighbor_degree(u) + 1) as f64;
                        out.add_scaled_row(v, h.row(u.0), 1.0 / (dv * du).sqrt());
                    }
                }
                Arch::Gnn(Aggregator::Sage) => {
                    out.row_mut(v)[..width].copy_from_slice(h.row(v));
                    let deg = graph.neighbor_degree(id);
                    if deg > 0 {
                        let scale = 1.0 / deg as f64;
                        for &u in graph.neighbors(id) {
                            for (i, x) in h.row(u.0).iter().enumerate() {
                                out.row_mut(v)[width + i] += scale * x;
                            }
                        }
                    }
                }
            }
        }
    }

    /// Adjoint of [`Self::aggregate`]: spread the gradient `d_m` (with respect
    /// to the aggregated matrix) back onto `d_h` (with respect to the layer
    /// input), accumulating. Coefficients mirror the forward direction
    /// exactly, so a contribution `c * h[u] -> m[v]` becomes
    /// `c * d_m[v] -> d_h[u]`.
    pub(crate) fn spread_adjoint(&self, graph: &KnowledgeGraph, d_m: &Matrix, d_h: &mut Matrix) {
        let width = d_h.cols();
        for v in 0..graph.entity_count() {
            let id = EntityId(v);
            match self.spec.arch {
                Arch::Mlp => {
                    d_h.add_scaled_row(v, d_m.row(v), 1.0);
                }
                Arch::Gnn(Aggregator::MeanSelf) => {
                    let scale = 1.0 / (graph.neighbor_degree(id) + 1) as f64;
                    d_h.add_scaled_row(v, d_m.row(v), scale);
                    for &u in graph.neighbors(id) {
                        d_h.add_scaled_row(u.0, d_m.row(v), scale);
                    }
                }
                Arch::Gnn(Aggregator::Gcn) => {
                    let dv = (graph.neighbor_degree(id) + 1) as f64;
                    d_h.add_scaled_row(v, d_m.row(v), 1.0 / dv);
                    for &u in graph.neighbors(id) {
                        let du = (graph.neighbor_degree(u) + 1) as f64;
                        d_h.add_scaled_row(u.0, d_m.row(v), 1.0 / (dv * du).sqrt());
                    }
                }
                Arch::Gnn(Aggregator::Sage) => {
                    d_h.add_scaled_row(v, &d_m.row(v)[..width], 1.0);
                    let deg = graph.neighbor_degree(id);
                    if deg > 0 {
                        let scale = 1.0 / deg as f64;
                        for &u in graph.neighbors(id) {
                            for (i, g) in d_m.row(v)[width..].iter().enumerate() {
                                d_h.row_mut(u.0)[i] += scale * g;
                            }
                        }
                    }
                }
            }
        }
    }

    /// Run the full-graph forward pass, recording every intermediate value.
    pub fn forward(
        &self,
        graph: &KnowledgeGraph,
        external: Option<&Matrix>,
    ) -> Result<ForwardTrace, GnnError> {
        let x0 = self.input_features(graph, external)?;
        let n = graph.entity_count();
        let layers = self.weights.len();

        let mut aggregated = Vec::with_capacity(layers);
        let mut pre_activations = Vec::with_capacity(layers);
        let mut h = x0.clone();

        for l in 0..layers {
            let w = &self.weights[l];
            let mut m = Matrix::zeros(n, w.cols());
            self.aggregate(graph, &h, &mut m);

            let mut z = Matrix::zeros(n, w.rows());
            for v in 0..n {
                let m_row = m.row(v);
                let z_row = z.row_mut(v);
                for (o, z_vo) in z_row.iter_mut().enumerate() {
                    *z_vo = dot(w.row(o), m_row) + self.biases[l][o];
                }
            }

            // Hidden layers are rectified; the final transform stays linear
            // so the head sees an unconstrained representation.
            h = if l + 1 < layers {
                let mut next = z.clone();
                for x in next.as_mut_slice() {
                    if *x < 0.0 {
                        *x = 0.0;
                    }
                }
                next
            } else {
                z.clone()
            };

            aggregated.push(m);
            pre_activations.push(z);
        }

        let mut head_pre = Vec::with_capacity(n);
        let mut outputs = Vec::with_capacity(n);
        for v in 0..n {
            let y = dot(&self.head_w, h.row(v)) + self.head_b;
            head_pre.push(y);
            outputs.push(self.spec.squash.apply(y));
        }

        Ok(ForwardTrace { aggregated, pre_activations, head_pre, outputs })
    }

    /// Predicted score per entity, indexed by entity id.
    pub fn predict(
        &self,
        graph: &KnowledgeGraph,
        external: Option<&Matrix>,
    ) -> Result<Vec<f64>, GnnError> {
        Ok(self.forward(graph, external)?.outputs)
    }

    /// Total number of trainable scalars.
    pub fn parameter_count(&self) -> usize {
        let emb = self.embedding.as_ref().map_or(0, |e| e.as_slice().len());
        let w: usize = self.weights.iter().map(|w| w.as_slice().len()).sum();
        let b: usize = self.biases.iter().map(|b| b.len()).sum();
        emb + w + b + self.head_w.len() + 1
    }
}
