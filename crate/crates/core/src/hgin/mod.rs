//! Homomorphism-aware graph neural verifier.
//!
//! Embeds the ego networks around a pattern vertex u and a data vertex v
//! and predicts "some homomorphism maps u to v" when the normalized pattern
//! embedding is (almost) dominated coordinate-wise by the data embedding.

use thiserror::Error;

use crate::graph::{cycle_lengths, ego_net, CycleSet, EgoNet, Graph, GraphError, Label, VertexId};

mod checkpoint;
mod config;
mod forward;
pub mod linalg;
mod loss;
mod model;
mod train;

pub use checkpoint::{load_checkpoint, parse_checkpoint, save_checkpoint, write_checkpoint, CheckpointError};
pub use config::{Ablations, Gating, ModelConfig};
pub use forward::{backward, forward, layer_gates, EgoInput, Side, Tape};
pub use loss::{
    accumulate_example, gap_penalty, loss, loss_and_grad, normalize, pair_score, try_violation, violation, PairInput,
    GAP_EPSILON,
};
pub use model::{init_model, Layout, Model};
pub use train::{accuracy, train, EpochStats, EvalItem, Optimizer, TrainConfig, TrainError, TrainOutcome, TrainingData};

/// A d-dimensional vertex embedding.
pub type Embedding = Vec<f64>;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("invalid model configuration: {0}")]
    Config(String),
    #[error("ego-net radius {radius} does not match model depth {layers}")]
    RadiusMismatch { radius: usize, layers: usize },
    #[error("vertex label id {0} unknown to the model")]
    UnknownVertexLabel(Label),
    #[error("edge label id {0} unknown to the model")]
    UnknownEdgeLabel(Label),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Cycle lengths through `v` that can gate some layer (empty for one-layer models).
pub fn gating_cycles(model: &Model, g: &Graph, v: VertexId) -> Result<CycleSet, ModelError> {
    let m = model.config.layers;
    if m < 2 {
        g.check_vertex(v)?;
        return Ok(CycleSet::default());
    }
    Ok(cycle_lengths(g, v, m)?)
}

/// Raw (unnormalized) center embedding of an ego network.
pub fn embed(
    model: &Model,
    ego: &EgoNet,
    side: Side,
    pattern_cycles: &CycleSet,
    graph_cycles: Option<&CycleSet>,
) -> Result<Embedding, ModelError> {
    let gates = layer_gates(model, side, pattern_cycles, graph_cycles);
    let input = EgoInput::new(model, ego, gates)?;
    Ok(forward(model, &input).output().to_vec())
}

/// The pattern half of a prediction, reusable across data-vertex candidates.
#[derive(Debug, Clone)]
pub struct PatternSide {
    pub input: EgoInput,
    pub cycles: CycleSet,
    pub label: Label,
}

impl PatternSide {
    pub fn new(model: &Model, q: &Graph, u: VertexId) -> Result<Self, ModelError> {
        let ego = ego_net(q, u, model.config.layers)?;
        let cycles = gating_cycles(model, &ego.graph, ego.center)?;
        let gates = layer_gates(model, Side::Pattern, &cycles, None);
        let input = EgoInput::new(model, &ego, gates)?;
        Ok(Self { input, cycles, label: q.label(u) })
    }

    /// Builds the data-side input and pairs it with this pattern side.
    pub fn pair_with(&self, model: &Model, g: &Graph, v: VertexId) -> Result<PairInput, ModelError> {
        let ego = ego_net(g, v, model.config.layers)?;
        let graph_cycles = if model.config.gating.require_graph_cycles {
            Some(gating_cycles(model, &ego.graph, ego.center)?)
        } else {
            None
        };
        let gates = layer_gates(model, Side::Graph, &self.cycles, graph_cycles.as_ref());
        let graph = EgoInput::new(model, &ego, gates)?;
        Ok(PairInput { pattern: self.input.clone(), graph })
    }

    /// Finished (normalized unless ablated) pattern embedding.
    pub fn embedding(&self, model: &Model) -> Embedding {
        finish(model, forward(model, &self.input).output())
    }

    /// Scores data vertex `v` against a precomputed pattern embedding.
    pub fn predict(&self, model: &Model, pattern_embedding: &[f64], g: &Graph, v: VertexId) -> Result<Prediction, ModelError> {
        g.check_vertex(v)?;
        if g.label(v) != self.label {
            return Ok(Prediction { verdict: false, score: f64::INFINITY });
        }
        let pair = self.pair_with(model, g, v)?;
        let e_v = finish(model, forward(model, &pair.graph).output());
        let score = violation(pattern_embedding, &e_v);
        Ok(Prediction { verdict: score <= model.config.threshold, score })
    }
}

fn finish(model: &Model, raw: &[f64]) -> Embedding {
    if model.config.ablations.skip_normalization {
        raw.to_vec()
    } else {
        normalize(raw)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub verdict: bool,
    /// Violation of the normalized embeddings; +∞ on a label mismatch.
    pub score: f64,
}

/// Predicts whether some homomorphism from `q` to `g` maps `u` to `v`.
pub fn predict(model: &Model, q: &Graph, u: VertexId, g: &Graph, v: VertexId) -> Result<Prediction, ModelError> {
    q.check_vertex(u)?;
    g.check_vertex(v)?;
    if q.label(u) != g.label(v) {
        return Ok(Prediction { verdict: false, score: f64::INFINITY });
    }
    let side = PatternSide::new(model, q, u)?;
    let e_u = side.embedding(model);
    side.predict(model, &e_u, g, v)
}
