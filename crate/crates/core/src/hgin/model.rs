use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Label;

use super::config::ModelConfig;
use super::linalg::frobenius;
use super::ModelError;

/// Offsets of every parameter block inside the flat parameter vector.
///
/// Blocks, in order: the vertex-label table (labels × d); per layer k,
/// edge label r, identity bit b and direction, a message matrix of
/// shape (d/2 × d); per layer a self weight of shape (d × d) whose top
/// half feeds the incoming half of the embedding and bottom half the
/// outgoing half.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub layers: usize,
    pub dim: usize,
    pub vertex_labels: usize,
    pub edge_labels: usize,
    msg_base: usize,
    self_base: usize,
    total: usize,
}

impl Layout {
    pub fn new(layers: usize, dim: usize, vertex_labels: usize, edge_labels: usize) -> Self {
        let msg_base = vertex_labels * dim;
        let msg_block = dim / 2 * dim;
        let self_base = msg_base + layers * edge_labels * 4 * msg_block;
        let total = self_base + layers * dim * dim;
        Self { layers, dim, vertex_labels, edge_labels, msg_base, self_base, total }
    }

    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn label_row(&self, row: usize) -> std::ops::Range<usize> {
        let s = row * self.dim;
        s..s + self.dim
    }

    pub fn label_table(&self) -> std::ops::Range<usize> {
        0..self.msg_base
    }

    pub fn msg_len(&self) -> usize {
        self.dim / 2 * self.dim
    }

    /// `layer` is 1-based.
    pub fn msg(&self, layer: usize, edge: usize, bit: usize, dir: usize) -> std::ops::Range<usize> {
        debug_assert!((1..=self.layers).contains(&layer) && edge < self.edge_labels && bit < 2 && dir < 2);
        let idx = (((layer - 1) * self.edge_labels + edge) * 2 + bit) * 2 + dir;
        let s = self.msg_base + idx * self.msg_len();
        s..s + self.msg_len()
    }

    /// Both direction blocks of one (layer, edge label, bit) triple; they are contiguous.
    pub fn msg_pair(&self, layer: usize, edge: usize, bit: usize) -> std::ops::Range<usize> {
        let s = self.msg(layer, edge, bit, 0).start;
        s..s + 2 * self.msg_len()
    }

    pub fn self_weight(&self, layer: usize) -> std::ops::Range<usize> {
        debug_assert!((1..=self.layers).contains(&layer));
        let s = self.self_base + (layer - 1) * self.dim * self.dim;
        s..s + self.dim * self.dim
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub config: ModelConfig,
    pub layout: Layout,
    pub params: Vec<f64>,
    vertex_index: HashMap<Label, usize>,
    edge_index: HashMap<Label, usize>,
}

impl Model {
    /// Wraps existing parameters (e.g. from a checkpoint).
    pub fn from_params(config: ModelConfig, params: Vec<f64>) -> Result<Self, ModelError> {
        config.validate()?;
        let layout = Layout::new(config.layers, config.dim, config.vertex_labels.len(), config.edge_labels.len());
        if params.len() != layout.len() {
            return Err(ModelError::Config(format!("expected {} parameters, got {}", layout.len(), params.len())));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(ModelError::Config("non-finite parameter".into()));
        }
        let vertex_index = config.vertex_labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let edge_index = config.edge_labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        Ok(Self { config, layout, params, vertex_index, edge_index })
    }

    pub fn vertex_row(&self, label: Label) -> Option<usize> {
        self.vertex_index.get(&label).copied()
    }

    pub fn edge_index(&self, label: Label) -> Option<usize> {
        self.edge_index.get(&label).copied()
    }

    /// Frobenius norm of the identity-`bit` message weights of one
    /// (layer, edge label), both directions together.
    pub fn msg_norm(&self, layer: usize, edge: usize, bit: usize) -> f64 {
        frobenius(&self.params[self.layout.msg_pair(layer, edge, bit)])
    }

    /// ‖W₁‖_F − ‖W₀‖_F for one (layer, edge label).
    pub fn identity_gap(&self, layer: usize, edge: usize) -> f64 {
        self.msg_norm(layer, edge, 1) - self.msg_norm(layer, edge, 0)
    }
}

/// Deterministic initialization from `cfg.seed`.
///
/// Label embeddings are uniform in [0, 1); message and self weights are
/// uniform in ±1/√d. The identity-1 message weights of each
/// (layer, edge label) are rescaled to twice the norm of the identity-0 ones.
pub fn init_model(cfg: ModelConfig) -> Result<Model, ModelError> {
    cfg.validate()?;
    let layout = Layout::new(cfg.layers, cfg.dim, cfg.vertex_labels.len(), cfg.edge_labels.len());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut params = vec![0.0; layout.len()];
    for p in &mut params[layout.label_table()] {
        *p = rng.gen::<f64>();
    }
    let scale = 1.0 / (cfg.dim as f64).sqrt();
    for p in &mut params[layout.label_table().end..] {
        *p = rng.gen_range(-scale..scale);
    }
    for k in 1..=cfg.layers {
        for r in 0..cfg.edge_labels.len() {
            let n0 = frobenius(&params[layout.msg_pair(k, r, 0)]);
            let w1 = &mut params[layout.msg_pair(k, r, 1)];
            let n1 = frobenius(w1);
            let factor = 2.0 * n0 / n1;
            w1.iter_mut().for_each(|x| *x *= factor);
        }
    }
    Model::from_params(cfg, params)
}
