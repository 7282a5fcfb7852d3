use serde::{Deserialize, Serialize};

use crate::graph::Label;

use super::ModelError;

/// Variants used for the ablation study. All off is the full model.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ablations {
    /// Sum every neighbor message instead of deduplicating identical ones.
    pub multiset_aggregation: bool,
    /// Merge incoming and outgoing neighbors.
    pub ignore_direction: bool,
    pub skip_normalization: bool,
    /// Use the identity weights for every center neighbor, at every layer.
    pub ignore_cycles: bool,
    /// Drop the margin offset on positives and the weight-gap penalty.
    pub plain_loss: bool,
}

/// How the identity bit of a message from the ego center is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[derive(Default)]
pub struct Gating {
    /// Pattern side uses the identity weights at every layer (no cycle
    /// condition), graph side stays cycle-gated.
    pub literal_pattern_side: bool,
    /// Graph side additionally requires a cycle of length k through its own center.
    pub require_graph_cycles: bool,
}


#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub layers: usize,
    pub dim: usize,
    pub margin: f64,
    pub threshold: f64,
    pub vertex_labels: Vec<Label>,
    pub edge_labels: Vec<Label>,
    pub ablations: Ablations,
    pub gating: Gating,
    pub seed: u64,
    /// Whether training inputs were dual-simulation filtered; evaluation must match.
    pub dualsim_filtered: bool,
}

impl ModelConfig {
    pub const DEFAULT_LAYERS: usize = 5;
    pub const DEFAULT_DIM: usize = 64;
    pub const DEFAULT_MARGIN: f64 = 1.5;
    pub const DEFAULT_THRESHOLD: f64 = 0.1;

    pub fn new(vertex_labels: Vec<Label>, edge_labels: Vec<Label>) -> Self {
        Self {
            layers: Self::DEFAULT_LAYERS,
            dim: Self::DEFAULT_DIM,
            margin: Self::DEFAULT_MARGIN,
            threshold: Self::DEFAULT_THRESHOLD,
            vertex_labels,
            edge_labels,
            ablations: Ablations::default(),
            gating: Gating::default(),
            seed: 0,
            dualsim_filtered: true,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.dim == 0 || !self.dim.is_multiple_of(2) {
            return Err(ModelError::Config(format!("embedding dimension must be even and positive, got {}", self.dim)));
        }
        if self.layers == 0 {
            return Err(ModelError::Config("at least one layer required".into()));
        }
        if !(self.margin > 0.0) {
            return Err(ModelError::Config(format!("margin must be positive, got {}", self.margin)));
        }
        if !(self.threshold >= 0.0) {
            return Err(ModelError::Config(format!("threshold must be non-negative, got {}", self.threshold)));
        }
        if self.vertex_labels.is_empty() || self.edge_labels.is_empty() {
            return Err(ModelError::Config("vertex and edge label sets must be non-empty".into()));
        }
        Ok(())
    }
}
