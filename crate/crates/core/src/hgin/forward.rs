//! Message passing over an ego network, with a tape for the backward pass.
//!
//! At layer k every vertex c within m−k hops of the center computes, for
//! each direction, Σ_r Σ_b W^{k,r}_{b,dir} · (sum of the *distinct*
//! neighbor embeddings reached through label r whose identity bit is b),
//! adds its self term, concatenates the two halves and applies ReLU.
//! Vertices further out cannot influence the center's final embedding and
//! are skipped.

use std::cmp::Ordering;

use crate::graph::{CycleSet, Direction, EgoNet};

use super::linalg::{matvec_add, matvec_t_add, outer_add};
use super::{Model, ModelError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Pattern,
    Graph,
}

/// Per-layer identity gates: entry k−1 says whether a message sent by the
/// ego center at layer k uses the identity-1 weights.
pub fn layer_gates(model: &Model, side: Side, pattern_cycles: &CycleSet, graph_cycles: Option<&CycleSet>) -> Vec<bool> {
    let cfg = &model.config;
    (1..=cfg.layers)
        .map(|k| {
            if cfg.ablations.ignore_cycles {
                return true;
            }
            match side {
                Side::Pattern => cfg.gating.literal_pattern_side || pattern_cycles.contains(k),
                Side::Graph => {
                    pattern_cycles.contains(k)
                        && (!cfg.gating.require_graph_cycles || graph_cycles.is_some_and(|c| c.contains(k)))
                }
            }
        })
        .collect()
}

/// An ego network resolved against a model's label vocabulary.
#[derive(Debug, Clone)]
pub struct EgoInput {
    center: usize,
    dist: Vec<usize>,
    rows: Vec<usize>,
    /// Per vertex and direction: (edge label index, neighbor), sorted.
    nbrs: Vec<[Vec<(usize, usize)>; 2]>,
    gates: Vec<bool>,
}

impl EgoInput {
    pub fn new(model: &Model, ego: &EgoNet, gates: Vec<bool>) -> Result<Self, ModelError> {
        if ego.radius != model.config.layers {
            return Err(ModelError::RadiusMismatch { radius: ego.radius, layers: model.config.layers });
        }
        let g = &ego.graph;
        let rows = g
            .labels()
            .iter()
            .map(|&l| model.vertex_row(l).ok_or(ModelError::UnknownVertexLabel(l)))
            .collect::<Result<Vec<_>, _>>()?;
        let merge = model.config.ablations.ignore_direction;
        let mut nbrs = Vec::with_capacity(g.vertex_count());
        for v in 0..g.vertex_count() {
            let mut per_dir: [Vec<(usize, usize)>; 2] = Default::default();
            for dir in Direction::BOTH {
                for &(r, w) in g.adjacency(v, dir) {
                    let e = model.edge_index(r).ok_or(ModelError::UnknownEdgeLabel(r))?;
                    per_dir[dir.index()].push((e, w));
                }
            }
            if merge {
                let mut all = per_dir[0].clone();
                all.extend_from_slice(&per_dir[1]);
                all.sort_unstable();
                all.dedup();
                per_dir = [all.clone(), all];
            } else {
                per_dir.iter_mut().for_each(|l| l.sort_unstable());
            }
            nbrs.push(per_dir);
        }
        Ok(Self { center: ego.center, dist: ego.dist.clone(), rows, nbrs, gates })
    }

    pub fn vertex_count(&self) -> usize {
        self.rows.len()
    }
}

#[derive(Debug, Clone)]
struct Group {
    vertex: usize,
    dir: usize,
    edge: usize,
    bit: usize,
    sum: Vec<f64>,
    members: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Tape {
    dim: usize,
    /// h[k] holds layer-k embeddings, n × d (zeros for skipped vertices).
    h: Vec<Vec<f64>>,
    /// z[k-1] holds layer-k pre-activations.
    z: Vec<Vec<f64>>,
    groups: Vec<Vec<Group>>,
    center: usize,
}

impl Tape {
    pub fn output(&self) -> &[f64] {
        let d = self.dim;
        let last = self.h.last().unwrap();
        &last[self.center * d..(self.center + 1) * d]
    }
}

fn cmp_bits(a: &[f64], b: &[f64]) -> Ordering {
    a.iter().map(|x| x.to_bits()).cmp(b.iter().map(|x| x.to_bits()))
}

fn same_bits(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

pub fn forward(model: &Model, input: &EgoInput) -> Tape {
    let d = model.config.dim;
    let half = d / 2;
    let m = model.config.layers;
    let n = input.vertex_count();
    let layout = &model.layout;
    let params = &model.params;
    let multiset = model.config.ablations.multiset_aggregation;

    let mut h = vec![vec![0.0; n * d]; m + 1];
    for x in 0..n {
        if input.dist[x] <= m {
            h[0][x * d..(x + 1) * d].copy_from_slice(&params[layout.label_row(input.rows[x])]);
        }
    }
    let mut z_all = Vec::with_capacity(m);
    let mut groups_all = Vec::with_capacity(m);

    for k in 1..=m {
        let limit = m - k;
        let (prev, rest) = h.split_at_mut(k);
        let prev = &prev[k - 1];
        let cur = &mut rest[0];
        let mut z = vec![0.0; n * d];
        let mut groups = Vec::new();
        let w_self = &params[layout.self_weight(k)];
        let gate = input.gates[k - 1];

        for c in (0..n).filter(|&c| input.dist[c] <= limit) {
            let zc = &mut z[c * d..(c + 1) * d];
            let hc = &prev[c * d..(c + 1) * d];
            matvec_add(w_self, d, d, hc, zc);
            for dir in 0..2 {
                let list = &input.nbrs[c][dir];
                let mut i = 0;
                while i < list.len() {
                    let edge = list[i].0;
                    let mut j = i;
                    while j < list.len() && list[j].0 == edge {
                        j += 1;
                    }
                    let emb = |w: usize| &prev[w * d..(w + 1) * d];
                    let mut items: Vec<(usize, usize)> = list[i..j]
                        .iter()
                        .map(|&(_, w)| (usize::from(gate && w == input.center), w))
                        .collect();
                    items.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| cmp_bits(emb(a.1), emb(b.1))).then(a.1.cmp(&b.1)));
                    if !multiset {
                        items.dedup_by(|b, a| a.0 == b.0 && same_bits(emb(a.1), emb(b.1)));
                    }
                    let mut s = 0;
                    while s < items.len() {
                        let bit = items[s].0;
                        let mut t = s;
                        let mut sum = vec![0.0; d];
                        let mut members = Vec::new();
                        while t < items.len() && items[t].0 == bit {
                            sum.iter_mut().zip(emb(items[t].1)).for_each(|(a, b)| *a += b);
                            members.push(items[t].1);
                            t += 1;
                        }
                        let w = &params[layout.msg(k, edge, bit, dir)];
                        matvec_add(w, half, d, &sum, &mut zc[dir * half..(dir + 1) * half]);
                        groups.push(Group { vertex: c, dir, edge, bit, sum, members });
                        s = t;
                    }
                    i = j;
                }
            }
            for (out, &zv) in cur[c * d..(c + 1) * d].iter_mut().zip(zc.iter()) {
                *out = if zv > 0.0 { zv } else { 0.0 };
            }
        }
        z_all.push(z);
        groups_all.push(groups);
    }
    Tape { dim: d, h, z: z_all, groups: groups_all, center: input.center }
}

/// Accumulates ∂L/∂θ into `grad` given ∂L/∂(center embedding).
pub fn backward(model: &Model, input: &EgoInput, tape: &Tape, d_out: &[f64], grad: &mut [f64]) {
    let d = model.config.dim;
    let half = d / 2;
    let m = model.config.layers;
    let n = input.vertex_count();
    let layout = &model.layout;
    let params = &model.params;

    let mut dh = vec![0.0; n * d];
    dh[input.center * d..(input.center + 1) * d].copy_from_slice(d_out);

    for k in (1..=m).rev() {
        let limit = m - k;
        let z = &tape.z[k - 1];
        let prev = &tape.h[k - 1];
        let mut dz = vec![0.0; n * d];
        for c in (0..n).filter(|&c| input.dist[c] <= limit) {
            for i in c * d..(c + 1) * d {
                if z[i] > 0.0 {
                    dz[i] = dh[i];
                }
            }
        }
        let mut dprev = vec![0.0; n * d];
        let self_range = layout.self_weight(k);
        for c in (0..n).filter(|&c| input.dist[c] <= limit) {
            let dzc = &dz[c * d..(c + 1) * d];
            if dzc.iter().all(|&x| x == 0.0) {
                continue;
            }
            outer_add(&mut grad[self_range.clone()], dzc, &prev[c * d..(c + 1) * d]);
            matvec_t_add(&params[self_range.clone()], d, dzc, &mut dprev[c * d..(c + 1) * d]);
        }
        let mut dsum = vec![0.0; d];
        for g in &tape.groups[k - 1] {
            let dzh = &dz[g.vertex * d + g.dir * half..g.vertex * d + (g.dir + 1) * half];
            if dzh.iter().all(|&x| x == 0.0) {
                continue;
            }
            let range = layout.msg(k, g.edge, g.bit, g.dir);
            outer_add(&mut grad[range.clone()], dzh, &g.sum);
            dsum.iter_mut().for_each(|x| *x = 0.0);
            matvec_t_add(&params[range], d, dzh, &mut dsum);
            for &w in &g.members {
                dprev[w * d..(w + 1) * d].iter_mut().zip(&dsum).for_each(|(a, b)| *a += b);
            }
        }
        dh = dprev;
    }
    for x in 0..n {
        let row = layout.label_row(input.rows[x]);
        grad[row].iter_mut().zip(&dh[x * d..(x + 1) * d]).for_each(|(a, b)| *a += b);
    }
}
