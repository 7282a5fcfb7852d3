//! Dual simulation: the label-initialized candidate relation refined by
//! repeatedly dropping data vertices that lack a witness for some incident
//! pattern edge.
//!
//! Each sweep first checks every pattern edge from its source side
//! (outgoing witnesses) and then every pattern edge from its target side
//! (incoming witnesses), removing candidates in place, so later checks in
//! the same sweep already see earlier removals.

use crate::graph::{Direction, Graph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Iterations {
    Sweeps(usize),
    Fixpoint,
}

impl Default for Iterations {
    fn default() -> Self {
        Iterations::Sweeps(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualSimOptions {
    pub iterations: Iterations,
    /// When false, any data edge witnesses a pattern edge regardless of label.
    pub match_edge_labels: bool,
    /// Restricts C(u) to {v} before refinement.
    pub anchor: Option<(VertexId, VertexId)>,
}

impl Default for DualSimOptions {
    fn default() -> Self {
        Self { iterations: Iterations::default(), match_edge_labels: true, anchor: None }
    }
}

impl DualSimOptions {
    pub fn sweeps(t: usize) -> Self {
        Self { iterations: Iterations::Sweeps(t), ..Self::default() }
    }

    pub fn fixpoint() -> Self {
        Self { iterations: Iterations::Fixpoint, ..Self::default() }
    }

    pub fn with_anchor(mut self, u: VertexId, v: VertexId) -> Self {
        self.anchor = Some((u, v));
        self
    }

    pub fn label_blind(mut self) -> Self {
        self.match_edge_labels = false;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateMap {
    /// C(u), ascending.
    pub candidates: Vec<Vec<VertexId>>,
    /// Sweeps executed (including the final no-change sweep in fixpoint mode).
    pub iterations_run: usize,
}

impl CandidateMap {
    pub fn get(&self, u: VertexId) -> &[VertexId] {
        &self.candidates[u]
    }

    pub fn contains(&self, u: VertexId, v: VertexId) -> bool {
        self.candidates[u].binary_search(&v).is_ok()
    }

    pub fn any_empty(&self) -> bool {
        self.candidates.iter().any(Vec::is_empty)
    }

    /// ⋃_u C(u), ascending.
    pub fn union(&self) -> Vec<VertexId> {
        let mut all: Vec<VertexId> = self.candidates.iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    pub fn total(&self) -> usize {
        self.candidates.iter().map(Vec::len).sum()
    }
}

struct Relation {
    member: Vec<Vec<bool>>,
    lists: Vec<Vec<VertexId>>,
}

impl Relation {
    fn has_witness(&self, g: &Graph, v: VertexId, target: VertexId, label: Option<u32>, dir: Direction) -> bool {
        let adj = match label {
            Some(r) => g.neighbors_with_label(v, r, dir),
            None => g.adjacency(v, dir),
        };
        adj.iter().any(|&(_, w)| self.member[target][w])
    }

    /// Drops every v ∈ C(u) without a witness; returns whether anything changed.
    fn refine(&mut self, g: &Graph, u: VertexId, target: VertexId, label: Option<u32>, dir: Direction) -> bool {
        let list = std::mem::take(&mut self.lists[u]);
        let mut kept = Vec::with_capacity(list.len());
        let mut changed = false;
        for v in list {
            if self.has_witness(g, v, target, label, dir) {
                kept.push(v);
            } else {
                self.member[u][v] = false;
                changed = true;
            }
        }
        self.lists[u] = kept;
        changed
    }
}

pub fn dual_sim(q: &Graph, g: &Graph, opts: DualSimOptions) -> CandidateMap {
    let n = g.vertex_count();
    let mut rel = Relation { member: Vec::with_capacity(q.vertex_count()), lists: Vec::with_capacity(q.vertex_count()) };
    for u in 0..q.vertex_count() {
        let list: Vec<VertexId> = match opts.anchor {
            Some((au, av)) if au == u => {
                if av < n && g.label(av) == q.label(u) {
                    vec![av]
                } else {
                    vec![]
                }
            }
            _ => g.vertices_with_label(q.label(u)).to_vec(),
        };
        let mut member = vec![false; n];
        for &v in &list {
            member[v] = true;
        }
        rel.member.push(member);
        rel.lists.push(list);
    }

    let max_sweeps = match opts.iterations {
        Iterations::Sweeps(t) => t,
        Iterations::Fixpoint => usize::MAX,
    };
    let mut iterations_run = 0;
    while iterations_run < max_sweeps {
        iterations_run += 1;
        let mut changed = false;
        for e in q.edges() {
            let label = opts.match_edge_labels.then_some(e.label);
            changed |= rel.refine(g, e.src, e.dst, label, Direction::Out);
        }
        for e in q.edges() {
            let label = opts.match_edge_labels.then_some(e.label);
            changed |= rel.refine(g, e.dst, e.src, label, Direction::In);
        }
        if !changed && opts.iterations == Iterations::Fixpoint {
            break;
        }
    }
    CandidateMap { candidates: rel.lists, iterations_run }
}

/// Induced subgraph of `g` on ⋃_u C(u); the second value maps new ids to `g`'s.
pub fn filter_graph(g: &Graph, cm: &CandidateMap) -> (Graph, Vec<VertexId>) {
    g.induce(&cm.union())
}
