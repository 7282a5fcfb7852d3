//! Directed, vertex- and edge-labeled graphs.
//!
//! Patterns and data graphs share the same representation. Labels are
//! interned into a [`LabelDict`] that the caller shares between a pattern
//! and the graph it is matched against, so label ids agree on both sides.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

pub type VertexId = usize;
pub type Label = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range (graph has {len} vertices)")]
    InvalidVertex { vertex: VertexId, len: usize },
    #[error("cycle bound must be at least 2, got {0}")]
    CycleBound(usize),
    #[error("ego-net radius must be at least 1")]
    ZeroRadius,
}

/// Bidirectional map between external label strings and dense ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelDict {
    names: Vec<String>,
    ids: HashMap<String, Label>,
}

impl LabelDict {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, name: &str) -> Label {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len() as Label;
        self.names.push(name.to_owned());
        self.ids.insert(name.to_owned(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<Label> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: Label) -> Option<&str> {
        self.names.get(id as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub src: VertexId,
    pub label: Label,
    pub dst: VertexId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    In,
    Out,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::In, Direction::Out];

    pub fn index(self) -> usize {
        match self {
            Direction::In => 0,
            Direction::Out => 1,
        }
    }
}

/// Immutable directed labeled multigraph (distinct labels may connect the
/// same ordered pair; identical triples are collapsed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<Label>,
    edges: Vec<Edge>,
    // Per vertex, (edge label, neighbor) sorted ascending.
    out_adj: Vec<Vec<(Label, VertexId)>>,
    in_adj: Vec<Vec<(Label, VertexId)>>,
    by_label: HashMap<Label, Vec<VertexId>>,
}

#[derive(Debug, Clone, Default)]
pub struct GraphBuilder {
    labels: Vec<Label>,
    edges: BTreeSet<Edge>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vertices(labels: impl IntoIterator<Item = Label>) -> Self {
        Self {
            labels: labels.into_iter().collect(),
            edges: BTreeSet::new(),
        }
    }

    pub fn add_vertex(&mut self, label: Label) -> VertexId {
        self.labels.push(label);
        self.labels.len() - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    /// Returns `false` when the triple was already present.
    pub fn add_edge(&mut self, src: VertexId, label: Label, dst: VertexId) -> Result<bool, GraphError> {
        let len = self.labels.len();
        for vertex in [src, dst] {
            if vertex >= len {
                return Err(GraphError::InvalidVertex { vertex, len });
            }
        }
        Ok(self.edges.insert(Edge { src, label, dst }))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, src: VertexId, label: Label, dst: VertexId) -> bool {
        self.edges.contains(&Edge { src, label, dst })
    }

    pub fn build(self) -> Graph {
        let n = self.labels.len();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for e in &self.edges {
            out_adj[e.src].push((e.label, e.dst));
            in_adj[e.dst].push((e.label, e.src));
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_unstable();
        }
        let mut by_label: HashMap<Label, Vec<VertexId>> = HashMap::new();
        for (v, &l) in self.labels.iter().enumerate() {
            by_label.entry(l).or_default().push(v);
        }
        Graph {
            labels: self.labels,
            edges: self.edges.into_iter().collect(),
            out_adj,
            in_adj,
            by_label,
        }
    }
}

impl Graph {
    pub fn empty() -> Self {
        GraphBuilder::new().build()
    }

    pub fn from_parts(labels: Vec<Label>, edges: impl IntoIterator<Item = (VertexId, Label, VertexId)>) -> Result<Self, GraphError> {
        let mut b = GraphBuilder::with_vertices(labels);
        for (s, r, d) in edges {
            b.add_edge(s, r, d)?;
        }
        Ok(b.build())
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, v: VertexId) -> Label {
        self.labels[v]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Edges sorted by (src, label, dst).
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_edge(&self, src: VertexId, label: Label, dst: VertexId) -> bool {
        self.out_adj[src].binary_search(&(label, dst)).is_ok()
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v < self.labels.len() {
            Ok(())
        } else {
            Err(GraphError::InvalidVertex { vertex: v, len: self.labels.len() })
        }
    }

    /// All `(edge label, neighbor)` pairs in the given direction, sorted.
    pub fn adjacency(&self, v: VertexId, dir: Direction) -> &[(Label, VertexId)] {
        match dir {
            Direction::Out => &self.out_adj[v],
            Direction::In => &self.in_adj[v],
        }
    }

    pub fn out_edges(&self, v: VertexId) -> &[(Label, VertexId)] {
        &self.out_adj[v]
    }

    pub fn in_edges(&self, v: VertexId) -> &[(Label, VertexId)] {
        &self.in_adj[v]
    }

    /// N⁺_r(v) or N⁻_r(v) as a sorted slice of `(r, neighbor)` pairs.
    pub fn neighbors_with_label(&self, v: VertexId, label: Label, dir: Direction) -> &[(Label, VertexId)] {
        let adj = self.adjacency(v, dir);
        let lo = adj.partition_point(|&(l, _)| l < label);
        let hi = adj.partition_point(|&(l, _)| l <= label);
        &adj[lo..hi]
    }

    /// In-degree plus out-degree, counting every labeled edge.
    pub fn degree(&self, v: VertexId) -> usize {
        self.out_adj[v].len() + self.in_adj[v].len()
    }

    /// |N(v)|: distinct neighbors in either direction, any label.
    pub fn neighbor_count(&self, v: VertexId) -> usize {
        self.undirected_neighbors(v).len()
    }

    pub fn undirected_neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let mut ns: Vec<VertexId> = self.out_adj[v]
            .iter()
            .chain(self.in_adj[v].iter())
            .map(|&(_, w)| w)
            .collect();
        ns.sort_unstable();
        ns.dedup();
        ns
    }

    pub fn vertices_with_label(&self, label: Label) -> &[VertexId] {
        self.by_label.get(&label).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Distinct edge labels, ascending.
    pub fn edge_labels(&self) -> Vec<Label> {
        let mut ls: Vec<Label> = self.edges.iter().map(|e| e.label).collect();
        ls.sort_unstable();
        ls.dedup();
        ls
    }

    pub fn vertex_labels(&self) -> Vec<Label> {
        let mut ls = self.labels.clone();
        ls.sort_unstable();
        ls.dedup();
        ls
    }

    /// Undirected hop distance from `src`, `None` when beyond `limit` or unreachable.
    pub fn hop_distances(&self, src: VertexId, limit: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].unwrap();
            if dx == limit {
                continue;
            }
            for &(_, w) in self.out_adj[x].iter().chain(self.in_adj[x].iter()) {
                if dist[w].is_none() {
                    dist[w] = Some(dx + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        if self.is_empty() {
            return true;
        }
        self.hop_distances(0, usize::MAX).iter().all(Option::is_some)
    }

    /// Subgraph induced on `keep`. Vertex `i` of the result is `keep[i]` after
    /// sorting and deduplication; the returned vector maps new ids to old ones.
    pub fn induce(&self, keep: &[VertexId]) -> (Graph, Vec<VertexId>) {
        let mut origin: Vec<VertexId> = keep.to_vec();
        origin.sort_unstable();
        origin.dedup();
        self.induce_ordered(origin)
    }

    /// Like [`Graph::induce`] but keeps the caller's vertex order.
    pub fn induce_ordered(&self, origin: Vec<VertexId>) -> (Graph, Vec<VertexId>) {
        let mut local = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in origin.iter().enumerate() {
            local[v] = i;
        }
        let mut b = GraphBuilder::with_vertices(origin.iter().map(|&v| self.labels[v]));
        for (i, &v) in origin.iter().enumerate() {
            for &(r, w) in &self.out_adj[v] {
                if local[w] != usize::MAX {
                    b.edges.insert(Edge { src: i, label: r, dst: local[w] });
                }
            }
        }
        (b.build(), origin)
    }
}

/// Radius-m induced neighborhood around a center vertex.
#[derive(Debug, Clone)]
pub struct EgoNet {
    pub graph: Graph,
    pub center: VertexId,
    pub radius: usize,
    /// Ego-net vertex id → source graph vertex id.
    pub origin: Vec<VertexId>,
    /// Undirected hop distance of every ego-net vertex from the center.
    pub dist: Vec<usize>,
}

/// Induced subgraph on every vertex within `radius` undirected hops of `v`.
/// Vertices are numbered in BFS order, so the center is always vertex 0.
pub fn ego_net(g: &Graph, v: VertexId, radius: usize) -> Result<EgoNet, GraphError> {
    g.check_vertex(v)?;
    if radius == 0 {
        return Err(GraphError::ZeroRadius);
    }
    // Sparse BFS so the cost tracks the ego net, not the whole graph.
    let mut seen: HashMap<VertexId, usize> = HashMap::from([(v, 0)]);
    let mut order = vec![(0, v)];
    let mut head = 0;
    while head < order.len() {
        let (d, x) = order[head];
        head += 1;
        if d == radius {
            continue;
        }
        for &(_, w) in g.out_adj[x].iter().chain(g.in_adj[x].iter()) {
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(w) {
                e.insert(d + 1);
                order.push((d + 1, w));
            }
        }
    }
    order.sort_unstable();
    let hops = order.iter().map(|&(d, _)| d).collect();
    let origin: Vec<VertexId> = order.into_iter().map(|(_, w)| w).collect();
    let local: HashMap<VertexId, usize> = origin.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let mut b = GraphBuilder::with_vertices(origin.iter().map(|&w| g.labels[w]));
    for (i, &w) in origin.iter().enumerate() {
        for &(r, x) in &g.out_adj[w] {
            if let Some(&j) = local.get(&x) {
                b.edges.insert(Edge { src: i, label: r, dst: j });
            }
        }
    }
    Ok(EgoNet { graph: b.build(), center: 0, radius, origin, dist: hops })
}

/// Lengths l in [2, m] of directed simple cycles passing through `v`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CycleSet {
    lengths: BTreeSet<usize>,
}

impl CycleSet {
    pub fn contains(&self, length: usize) -> bool {
        self.lengths.contains(&length)
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn lengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.lengths.iter().copied()
    }

    pub fn insert(&mut self, length: usize) {
        self.lengths.insert(length);
    }
}

impl FromIterator<usize> for CycleSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self { lengths: iter.into_iter().collect() }
    }
}

/// Depth-limited DFS along edge directions. Self-loops are ignored.
pub fn cycle_lengths(g: &Graph, v: VertexId, bound: usize) -> Result<CycleSet, GraphError> {
    g.check_vertex(v)?;
    if bound < 2 {
        return Err(GraphError::CycleBound(bound));
    }
    let succ: Vec<Vec<VertexId>> = (0..g.vertex_count())
        .map(|x| {
            let mut s: Vec<VertexId> = g.out_edges(x).iter().map(|&(_, w)| w).filter(|&w| w != x).collect();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    let dist = g.hop_distances(v, bound);
    let mut found = CycleSet::default();
    let mut on_path = vec![false; g.vertex_count()];
    on_path[v] = true;
    // Explicit DFS stack of (vertex, index of next successor to try).
    let mut stack: Vec<(VertexId, usize)> = vec![(v, 0)];
    while let Some(&(x, idx)) = stack.last() {
        let depth = stack.len() - 1;
        if idx >= succ[x].len() {
            on_path[x] = false;
            stack.pop();
            continue;
        }
        stack[depth].1 += 1;
        let w = succ[x][idx];
        if w == v {
            if depth + 1 >= 2 {
                found.insert(depth + 1);
            }
            continue;
        }
        // A vertex at undirected distance d still needs at least d edges to return.
        let remaining = bound - (depth + 1);
        if on_path[w] || dist[w].is_none_or(|d| d > remaining) {
            continue;
        }
        on_path[w] = true;
        stack.push((w, 0));
    }
    on_path[v] = false;
    Ok(found)
}
