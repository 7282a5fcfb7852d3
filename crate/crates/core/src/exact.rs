//! Exact subgraph homomorphism by backtracking.
//!
//! Candidates start from vertex labels and are refined by requiring every
//! (direction, edge label) pair present around a pattern vertex to also be
//! present around the data vertex. Counts are not compared: homomorphisms
//! may fold several pattern neighbors onto one data vertex.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::graph::{Direction, Graph, GraphError, Label, VertexId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchError {
    #[error("pattern has no vertices")]
    EmptyPattern,
    #[error("invalid anchor: {0}")]
    Anchor(#[from] GraphError),
    #[error("instance too large for brute force: {graph}^{pattern} assignments")]
    TooLarge { graph: usize, pattern: usize },
    #[error("candidate list count {found} does not match pattern size {expected}")]
    CandidateShape { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    True,
    False,
    Timeout,
}

/// `assignment[u]` is the data vertex that pattern vertex `u` maps to.
pub type Mapping = Vec<VertexId>;

#[derive(Debug, Clone, PartialEq)]
pub struct MatchOutcome {
    pub verdict: Verdict,
    pub witness: Option<Mapping>,
    pub elapsed: Duration,
    /// Candidate assignments tried.
    pub steps: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Enumeration {
    pub mappings: Vec<Mapping>,
    pub timed_out: bool,
    pub elapsed: Duration,
}

const TIMEOUT_CHECK_INTERVAL: u64 = 4096;

/// Checks label and edge preservation of a complete assignment.
pub fn verify_hom(q: &Graph, g: &Graph, map: &[VertexId]) -> bool {
    map.len() == q.vertex_count()
        && map.iter().all(|&v| v < g.vertex_count())
        && (0..q.vertex_count()).all(|u| q.label(u) == g.label(map[u]))
        && q.edges().iter().all(|e| g.has_edge(map[e.src], e.label, map[e.dst]))
}

/// Configurable homomorphism search between a pattern and a data graph.
#[derive(Debug, Clone)]
pub struct HomSearch<'a> {
    pattern: &'a Graph,
    graph: &'a Graph,
    anchor: Option<(VertexId, VertexId)>,
    timeout: Option<Duration>,
    candidates: Option<&'a [Vec<VertexId>]>,
    root: Option<VertexId>,
}

impl<'a> HomSearch<'a> {
    pub fn new(pattern: &'a Graph, graph: &'a Graph) -> Self {
        Self { pattern, graph, anchor: None, timeout: None, candidates: None, root: None }
    }

    /// Requires φ(u) = v.
    pub fn anchor(mut self, u: VertexId, v: VertexId) -> Self {
        self.anchor = Some((u, v));
        self
    }

    pub fn anchor_opt(mut self, anchor: Option<(VertexId, VertexId)>) -> Self {
        self.anchor = anchor;
        self
    }

    pub fn timeout(mut self, timeout: Duration) -> Self {
        self.timeout = Some(timeout);
        self
    }

    pub fn timeout_opt(mut self, timeout: Option<Duration>) -> Self {
        self.timeout = timeout;
        self
    }

    /// Restricts every pattern vertex to a precomputed candidate list
    /// (for instance the output of dual simulation).
    pub fn candidates(mut self, candidates: &'a [Vec<VertexId>]) -> Self {
        self.candidates = Some(candidates);
        self
    }

    /// Places `u` first in the matching order, so its candidates are tried
    /// in the order given by [`HomSearch::candidates`]. An anchor takes precedence.
    pub fn root(mut self, u: VertexId) -> Self {
        self.root = Some(u);
        self
    }

    pub fn decide(&self) -> Result<MatchOutcome, MatchError> {
        let start = Instant::now();
        let mut witness = None;
        let (complete, steps) = self.run(start, &mut |m| {
            witness = Some(m.to_vec());
            false
        })?;
        let verdict = match (&witness, complete) {
            (Some(_), _) => Verdict::True,
            (None, true) => Verdict::False,
            (None, false) => Verdict::Timeout,
        };
        Ok(MatchOutcome { verdict, witness, elapsed: start.elapsed(), steps })
    }

    pub fn enumerate(&self, limit: usize) -> Result<Enumeration, MatchError> {
        let start = Instant::now();
        let mut mappings = Vec::new();
        if limit == 0 {
            self.validate()?;
            return Ok(Enumeration { mappings, timed_out: false, elapsed: start.elapsed() });
        }
        let (complete, _) = self.run(start, &mut |m| {
            mappings.push(m.to_vec());
            mappings.len() < limit
        })?;
        let timed_out = !complete && mappings.len() < limit;
        Ok(Enumeration { mappings, timed_out, elapsed: start.elapsed() })
    }

    fn validate(&self) -> Result<(), MatchError> {
        if self.pattern.is_empty() {
            return Err(MatchError::EmptyPattern);
        }
        if let Some((u, v)) = self.anchor {
            self.pattern.check_vertex(u)?;
            self.graph.check_vertex(v)?;
        }
        if let Some(u) = self.root {
            self.pattern.check_vertex(u)?;
        }
        if let Some(c) = self.candidates {
            if c.len() != self.pattern.vertex_count() {
                return Err(MatchError::CandidateShape { expected: self.pattern.vertex_count(), found: c.len() });
            }
        }
        Ok(())
    }

    /// Returns (search finished without timing out, steps). `on_match`
    /// returns whether to keep searching.
    fn run(&self, start: Instant, on_match: &mut dyn FnMut(&[VertexId]) -> bool) -> Result<(bool, u64), MatchError> {
        self.validate()?;
        let plan = Plan::new(self.pattern, self.anchor.map(|(u, _)| u).or(self.root));
        let candidates = self.initial_candidates();
        let mut state = State {
            q: self.pattern,
            g: self.graph,
            plan: &plan,
            candidates,
            assign: vec![usize::MAX; self.pattern.vertex_count()],
            steps: 0,
            deadline: self.timeout.map(|t| start + t),
            timed_out: false,
        };
        if state.candidates.iter().any(|c| c.is_empty()) {
            return Ok((true, 0));
        }
        state.search(0, on_match);
        Ok((!state.timed_out, state.steps))
    }

    fn initial_candidates(&self) -> Vec<Candidates> {
        let (q, g) = (self.pattern, self.graph);
        (0..q.vertex_count())
            .map(|u| {
                let reqs = requirements(q, u);
                let ok = |v: VertexId| g.label(v) == q.label(u) && satisfies(g, v, &reqs);
                let list: Vec<VertexId> = match (self.anchor, self.candidates) {
                    (Some((au, av)), _) if au == u => [av].into_iter().filter(|&v| ok(v)).collect(),
                    (_, Some(c)) => c[u].iter().copied().filter(|&v| ok(v)).collect(),
                    _ => g.vertices_with_label(q.label(u)).iter().copied().filter(|&v| ok(v)).collect(),
                };
                Candidates::new(list, g.vertex_count())
            })
            .collect()
    }
}

pub fn hom_decide(
    q: &Graph,
    g: &Graph,
    anchor: Option<(VertexId, VertexId)>,
    timeout: Option<Duration>,
) -> Result<MatchOutcome, MatchError> {
    HomSearch::new(q, g).anchor_opt(anchor).timeout_opt(timeout).decide()
}

pub fn hom_enumerate(
    q: &Graph,
    g: &Graph,
    anchor: Option<(VertexId, VertexId)>,
    limit: usize,
    timeout: Option<Duration>,
) -> Result<Enumeration, MatchError> {
    HomSearch::new(q, g).anchor_opt(anchor).timeout_opt(timeout).enumerate(limit)
}

pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;

/// Tries every function V_Q → V_G. Test oracle only.
pub fn brute_force_hom(q: &Graph, g: &Graph, anchor: Option<(VertexId, VertexId)>) -> Result<bool, MatchError> {
    Ok(brute_force_count(q, g, anchor)? > 0)
}

/// Number of homomorphisms, by exhaustive enumeration.
pub fn brute_force_count(q: &Graph, g: &Graph, anchor: Option<(VertexId, VertexId)>) -> Result<u64, MatchError> {
    let (nq, ng) = (q.vertex_count(), g.vertex_count());
    if nq == 0 {
        return Err(MatchError::EmptyPattern);
    }
    if let Some((u, v)) = anchor {
        q.check_vertex(u)?;
        g.check_vertex(v)?;
    }
    let space = (ng as u128).checked_pow(nq as u32).unwrap_or(u128::MAX);
    if space > BRUTE_FORCE_LIMIT {
        return Err(MatchError::TooLarge { graph: ng, pattern: nq });
    }
    if ng == 0 {
        return Ok(0);
    }
    let mut map = vec![0; nq];
    let mut count = 0;
    loop {
        if anchor.is_none_or(|(u, v)| map[u] == v) && verify_hom(q, g, &map) {
            count += 1;
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == nq {
                return Ok(count);
            }
            map[i] += 1;
            if map[i] < ng {
                break;
            }
            map[i] = 0;
            i += 1;
        }
    }
}

/// (direction, edge label) pairs around `u`, plus self-loop labels.
struct Requirements {
    incident: Vec<(Direction, Label)>,
    self_loops: Vec<Label>,
}

fn requirements(q: &Graph, u: VertexId) -> Requirements {
    let mut incident = Vec::new();
    for dir in Direction::BOTH {
        let mut last = None;
        for &(r, _) in q.adjacency(u, dir) {
            if last != Some(r) {
                incident.push((dir, r));
                last = Some(r);
            }
        }
    }
    let self_loops = q.out_edges(u).iter().filter(|&&(_, w)| w == u).map(|&(r, _)| r).collect();
    Requirements { incident, self_loops }
}

fn satisfies(g: &Graph, v: VertexId, reqs: &Requirements) -> bool {
    reqs.incident.iter().all(|&(dir, r)| !g.neighbors_with_label(v, r, dir).is_empty())
        && reqs.self_loops.iter().all(|&r| g.has_edge(v, r, v))
}

struct Candidates {
    list: Vec<VertexId>,
    member: Vec<bool>,
}

impl Candidates {
    fn new(list: Vec<VertexId>, n: usize) -> Self {
        let mut member = vec![false; n];
        for &v in &list {
            member[v] = true;
        }
        Self { list, member }
    }

    fn is_empty(&self) -> bool {
        self.list.is_empty()
    }
}

/// Edge between the vertex placed at some position and an earlier one.
#[derive(Debug, Clone, Copy)]
struct BackEdge {
    label: Label,
    other: VertexId,
    /// true: pattern edge goes from the new vertex to `other`.
    outgoing: bool,
}

struct Plan {
    order: Vec<VertexId>,
    back_edges: Vec<Vec<BackEdge>>,
    self_loops: Vec<Vec<Label>>,
}

impl Plan {
    /// Descending degree, ties by smaller id, grown greedily through
    /// vertices adjacent to those already placed.
    fn new(q: &Graph, first: Option<VertexId>) -> Self {
        let n = q.vertex_count();
        let mut placed = vec![false; n];
        let mut adjacent = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let better = |a: VertexId, b: VertexId| q.degree(a) > q.degree(b) || (q.degree(a) == q.degree(b) && a < b);
        while order.len() < n {
            let next = if let Some(f) = first.filter(|_| order.is_empty()) {
                f
            } else {
                let pick = |frontier_only: bool| {
                    (0..n)
                        .filter(|&x| !placed[x] && (!frontier_only || adjacent[x]))
                        .reduce(|a, b| if better(b, a) { b } else { a })
                };
                pick(true).or_else(|| pick(false)).unwrap()
            };
            placed[next] = true;
            order.push(next);
            for w in q.undirected_neighbors(next) {
                adjacent[w] = true;
            }
        }
        let mut position = vec![0; n];
        for (i, &u) in order.iter().enumerate() {
            position[u] = i;
        }
        let mut back_edges = vec![Vec::new(); n];
        let mut self_loops = vec![Vec::new(); n];
        for e in q.edges() {
            if e.src == e.dst {
                self_loops[position[e.src]].push(e.label);
            } else if position[e.src] > position[e.dst] {
                back_edges[position[e.src]].push(BackEdge { label: e.label, other: e.dst, outgoing: true });
            } else {
                back_edges[position[e.dst]].push(BackEdge { label: e.label, other: e.src, outgoing: false });
            }
        }
        Plan { order, back_edges, self_loops }
    }
}

struct State<'s> {
    q: &'s Graph,
    g: &'s Graph,
    plan: &'s Plan,
    candidates: Vec<Candidates>,
    assign: Vec<VertexId>,
    steps: u64,
    deadline: Option<Instant>,
    timed_out: bool,
}

impl State<'_> {
    /// Returns false once the search must stop (callback said so or timeout).
    fn search(&mut self, pos: usize, on_match: &mut dyn FnMut(&[VertexId]) -> bool) -> bool {
        if pos == self.plan.order.len() {
            debug_assert!(verify_hom(self.q, self.g, &self.assign));
            return on_match(&self.assign);
        }
        let u = self.plan.order[pos];
        let backs = &self.plan.back_edges[pos];
        // Generate from the adjacency of an already-mapped neighbor when possible.
        let pool: Vec<VertexId> = match backs.first() {
            Some(b) => {
                let anchor_v = self.assign[b.other];
                // pattern edge u -> other means data edge v -> anchor_v, so v is an in-neighbor.
                let dir = if b.outgoing { Direction::In } else { Direction::Out };
                self.g
                    .neighbors_with_label(anchor_v, b.label, dir)
                    .iter()
                    .map(|&(_, v)| v)
                    .filter(|&v| self.candidates[u].member[v])
                    .collect()
            }
            None => self.candidates[u].list.clone(),
        };
        for v in pool {
            self.steps += 1;
            if self.steps.is_multiple_of(TIMEOUT_CHECK_INTERVAL) {
                if let Some(d) = self.deadline {
                    if Instant::now() >= d {
                        self.timed_out = true;
                        return false;
                    }
                }
            }
            let consistent = backs.iter().all(|b| {
                let w = self.assign[b.other];
                if b.outgoing {
                    self.g.has_edge(v, b.label, w)
                } else {
                    self.g.has_edge(w, b.label, v)
                }
            }) && self.plan.self_loops[pos].iter().all(|&r| self.g.has_edge(v, r, v));
            if !consistent {
                continue;
            }
            self.assign[u] = v;
            let keep_going = self.search(pos + 1, on_match);
            self.assign[u] = usize::MAX;
            if !keep_going {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        Graph::from_parts(vec![0; n], (0..n).map(|i| (i, 0, (i + 1) % n))).unwrap()
    }

    #[test]
    fn hexagon_folds_onto_triangle() {
        let out = hom_decide(&cycle(6), &cycle(3), None, None).unwrap();
        assert_eq!(out.verdict, Verdict::True);
        assert!(verify_hom(&cycle(6), &cycle(3), out.witness.as_ref().unwrap()));
        assert_eq!(hom_decide(&cycle(3), &cycle(6), None, None).unwrap().verdict, Verdict::False);
    }

    #[test]
    fn enumerate_counts_agree_with_brute_force() {
        let all = hom_enumerate(&cycle(6), &cycle(3), None, usize::MAX, None).unwrap();
        assert_eq!(all.mappings.len() as u64, brute_force_count(&cycle(6), &cycle(3), None).unwrap());
        assert!(!all.timed_out);
        let one = hom_enumerate(&cycle(6), &cycle(3), None, 1, None).unwrap();
        assert_eq!(one.mappings.len(), 1);
        let decided = hom_decide(&cycle(6), &cycle(3), None, None).unwrap();
        assert_eq!(Some(&one.mappings[0]), decided.witness.as_ref());
    }

    #[test]
    fn single_vertex_pattern_counts_label_matches() {
        let q = Graph::from_parts(vec![1], []).unwrap();
        let g = Graph::from_parts(vec![1, 0, 1, 1], [(0, 0, 1)]).unwrap();
        assert_eq!(hom_enumerate(&q, &g, None, usize::MAX, None).unwrap().mappings.len(), 3);
    }

    #[test]
    fn anchored_identity() {
        let g = Graph::from_parts(vec![0, 1, 0], [(0, 0, 1), (1, 1, 2), (2, 0, 0)]).unwrap();
        for u in 0..3 {
            assert_eq!(hom_decide(&g, &g, Some((u, u)), None).unwrap().verdict, Verdict::True);
        }
        // label mismatch under the anchor
        assert_eq!(hom_decide(&g, &g, Some((0, 1)), None).unwrap().verdict, Verdict::False);
    }

    #[test]
    fn missing_edge_label() {
        let q = Graph::from_parts(vec![0, 1], [(0, 5, 1)]).unwrap();
        let g = Graph::from_parts(vec![0, 1], [(0, 4, 1)]).unwrap();
        assert!(!brute_force_hom(&q, &g, None).unwrap());
        assert_eq!(hom_decide(&q, &g, None, None).unwrap().verdict, Verdict::False);
        let g2 = Graph::from_parts(vec![0, 1], [(0, 5, 1)]).unwrap();
        assert!(brute_force_hom(&q, &g2, None).unwrap());
    }

    #[test]
    fn self_loops_must_be_preserved() {
        let q = Graph::from_parts(vec![0], [(0, 0, 0)]).unwrap();
        let g = Graph::from_parts(vec![0, 0], [(0, 0, 1), (1, 0, 0)]).unwrap();
        assert_eq!(hom_decide(&q, &g, None, None).unwrap().verdict, Verdict::False);
        let g2 = Graph::from_parts(vec![0, 0], [(1, 0, 1)]).unwrap();
        assert_eq!(hom_decide(&q, &g2, None, None).unwrap().witness, Some(vec![1]));
    }

    #[test]
    fn errors() {
        let empty = Graph::empty();
        assert_eq!(hom_decide(&empty, &cycle(3), None, None).unwrap_err(), MatchError::EmptyPattern);
        assert!(matches!(hom_decide(&cycle(3), &cycle(3), Some((0, 9)), None), Err(MatchError::Anchor(_))));
        assert!(matches!(brute_force_hom(&cycle(9), &cycle(9), None), Err(MatchError::TooLarge { .. })));
    }

    #[test]
    fn timeout_is_distinct_from_false() {
        // Dense single-label graph without a 5-clique's worth of structure:
        // a hard negative for plain backtracking.
        let n = 60;
        let mut edges = Vec::new();
        for a in 0..n {
            for b in 0..n {
                // bipartite: homomorphic images of odd cycles impossible
                if a % 2 != b % 2 {
                    edges.push((a, 0, b));
                }
            }
        }
        let g = Graph::from_parts(vec![0; n], edges).unwrap();
        // undirected odd cycle of length 9 plus a long tail
        let mut qe = Vec::new();
        for i in 0..9 {
            qe.push((i, 0, (i + 1) % 9));
            qe.push(((i + 1) % 9, 0, i));
        }
        let q = Graph::from_parts(vec![0; 9], qe).unwrap();
        let out = hom_decide(&q, &g, None, Some(Duration::from_millis(1))).unwrap();
        assert_eq!(out.verdict, Verdict::Timeout);
        assert!(out.witness.is_none());
    }
}
