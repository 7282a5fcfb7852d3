//! Synthetic graphs and oracle-labelled training examples.
//!
//! Positives: a BFS region G_p around a random vertex, a connected pattern
//! Q_p cut out of it, a few random vertex duplications, and the pivot's
//! origin as anchor. Negatives perturb a positive (extra pattern edge or a
//! moved anchor) and keep it only when the exact matcher proves that no
//! anchored homomorphism exists.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dualsim::{dual_sim, DualSimOptions};
use crate::exact::{HomSearch, MatchError, Verdict};
use crate::graph::{Graph, GraphBuilder, Label, LabelDict, VertexId};
use crate::io::{format_graph, parse_graph, ParseError};
use crate::pipeline::pivot;

#[derive(Debug, Error)]
pub enum DatagenError {
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("gave up after {attempts} attempts: {what}")]
    Exhausted { what: &'static str, attempts: usize },
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("index.tsv line {line}: {msg}")]
    Index { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parameters of a random directed labelled graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphParams {
    pub vertices: usize,
    pub edges: usize,
    pub vertex_labels: usize,
    pub edge_labels: usize,
    /// Start from a random spanning tree so the graph is weakly connected.
    pub connected: bool,
    pub seed: u64,
}

impl GraphParams {
    pub fn new(vertices: usize, edges: usize, labels: usize, seed: u64) -> Self {
        Self { vertices, edges, vertex_labels: labels, edge_labels: labels, connected: true, seed }
    }

    /// Label ids used by the generator: vertex labels `L0..`, then edge labels `e0..`.
    pub fn label_dict(&self) -> LabelDict {
        let mut dict = LabelDict::new();
        for i in 0..self.vertex_labels {
            dict.intern(&format!("L{i}"));
        }
        for i in 0..self.edge_labels {
            dict.intern(&format!("e{i}"));
        }
        dict
    }

    fn edge_label(&self, i: usize) -> Label {
        (self.vertex_labels + i) as Label
    }
}

pub fn gen_synthetic_graph(n_vertices: usize, n_edges: usize, n_labels: usize, seed: u64) -> Result<Graph, DatagenError> {
    gen_graph(&GraphParams::new(n_vertices, n_edges, n_labels, seed))
}

pub fn gen_graph(p: &GraphParams) -> Result<Graph, DatagenError> {
    let n = p.vertices;
    if n == 0 || p.vertex_labels == 0 {
        return Err(DatagenError::Infeasible("need at least one vertex and one vertex label".into()));
    }
    if p.edges > 0 && p.edge_labels == 0 {
        return Err(DatagenError::Infeasible("edges requested without edge labels".into()));
    }
    let capacity = (n as u128) * (n as u128 - 1) * p.edge_labels as u128;
    if p.edges as u128 > capacity {
        return Err(DatagenError::Infeasible(format!("{} edges exceed the {capacity} possible", p.edges)));
    }
    if p.connected && p.edges + 1 < n {
        return Err(DatagenError::Infeasible(format!("{} edges cannot connect {n} vertices", p.edges)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut b = GraphBuilder::with_vertices((0..n).map(|_| rng.gen_range(0..p.vertex_labels) as Label));
    if p.connected {
        let mut perm: Vec<VertexId> = (0..n).collect();
        perm.shuffle(&mut rng);
        for i in 1..n {
            let a = perm[i];
            let other = perm[rng.gen_range(0..i)];
            let label = p.edge_label(rng.gen_range(0..p.edge_labels));
            let (s, d) = if rng.gen_bool(0.5) { (a, other) } else { (other, a) };
            b.add_edge(s, label, d).expect("valid ids");
        }
    }
    let mut added = b.edge_count();
    while added < p.edges {
        let s = rng.gen_range(0..n);
        let d = rng.gen_range(0..n);
        if s == d {
            continue;
        }
        let label = p.edge_label(rng.gen_range(0..p.edge_labels));
        if b.add_edge(s, label, d).expect("valid ids") {
            added += 1;
        }
    }
    Ok(b.build())
}

/// Sampling protocol knobs; defaults follow the training-data recipe.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleOptions {
    /// BFS depth range for the region G_p, inclusive.
    pub depth: (usize, usize),
    /// At most this many vertices are kept in a region.
    pub region_cap: usize,
    /// Pattern size range before duplication, inclusive.
    pub pattern_size: (usize, usize),
    /// Hard cap on the pattern size after duplication.
    pub max_pattern: usize,
    pub duplication_rounds: usize,
    pub duplication_prob: f64,
    pub retries: usize,
    pub verify_timeout: Duration,
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self {
            depth: (5, 10),
            region_cap: 48,
            pattern_size: (3, 20),
            max_pattern: 20,
            duplication_rounds: 3,
            duplication_prob: 0.5,
            retries: 20,
            verify_timeout: Duration::from_secs(5),
        }
    }
}

impl SampleOptions {
    /// Patterns of exactly `size` vertices (no duplication), for size sweeps.
    pub fn fixed_pattern_size(size: usize) -> Self {
        Self {
            pattern_size: (size, size),
            max_pattern: size,
            duplication_rounds: 0,
            region_cap: (2 * size).max(48),
            ..Self::default()
        }
    }
}

/// An anchored example (Q, u, G_p, v).
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub pattern: Graph,
    pub pivot: VertexId,
    pub graph: Graph,
    pub anchor: VertexId,
    pub positive: bool,
    pub provenance: String,
}

fn bfs_region(g: &Graph, start: VertexId, depth: usize, cap: usize, rng: &mut ChaCha8Rng) -> Vec<VertexId> {
    let mut seen = HashSet::from([start]);
    let mut frontier = vec![start];
    let mut region = vec![start];
    for _ in 0..depth {
        let mut next = Vec::new();
        for &x in &frontier {
            let mut nbrs = g.undirected_neighbors(x);
            nbrs.shuffle(rng);
            for w in nbrs {
                if region.len() >= cap {
                    return region;
                }
                if seen.insert(w) {
                    region.push(w);
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    region
}

/// Random connected vertex subset of `size` grown from `root`.
fn grow_connected(g: &Graph, root: VertexId, size: usize, rng: &mut ChaCha8Rng) -> Vec<VertexId> {
    let mut chosen = vec![root];
    let mut member = HashSet::from([root]);
    let mut frontier: BTreeSet<VertexId> = g.undirected_neighbors(root).into_iter().collect();
    while chosen.len() < size && !frontier.is_empty() {
        let pick = *frontier.iter().nth(rng.gen_range(0..frontier.len())).unwrap();
        frontier.remove(&pick);
        member.insert(pick);
        chosen.push(pick);
        for w in g.undirected_neighbors(pick) {
            if !member.contains(&w) {
                frontier.insert(w);
            }
        }
    }
    chosen
}

/// Adds a copy of `x` carrying all of its incident edges; returns the copy.
pub fn duplicate_vertex(q: &Graph, x: VertexId) -> Graph {
    let mut b = GraphBuilder::with_vertices(q.labels().iter().copied());
    let copy = b.add_vertex(q.label(x));
    for e in q.edges() {
        b.add_edge(e.src, e.label, e.dst).expect("valid ids");
        let src = if e.src == x { copy } else { e.src };
        let dst = if e.dst == x { copy } else { e.dst };
        b.add_edge(src, e.label, dst).expect("valid ids");
    }
    b.build()
}

fn verify(q: &Graph, u: VertexId, g: &Graph, v: VertexId, timeout: Duration) -> Result<Verdict, MatchError> {
    Ok(HomSearch::new(q, g).anchor(u, v).timeout(timeout).decide()?.verdict)
}

/// A positive before verification, with what a negative needs to perturb it.
struct Draft {
    example: Example,
    trace: String,
}

fn draft_positive(g: &Graph, opts: &SampleOptions, rng: &mut ChaCha8Rng) -> Option<Draft> {
    if g.is_empty() {
        return None;
    }
    let start = rng.gen_range(0..g.vertex_count());
    let depth = rng.gen_range(opts.depth.0..=opts.depth.1);
    let region = bfs_region(g, start, depth, opts.region_cap, rng);
    if region.len() < opts.pattern_size.0.max(3) {
        return None;
    }
    let (gp, _) = g.induce(&region);
    let lo = opts.pattern_size.0.max(3);
    let hi = opts.pattern_size.1.min(gp.vertex_count()).min(opts.max_pattern);
    if lo > hi {
        return None;
    }
    let size = rng.gen_range(lo..=hi);
    let root = rng.gen_range(0..gp.vertex_count());
    let chosen = grow_connected(&gp, root, size, rng);
    if chosen.len() < size {
        return None;
    }
    let (mut q, mut origin) = gp.induce(&chosen);
    let mut dups = 0;
    for _ in 0..opts.duplication_rounds {
        if q.vertex_count() < opts.max_pattern && rng.gen_bool(opts.duplication_prob) {
            let x = rng.gen_range(0..q.vertex_count());
            q = duplicate_vertex(&q, x);
            origin.push(origin[x]);
            dups += 1;
        }
    }
    let u = pivot(&q).ok()?;
    let v = origin[u];
    let trace = format!("start={start};depth={depth};region={};size={size};dups={dups}", gp.vertex_count());
    Some(Draft { example: Example { pattern: q, pivot: u, graph: gp, anchor: v, positive: true, provenance: String::new() }, trace })
}

pub fn sample_positive(g: &Graph, opts: &SampleOptions, rng: &mut ChaCha8Rng) -> Result<Example, DatagenError> {
    for attempt in 0..opts.retries {
        let Some(d) = draft_positive(g, opts, rng) else { continue };
        let e = &d.example;
        if verify(&e.pattern, e.pivot, &e.graph, e.anchor, opts.verify_timeout)? == Verdict::True {
            let mut example = d.example;
            example.provenance = format!("pos;attempt={attempt};{}", d.trace);
            return Ok(example);
        }
    }
    Err(DatagenError::Exhausted { what: "positive sample", attempts: opts.retries })
}

fn add_random_edge(q: &Graph, edge_labels: &[Label], rng: &mut ChaCha8Rng) -> Option<Graph> {
    let n = q.vertex_count();
    for _ in 0..32 {
        let s = rng.gen_range(0..n);
        let d = rng.gen_range(0..n);
        let r = *edge_labels.choose(rng)?;
        if s != d && !q.has_edge(s, r, d) {
            let edges = q.edges().iter().map(|e| (e.src, e.label, e.dst)).chain([(s, r, d)]);
            return Graph::from_parts(q.labels().to_vec(), edges).ok();
        }
    }
    None
}

pub fn sample_negative(g: &Graph, opts: &SampleOptions, rng: &mut ChaCha8Rng) -> Result<Example, DatagenError> {
    let edge_labels = g.edge_labels();
    for attempt in 0..opts.retries {
        let Some(d) = draft_positive(g, opts, rng) else { continue };
        let mut e = d.example;
        let kind = if rng.gen_bool(0.5) {
            match add_random_edge(&e.pattern, &edge_labels, rng) {
                Some(q) => {
                    e.pattern = q;
                    e.pivot = pivot(&e.pattern).expect("non-empty");
                    "edge"
                }
                None => continue,
            }
        } else {
            let label = e.pattern.label(e.pivot);
            let others: Vec<VertexId> =
                e.graph.vertices_with_label(label).iter().copied().filter(|&w| w != e.anchor).collect();
            match others.choose(rng) {
                Some(&w) => {
                    e.anchor = w;
                    "anchor"
                }
                None => continue,
            }
        };
        if verify(&e.pattern, e.pivot, &e.graph, e.anchor, opts.verify_timeout)? == Verdict::False {
            e.positive = false;
            e.provenance = format!("neg={kind};attempt={attempt};{}", d.trace);
            return Ok(e);
        }
    }
    Err(DatagenError::Exhausted { what: "negative sample", attempts: opts.retries })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Val,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        })
    }
}

impl std::str::FromStr for Split {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "train" => Ok(Split::Train),
            "val" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            _ => Err(format!("unknown split `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub examples: Vec<Example>,
    pub splits: Vec<Split>,
}

impl Dataset {
    pub fn split(&self, which: Split) -> impl Iterator<Item = &Example> {
        self.examples.iter().zip(&self.splits).filter(move |(_, s)| **s == which).map(|(e, _)| e)
    }

    pub fn count(&self, which: Split) -> usize {
        self.splits.iter().filter(|s| **s == which).count()
    }

    /// Sorted vertex and edge labels seen anywhere in the dataset.
    pub fn labels(&self) -> (Vec<Label>, Vec<Label>) {
        let mut vl = BTreeSet::new();
        let mut el = BTreeSet::new();
        for e in &self.examples {
            for g in [&e.pattern, &e.graph] {
                vl.extend(g.vertex_labels());
                el.extend(g.edge_labels());
            }
        }
        (vl.into_iter().collect(), el.into_iter().collect())
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `n` examples, one positive per three negatives, split 8:1:1.
pub fn build_dataset(g: &Graph, n: usize, seed: u64, opts: &SampleOptions) -> Result<Dataset, DatagenError> {
    if n < 8 {
        return Err(DatagenError::Infeasible(format!("need at least 8 examples, got {n}")));
    }
    let n_pos = (n + 2) / 4;
    let mut examples = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = stream_rng(seed, i as u64);
        let mut e = if i < n_pos { sample_positive(g, opts, &mut rng)? } else { sample_negative(g, opts, &mut rng)? };
        e.provenance = format!("seed={seed};stream={i};{}", e.provenance);
        examples.push(e);
    }
    let mut rng = stream_rng(seed, u64::MAX);
    examples.shuffle(&mut rng);
    let n_train = (n * 8 + 5) / 10;
    let n_val = (n + 5) / 10;
    let splits = (0..n)
        .map(|i| if i < n_train { Split::Train } else if i < n_train + n_val { Split::Val } else { Split::Test })
        .collect();
    Ok(Dataset { examples, splits })
}

const INDEX_HEADER: &str = "example\tpattern\tgraph\tpivot\tanchor\tlabel\tsplit\tprovenance";

pub fn save_dataset(dir: impl AsRef<Path>, data: &Dataset, dict: &LabelDict) -> Result<(), DatagenError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir.join("patterns"))?;
    fs::create_dir_all(dir.join("graphs"))?;
    let mut index = String::from(INDEX_HEADER);
    index.push('\n');
    for (i, (e, split)) in data.examples.iter().zip(&data.splits).enumerate() {
        let pattern = format!("patterns/{i}.graph");
        let graph = format!("graphs/{i}.graph");
        fs::write(dir.join(&pattern), format_graph(&e.pattern, dict))?;
        fs::write(dir.join(&graph), format_graph(&e.graph, dict))?;
        let label = if e.positive { "pos" } else { "neg" };
        index.push_str(&format!("{i}\t{pattern}\t{graph}\t{}\t{}\t{label}\t{split}\t{}\n", e.pivot, e.anchor, e.provenance));
    }
    fs::write(dir.join("index.tsv"), index)?;
    Ok(())
}

pub fn load_dataset(dir: impl AsRef<Path>, dict: &mut LabelDict) -> Result<Dataset, DatagenError> {
    let dir = dir.as_ref();
    let text = fs::read_to_string(dir.join("index.tsv"))?;
    let mut cache: HashMap<String, Graph> = HashMap::new();
    let mut load = |rel: &str, dict: &mut LabelDict| -> Result<Graph, DatagenError> {
        if let Some(g) = cache.get(rel) {
            return Ok(g.clone());
        }
        let path = dir.join(rel);
        let body = fs::read_to_string(&path)?;
        let g = parse_graph(&body, dict).map_err(|source| DatagenError::Parse { path: path.display().to_string(), source })?;
        cache.insert(rel.to_owned(), g.clone());
        Ok(g)
    };
    let mut examples = Vec::new();
    let mut splits = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        if line.is_empty() || (i == 0 && line.starts_with("example\t")) {
            continue;
        }
        let bad = |msg: String| DatagenError::Index { line: ln, msg };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 7 {
            return Err(bad(format!("expected at least 7 columns, found {}", cols.len())));
        }
        let num = |s: &str, what: &str| s.parse::<usize>().map_err(|_| bad(format!("invalid {what} `{s}`")));
        let pattern = load(cols[1], dict)?;
        let graph = load(cols[2], dict)?;
        let pivot = num(cols[3], "pivot")?;
        let anchor = num(cols[4], "anchor")?;
        if pivot >= pattern.vertex_count() || anchor >= graph.vertex_count() {
            return Err(bad("pivot or anchor out of range".into()));
        }
        let positive = match cols[5] {
            "pos" => true,
            "neg" => false,
            other => return Err(bad(format!("label must be pos or neg, found `{other}`"))),
        };
        splits.push(cols[6].parse::<Split>().map_err(bad)?);
        let provenance = cols.get(7).copied().unwrap_or_default().to_owned();
        examples.push(Example { pattern, pivot, graph, anchor, positive, provenance });
    }
    Ok(Dataset { examples, splits })
}

/// An unanchored benchmark query. `expected` is `None` when neither a
/// witness nor a refutation could be established cheaply.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub pattern: Graph,
    pub expected: Option<bool>,
}

/// Benchmark queries over one large graph: positives are patterns cut out
/// of it (true by construction), negatives add up to four edges until
/// maximal dual simulation refutes the pattern, falling back to the exact
/// matcher within `verify_timeout`. Exactly `negatives` of the `n` queries
/// are certified negative.
pub fn sample_workload(
    g: &Graph,
    n: usize,
    negatives: usize,
    seed: u64,
    opts: &SampleOptions,
) -> Result<Vec<Query>, DatagenError> {
    let edge_labels = g.edge_labels();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = stream_rng(seed, i as u64);
        let want_negative = i < negatives;
        let mut made = None;
        for _ in 0..opts.retries {
            let Some(d) = draft_positive(g, opts, &mut rng) else { continue };
            let mut q = d.example.pattern;
            if !want_negative {
                made = Some(Query { pattern: q, expected: Some(true) });
                break;
            }
            for _ in 0..4 {
                match add_random_edge(&q, &edge_labels, &mut rng) {
                    Some(next) => q = next,
                    None => break,
                }
                if dual_sim(&q, g, DualSimOptions::fixpoint()).any_empty() {
                    made = Some(Query { pattern: q.clone(), expected: Some(false) });
                    break;
                }
            }
            if made.is_none() && HomSearch::new(&q, g).timeout(opts.verify_timeout).decide()?.verdict == Verdict::False {
                made = Some(Query { pattern: q, expected: Some(false) });
            }
            if made.is_some() {
                break;
            }
        }
        out.push(made.ok_or(DatagenError::Exhausted { what: "workload query", attempts: opts.retries })?);
    }
    let mut rng = stream_rng(seed, u64::MAX);
    out.shuffle(&mut rng);
    Ok(out)
}
