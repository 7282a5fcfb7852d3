//! The end-to-end decision pipeline and the exact-search accelerator.
//!
//! `decide`: dual simulation, induce the surviving subgraph, pick the pivot,
//! and let the model verify the pivot's candidates. `accelerate` keeps the
//! same front half but hands the model-ordered candidates to the exact
//! matcher, so its verdict is always exact.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::dualsim::{dual_sim, filter_graph, CandidateMap, DualSimOptions};
use crate::exact::{HomSearch, MatchError, MatchOutcome, Verdict};
use crate::graph::{Graph, VertexId};
use crate::datagen::{Dataset, Example, Split};
use crate::hgin::{pair_score, EvalItem, Model, ModelError, PairInput, PatternSide, TrainingData};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub dualsim_iters: usize,
    pub skip_dualsim: bool,
    /// At most this many pivot candidates are scored (ascending id).
    pub candidate_cap: Option<usize>,
    /// Overrides the model's decision threshold.
    pub threshold: Option<f64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self { dualsim_iters: 2, skip_dualsim: false, candidate_cap: None, threshold: None }
    }
}

impl PipelineConfig {
    /// The configuration a model was trained for.
    pub fn for_model(model: &Model) -> Self {
        Self { skip_dualsim: !model.config.dualsim_filtered, ..Self::default() }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error("pattern has no vertices")]
    EmptyPattern,
    #[error("dual-simulation iterations must be at least 1")]
    ZeroIterations,
    #[error("model was trained {} dual-simulation filtering but the pipeline runs {}", on_off(*.trained), on_off(*.running))]
    FilteringMismatch { trained: bool, running: bool },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Match(#[from] MatchError),
}

fn on_off(b: bool) -> &'static str {
    if b {
        "with"
    } else {
        "without"
    }
}

/// Wall-clock time spent per stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize)]
pub struct StageTimes {
    pub dualsim: Duration,
    pub induce: Duration,
    pub embed: Duration,
    pub predict: Duration,
    pub exact: Duration,
}

impl StageTimes {
    pub fn total(&self) -> Duration {
        self.dualsim + self.induce + self.embed + self.predict + self.exact
    }

    pub fn add(&mut self, other: &StageTimes) {
        self.dualsim += other.dualsim;
        self.induce += other.induce;
        self.embed += other.embed;
        self.predict += other.predict;
        self.exact += other.exact;
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// |C(u)| per pattern vertex after dual simulation (empty when skipped).
    pub candidate_counts: Vec<usize>,
    /// Some C(u) was empty, so the model never ran.
    pub short_circuit: bool,
    pub pivot: Option<VertexId>,
    pub filtered_vertices: usize,
    pub scored: usize,
    /// Data vertex (original id) whose prediction was accepted.
    pub accepted: Option<VertexId>,
    pub best_score: Option<f64>,
    pub times: StageTimes,
}

/// Vertex of maximum total degree, ties to the smallest id.
pub fn pivot(q: &Graph) -> Result<VertexId, PipelineError> {
    (0..q.vertex_count())
        .reduce(|best, u| if q.degree(u) > q.degree(best) { u } else { best })
        .ok_or(PipelineError::EmptyPattern)
}

fn check(model: &Model, cfg: &PipelineConfig) -> Result<(), PipelineError> {
    if model.config.dualsim_filtered == cfg.skip_dualsim {
        return Err(PipelineError::FilteringMismatch { trained: model.config.dualsim_filtered, running: !cfg.skip_dualsim });
    }
    if !cfg.skip_dualsim && cfg.dualsim_iters == 0 {
        return Err(PipelineError::ZeroIterations);
    }
    Ok(())
}

/// Dual simulation followed by induction. `None` when some C(u) is empty.
struct Filtered {
    graph: Graph,
    origin: Vec<VertexId>,
    /// Candidate lists in filtered-graph ids.
    candidates: Vec<Vec<VertexId>>,
}

fn filter(q: &Graph, g: &Graph, opts: DualSimOptions, diag: &mut Diagnostics) -> Option<Filtered> {
    let t = Instant::now();
    let cm = dual_sim(q, g, opts);
    diag.times.dualsim += t.elapsed();
    diag.candidate_counts = cm.candidates.iter().map(Vec::len).collect();
    if cm.any_empty() {
        diag.short_circuit = true;
        return None;
    }
    let t = Instant::now();
    let (graph, origin) = filter_graph(g, &cm);
    let candidates = local_candidates(&cm, &origin);
    diag.times.induce += t.elapsed();
    diag.filtered_vertices = graph.vertex_count();
    Some(Filtered { graph, origin, candidates })
}

fn local_candidates(cm: &CandidateMap, origin: &[VertexId]) -> Vec<Vec<VertexId>> {
    // `origin` is ascending, so ranks are found by binary search.
    cm.candidates
        .iter()
        .map(|c| c.iter().map(|v| origin.binary_search(v).expect("candidate kept by induction")).collect())
        .collect()
}

/// Does Q have a homomorphism into G? Decided by the model on the pivot's candidates.
pub fn decide(q: &Graph, g: &Graph, model: &Model, cfg: &PipelineConfig) -> Result<(bool, Diagnostics), PipelineError> {
    check(model, cfg)?;
    let up = pivot(q)?;
    let mut diag = Diagnostics { pivot: Some(up), ..Diagnostics::default() };
    let threshold = cfg.threshold.unwrap_or(model.config.threshold);

    let filtered;
    let (graph, origin, cands): (&Graph, Option<&[VertexId]>, Vec<VertexId>) = if cfg.skip_dualsim {
        (g, None, g.vertices_with_label(q.label(up)).to_vec())
    } else {
        match filter(q, g, DualSimOptions::sweeps(cfg.dualsim_iters), &mut diag) {
            None => return Ok((false, diag)),
            Some(f) => {
                filtered = f;
                let c = filtered.candidates[up].clone();
                (&filtered.graph, Some(&filtered.origin[..]), c)
            }
        }
    };

    let t = Instant::now();
    let side = PatternSide::new(model, q, up)?;
    let e_u = side.embedding(model);
    diag.times.embed += t.elapsed();

    let t = Instant::now();
    let cap = cfg.candidate_cap.unwrap_or(usize::MAX);
    let mut verdict = false;
    for &v in cands.iter().take(cap) {
        let p = side.predict(model, &e_u, graph, v)?;
        diag.scored += 1;
        diag.best_score = Some(diag.best_score.map_or(p.score, |b: f64| b.min(p.score)));
        if p.score <= threshold {
            verdict = true;
            diag.accepted = Some(origin.map_or(v, |o| o[v]));
            break;
        }
    }
    diag.times.predict += t.elapsed();
    Ok((verdict, diag))
}

/// Builds the model input for an anchored example, applying the same
/// filtering as the pipeline. `None` means the example is rejected before
/// the model: label mismatch, an empty C(u), or v dropped from C(u).
pub fn prepare_pair(
    q: &Graph,
    u: VertexId,
    g: &Graph,
    v: VertexId,
    model: &Model,
    cfg: &PipelineConfig,
) -> Result<Option<PairInput>, PipelineError> {
    Ok(prepare_timed(q, u, g, v, model, cfg)?.0)
}

fn prepare_timed(
    q: &Graph,
    u: VertexId,
    g: &Graph,
    v: VertexId,
    model: &Model,
    cfg: &PipelineConfig,
) -> Result<(Option<PairInput>, Diagnostics), PipelineError> {
    check(model, cfg)?;
    q.check_vertex(u).map_err(ModelError::from)?;
    g.check_vertex(v).map_err(ModelError::from)?;
    let mut diag = Diagnostics { pivot: Some(u), ..Diagnostics::default() };
    if q.label(u) != g.label(v) {
        diag.short_circuit = true;
        return Ok((None, diag));
    }
    let (graph, local);
    let filtered;
    if cfg.skip_dualsim {
        (graph, local) = (g, v);
    } else {
        filtered = filter(q, g, DualSimOptions::sweeps(cfg.dualsim_iters), &mut diag);
        let hit = filtered.as_ref().and_then(|f| {
            let l = f.origin.binary_search(&v).ok()?;
            f.candidates[u].binary_search(&l).is_ok().then_some((&f.graph, l))
        });
        match hit {
            Some((fg, l)) => (graph, local) = (fg, l),
            None => {
                diag.short_circuit = true;
                return Ok((None, diag));
            }
        }
    }
    let t = Instant::now();
    let side = PatternSide::new(model, q, u)?;
    let pair = side.pair_with(model, graph, local)?;
    diag.times.embed += t.elapsed();
    Ok((Some(pair), diag))
}

pub fn prepare_eval(
    q: &Graph,
    u: VertexId,
    g: &Graph,
    v: VertexId,
    positive: bool,
    model: &Model,
    cfg: &PipelineConfig,
) -> Result<EvalItem, PipelineError> {
    Ok(EvalItem { pair: prepare_pair(q, u, g, v, model, cfg)?, positive })
}

pub fn eval_items<'a>(
    examples: impl IntoIterator<Item = &'a Example>,
    model: &Model,
    cfg: &PipelineConfig,
) -> Result<Vec<EvalItem>, PipelineError> {
    examples
        .into_iter()
        .map(|e| prepare_eval(&e.pattern, e.pivot, &e.graph, e.anchor, e.positive, model, cfg))
        .collect()
}

/// Training pairs from the train split (only examples that survive the
/// filter) and evaluation items from the validation split.
pub fn training_data(data: &Dataset, model: &Model, cfg: &PipelineConfig) -> Result<TrainingData, PipelineError> {
    let mut train = Vec::new();
    for e in data.split(Split::Train) {
        if let Some(p) = prepare_pair(&e.pattern, e.pivot, &e.graph, e.anchor, model, cfg)? {
            train.push((p, e.positive));
        }
    }
    Ok(TrainingData { train, val: eval_items(data.split(Split::Val), model, cfg)? })
}

/// Anchored prediction: is there a homomorphism with φ(u) = v?
/// Returns the verdict, the violation score (+∞ when filtered out) and diagnostics.
pub fn decide_anchored(
    q: &Graph,
    u: VertexId,
    g: &Graph,
    v: VertexId,
    model: &Model,
    cfg: &PipelineConfig,
) -> Result<(bool, f64, Diagnostics), PipelineError> {
    let threshold = cfg.threshold.unwrap_or(model.config.threshold);
    let (pair, mut diag) = prepare_timed(q, u, g, v, model, cfg)?;
    Ok(match pair {
        None => (false, f64::INFINITY, diag),
        Some(pair) => {
            let t = Instant::now();
            let s = pair_score(model, &pair);
            diag.times.predict += t.elapsed();
            diag.scored = 1;
            diag.best_score = Some(s);
            if s <= threshold {
                diag.accepted = Some(v);
            }
            (s <= threshold, s, diag)
        }
    })
}

/// The dual-simulation-only baseline on an anchored example: accept iff no
/// C(u) is empty and the anchor survives in the pivot's candidate set.
pub fn dualsim_accepts(q: &Graph, u: VertexId, g: &Graph, v: VertexId, iters: usize) -> bool {
    let cm = dual_sim(q, g, DualSimOptions::sweeps(iters));
    !cm.any_empty() && cm.contains(u, v)
}

/// Exact decision, sped up by filtering and model-ordered pivot candidates.
///
/// Candidates the model accepts are searched first (lowest violation
/// first), then the rest; no candidate is dropped, so the verdict is the
/// exact one. With `model = None` only the filtering is applied.
pub fn accelerate(
    q: &Graph,
    g: &Graph,
    model: Option<&Model>,
    cfg: &PipelineConfig,
    timeout: Option<Duration>,
) -> Result<(MatchOutcome, Diagnostics), PipelineError> {
    if let Some(m) = model {
        check(m, cfg)?;
    }
    let start = Instant::now();
    let up = pivot(q)?;
    let mut diag = Diagnostics { pivot: Some(up), ..Diagnostics::default() };
    let iters = cfg.dualsim_iters.max(1);
    let Some(f) = filter(q, g, DualSimOptions::sweeps(iters), &mut diag) else {
        let outcome = MatchOutcome { verdict: Verdict::False, witness: None, elapsed: start.elapsed(), steps: 0 };
        return Ok((outcome, diag));
    };
    let mut candidates = f.candidates;

    if let Some(model) = model {
        let t = Instant::now();
        let side = PatternSide::new(model, q, up)?;
        let e_u = side.embedding(model);
        diag.times.embed += t.elapsed();
        let t = Instant::now();
        let threshold = cfg.threshold.unwrap_or(model.config.threshold);
        let mut scored = Vec::with_capacity(candidates[up].len());
        for &v in &candidates[up] {
            let p = side.predict(model, &e_u, &f.graph, v)?;
            scored.push((p.score > threshold, p.score, v));
        }
        diag.scored = scored.len();
        scored.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
        diag.best_score = scored.first().map(|s| s.1);
        candidates[up] = scored.into_iter().map(|s| s.2).collect();
        diag.times.predict += t.elapsed();
    }

    let t = Instant::now();
    let remaining = timeout.map(|limit| limit.saturating_sub(start.elapsed()));
    let mut outcome = HomSearch::new(q, &f.graph)
        .candidates(&candidates)
        .root(up)
        .timeout_opt(remaining)
        .decide()?;
    diag.times.exact += t.elapsed();
    if let Some(w) = outcome.witness.as_mut() {
        w.iter_mut().for_each(|x| *x = f.origin[*x]);
        diag.accepted = Some(w[up]);
    }
    outcome.elapsed = start.elapsed();
    Ok((outcome, diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hgin::{init_model, ModelConfig};

    fn model(filtered: bool) -> Model {
        let mut c = ModelConfig::new(vec![0, 1], vec![5]);
        c.layers = 2;
        c.dim = 4;
        c.dualsim_filtered = filtered;
        init_model(c).unwrap()
    }

    #[test]
    fn pivot_prefers_degree_then_id() {
        let star = Graph::from_parts(vec![0; 6], (1..6).map(|i| (0, 5, i))).unwrap();
        assert_eq!(pivot(&star).unwrap(), 0);
        let cycle = Graph::from_parts(vec![0; 4], [(0, 5, 1), (1, 5, 2), (2, 5, 3), (3, 5, 0)]).unwrap();
        assert_eq!(pivot(&cycle).unwrap(), 0);
        let leaf_first = Graph::from_parts(vec![0; 3], [(1, 5, 0), (1, 5, 2)]).unwrap();
        assert_eq!(pivot(&leaf_first).unwrap(), 1);
        assert_eq!(pivot(&Graph::empty()), Err(PipelineError::EmptyPattern));
    }

    #[test]
    fn empty_candidate_set_short_circuits() {
        let q = Graph::from_parts(vec![0, 1], [(0, 5, 1)]).unwrap();
        let g = Graph::from_parts(vec![0, 1], [(1, 5, 0)]).unwrap();
        let (verdict, diag) = decide(&q, &g, &model(true), &PipelineConfig::default()).unwrap();
        assert!(!verdict && diag.short_circuit);
        assert_eq!(diag.scored, 0);
        let (out, diag) = accelerate(&q, &g, None, &PipelineConfig::default(), None).unwrap();
        assert_eq!((out.verdict, out.steps), (Verdict::False, 0));
        assert!(diag.short_circuit);
    }

    #[test]
    fn identical_ego_nets_are_accepted() {
        let q = Graph::from_parts(vec![0, 1, 1], [(0, 5, 1), (0, 5, 2)]).unwrap();
        let (verdict, diag) = decide(&q, &q, &model(true), &PipelineConfig::default()).unwrap();
        assert!(verdict);
        assert_eq!(diag.accepted, Some(0));
        assert_eq!(diag.best_score, Some(0.0));
    }

    #[test]
    fn filtering_must_match_training() {
        let q = Graph::from_parts(vec![0], []).unwrap();
        let cfg = PipelineConfig { skip_dualsim: true, ..PipelineConfig::default() };
        assert!(matches!(decide(&q, &q, &model(true), &cfg), Err(PipelineError::FilteringMismatch { .. })));
        assert!(decide(&q, &q, &model(false), &cfg).is_ok());
    }

    #[test]
    fn accelerate_maps_witness_to_original_ids() {
        let q = Graph::from_parts(vec![0, 1], [(0, 5, 1)]).unwrap();
        let g = Graph::from_parts(vec![1, 1, 0, 1], [(2, 5, 3), (0, 5, 1)]).unwrap();
        let (out, _) = accelerate(&q, &g, Some(&model(true)), &PipelineConfig::default(), None).unwrap();
        assert_eq!(out.verdict, Verdict::True);
        assert_eq!(out.witness, Some(vec![2, 3]));
    }
}
