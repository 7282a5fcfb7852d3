//! Accuracy and latency of the exact matcher, dual simulation alone, and
//! learned variants, on anchored examples or on unanchored query workloads.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::datagen::{Example, Query};
use crate::dualsim::{dual_sim, DualSimOptions};
use crate::exact::{HomSearch, MatchError, Verdict};
use crate::graph::Graph;
use crate::hgin::Model;
use crate::pipeline::{accelerate, decide, decide_anchored, dualsim_accepts, PipelineConfig, PipelineError, StageTimes};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{predictions} predictions for {labels} labels")]
    LengthMismatch { predictions: usize, labels: usize },
    #[error("method `{0}` does not apply to this benchmark")]
    Unsupported(String),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Match(#[from] MatchError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Confusion {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Confusion {
    pub fn record(&mut self, predicted: bool, actual: bool) {
        match (predicted, actual) {
            (true, true) => self.tp += 1,
            (false, false) => self.tn += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }

    /// (TP + TN) / total; 0 for an empty table.
    pub fn accuracy(&self) -> f64 {
        if self.total() == 0 {
            0.0
        } else {
            (self.tp + self.tn) as f64 / self.total() as f64
        }
    }
}

pub fn accuracy(predictions: &[bool], labels: &[bool]) -> Result<Confusion, BenchError> {
    if predictions.len() != labels.len() {
        return Err(BenchError::LengthMismatch { predictions: predictions.len(), labels: labels.len() });
    }
    let mut c = Confusion::default();
    for (&p, &l) in predictions.iter().zip(labels) {
        c.record(p, l);
    }
    Ok(c)
}

/// Mean seconds per example spent in each stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StageSeconds {
    pub dualsim: f64,
    pub induce: f64,
    pub embed: f64,
    pub predict: f64,
    pub exact: f64,
}

impl StageSeconds {
    pub fn sum(&self) -> f64 {
        self.dualsim + self.induce + self.embed + self.predict + self.exact
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodRow {
    pub method: String,
    pub accuracy: f64,
    #[serde(flatten)]
    pub confusion: Confusion,
    /// Examples whose ground truth is unknown are timed but not scored.
    pub unscored: usize,
    pub mean_seconds: f64,
    pub timeouts: usize,
    pub stages: StageSeconds,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<MethodRow>,
    pub meta: BTreeMap<String, String>,
}

impl BenchReport {
    pub fn row(&self, method: &str) -> Option<&MethodRow> {
        self.rows.iter().find(|r| r.method == method)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("method\taccuracy\ttp\ttn\tfp\tfn\tunscored\tmean_seconds\ttimeouts\tdualsim_s\tinduce_s\tembed_s\tpredict_s\texact_s\n");
        for r in &self.rows {
            let c = &r.confusion;
            let s = &r.stages;
            let _ = writeln!(
                out,
                "{}\t{:.4}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
                r.method, r.accuracy, c.tp, c.tn, c.fp, c.fn_, r.unscored, r.mean_seconds, r.timeouts,
                s.dualsim, s.induce, s.embed, s.predict, s.exact
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Environment and configuration echo for a report.
pub fn environment_meta() -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert("os".into(), std::env::consts::OS.into());
    m.insert("arch".into(), std::env::consts::ARCH.into());
    m.insert(
        "cpus".into(),
        std::thread::available_parallelism().map_or("unknown".into(), |n| n.get().to_string()),
    );
    m.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    m
}

#[derive(Debug, Clone, Copy)]
pub enum Method<'a> {
    Exact,
    DualSimOnly,
    /// The learned pipeline with the given model.
    Model { name: &'a str, model: &'a Model },
    /// Exact search after filtering, with model-ordered pivot candidates
    /// (`model = None` filters only). Unanchored workloads only.
    Accelerate { name: &'a str, model: Option<&'a Model> },
}

impl Method<'_> {
    pub fn name(&self) -> &str {
        match self {
            Method::Exact => "exact",
            Method::DualSimOnly => "dualsim-only",
            Method::Model { name, .. } | Method::Accelerate { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub timeout: Duration,
    pub dualsim_iters: usize,
    /// Timed runs per example; latency is their mean.
    pub repetitions: usize,
    /// One untimed run per example before measuring.
    pub warmup: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self { timeout: Duration::from_secs(30), dualsim_iters: 2, repetitions: 5, warmup: true }
    }
}

impl BenchOptions {
    /// A single untimed-warmup-free pass, for accuracy-only runs.
    pub fn accuracy_only(timeout: Duration) -> Self {
        Self { timeout, repetitions: 1, warmup: false, ..Self::default() }
    }
}

struct Outcome {
    verdict: bool,
    timed_out: bool,
    stages: StageTimes,
}

fn stage_seconds(t: &StageTimes, runs: f64) -> StageSeconds {
    StageSeconds {
        dualsim: t.dualsim.as_secs_f64() / runs,
        induce: t.induce.as_secs_f64() / runs,
        embed: t.embed.as_secs_f64() / runs,
        predict: t.predict.as_secs_f64() / runs,
        exact: t.exact.as_secs_f64() / runs,
    }
}

fn measure<F>(name: &str, truths: &[Option<bool>], opts: &BenchOptions, mut run: F) -> Result<MethodRow, BenchError>
where
    F: FnMut(usize) -> Result<Outcome, BenchError>,
{
    let reps = opts.repetitions.max(1);
    let mut confusion = Confusion::default();
    let mut unscored = 0;
    let mut timeouts = 0;
    let mut seconds = 0.0;
    let mut stages = StageTimes::default();
    for (i, truth) in truths.iter().enumerate() {
        if opts.warmup {
            run(i)?;
        }
        let mut first = None;
        for _ in 0..reps {
            let t = Instant::now();
            let out = run(i)?;
            seconds += t.elapsed().as_secs_f64();
            stages.add(&out.stages);
            first.get_or_insert(out);
        }
        let out = first.expect("at least one repetition");
        timeouts += usize::from(out.timed_out);
        match truth {
            Some(t) => confusion.record(out.verdict, *t),
            None => unscored += 1,
        }
    }
    let runs = (truths.len() * reps).max(1) as f64;
    Ok(MethodRow {
        method: name.to_owned(),
        accuracy: confusion.accuracy(),
        confusion,
        unscored,
        mean_seconds: seconds / runs,
        timeouts,
        stages: stage_seconds(&stages, runs),
    })
}

fn pipeline_cfg(model: &Model, opts: &BenchOptions) -> PipelineConfig {
    PipelineConfig { dualsim_iters: opts.dualsim_iters, ..PipelineConfig::for_model(model) }
}

/// Anchored examples: does some homomorphism map the pivot to the anchor?
pub fn run_bench(examples: &[&Example], methods: &[Method], opts: &BenchOptions) -> Result<BenchReport, BenchError> {
    let truths: Vec<Option<bool>> = examples.iter().map(|e| Some(e.positive)).collect();
    let mut rows = Vec::new();
    for method in methods {
        let row = match *method {
            Method::Exact => measure(method.name(), &truths, opts, |i| {
                let e = examples[i];
                let o = HomSearch::new(&e.pattern, &e.graph).anchor(e.pivot, e.anchor).timeout(opts.timeout).decide()?;
                let stages = StageTimes { exact: o.elapsed, ..StageTimes::default() };
                Ok(Outcome { verdict: o.verdict == Verdict::True, timed_out: o.verdict == Verdict::Timeout, stages })
            })?,
            Method::DualSimOnly => measure(method.name(), &truths, opts, |i| {
                let e = examples[i];
                let t = Instant::now();
                let verdict = dualsim_accepts(&e.pattern, e.pivot, &e.graph, e.anchor, opts.dualsim_iters);
                let stages = StageTimes { dualsim: t.elapsed(), ..StageTimes::default() };
                Ok(Outcome { verdict, timed_out: false, stages })
            })?,
            Method::Model { name, model } => {
                let cfg = pipeline_cfg(model, opts);
                measure(name, &truths, opts, |i| {
                    let e = examples[i];
                    let (verdict, _, diag) = decide_anchored(&e.pattern, e.pivot, &e.graph, e.anchor, model, &cfg)?;
                    Ok(Outcome { verdict, timed_out: false, stages: diag.times })
                })?
            }
            Method::Accelerate { name, .. } => return Err(BenchError::Unsupported(name.to_owned())),
        };
        rows.push(row);
    }
    let mut meta = environment_meta();
    meta.insert("examples".into(), examples.len().to_string());
    meta.insert("timeout_secs".into(), opts.timeout.as_secs_f64().to_string());
    meta.insert("dualsim_iters".into(), opts.dualsim_iters.to_string());
    meta.insert("repetitions".into(), opts.repetitions.to_string());
    Ok(BenchReport { rows, meta })
}

/// Unanchored queries against one data graph.
pub fn run_workload(g: &Graph, queries: &[Query], methods: &[Method], opts: &BenchOptions) -> Result<BenchReport, BenchError> {
    let truths: Vec<Option<bool>> = queries.iter().map(|q| q.expected).collect();
    let mut rows = Vec::new();
    for method in methods {
        let row = match *method {
            Method::Exact => measure(method.name(), &truths, opts, |i| {
                let o = HomSearch::new(&queries[i].pattern, g).timeout(opts.timeout).decide()?;
                let stages = StageTimes { exact: o.elapsed, ..StageTimes::default() };
                Ok(Outcome { verdict: o.verdict == Verdict::True, timed_out: o.verdict == Verdict::Timeout, stages })
            })?,
            Method::DualSimOnly => measure(method.name(), &truths, opts, |i| {
                let t = Instant::now();
                let verdict = !dual_sim(&queries[i].pattern, g, DualSimOptions::sweeps(opts.dualsim_iters)).any_empty();
                let stages = StageTimes { dualsim: t.elapsed(), ..StageTimes::default() };
                Ok(Outcome { verdict, timed_out: false, stages })
            })?,
            Method::Model { name, model } => {
                let cfg = pipeline_cfg(model, opts);
                measure(name, &truths, opts, |i| {
                    let (verdict, diag) = decide(&queries[i].pattern, g, model, &cfg)?;
                    Ok(Outcome { verdict, timed_out: false, stages: diag.times })
                })?
            }
            Method::Accelerate { name, model } => {
                let cfg = match model {
                    Some(m) => pipeline_cfg(m, opts),
                    None => PipelineConfig { dualsim_iters: opts.dualsim_iters, ..PipelineConfig::default() },
                };
                measure(name, &truths, opts, |i| {
                    let (o, diag) = accelerate(&queries[i].pattern, g, model, &cfg, Some(opts.timeout))?;
                    Ok(Outcome { verdict: o.verdict == Verdict::True, timed_out: o.verdict == Verdict::Timeout, stages: diag.times })
                })?
            }
        };
        rows.push(row);
    }
    let mut meta = environment_meta();
    meta.insert("queries".into(), queries.len().to_string());
    meta.insert("graph_vertices".into(), g.vertex_count().to_string());
    meta.insert("graph_edges".into(), g.edge_count().to_string());
    meta.insert("timeout_secs".into(), opts.timeout.as_secs_f64().to_string());
    meta.insert("dualsim_iters".into(), opts.dualsim_iters.to_string());
    meta.insert("repetitions".into(), opts.repetitions.to_string());
    Ok(BenchReport { rows, meta })
}
