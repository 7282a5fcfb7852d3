use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hframe::bench::{run_bench, run_workload, BenchOptions, BenchReport, Method};
use hframe::datagen::{build_dataset, gen_graph, load_dataset, sample_workload, save_dataset, GraphParams, SampleOptions, Split};
use hframe::dualsim::{dual_sim, DualSimOptions, Iterations};
use hframe::exact::{HomSearch, Verdict};
use hframe::fixtures::fixtures;
use hframe::hgin::{accuracy, init_model, load_checkpoint, train, write_checkpoint, Model, ModelConfig, Optimizer, TrainConfig};
use hframe::io::{load_graph, write_graph};
use hframe::pipeline::{accelerate, decide, decide_anchored, eval_items, training_data, PipelineConfig};
use hframe::{Graph, LabelDict, VertexId};

#[derive(Parser)]
#[command(name = "hframe", version, about = "Subgraph homomorphism: exact search, dual simulation and a learned verifier")]
struct Cli {
    #[command(flatten)]
    shared: Shared,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Shared {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 5)]
    layers: usize,
    #[arg(long, global = true, default_value_t = 64)]
    dim: usize,
    #[arg(long, global = true, default_value_t = 1.5)]
    margin: f64,
    #[arg(long, global = true, default_value_t = 0.1)]
    threshold: f64,
    #[arg(long, global = true, default_value_t = 2)]
    dualsim_iters: usize,
    #[arg(long, global = true, default_value_t = 30.0)]
    timeout_secs: f64,
    /// Model/pipeline ablation; repeatable.
    #[arg(long, global = true, value_enum)]
    ablate: Vec<Ablation>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Ablation {
    /// Skip dual-simulation filtering.
    Ws,
    /// Multiset neighbor aggregation.
    Ms,
    /// Ignore edge direction.
    Wd,
    /// Skip normalization.
    Wn,
    /// Ignore cycle gating.
    Wc,
    /// Plain loss without margin and gap terms.
    Wg,
}

#[derive(Clone, Copy, ValueEnum)]
enum OptimizerArg {
    Sgd,
    Adam,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random connected labeled graph.
    GenGraph {
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        edges: usize,
        #[arg(long, default_value_t = 1)]
        vertex_labels: usize,
        #[arg(long, default_value_t = 1)]
        edge_labels: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample an anchored example dataset (1 positive : 3 negatives) from a graph.
    GenData {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 2000)]
        examples: usize,
        /// Maximum vertices in each sampled neighborhood.
        #[arg(long)]
        region_cap: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a model on a dataset's train split, selecting on its validation split.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 50)]
        epochs: usize,
        #[arg(long, default_value_t = 32)]
        batch_size: usize,
        #[arg(long, default_value_t = 1e-3)]
        learning_rate: f64,
        #[arg(long, value_enum, default_value = "sgd")]
        optimizer: OptimizerArg,
    },
    /// Accuracy of a trained model on one split of a dataset.
    Eval {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "test")]
        split: Split,
    },
    /// Decide whether the pattern maps into the graph.
    Decide {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        /// Require pattern vertex U to map to data vertex V (`U:V`).
        #[arg(long, value_parser = parse_anchor)]
        anchor: Option<(VertexId, VertexId)>,
        /// Use a trained model instead of exact search.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Exact search after filtering, ordered by the model if given.
        #[arg(long)]
        accelerate: bool,
    },
    /// List homomorphisms.
    Enumerate {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_parser = parse_anchor)]
        anchor: Option<(VertexId, VertexId)>,
        #[arg(long, default_value_t = 10)]
        limit: usize,
    },
    /// Print dual-simulation candidate sets.
    Dualsim {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_parser = parse_anchor)]
        anchor: Option<(VertexId, VertexId)>,
        /// Refine until nothing changes instead of `--dualsim-iters` sweeps.
        #[arg(long)]
        fixpoint: bool,
    },
    /// Accuracy and latency of exact search, dual simulation and models.
    Bench {
        /// Anchored dataset; its test split is benchmarked.
        #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
        data: Option<PathBuf>,
        /// Data graph for an unanchored query workload.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        queries: usize,
        #[arg(long, default_value_t = 50)]
        negatives: usize,
        /// `NAME=PATH` of a trained checkpoint; repeatable.
        #[arg(long, value_parser = parse_named)]
        model: Vec<(String, PathBuf)>,
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
        #[arg(long)]
        no_warmup: bool,
        /// Writes PREFIX.tsv and PREFIX.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in counterexample checks.
    Fixtures,
}

fn parse_anchor(s: &str) -> Result<(VertexId, VertexId), String> {
    let (u, v) = s.split_once(':').ok_or("expected U:V")?;
    Ok((u.parse().map_err(|_| format!("invalid vertex `{u}`"))?, v.parse().map_err(|_| format!("invalid vertex `{v}`"))?))
}

fn parse_named(s: &str) -> Result<(String, PathBuf), String> {
    let (name, path) = s.split_once('=').ok_or("expected NAME=PATH")?;
    Ok((name.to_owned(), PathBuf::from(path)))
}

impl Shared {
    fn timeout(&self) -> Duration {
        Duration::from_secs_f64(self.timeout_secs)
    }

    fn has(&self, a: Ablation) -> bool {
        self.ablate.contains(&a)
    }

    fn model_config(&self, vertex_labels: Vec<hframe::Label>, edge_labels: Vec<hframe::Label>) -> ModelConfig {
        let mut c = ModelConfig::new(vertex_labels, edge_labels);
        c.layers = self.layers;
        c.dim = self.dim;
        c.margin = self.margin;
        c.threshold = self.threshold;
        c.seed = self.seed;
        c.dualsim_filtered = !self.has(Ablation::Ws);
        c.ablations.multiset_aggregation = self.has(Ablation::Ms);
        c.ablations.ignore_direction = self.has(Ablation::Wd);
        c.ablations.skip_normalization = self.has(Ablation::Wn);
        c.ablations.ignore_cycles = self.has(Ablation::Wc);
        c.ablations.plain_loss = self.has(Ablation::Wg);
        c
    }

    fn pipeline(&self, model: &Model) -> PipelineConfig {
        PipelineConfig { dualsim_iters: self.dualsim_iters, ..PipelineConfig::for_model(model) }
    }
}

fn read_graph(path: &Path, dict: &mut LabelDict) -> Result<Graph> {
    load_graph(path, dict).with_context(|| format!("reading {}", path.display()))
}

fn read_model(path: &Path, dict: &mut LabelDict) -> Result<Model> {
    load_checkpoint(path, dict).with_context(|| format!("reading {}", path.display()))
}

fn show(v: Verdict) -> &'static str {
    match v {
        Verdict::True => "true",
        Verdict::False => "false",
        Verdict::Timeout => "timeout",
    }
}

fn write_report(report: &BenchReport, out: Option<&Path>) -> Result<()> {
    print!("{}", report.to_tsv());
    if let Some(prefix) = out {
        std::fs::write(prefix.with_extension("tsv"), report.to_tsv())?;
        std::fs::write(prefix.with_extension("json"), report.to_json())?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let s = &cli.shared;
    match cli.command {
        Command::GenGraph { vertices, edges, vertex_labels, edge_labels, out } => {
            let params = GraphParams { vertices, edges, vertex_labels, edge_labels, connected: true, seed: s.seed };
            let g = gen_graph(&params)?;
            write_graph(&out, &g, &params.label_dict())?;
            println!("{} vertices, {} edges -> {}", g.vertex_count(), g.edge_count(), out.display());
        }
        Command::GenData { graph, examples, region_cap, out } => {
            let mut dict = LabelDict::new();
            let g = read_graph(&graph, &mut dict)?;
            let mut opts = SampleOptions { verify_timeout: s.timeout(), ..SampleOptions::default() };
            if let Some(cap) = region_cap {
                opts.region_cap = cap;
            }
            let data = build_dataset(&g, examples, s.seed, &opts)?;
            save_dataset(&out, &data, &dict)?;
            let positives = data.examples.iter().filter(|e| e.positive).count();
            println!(
                "{} examples ({positives} positive), train/val/test {}/{}/{} -> {}",
                data.examples.len(),
                data.count(Split::Train),
                data.count(Split::Val),
                data.count(Split::Test),
                out.display()
            );
        }
        Command::Train { data, out, epochs, batch_size, learning_rate, optimizer } => {
            let mut dict = LabelDict::new();
            let data = load_dataset(&data, &mut dict)?;
            let (vl, el) = data.labels();
            let model = init_model(s.model_config(vl, el))?;
            let td = training_data(&data, &model, &s.pipeline(&model))?;
            let optimizer = match optimizer {
                OptimizerArg::Sgd => Optimizer::Sgd,
                OptimizerArg::Adam => Optimizer::adam(),
            };
            let tc = TrainConfig { epochs, batch_size, learning_rate, seed: s.seed, optimizer };
            let outcome = train(model, &td, &tc)?;
            for h in &outcome.history {
                println!("epoch {:>3}  loss {:>10.4}  val {:.4}", h.epoch, h.train_loss, h.val_accuracy);
            }
            write_checkpoint(&out, &outcome.model, &dict)?;
            println!("best epoch {} -> {}", outcome.best_epoch, out.display());
        }
        Command::Eval { data, model, split } => {
            let mut dict = LabelDict::new();
            let data = load_dataset(&data, &mut dict)?;
            let model = read_model(&model, &mut dict)?;
            let items = eval_items(data.split(split), &model, &s.pipeline(&model))?;
            println!("{split} accuracy {:.4} over {} examples", accuracy(&model, &items), items.len());
        }
        Command::Decide { pattern, graph, anchor, model, accelerate: fast } => {
            let mut dict = LabelDict::new();
            let q = read_graph(&pattern, &mut dict)?;
            let g = read_graph(&graph, &mut dict)?;
            let model = model.map(|p| read_model(&p, &mut dict)).transpose()?;
            if fast {
                if anchor.is_some() {
                    bail!("--accelerate does not take --anchor");
                }
                let cfg = model.as_ref().map_or(
                    PipelineConfig { dualsim_iters: s.dualsim_iters, ..PipelineConfig::default() },
                    |m| s.pipeline(m),
                );
                let (o, diag) = accelerate(&q, &g, model.as_ref(), &cfg, Some(s.timeout()))?;
                println!("{}", show(o.verdict));
                if let Some(w) = o.witness {
                    println!("witness {w:?}");
                }
                println!("{:.6}s, {} candidates scored", diag.times.total().as_secs_f64(), diag.scored);
            } else if let Some(model) = &model {
                let cfg = s.pipeline(model);
                match anchor {
                    Some((u, v)) => {
                        let (verdict, score, _) = decide_anchored(&q, u, &g, v, model, &cfg)?;
                        println!("{verdict}\nscore {score:.6}");
                    }
                    None => {
                        let (verdict, diag) = decide(&q, &g, model, &cfg)?;
                        println!("{verdict}");
                        if let Some(v) = diag.accepted {
                            println!("pivot {} -> {v}", diag.pivot.unwrap_or_default());
                        }
                    }
                }
            } else {
                let o = HomSearch::new(&q, &g).anchor_opt(anchor).timeout(s.timeout()).decide()?;
                println!("{}", show(o.verdict));
                if let Some(w) = o.witness {
                    println!("witness {w:?}");
                }
            }
        }
        Command::Enumerate { pattern, graph, anchor, limit } => {
            let mut dict = LabelDict::new();
            let q = read_graph(&pattern, &mut dict)?;
            let g = read_graph(&graph, &mut dict)?;
            let e = HomSearch::new(&q, &g).anchor_opt(anchor).timeout(s.timeout()).enumerate(limit)?;
            for m in &e.mappings {
                println!("{m:?}");
            }
            println!("{} mappings{}", e.mappings.len(), if e.timed_out { " (timed out)" } else { "" });
        }
        Command::Dualsim { pattern, graph, anchor, fixpoint } => {
            let mut dict = LabelDict::new();
            let q = read_graph(&pattern, &mut dict)?;
            let g = read_graph(&graph, &mut dict)?;
            let mut opts = DualSimOptions::sweeps(s.dualsim_iters);
            if fixpoint {
                opts.iterations = Iterations::Fixpoint;
            }
            opts.anchor = anchor;
            let cm = dual_sim(&q, &g, opts);
            for u in 0..q.vertex_count() {
                println!("{u}: {:?}", cm.get(u));
            }
        }
        Command::Bench { data, graph, queries, negatives, model, repetitions, no_warmup, out } => {
            let mut dict = LabelDict::new();
            let opts = BenchOptions { timeout: s.timeout(), dualsim_iters: s.dualsim_iters, repetitions, warmup: !no_warmup };
            let workload = match &graph {
                Some(path) => Some(read_graph(path, &mut dict)?),
                None => None,
            };
            let dataset = data.map(|d| load_dataset(&d, &mut dict)).transpose()?;
            let models: Vec<(String, Model)> =
                model.into_iter().map(|(n, p)| Ok((n, read_model(&p, &mut dict)?))).collect::<Result<_>>()?;
            let mut methods = vec![Method::Exact, Method::DualSimOnly];
            methods.extend(models.iter().map(|(name, model)| Method::Model { name, model }));
            let report = match (workload, dataset) {
                (Some(g), _) => {
                    let accel: Vec<String> = models.iter().map(|(n, _)| format!("accelerate-{n}")).collect();
                    methods.push(Method::Accelerate { name: "accelerate", model: None });
                    methods.extend(models.iter().zip(&accel).map(|((_, m), name)| Method::Accelerate { name, model: Some(m) }));
                    let sample = SampleOptions { verify_timeout: s.timeout(), ..SampleOptions::default() };
                    let qs = sample_workload(&g, queries, negatives.min(queries), s.seed, &sample)?;
                    run_workload(&g, &qs, &methods, &opts)?
                }
                (None, Some(data)) => {
                    let test: Vec<_> = data.split(Split::Test).collect();
                    run_bench(&test, &methods, &opts)?
                }
                (None, None) => bail!("one of --data or --graph is required"),
            };
            write_report(&report, out.as_deref())?;
        }
        Command::Fixtures => {
            let results = fixtures();
            for r in &results {
                println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
            }
            if results.iter().any(|r| !r.passed) {
                bail!("fixture checks failed");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
