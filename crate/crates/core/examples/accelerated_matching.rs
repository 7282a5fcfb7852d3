//! Unanchored queries against one large graph: exact search, the learned
//! pipeline, and exact search accelerated by filtering and model ranking.
//!
//! ```text
//! cargo run --release --example accelerated_matching -- [vertices] [queries]
//! ```

use std::time::Duration;

use hframe::bench::{run_workload, BenchOptions, Method};
use hframe::datagen::{build_dataset, gen_graph, sample_workload, GraphParams, SampleOptions};
use hframe::hgin::{init_model, train, ModelConfig, TrainConfig};
use hframe::pipeline::{accelerate, decide, training_data, PipelineConfig};

pub fn run_with(vertices: usize, queries: usize) -> anyhow::Result<()> {
    let small = GraphParams { vertices: 300, edges: 600, vertex_labels: 8, edge_labels: 2, connected: true, seed: 1 };
    let data = build_dataset(&gen_graph(&small)?, 120, 7, &SampleOptions::default())?;
    let model = init_model(ModelConfig::new(data.labels().0, data.labels().1))?;
    let td = training_data(&data, &model, &PipelineConfig::for_model(&model))?;
    let model = train(model, &td, &TrainConfig { epochs: 5, ..TrainConfig::default() })?.model;

    let g = gen_graph(&GraphParams { vertices, edges: 2 * vertices, seed: 2, ..small })?;
    let workload = sample_workload(&g, queries, queries / 2, 3, &SampleOptions::default())?;

    let q = &workload[0];
    let cfg = PipelineConfig::for_model(&model);
    let (verdict, diag) = decide(&q.pattern, &g, &model, &cfg)?;
    println!(
        "first query: expected {:?}, hframe {verdict} (pivot {:?}, {} candidates scored, short circuit {})",
        q.expected, diag.pivot, diag.scored, diag.short_circuit
    );
    let (outcome, _) = accelerate(&q.pattern, &g, Some(&model), &cfg, Some(Duration::from_secs(30)))?;
    println!("accelerate: {:?} after {} steps", outcome.verdict, outcome.steps);

    let methods = [
        Method::Exact,
        Method::DualSimOnly,
        Method::Model { name: "hframe", model: &model },
        Method::Accelerate { name: "accelerate", model: Some(&model) },
        Method::Accelerate { name: "filter+exact", model: None },
    ];
    let opts = BenchOptions { repetitions: 2, ..BenchOptions::default() };
    let report = run_workload(&g, &workload, &methods, &opts)?;
    print!("{}", report.to_tsv());
    Ok(())
}

pub fn run() -> anyhow::Result<()> {
    run_with(5_000, 10)
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let vertices = args.get(1).map_or(Ok(100_000), |s| s.parse())?;
    let queries = args.get(2).map_or(Ok(100), |s| s.parse())?;
    run_with(vertices, queries)
}
