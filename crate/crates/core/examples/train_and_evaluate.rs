//! Train the verifier on a synthetic dataset and compare it on the held-out
//! split with dual simulation alone and with the multiset ablation.
//!
//! ```text
//! cargo run --release --example train_and_evaluate -- [examples] [epochs] [checkpoint]
//! ```

use std::time::{Duration, Instant};

use hframe::bench::{run_bench, BenchOptions, Method};
use hframe::datagen::{build_dataset, gen_graph, GraphParams, SampleOptions, Split};
use hframe::hgin::{init_model, train, write_checkpoint, Model, ModelConfig, TrainConfig};
use hframe::pipeline::{training_data, PipelineConfig};

fn fit(data: &hframe::datagen::Dataset, config: ModelConfig, epochs: usize) -> anyhow::Result<Model> {
    let model = init_model(config)?;
    let td = training_data(data, &model, &PipelineConfig::for_model(&model))?;
    let t = Instant::now();
    let out = train(model, &td, &TrainConfig { epochs, ..TrainConfig::default() })?;
    let last = out.history.last().map_or(0.0, |h| h.val_accuracy);
    println!(
        "  {} training pairs, best epoch {} of {epochs}, final val {last:.3}, {:.1?}",
        td.train.len(),
        out.best_epoch,
        t.elapsed()
    );
    Ok(out.model)
}

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).map_or(Ok(2000), |s| s.parse())?;
    let epochs: usize = args.get(2).map_or(Ok(40), |s| s.parse())?;

    let params = GraphParams { vertices: 1000, edges: 2000, vertex_labels: 1, edge_labels: 1, connected: true, seed: 1 };
    let g = gen_graph(&params)?;
    let t = Instant::now();
    let data = build_dataset(&g, n, 7, &SampleOptions::default())?;
    println!("{n} examples in {:.1?}", t.elapsed());

    let base = ModelConfig::new(g.vertex_labels(), g.edge_labels());
    println!("hframe");
    let hframe = fit(&data, base.clone(), epochs)?;
    println!("hframe, multiset aggregation");
    let mut ms = base;
    ms.ablations.multiset_aggregation = true;
    let multiset = fit(&data, ms, epochs)?;

    let test: Vec<_> = data.split(Split::Test).collect();
    let methods = [
        Method::DualSimOnly,
        Method::Model { name: "hframe", model: &hframe },
        Method::Model { name: "hframe-ms", model: &multiset },
    ];
    let report = run_bench(&test, &methods, &BenchOptions::accuracy_only(Duration::from_secs(30)))?;
    print!("{}", report.to_tsv());

    if let Some(path) = args.get(3) {
        write_checkpoint(path, &hframe, &params.label_dict())?;
        println!("model written to {path}");
    }
    Ok(())
}
