//! Vertex embeddings from the message-passing network: set versus multiset
//! aggregation, order-embedding predictions, and a checkpoint round trip.
//!
//! ```text
//! cargo run --example hgin_embeddings
//! ```

use hframe::fixtures::{g4, q1};
use hframe::graph::ego_net;
use hframe::hgin::{
    embed, gating_cycles, init_model, normalize, parse_checkpoint, predict, save_checkpoint, violation, ModelConfig,
    Side,
};
use hframe::LabelDict;

pub fn run() -> anyhow::Result<()> {
    let mut dict = LabelDict::new();
    // The fixtures use label 0 for every vertex and edge.
    let a = dict.intern("0");
    let e = a;
    let (q, g) = (q1(), g4());

    for multiset in [false, true] {
        let mut c = ModelConfig::new(vec![a], vec![e]);
        c.layers = 3;
        c.dim = 8;
        c.seed = 42;
        c.ablations.multiset_aggregation = multiset;
        let model = init_model(c)?;
        let eq = ego_net(&q, 0, 3)?;
        let eg = ego_net(&g, 0, 3)?;
        let cycles = gating_cycles(&model, &eq.graph, 0)?;
        let hu = normalize(&embed(&model, &eq, Side::Pattern, &cycles, None)?);
        let hv = normalize(&embed(&model, &eg, Side::Graph, &cycles, None)?);
        let fmt = |h: &[f64]| h.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(" ");
        println!("{} aggregation", if multiset { "multiset" } else { "set" });
        println!("  two-leaf star center: {}", fmt(&hu));
        println!("  single edge source:   {}", fmt(&hv));
        println!("  violation {:.3e}", violation(&hu, &hv));
    }

    let mut c = ModelConfig::new(vec![a], vec![e]);
    c.dim = 16;
    let model = init_model(c)?;
    let p = predict(&model, &q, 0, &g, 0)?;
    println!("untrained prediction: {} (score {:.4}, threshold {})", p.verdict, p.score, model.config.threshold);

    let text = save_checkpoint(&model, &dict)?;
    let back = parse_checkpoint(&text, &mut LabelDict::new())?;
    println!("checkpoint: {} lines, reload identical: {}", text.lines().count(), back.params == model.params);
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run()
}
