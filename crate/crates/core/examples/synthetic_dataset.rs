//! Random labeled graphs and anchored example datasets written to disk.
//!
//! ```text
//! cargo run --example synthetic_dataset -- [examples] [out-dir]
//! ```

use hframe::datagen::{build_dataset, gen_graph, load_dataset, save_dataset, GraphParams, SampleOptions, Split};
use hframe::exact::{hom_decide, Verdict};

pub fn run_with(n: usize, out: &std::path::Path) -> anyhow::Result<()> {
    let params = GraphParams { vertices: 500, edges: 1200, vertex_labels: 3, edge_labels: 2, connected: true, seed: 1 };
    let g = gen_graph(&params)?;
    println!("graph: {} vertices, {} edges, connected {}", g.vertex_count(), g.edge_count(), g.is_connected());

    let data = build_dataset(&g, n, 7, &SampleOptions::default())?;
    for split in [Split::Train, Split::Val, Split::Test] {
        let positives = data.split(split).filter(|e| e.positive).count();
        println!("{split}: {} examples, {positives} positive", data.count(split));
    }
    let e = &data.examples[0];
    println!(
        "first example: |V_Q| = {}, |E_Q| = {}, pivot {} -> anchor {}, positive {}\n  {}",
        e.pattern.vertex_count(),
        e.pattern.edge_count(),
        e.pivot,
        e.anchor,
        e.positive,
        e.provenance
    );
    let truth = hom_decide(&e.pattern, &e.graph, Some((e.pivot, e.anchor)), None)?.verdict;
    assert_eq!(truth == Verdict::True, e.positive);

    save_dataset(out, &data, &params.label_dict())?;
    let back = load_dataset(out, &mut params.label_dict())?;
    println!("saved to {} and reloaded: identical {}", out.display(), back == data);
    Ok(())
}

pub fn run() -> anyhow::Result<()> {
    let dir = tempfile::tempdir()?;
    run_with(40, dir.path())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n = args.get(1).map_or(Ok(200), |s| s.parse())?;
    match args.get(2) {
        Some(out) => run_with(n, std::path::Path::new(out)),
        None => run_with(n, tempfile::tempdir()?.path()),
    }
}
