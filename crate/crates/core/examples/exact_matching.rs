//! Exact homomorphism search on hand-built graphs: decision, anchoring,
//! enumeration and a time budget.
//!
//! ```text
//! cargo run --example exact_matching
//! ```

use std::time::Duration;

use hframe::exact::{brute_force_count, HomSearch, Verdict};
use hframe::fixtures::{g1, g2, g3, g5, q2};

pub fn run() -> anyhow::Result<()> {
    // The 4-cycle and K3,3 map into each other although they differ in size.
    let forward = HomSearch::new(&g1(), &g2()).decide()?;
    let backward = HomSearch::new(&g2(), &g1()).decide()?;
    println!("4-cycle -> K3,3: {:?} witness {:?}", forward.verdict, forward.witness);
    println!("K3,3 -> 4-cycle: {:?} witness {:?}", backward.verdict, backward.witness);

    // The prism contains a triangle; K3,3 is bipartite.
    println!("prism -> K3,3: {:?}", HomSearch::new(&g3(), &g2()).decide()?.verdict);

    // A directed 6-cycle winds twice around a directed 3-cycle.
    let winding = HomSearch::new(&q2(), &g5()).enumerate(usize::MAX)?;
    println!("6-cycle -> 3-cycle: {} mappings", winding.mappings.len());
    for m in &winding.mappings {
        println!("  {m:?}");
    }
    assert_eq!(winding.mappings.len() as u64, brute_force_count(&q2(), &g5(), None)?);

    let pinned = HomSearch::new(&q2(), &g5()).anchor(0, 2).decide()?;
    println!("with vertex 0 pinned to 2: {:?}", pinned.witness);

    let bounded = HomSearch::new(&g2(), &g1()).timeout(Duration::from_secs(1)).decide()?;
    println!("K3,3 -> 4-cycle within 1s: {:?} after {} steps", bounded.verdict, bounded.steps);
    assert_eq!(bounded.verdict, Verdict::True);
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run()
}
