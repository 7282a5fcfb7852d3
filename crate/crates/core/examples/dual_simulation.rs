//! Dual simulation as a filter: sweeps versus fixpoint, anchoring, and the
//! prism/K3,3 pair where it keeps every pair yet no homomorphism exists.
//!
//! ```text
//! cargo run --example dual_simulation
//! ```

use hframe::dualsim::{dual_sim, filter_graph, DualSimOptions};
use hframe::exact::hom_decide;
use hframe::fixtures::{g2, g3};
use hframe::Graph;

pub fn run() -> anyhow::Result<()> {
    let (q, g) = (g3(), g2());
    let cm = dual_sim(&q, &g, DualSimOptions::fixpoint());
    println!("prism vs K3,3: {} of {} pairs survive", cm.total(), q.vertex_count() * g.vertex_count());
    println!("exact: {:?}", hom_decide(&q, &g, None, None)?.verdict);

    // Pattern a -> b -> c with labels 0,1,2 against a path that only
    // continues correctly from vertex 0.
    let q = Graph::from_parts(vec![0, 1, 2], [(0, 0, 1), (1, 0, 2)])?;
    let g = Graph::from_parts(vec![0, 1, 2, 0, 1, 1], [(0, 0, 1), (1, 0, 2), (3, 0, 4), (3, 0, 5)])?;
    for t in 0..3 {
        let cm = dual_sim(&q, &g, DualSimOptions::sweeps(t));
        println!("{t} sweeps: {:?}", cm.candidates);
    }
    let cm = dual_sim(&q, &g, DualSimOptions::fixpoint());
    println!("fixpoint after {} sweeps: {:?}", cm.iterations_run, cm.candidates);
    let (filtered, origin) = filter_graph(&g, &cm);
    println!("filtered graph keeps vertices {origin:?} and {} edges", filtered.edge_count());

    let pinned = dual_sim(&q, &g, DualSimOptions::fixpoint().with_anchor(0, 3));
    println!("anchored at 0 -> 3: {:?} (empty set: {})", pinned.candidates, pinned.any_empty());
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run()
}
