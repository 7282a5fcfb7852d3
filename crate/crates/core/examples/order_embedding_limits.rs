//! Where the learned verifier must err: the built-in counterexample suite,
//! plus the winding map that needs cycle information to be predicted.
//!
//! ```text
//! cargo run --example order_embedding_limits
//! ```

use hframe::fixtures::{fixtures, g5, q2};
use hframe::graph::cycle_lengths;

pub fn run() -> anyhow::Result<()> {
    let results = fixtures();
    for r in &results {
        println!("{} {:<28} {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    for bound in 3..=7 {
        let q: Vec<usize> = cycle_lengths(&q2(), 0, bound)?.lengths().collect();
        let g: Vec<usize> = cycle_lengths(&g5(), 0, bound)?.lengths().collect();
        println!("cycles within {bound} hops: 6-cycle {q:?}, 3-cycle {g:?}");
    }
    anyhow::ensure!(results.iter().all(|r| r.passed), "fixture suite failed");
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run()
}
