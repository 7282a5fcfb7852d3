#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hframe::Graph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random directed graph with `n` vertices, vertex labels in `0..labels`,
/// edge labels in `0..edge_labels`, and each ordered pair (self-loops
/// included) joined with probability `p`.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, labels: u32, edge_labels: u32, p: f64) -> Graph {
    let vl = (0..n).map(|_| rng.gen_range(0..labels)).collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if rng.gen_bool(p) {
                edges.push((a, rng.gen_range(0..edge_labels), b));
            }
        }
    }
    Graph::from_parts(vl, edges).unwrap()
}

/// A small pattern/data pair in the brute-force regime: |VQ| <= 4, |VG| <= 6,
/// at most four labels split between vertices and edges.
pub fn small_instance(rng: &mut ChaCha8Rng) -> (Graph, Graph) {
    let vl = rng.gen_range(1..=3);
    let el = rng.gen_range(1..=(4 - vl).max(1));
    let nq = rng.gen_range(1..=4);
    let ng = rng.gen_range(1..=6);
    let (pq, pg) = (rng.gen_range(0.15..0.5), rng.gen_range(0.2..0.7));
    let q = random_graph(rng, nq, vl, el, pq);
    let g = random_graph(rng, ng, vl, el, pg);
    (q, g)
}

/// A random directed tree rooted at 0 (so no directed cycles) and a pattern
/// obtained from it by duplicating non-root vertices within `radius` hops,
/// each copy keeping all incident edges.
pub fn duplicate_subtree_variant(rng: &mut ChaCha8Rng, radius: usize) -> (Graph, Graph) {
    let n = rng.gen_range(2..=6);
    let labels = (0..n).map(|_| rng.gen_range(0..2)).collect();
    let mut edges = Vec::new();
    let mut depth = vec![0usize; n];
    for v in 1..n {
        let parent = rng.gen_range(0..v);
        depth[v] = depth[parent] + 1;
        let label = rng.gen_range(0..2);
        edges.push(if rng.gen_bool(0.5) { (parent, label, v) } else { (v, label, parent) });
    }
    let g = Graph::from_parts(labels, edges).unwrap();
    let mut q = g.clone();
    let mut near: Vec<usize> = (1..n).filter(|&v| depth[v] <= radius).collect();
    for _ in 0..rng.gen_range(1..=3) {
        let x = near[rng.gen_range(0..near.len())];
        q = hframe::datagen::duplicate_vertex(&q, x);
        near.push(q.vertex_count() - 1);
    }
    (q, g)
}
