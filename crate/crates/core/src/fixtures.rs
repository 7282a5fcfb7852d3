//! Small hand-built graphs with known answers, and a self-check suite over them.
//!
//! Undirected drawings are encoded with both edge directions. Every vertex
//! and edge carries label 0 unless stated otherwise.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::dualsim::{dual_sim, DualSimOptions};
use crate::exact::{hom_decide, hom_enumerate, verify_hom, Verdict};
use crate::graph::{cycle_lengths, ego_net, CycleSet, Graph, Label, VertexId};
use crate::hgin::{embed, init_model, violation, ModelConfig, Side};

fn undirected(n: usize, pairs: &[(VertexId, VertexId)]) -> Graph {
    let edges = pairs.iter().flat_map(|&(a, b)| [(a, 0, b), (b, 0, a)]);
    Graph::from_parts(vec![0; n], edges).expect("valid fixture")
}

fn directed_cycle(n: usize) -> Graph {
    Graph::from_parts(vec![0; n], (0..n).map(|i| (i, 0, (i + 1) % n))).expect("valid fixture")
}

/// 4-cycle u1-u2-u3-u4 (ids 0..3).
pub fn g1() -> Graph {
    undirected(4, &[(0, 1), (1, 2), (2, 3), (3, 0)])
}

/// K₃,₃ on v1..v6 (ids 0..5) with parts {v1,v3,v5} and {v2,v4,v6}.
pub fn g2() -> Graph {
    let mut pairs = Vec::new();
    for a in [0, 2, 4] {
        for b in [1, 3, 5] {
            pairs.push((a, b));
        }
    }
    undirected(6, &pairs)
}

/// Triangular prism on w1..w6 (ids 0..5): triangles {w1,w5,w6} and
/// {w2,w3,w4}, rungs w1-w2, w5-w4, w6-w3. 3-regular like [`g2`].
pub fn g3() -> Graph {
    undirected(6, &[(0, 4), (4, 5), (5, 0), (1, 2), (2, 3), (3, 1), (0, 1), (4, 3), (5, 2)])
}

/// φ₁(uᵢ) = vᵢ from [`g1`] into [`g2`].
pub fn phi1() -> Vec<VertexId> {
    vec![0, 1, 2, 3]
}

/// φ₂ from [`g2`] into [`g1`]: vᵢ ↦ uᵢ for i ≤ 4, v5 ↦ u3, v6 ↦ u2.
pub fn phi2() -> Vec<VertexId> {
    vec![0, 1, 2, 3, 2, 1]
}

/// u1 → u2, u1 → u3.
pub fn q1() -> Graph {
    Graph::from_parts(vec![0; 3], [(0, 0, 1), (0, 0, 2)]).expect("valid fixture")
}

/// v1 → v2.
pub fn g4() -> Graph {
    Graph::from_parts(vec![0; 2], [(0, 0, 1)]).expect("valid fixture")
}

/// Directed 6-cycle.
pub fn q2() -> Graph {
    directed_cycle(6)
}

/// Directed 3-cycle.
pub fn g5() -> Graph {
    directed_cycle(3)
}

/// Six pairwise incomparable 2-d points standing in for the embeddings of
/// six single-edge patterns with distinct edge labels.
pub fn antichain_embeddings() -> Vec<[f64; 2]> {
    vec![[0.1, 0.9], [0.3, 0.8], [0.45, 0.7], [0.6, 0.5], [0.75, 0.3], [0.95, 0.1]]
}

/// Single edge a → b carrying edge label `label`.
pub fn labelled_edge(label: Label) -> Graph {
    Graph::from_parts(vec![0, 0], [(0, label, 1)]).expect("valid fixture")
}

/// Star with one out-edge per label, all leaving the center (vertex 0).
pub fn star(labels: &[Label]) -> Graph {
    Graph::from_parts(vec![0; labels.len() + 1], labels.iter().enumerate().map(|(i, &l)| (0, l, i + 1)))
        .expect("valid fixture")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixtureResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn result(name: &'static str, passed: bool, detail: String) -> FixtureResult {
    FixtureResult { name, passed, detail }
}

fn holds(q: &Graph, g: &Graph) -> bool {
    matches!(hom_decide(q, g, None, None), Ok(o) if o.verdict == Verdict::True)
}

fn mutual_homomorphism() -> FixtureResult {
    let (a, b) = (g1(), g2());
    let forward = holds(&a, &b) && verify_hom(&a, &b, &phi1());
    let backward = holds(&b, &a) && verify_hom(&b, &a, &phi2());
    let sizes = a.vertex_count() != b.vertex_count();
    result(
        "mutual-homomorphism",
        forward && backward && sizes,
        format!("G1->G2 {forward}, G2->G1 {backward}, |V| {} vs {}", a.vertex_count(), b.vertex_count()),
    )
}

fn triangle_blocks_homomorphism() -> FixtureResult {
    let (q, g) = (g3(), g2());
    let exact = hom_decide(&q, &g, None, None).map(|o| o.verdict);
    let cm = dual_sim(&q, &g, DualSimOptions::fixpoint());
    let full = cm.candidates.iter().all(|c| c.len() == g.vertex_count());
    result(
        "triangle-vs-dual-simulation",
        exact == Ok(Verdict::False) && full,
        format!("exact {:?}, dual simulation keeps {} of {} pairs", exact, cm.total(), q.vertex_count() * g.vertex_count()),
    )
}

fn set_aggregation_collapses_duplicates() -> FixtureResult {
    let (q, g) = (q1(), g4());
    let mut equal_set = 0;
    let mut differ_multi = 0;
    let trials = 10;
    for seed in 0..trials {
        for multiset in [false, true] {
            let mut c = ModelConfig::new(vec![0], vec![0]);
            c.layers = 3;
            c.dim = 8;
            c.seed = seed;
            c.ablations.multiset_aggregation = multiset;
            let model = init_model(c).expect("valid config");
            let cycles = CycleSet::default();
            let eq = ego_net(&q, 0, 3).expect("vertex");
            let eg = ego_net(&g, 0, 3).expect("vertex");
            let a = embed(&model, &eq, Side::Pattern, &cycles, None).expect("embed");
            let b = embed(&model, &eg, Side::Graph, &cycles, None).expect("embed");
            let same = a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits());
            match (multiset, same) {
                (false, true) => equal_set += 1,
                (true, false) => differ_multi += 1,
                _ => {}
            }
        }
    }
    result(
        "set-aggregation",
        equal_set == trials && differ_multi == trials,
        format!("set: {equal_set}/{trials} bitwise equal; multiset: {differ_multi}/{trials} differ"),
    )
}

fn winding_map() -> FixtureResult {
    let (q, g) = (q2(), g5());
    let witness = hom_decide(&q, &g, None, None).ok().and_then(|o| o.witness);
    let non_injective = witness.as_ref().is_some_and(|w| w.iter().collect::<BTreeSet<_>>().len() < w.len());
    let count = hom_enumerate(&q, &g, None, usize::MAX, None).map(|e| e.mappings.len()).unwrap_or(0);
    let qc: Vec<usize> = cycle_lengths(&q, 0, 5).map(|c| c.lengths().collect()).unwrap_or_default();
    let gc: Vec<usize> = cycle_lengths(&g, 0, 5).map(|c| c.lengths().collect()).unwrap_or_default();
    result(
        "winding-map",
        non_injective && count == 3 && qc.is_empty() && gc == [3],
        format!("witness {witness:?}, {count} homomorphisms, cycles within 5 hops: Q {qc:?}, G {gc:?}"),
    )
}

fn star_contradiction() -> FixtureResult {
    let points = antichain_embeddings();
    let incomparable = points.iter().enumerate().all(|(i, a)| {
        points.iter().enumerate().all(|(j, b)| i == j || !(a[0] <= b[0] && a[1] <= b[1]))
    });
    let argmax = |k: usize| (0..points.len()).max_by(|&i, &j| points[i][k].total_cmp(&points[j][k])).unwrap();
    let picked: BTreeSet<usize> = [argmax(0), argmax(1)].into_iter().collect();
    let labels: Vec<Label> = picked.iter().map(|&i| i as Label).collect();
    let qs = star(&labels);
    // The smallest point that dominates every picked edge's embedding.
    let lower = [
        picked.iter().map(|&i| points[i][0]).fold(f64::MIN, f64::max),
        picked.iter().map(|&i| points[i][1]).fold(f64::MIN, f64::max),
    ];
    let mut false_positives = Vec::new();
    let mut consistent = true;
    for (i, p) in points.iter().enumerate() {
        let truth = holds(&labelled_edge(i as Label), &qs);
        consistent &= truth == picked.contains(&i);
        let predicted = violation(p, &lower) == 0.0;
        if predicted && !truth {
            false_positives.push(i);
        }
    }
    result(
        "finite-dimension-star",
        incomparable && consistent && false_positives.len() == points.len() - picked.len(),
        format!("star on labels {labels:?}; order embedding forced to accept edges {false_positives:?} that do not map"),
    )
}

/// Runs every fixture check; failures are reported, never thrown.
pub fn fixtures() -> Vec<FixtureResult> {
    vec![
        mutual_homomorphism(),
        triangle_blocks_homomorphism(),
        set_aggregation_collapses_duplicates(),
        winding_map(),
        star_contradiction(),
    ]
}
