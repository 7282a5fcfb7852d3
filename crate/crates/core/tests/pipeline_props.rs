mod common;

use std::time::Duration;

use hframe::datagen::{gen_graph, sample_workload, GraphParams, SampleOptions};
use hframe::exact::{brute_force_hom, hom_decide, Verdict};
use hframe::hgin::{init_model, predict, Model, ModelConfig};
use hframe::pipeline::{accelerate, decide, decide_anchored, pivot, PipelineConfig};
use rand::Rng;

fn model(dualsim_filtered: bool, seed: u64) -> Model {
    let mut c = ModelConfig::new(vec![0, 1, 2], vec![0, 1, 2]);
    c.layers = 2;
    c.dim = 8;
    c.seed = seed;
    c.dualsim_filtered = dualsim_filtered;
    init_model(c).unwrap()
}

#[test]
fn short_circuit_rejections_are_sound() {
    let mut rng = common::rng(501);
    let m = model(true, 1);
    let cfg = PipelineConfig::for_model(&m);
    let mut short = 0;
    for _ in 0..500 {
        let (q, g) = common::small_instance(&mut rng);
        let (verdict, diag) = decide(&q, &g, &m, &cfg).unwrap();
        if diag.short_circuit {
            short += 1;
            assert!(!verdict);
            assert!(!brute_force_hom(&q, &g, None).unwrap());
        }
        let (u, v) = (rng.gen_range(0..q.vertex_count()), rng.gen_range(0..g.vertex_count()));
        let (_, score, diag) = decide_anchored(&q, u, &g, v, &m, &cfg).unwrap();
        if diag.short_circuit {
            assert_eq!(score, f64::INFINITY);
            assert!(!brute_force_hom(&q, &g, Some((u, v))).unwrap());
        }
    }
    assert!(short > 0);
}

#[test]
fn accelerate_matches_exact_on_small_instances() {
    let mut rng = common::rng(502);
    let m = model(true, 2);
    let cfg = PipelineConfig::for_model(&m);
    for _ in 0..300 {
        let (q, g) = common::small_instance(&mut rng);
        let exact = hom_decide(&q, &g, None, None).unwrap().verdict;
        for with_model in [None, Some(&m)] {
            let (o, _) = accelerate(&q, &g, with_model, &cfg, None).unwrap();
            assert_eq!(o.verdict, exact);
            if let Some(w) = o.witness {
                assert!(hframe::exact::verify_hom(&q, &g, &w));
            }
        }
    }
}

#[test]
fn accelerate_matches_exact_on_a_workload() {
    let g = gen_graph(&GraphParams { vertices: 2000, edges: 4000, vertex_labels: 2, edge_labels: 2, connected: true, seed: 3 }).unwrap();
    let opts = SampleOptions { pattern_size: (3, 8), max_pattern: 8, ..SampleOptions::default() };
    let queries = sample_workload(&g, 30, 15, 4, &opts).unwrap();
    let mut c = ModelConfig::new(g.vertex_labels(), g.edge_labels());
    c.layers = 2;
    c.dim = 8;
    let m = init_model(c).unwrap();
    let cfg = PipelineConfig::for_model(&m);
    let timeout = Some(Duration::from_secs(10));
    for query in &queries {
        let exact = hom_decide(&query.pattern, &g, None, timeout).unwrap().verdict;
        let (fast, _) = accelerate(&query.pattern, &g, Some(&m), &cfg, timeout).unwrap();
        if exact != Verdict::Timeout && fast.verdict != Verdict::Timeout {
            assert_eq!(fast.verdict, exact);
        }
        if let Some(expected) = query.expected {
            assert_eq!(fast.verdict == Verdict::True, expected);
        }
    }
}

#[test]
fn decide_accepts_the_smallest_accepted_candidate_without_filtering() {
    let mut rng = common::rng(503);
    let m = model(false, 3);
    let mut cfg = PipelineConfig::for_model(&m);
    cfg.threshold = Some(0.3);
    let mut accepted = 0;
    for _ in 0..200 {
        let (q, g) = common::small_instance(&mut rng);
        let up = pivot(&q).unwrap();
        let first = (0..g.vertex_count()).find(|&v| predict(&m, &q, up, &g, v).unwrap().score <= 0.3);
        let (verdict, diag) = decide(&q, &g, &m, &cfg).unwrap();
        assert_eq!(verdict, first.is_some());
        assert_eq!(diag.accepted, first);
        accepted += usize::from(verdict);
        assert_eq!(decide(&q, &g, &m, &cfg).unwrap().0, verdict);
    }
    assert!(accepted > 0);
}

#[test]
fn filtering_ablation_only_changes_the_front_stages() {
    let mut rng = common::rng(504);
    let with = model(true, 4);
    let without = model(false, 4);
    assert_eq!(with.params, without.params);
    for _ in 0..100 {
        let (q, g) = common::small_instance(&mut rng);
        let (_, d) = decide(&q, &g, &without, &PipelineConfig::for_model(&without)).unwrap();
        assert!(d.candidate_counts.is_empty() && !d.short_circuit);
        assert_eq!(d.times.dualsim, Duration::ZERO);
        assert_eq!(d.times.induce, Duration::ZERO);
    }
}
