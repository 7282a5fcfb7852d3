use hframe::graph::{ego_net, Graph};
use hframe::hgin::{init_model, loss, loss_and_grad, ModelConfig, PairInput, PatternSide};

fn pattern() -> Graph {
    // a directed triangle with a tail, two edge labels
    Graph::from_parts(vec![0, 1, 0, 1], [(0, 10, 1), (1, 10, 2), (2, 11, 0), (2, 10, 3)]).unwrap()
}

fn data() -> Graph {
    Graph::from_parts(
        vec![0, 1, 0, 1, 0, 1],
        [(0, 10, 1), (1, 10, 2), (2, 11, 0), (2, 10, 3), (3, 11, 4), (4, 10, 5), (5, 10, 0), (1, 11, 4)],
    )
    .unwrap()
}

fn batch(cfg: &ModelConfig) -> (hframe::hgin::Model, Vec<(PairInput, bool)>) {
    let model = init_model(cfg.clone()).unwrap();
    let q = pattern();
    let g = data();
    let side = PatternSide::new(&model, &q, 0).unwrap();
    let pos = side.pair_with(&model, &g, 0).unwrap();
    let neg = side.pair_with(&model, &g, 4).unwrap();
    let side1 = PatternSide::new(&model, &q, 1).unwrap();
    let other = side1.pair_with(&model, &g, 3).unwrap();
    assert_eq!(ego_net(&g, 0, cfg.layers).unwrap().center, 0);
    (model, vec![(pos, true), (neg, false), (other, true)])
}

fn check(cfg: ModelConfig) {
    let (mut model, batch) = batch(&cfg);
    let (value, grad) = loss_and_grad(&model, &batch);
    assert!((value - loss(&model, &batch)).abs() < 1e-9);
    assert!(grad.iter().filter(|g| g.abs() > 1e-6).count() > model.params.len() / 10);
    let h = 1e-5;
    let mut worst = 0.0f64;
    for i in 0..model.params.len() {
        let orig = model.params[i];
        model.params[i] = orig + h;
        let up = loss(&model, &batch);
        model.params[i] = orig - h;
        let down = loss(&model, &batch);
        model.params[i] = orig;
        let numeric = (up - down) / (2.0 * h);
        let rel = (numeric - grad[i]).abs() / numeric.abs().max(grad[i].abs()).max(1e-6);
        worst = worst.max(rel);
    }
    assert!(worst <= 1e-4, "worst relative gradient error {worst}");
}

fn base() -> ModelConfig {
    let mut c = ModelConfig::new(vec![0, 1], vec![10, 11]);
    c.layers = 3;
    c.dim = 6;
    c.seed = 5;
    c
}

#[test]
fn gradient_matches_finite_differences() {
    check(base());
}

#[test]
fn gradient_matches_under_ablations() {
    let mut c = base();
    c.ablations.multiset_aggregation = true;
    c.ablations.ignore_direction = true;
    check(c);
    let mut c = base();
    c.ablations.skip_normalization = true;
    c.ablations.plain_loss = true;
    c.ablations.ignore_cycles = true;
    check(c);
}
