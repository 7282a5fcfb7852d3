//! Normalization, the order-embedding violation, and the max-margin loss.

use super::forward::{backward, forward, EgoInput, Tape};
use super::linalg::frobenius;
use super::Model;

/// Lower clamp on the identity weight gap inside the reciprocal penalty.
pub const GAP_EPSILON: f64 = 1e-3;

/// |e| / ‖e‖₂. The zero vector maps to itself.
pub fn normalize(e: &[f64]) -> Vec<f64> {
    let norm = e.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return vec![0.0; e.len()];
    }
    e.iter().map(|x| x.abs() / norm).collect()
}

fn normalize_backward(e: &[f64], g: &[f64]) -> Vec<f64> {
    let norm = e.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return vec![0.0; e.len()];
    }
    // y = a / ‖a‖ with a = |e|
    let ga: f64 = g.iter().zip(e).map(|(gi, ei)| gi * ei.abs()).sum();
    let n3 = norm * norm * norm;
    e.iter()
        .zip(g)
        .map(|(&ei, &gi)| {
            let da = gi / norm - ei.abs() * ga / n3;
            if ei > 0.0 {
                da
            } else if ei < 0.0 {
                -da
            } else {
                0.0
            }
        })
        .collect()
}

/// ‖max(0, e_u − e_v)‖².
///
/// Panics on a dimension mismatch; see [`try_violation`].
pub fn violation(e_u: &[f64], e_v: &[f64]) -> f64 {
    try_violation(e_u, e_v).expect("embedding dimensions differ")
}

pub fn try_violation(e_u: &[f64], e_v: &[f64]) -> Option<f64> {
    (e_u.len() == e_v.len()).then(|| {
        e_u.iter()
            .zip(e_v)
            .map(|(a, b)| {
                let p = (a - b).max(0.0);
                p * p
            })
            .sum()
    })
}

/// Both ego networks of a training or evaluation pair.
#[derive(Debug, Clone)]
pub struct PairInput {
    pub pattern: EgoInput,
    pub graph: EgoInput,
}

struct PairPass {
    tape_u: Tape,
    tape_v: Tape,
    e_u: Vec<f64>,
    e_v: Vec<f64>,
    score: f64,
}

fn finish(model: &Model, raw: &[f64]) -> Vec<f64> {
    if model.config.ablations.skip_normalization {
        raw.to_vec()
    } else {
        normalize(raw)
    }
}

fn pair_pass(model: &Model, pair: &PairInput) -> PairPass {
    let tape_u = forward(model, &pair.pattern);
    let tape_v = forward(model, &pair.graph);
    let e_u = finish(model, tape_u.output());
    let e_v = finish(model, tape_v.output());
    let score = violation(&e_u, &e_v);
    PairPass { tape_u, tape_v, e_u, e_v, score }
}

/// Violation score of a pair (0 means the pattern embedding is dominated).
pub fn pair_score(model: &Model, pair: &PairInput) -> f64 {
    pair_pass(model, pair).score
}

fn example_term(model: &Model, score: f64, positive: bool) -> (f64, f64) {
    let alpha = model.config.margin;
    let plain = model.config.ablations.plain_loss;
    if positive {
        (if plain { score } else { score - alpha }, 1.0)
    } else if alpha - score > 0.0 {
        (alpha - score, -1.0)
    } else {
        (0.0, 0.0)
    }
}

/// Σ_{k,r} 1 / max(ε, ‖W^{k,r}_1‖ − ‖W^{k,r}_0‖), zero under the plain-loss ablation.
pub fn gap_penalty(model: &Model) -> f64 {
    if model.config.ablations.plain_loss {
        return 0.0;
    }
    let mut total = 0.0;
    for k in 1..=model.config.layers {
        for r in 0..model.config.edge_labels.len() {
            total += 1.0 / model.identity_gap(k, r).max(GAP_EPSILON);
        }
    }
    total
}

pub(super) fn gap_penalty_grad(model: &Model, grad: &mut [f64]) {
    if model.config.ablations.plain_loss {
        return;
    }
    let layout = &model.layout;
    for k in 1..=model.config.layers {
        for r in 0..model.config.edge_labels.len() {
            let gap = model.identity_gap(k, r);
            if gap <= GAP_EPSILON {
                continue;
            }
            let outer = -1.0 / (gap * gap);
            for (bit, sign) in [(1, 1.0), (0, -1.0)] {
                let range = layout.msg_pair(k, r, bit);
                let norm = frobenius(&model.params[range.clone()]);
                if norm == 0.0 {
                    continue;
                }
                let coef = outer * sign / norm;
                for (g, &w) in grad[range.clone()].iter_mut().zip(&model.params[range]) {
                    *g += coef * w;
                }
            }
        }
    }
}

/// Loss over a non-empty batch of (pair, is_positive).
pub fn loss(model: &Model, batch: &[(PairInput, bool)]) -> f64 {
    let data: f64 = batch
        .iter()
        .map(|(pair, pos)| example_term(model, pair_score(model, pair), *pos).0)
        .sum();
    data + gap_penalty(model)
}

/// Loss and its gradient with respect to every model parameter.
pub fn loss_and_grad(model: &Model, batch: &[(PairInput, bool)]) -> (f64, Vec<f64>) {
    let mut grad = vec![0.0; model.params.len()];
    let mut total = 0.0;
    for (pair, positive) in batch {
        total += accumulate_example(model, pair, *positive, &mut grad);
    }
    total += gap_penalty(model);
    gap_penalty_grad(model, &mut grad);
    (total, grad)
}

/// Adds one example's data-term gradient into `grad`; returns its loss term.
pub fn accumulate_example(model: &Model, pair: &PairInput, positive: bool, grad: &mut [f64]) -> f64 {
    let pass = pair_pass(model, pair);
    let (value, d_score) = example_term(model, pass.score, positive);
    if d_score == 0.0 {
        return value;
    }
    let mut g_u = vec![0.0; pass.e_u.len()];
    let mut g_v = vec![0.0; pass.e_v.len()];
    for i in 0..g_u.len() {
        let p = (pass.e_u[i] - pass.e_v[i]).max(0.0);
        g_u[i] = 2.0 * p * d_score;
        g_v[i] = -2.0 * p * d_score;
    }
    if !model.config.ablations.skip_normalization {
        g_u = normalize_backward(pass.tape_u.output(), &g_u);
        g_v = normalize_backward(pass.tape_v.output(), &g_v);
    }
    backward(model, &pair.pattern, &pass.tape_u, &g_u, grad);
    backward(model, &pair.graph, &pass.tape_v, &g_v, grad);
    value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_examples() {
        let n = normalize(&[3.0, -4.0]);
        assert!((n[0] - 0.6).abs() < 1e-15 && (n[1] - 0.8).abs() < 1e-15);
        let unit = [0.6, 0.8];
        assert_eq!(normalize(&unit), unit.to_vec());
        assert_eq!(normalize(&[0.0, 0.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn violation_examples() {
        assert_eq!(violation(&[0.3, 0.7], &[0.3, 0.7]), 0.0);
        assert_eq!(violation(&[1.0, 0.0], &[0.0, 1.0]), 1.0);
        assert_eq!(violation(&[0.1, 0.2], &[0.5, 0.2]), 0.0);
        assert_eq!(try_violation(&[1.0], &[1.0, 2.0]), None);
    }

    #[test]
    fn normalize_backward_matches_finite_differences() {
        let e = [0.5, -1.25, 2.0, 0.75];
        let g = [0.3, -0.1, 0.7, 0.2];
        let analytic = normalize_backward(&e, &g);
        let f = |x: &[f64]| normalize(x).iter().zip(&g).map(|(a, b)| a * b).sum::<f64>();
        for i in 0..e.len() {
            let (mut p, mut m) = (e, e);
            p[i] += 1e-6;
            m[i] -= 1e-6;
            let numeric = (f(&p) - f(&m)) / 2e-6;
            assert!((numeric - analytic[i]).abs() < 1e-8, "{i}: {numeric} vs {}", analytic[i]);
        }
    }
}
