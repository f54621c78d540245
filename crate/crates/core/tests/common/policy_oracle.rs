//! Independent policy computations: a dense-matrix forward pass and central differences.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use surfpack::policy::{sequence_log_prob, ParamLayout};
use surfpack::{Instance, PolicyParams};

fn mat(p: &[f64], r: std::ops::Range<usize>, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_row_slice(rows, cols, &p[r])
}

fn vector(p: &[f64], r: std::ops::Range<usize>) -> DVector<f64> {
    DVector::from_column_slice(&p[r])
}

/// Step probabilities recomputed with nalgebra; masked items get exactly zero.
pub fn forward(params: &PolicyParams, instance: &Instance, selected: &[bool]) -> Vec<f64> {
    let d = params.dim();
    let lay = ParamLayout { dim: d };
    let p = params.as_flat();
    let we = mat(p, lay.embed_w(), d, 3);
    let be = vector(p, lay.embed_b());
    let wc = mat(p, lay.context_w(), d, d);
    let wr = mat(p, lay.ref_w(), d, d);
    let wq = mat(p, lay.query_w(), d, d);
    let wg = mat(p, lay.global_w(), d, d);
    let ba = vector(p, lay.attn_b());
    let v = vector(p, lay.attn_v());

    let scale = instance.items().iter().map(|i| i.l().max(i.w()).max(i.h())).max().unwrap() as f64;
    let emb: Vec<DVector<f64>> = instance
        .items()
        .iter()
        .map(|i| {
            let f = DVector::from_vec(vec![i.l() as f64 / scale, i.w() as f64 / scale, i.h() as f64 / scale]);
            (&we * f + &be).map(f64::tanh)
        })
        .collect();
    let n = emb.len();
    let mean = emb.iter().fold(DVector::zeros(d), |a, e| a + e) / n as f64;
    let picked: Vec<&DVector<f64>> = emb.iter().zip(selected).filter(|(_, &s)| s).map(|(e, _)| e).collect();
    let smean = if picked.is_empty() {
        DVector::zeros(d)
    } else {
        picked.iter().fold(DVector::zeros(d), |a, e| a + *e) / picked.len() as f64
    };
    let ctx = (&wc * smean).map(f64::tanh);
    let scores: Vec<Option<f64>> = (0..n)
        .map(|j| {
            (!selected[j]).then(|| v.dot(&(&wr * &emb[j] + &wq * &ctx + &wg * &mean + &ba).map(f64::tanh)))
        })
        .collect();
    let max = scores.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = scores.iter().flatten().map(|s| (s - max).exp()).sum();
    scores
        .iter()
        .map(|s| s.map_or(0.0, |s| (s - max).exp() / z))
        .collect()
}

/// `log p(sequence)` as a product of oracle step probabilities.
pub fn sequence_log_prob_oracle(params: &PolicyParams, instance: &Instance, seq: &[usize]) -> f64 {
    let mut selected = vec![false; instance.len()];
    let mut total = 0.0;
    for &i in seq {
        total += forward(params, instance, &selected)[i].ln();
        selected[i] = true;
    }
    total
}

/// Central differences of `log p(seq)` over every parameter.
pub fn finite_difference_gradient(params: &PolicyParams, instance: &Instance, seq: &[usize], eps: f64) -> Vec<f64> {
    let base = params.as_flat().to_vec();
    (0..base.len())
        .map(|k| {
            let mut plus = base.clone();
            plus[k] += eps;
            let mut minus = base.clone();
            minus[k] -= eps;
            let fp = sequence_log_prob(&PolicyParams::from_flat(params.dim(), plus).unwrap(), instance, seq).unwrap();
            let fm = sequence_log_prob(&PolicyParams::from_flat(params.dim(), minus).unwrap(), instance, seq).unwrap();
            (fp - fm) / (2.0 * eps)
        })
        .collect()
}

/// Largest `|a − b| / max(|a|, |b|, floor)` over paired components.
pub fn max_relative_error(a: &[f64], b: &[f64], floor: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(floor))
        .fold(0.0, f64::max)
}

/// Sum of `p(σ)` over every permutation of `0..n`.
pub fn permutation_likelihood_sum(params: &PolicyParams, instance: &Instance) -> f64 {
    (0..instance.len())
        .permutations(instance.len())
        .map(|s| sequence_log_prob(params, instance, &s).unwrap().exp())
        .sum()
}
