//! Pointer policy over items and its exact gradient.
//!
//! Forward pass for an instance with normalized item features `f_i`
//! (dimensions divided by the largest side in the instance):
//!
//! ```text
//! e_i   = tanh(W_e f_i + b_e)                 item embedding
//! ē     = mean_i e_i                          order-invariant encoding
//! s̄_t   = mean of e_j over selected j         (zero before the first pick)
//! c_t   = tanh(W_c s̄_t)                       decoding context
//! u_tj  = v · tanh(W_r e_j + W_q c_t + W_g ē + b_a)
//! p_t   = softmax of u_tj over unselected j
//! ```
//!
//! All matrices are stored row-major in one flat vector, see [`ParamLayout`].

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::PolicyError;
use crate::geometry::Instance;

/// Offsets of each parameter block inside the flat vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParamLayout {
    pub dim: usize,
}

impl ParamLayout {
    pub const FEATURES: usize = 3;

    pub fn embed_w(&self) -> std::ops::Range<usize> {
        0..self.dim * Self::FEATURES
    }
    pub fn embed_b(&self) -> std::ops::Range<usize> {
        let s = self.embed_w().end;
        s..s + self.dim
    }
    pub fn context_w(&self) -> std::ops::Range<usize> {
        let s = self.embed_b().end;
        s..s + self.dim * self.dim
    }
    pub fn ref_w(&self) -> std::ops::Range<usize> {
        let s = self.context_w().end;
        s..s + self.dim * self.dim
    }
    pub fn query_w(&self) -> std::ops::Range<usize> {
        let s = self.ref_w().end;
        s..s + self.dim * self.dim
    }
    pub fn global_w(&self) -> std::ops::Range<usize> {
        let s = self.query_w().end;
        s..s + self.dim * self.dim
    }
    pub fn attn_b(&self) -> std::ops::Range<usize> {
        let s = self.global_w().end;
        s..s + self.dim
    }
    pub fn attn_v(&self) -> std::ops::Range<usize> {
        let s = self.attn_b().end;
        s..s + self.dim
    }

    /// Total parameter count `4d² + 6d`.
    pub fn len(&self) -> usize {
        self.attn_v().end
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Policy weights: a flat vector plus the embedding width that gives it structure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    dim: usize,
    values: Vec<f64>,
}

impl PolicyParams {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            values: vec![0.0; ParamLayout { dim }.len()],
        }
    }

    /// Entries drawn i.i.d. uniform in `[-range, range]`.
    pub fn uniform<R: Rng + ?Sized>(dim: usize, range: f64, rng: &mut R) -> Self {
        let len = ParamLayout { dim }.len();
        let values = (0..len).map(|_| rng.gen_range(-range..=range)).collect();
        Self { dim, values }
    }

    pub fn from_flat(dim: usize, values: Vec<f64>) -> Result<Self, PolicyError> {
        let expected = ParamLayout { dim }.len();
        if values.len() != expected {
            return Err(PolicyError::ShapeMismatch {
                expected,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(PolicyError::NumericalFault);
        }
        Ok(Self { dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn layout(&self) -> ParamLayout {
        ParamLayout { dim: self.dim }
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.values
    }

    pub fn as_flat_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn block(&self, r: std::ops::Range<usize>) -> &[f64] {
        &self.values[r]
    }
}

/// `out = M x` for a row-major `rows × x.len()` matrix.
fn matvec(m: &[f64], x: &[f64], out: &mut [f64]) {
    let cols = x.len();
    for (r, o) in out.iter_mut().enumerate() {
        *o = m[r * cols..(r + 1) * cols]
            .iter()
            .zip(x)
            .map(|(a, b)| a * b)
            .sum();
    }
}

/// `out += Mᵀ y` for a row-major `y.len() × out.len()` matrix.
fn matvec_t_add(m: &[f64], y: &[f64], out: &mut [f64]) {
    let cols = out.len();
    for (r, &yr) in y.iter().enumerate() {
        for (o, a) in out.iter_mut().zip(&m[r * cols..(r + 1) * cols]) {
            *o += a * yr;
        }
    }
}

/// `g += y xᵀ` into a row-major gradient block.
fn outer_add(g: &mut [f64], y: &[f64], x: &[f64]) {
    let cols = x.len();
    for (r, &yr) in y.iter().enumerate() {
        for (gi, &xc) in g[r * cols..(r + 1) * cols].iter_mut().zip(x) {
            *gi += yr * xc;
        }
    }
}

/// Normalized item features: sides divided by the largest side in the instance.
pub fn item_features(instance: &Instance) -> Vec<[f64; 3]> {
    let scale = instance.max_side() as f64;
    instance
        .items()
        .iter()
        .map(|d| {
            let [l, w, h] = d.as_array();
            [l as f64 / scale, w as f64 / scale, h as f64 / scale]
        })
        .collect()
}

/// Per-instance quantities that do not change while decoding.
#[derive(Clone, Debug)]
pub(crate) struct Encoded<'p> {
    params: &'p PolicyParams,
    features: Vec<[f64; 3]>,
    embeddings: Vec<Vec<f64>>,
    mean_embedding: Vec<f64>,
    refs: Vec<Vec<f64>>,
    /// `W_g ē + b_a`
    shared: Vec<f64>,
}

/// Intermediate values of one decoding step, kept for backpropagation.
struct StepTrace {
    selected_mean: Vec<f64>,
    selected_count: usize,
    context: Vec<f64>,
    /// `tanh(z_j)` per unmasked item, paired with the item index.
    activations: Vec<(usize, Vec<f64>)>,
    log_probs: Vec<f64>,
}

impl<'p> Encoded<'p> {
    pub(crate) fn new(params: &'p PolicyParams, instance: &Instance) -> Self {
        let d = params.dim;
        let lay = params.layout();
        let features = item_features(instance);
        let embeddings: Vec<Vec<f64>> = features
            .iter()
            .map(|f| {
                let mut h = vec![0.0; d];
                matvec(params.block(lay.embed_w()), f, &mut h);
                h.iter()
                    .zip(params.block(lay.embed_b()))
                    .map(|(a, b)| (a + b).tanh())
                    .collect()
            })
            .collect();
        let n = embeddings.len() as f64;
        let mut mean_embedding = vec![0.0; d];
        for e in &embeddings {
            for (m, x) in mean_embedding.iter_mut().zip(e) {
                *m += x;
            }
        }
        mean_embedding.iter_mut().for_each(|m| *m /= n);
        let refs = embeddings
            .iter()
            .map(|e| {
                let mut r = vec![0.0; d];
                matvec(params.block(lay.ref_w()), e, &mut r);
                r
            })
            .collect();
        let mut shared = vec![0.0; d];
        matvec(params.block(lay.global_w()), &mean_embedding, &mut shared);
        for (s, b) in shared.iter_mut().zip(params.block(lay.attn_b())) {
            *s += b;
        }
        Self {
            params,
            features,
            embeddings,
            mean_embedding,
            refs,
            shared,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.embeddings.len()
    }

    fn trace_step(&self, selected: &[bool]) -> Result<StepTrace, PolicyError> {
        let d = self.params.dim;
        let lay = self.params.layout();
        let count = selected.iter().filter(|&&s| s).count();
        if count == self.len() {
            return Err(PolicyError::NothingToSelect);
        }
        let mut selected_mean = vec![0.0; d];
        if count > 0 {
            for (e, _) in self.embeddings.iter().zip(selected).filter(|(_, &s)| s) {
                for (m, x) in selected_mean.iter_mut().zip(e) {
                    *m += x;
                }
            }
            selected_mean.iter_mut().for_each(|m| *m /= count as f64);
        }
        let mut context = vec![0.0; d];
        matvec(self.params.block(lay.context_w()), &selected_mean, &mut context);
        context.iter_mut().for_each(|c| *c = c.tanh());
        let mut query = vec![0.0; d];
        matvec(self.params.block(lay.query_w()), &context, &mut query);

        let v = self.params.block(lay.attn_v());
        let mut activations = Vec::with_capacity(self.len() - count);
        let mut scores = vec![f64::NEG_INFINITY; self.len()];
        for j in (0..self.len()).filter(|&j| !selected[j]) {
            let a: Vec<f64> = (0..d)
                .map(|k| (self.refs[j][k] + query[k] + self.shared[k]).tanh())
                .collect();
            scores[j] = a.iter().zip(v).map(|(x, y)| x * y).sum();
            activations.push((j, a));
        }
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_norm = max
            + scores
                .iter()
                .filter(|s| s.is_finite())
                .map(|s| (s - max).exp())
                .sum::<f64>()
                .ln();
        let log_probs = scores.iter().map(|s| s - log_norm).collect();
        Ok(StepTrace {
            selected_mean,
            selected_count: count,
            context,
            activations,
            log_probs,
        })
    }

    /// Log-probabilities of each item at this step; selected items get `-inf`.
    pub(crate) fn step_log_probs(&self, selected: &[bool]) -> Result<Vec<f64>, PolicyError> {
        Ok(self.trace_step(selected)?.log_probs)
    }

    /// `log p(sequence)` together with its gradient with respect to every parameter.
    pub(crate) fn log_prob_and_gradient(
        &self,
        sequence: &[usize],
    ) -> Result<(f64, Vec<f64>), PolicyError> {
        let d = self.params.dim;
        let n = self.len();
        let lay = self.params.layout();
        let mut grad = vec![0.0; lay.len()];
        let mut d_embed = vec![vec![0.0; d]; n];
        let mut d_mean = vec![0.0; d];
        let mut selected = vec![false; n];
        let mut log_prob = 0.0;
        let v = self.params.block(lay.attn_v()).to_vec();

        for &chosen in sequence {
            let step = self.trace_step(&selected)?;
            log_prob += step.log_probs[chosen];

            let mut dz_sum = vec![0.0; d];
            for (j, a) in &step.activations {
                // d log p / d u_j = [j chosen] − p_j
                let g = f64::from(*j == chosen) - step.log_probs[*j].exp();
                if g == 0.0 {
                    continue;
                }
                for k in 0..d {
                    grad[lay.attn_v().start + k] += g * a[k];
                }
                let dz: Vec<f64> = (0..d).map(|k| g * v[k] * (1.0 - a[k] * a[k])).collect();
                outer_add(&mut grad[lay.ref_w()], &dz, &self.embeddings[*j]);
                matvec_t_add(self.params.block(lay.ref_w()), &dz, &mut d_embed[*j]);
                for (s, x) in dz_sum.iter_mut().zip(&dz) {
                    *s += x;
                }
            }

            for (gb, x) in grad[lay.attn_b()].iter_mut().zip(&dz_sum) {
                *gb += x;
            }
            outer_add(&mut grad[lay.global_w()], &dz_sum, &self.mean_embedding);
            matvec_t_add(self.params.block(lay.global_w()), &dz_sum, &mut d_mean);

            outer_add(&mut grad[lay.query_w()], &dz_sum, &step.context);
            let mut d_context = vec![0.0; d];
            matvec_t_add(self.params.block(lay.query_w()), &dz_sum, &mut d_context);
            if step.selected_count > 0 {
                let dy: Vec<f64> = d_context
                    .iter()
                    .zip(&step.context)
                    .map(|(g, c)| g * (1.0 - c * c))
                    .collect();
                outer_add(&mut grad[lay.context_w()], &dy, &step.selected_mean);
                let mut d_sel = vec![0.0; d];
                matvec_t_add(self.params.block(lay.context_w()), &dy, &mut d_sel);
                let share = 1.0 / step.selected_count as f64;
                for i in (0..n).filter(|&i| selected[i]) {
                    for (de, ds) in d_embed[i].iter_mut().zip(&d_sel) {
                        *de += ds * share;
                    }
                }
            }
            selected[chosen] = true;
        }

        let share = 1.0 / n as f64;
        for ((emb, de), feat) in self.embeddings.iter().zip(&d_embed).zip(&self.features) {
            let dh: Vec<f64> = (0..d)
                .map(|k| (de[k] + d_mean[k] * share) * (1.0 - emb[k] * emb[k]))
                .collect();
            outer_add(&mut grad[lay.embed_w()], &dh, feat);
            for (gb, x) in grad[lay.embed_b()].iter_mut().zip(&dh) {
                *gb += x;
            }
        }
        Ok((log_prob, grad))
    }
}

/// Probability of picking each item next, given which items are already selected.
///
/// Selected items get probability exactly zero.
pub fn policy_forward(
    params: &PolicyParams,
    instance: &Instance,
    selected: &[bool],
) -> Result<Vec<f64>, PolicyError> {
    if selected.len() != instance.len() {
        return Err(PolicyError::ShapeMismatch {
            expected: instance.len(),
            found: selected.len(),
        });
    }
    let log_probs = Encoded::new(params, instance).step_log_probs(selected)?;
    Ok(log_probs
        .into_iter()
        .zip(selected)
        .map(|(lp, &s)| if s { 0.0 } else { lp.exp() })
        .collect())
}

fn check_sequence(n: usize, sequence: &[usize]) -> Result<(), PolicyError> {
    let mut seen = vec![false; n];
    if sequence.len() != n
        || sequence
            .iter()
            .any(|&i| i >= n || std::mem::replace(&mut seen[i], true))
    {
        return Err(PolicyError::BadSequence);
    }
    Ok(())
}

/// `log p(sequence | instance)`.
pub fn sequence_log_prob(
    params: &PolicyParams,
    instance: &Instance,
    sequence: &[usize],
) -> Result<f64, PolicyError> {
    check_sequence(instance.len(), sequence)?;
    let enc = Encoded::new(params, instance);
    let mut selected = vec![false; instance.len()];
    let mut total = 0.0;
    for &i in sequence {
        total += enc.step_log_probs(&selected)?[i];
        selected[i] = true;
    }
    Ok(total)
}

/// `∇_θ log p(sequence | instance)` by backpropagation, with the log-probability itself.
pub fn log_prob_gradient(
    params: &PolicyParams,
    instance: &Instance,
    sequence: &[usize],
) -> Result<(f64, Vec<f64>), PolicyError> {
    check_sequence(instance.len(), sequence)?;
    Encoded::new(params, instance).log_prob_and_gradient(sequence)
}
