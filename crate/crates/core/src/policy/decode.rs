//! Turning the policy into packing sequences: sampling, greedy and beam search.

use std::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::network::{Encoded, PolicyParams};
use super::PolicyError;
use crate::geometry::{Instance, Length};
use crate::packer::pack_sequence;

/// One decoded sequence with its likelihood and packing reward.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    /// Index of the instance in the training or evaluation set.
    pub sample_id: usize,
    pub sequence: Vec<usize>,
    /// `Σ_t log p_t(sequence[t])`.
    pub log_prob: f64,
    /// Half surface area of the packing produced by this sequence.
    pub reward: Length,
}

fn reward(instance: &Instance, sequence: &[usize]) -> Result<Length, PolicyError> {
    Ok(pack_sequence(instance, sequence)?.half_surface_area())
}

/// Draws a sequence item by item from the policy.
pub fn sample_sequence<R: Rng + ?Sized>(
    params: &PolicyParams,
    instance: &Instance,
    sample_id: usize,
    rng: &mut R,
) -> Result<EpisodeRecord, PolicyError> {
    let enc = Encoded::new(params, instance);
    let n = enc.len();
    let mut selected = vec![false; n];
    let mut sequence = Vec::with_capacity(n);
    let mut log_prob = 0.0;
    for _ in 0..n {
        let lps = enc.step_log_probs(&selected)?;
        let u: f64 = rng.gen();
        let mut cumulative = 0.0;
        let mut pick = None;
        for j in (0..n).filter(|&j| !selected[j]) {
            pick = Some(j);
            cumulative += lps[j].exp();
            if u < cumulative {
                break;
            }
        }
        let j = pick.ok_or(PolicyError::NothingToSelect)?;
        log_prob += lps[j];
        selected[j] = true;
        sequence.push(j);
    }
    let reward = reward(instance, &sequence)?;
    Ok(EpisodeRecord {
        sample_id,
        sequence,
        log_prob,
        reward,
    })
}

fn greedy_rollout(enc: &Encoded<'_>) -> Result<(Vec<usize>, f64), PolicyError> {
    let n = enc.len();
    let mut selected = vec![false; n];
    let mut sequence = Vec::with_capacity(n);
    let mut log_prob = 0.0;
    for _ in 0..n {
        let lps = enc.step_log_probs(&selected)?;
        let mut best: Option<usize> = None;
        for j in (0..n).filter(|&j| !selected[j]) {
            if best.is_none_or(|b| lps[j] > lps[b]) {
                best = Some(j);
            }
        }
        let j = best.ok_or(PolicyError::NothingToSelect)?;
        log_prob += lps[j];
        selected[j] = true;
        sequence.push(j);
    }
    Ok((sequence, log_prob))
}

/// Picks the most probable item at every step, smallest index on ties.
pub fn greedy_decode(params: &PolicyParams, instance: &Instance) -> Result<EpisodeRecord, PolicyError> {
    let (sequence, log_prob) = greedy_rollout(&Encoded::new(params, instance))?;
    let reward = reward(instance, &sequence)?;
    Ok(EpisodeRecord {
        sample_id: 0,
        sequence,
        log_prob,
        reward,
    })
}

#[derive(Clone)]
struct Beam {
    sequence: Vec<usize>,
    selected: Vec<bool>,
    log_prob: f64,
}

/// Higher log-probability first, then lexicographically smaller sequence.
fn beam_order(a: &(Vec<usize>, f64), b: &(Vec<usize>, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0))
}

/// Width-`k` beam search over sequences.
///
/// Keeps the `k` partial sequences with the highest cumulative log-probability.
/// The greedy rollout is added to the completed beams, and the candidate with
/// the smallest reward is returned (ties: higher log-probability, then
/// lexicographically smaller sequence).
pub fn beam_search(
    params: &PolicyParams,
    instance: &Instance,
    k: usize,
) -> Result<EpisodeRecord, PolicyError> {
    if k == 0 {
        return Err(PolicyError::BadConfig("beam width must be at least 1".into()));
    }
    let enc = Encoded::new(params, instance);
    let n = enc.len();
    let mut beams = vec![Beam {
        sequence: Vec::with_capacity(n),
        selected: vec![false; n],
        log_prob: 0.0,
    }];
    for _ in 0..n {
        let mut expanded: Vec<(Beam, usize, f64)> = Vec::new();
        for beam in &beams {
            let lps = enc.step_log_probs(&beam.selected)?;
            for j in (0..n).filter(|&j| !beam.selected[j]) {
                expanded.push((beam.clone(), j, beam.log_prob + lps[j]));
            }
        }
        let mut keyed: Vec<((Vec<usize>, f64), Beam)> = expanded
            .into_iter()
            .map(|(mut beam, j, lp)| {
                beam.sequence.push(j);
                beam.selected[j] = true;
                beam.log_prob = lp;
                ((beam.sequence.clone(), lp), beam)
            })
            .collect();
        keyed.sort_by(|a, b| beam_order(&a.0, &b.0));
        keyed.truncate(k);
        beams = keyed.into_iter().map(|(_, b)| b).collect();
    }

    let mut candidates: Vec<(Vec<usize>, f64)> =
        beams.into_iter().map(|b| (b.sequence, b.log_prob)).collect();
    let greedy = greedy_rollout(&enc)?;
    if !candidates.iter().any(|c| c.0 == greedy.0) {
        candidates.push(greedy);
    }
    let mut best: Option<EpisodeRecord> = None;
    for (sequence, log_prob) in candidates {
        let r = reward(instance, &sequence)?;
        let better = match &best {
            None => true,
            Some(b) => r
                .cmp(&b.reward)
                .then_with(|| b.log_prob.total_cmp(&log_prob))
                .then_with(|| sequence.cmp(&b.sequence))
                .is_lt(),
        };
        if better {
            best = Some(EpisodeRecord {
                sample_id: 0,
                sequence,
                log_prob,
                reward: r,
            });
        }
    }
    best.ok_or(PolicyError::NothingToSelect)
}
