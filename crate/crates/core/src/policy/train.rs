//! REINFORCE training with per-sample baselines.
//!
//! Each step draws a batch of training instances, samples one sequence per
//! instance from the current policy, forms the gradient
//! `(1/B) Σ (SA_i − b_i) ∇ log p(o_i | s_i)`, applies an Adam update and then
//! moves every baseline toward the observed area by `b ← b + α(SA − b)`.
//! Baselines start at the heuristic's area for each instance and persist for
//! the whole run.

use std::fmt::Write as _;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::decode::{sample_sequence, EpisodeRecord};
use super::network::{log_prob_gradient, PolicyParams};
use super::optim::{adam_step, AdamState, LrSchedule};
use super::PolicyError;
use crate::geometry::Instance;
use crate::packer::pack_heuristic;

/// Exponentially smoothed surface-area baseline per training sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineStore {
    alpha: f64,
    values: Vec<f64>,
}

impl BaselineStore {
    pub fn new(alpha: f64, values: Vec<f64>) -> Self {
        Self { alpha, values }
    }

    /// Baselines initialized from the heuristic packing of each instance.
    pub fn from_heuristic(alpha: f64, instances: &[Instance]) -> Result<Self, PolicyError> {
        let values = instances
            .par_iter()
            .map(|inst| Ok(pack_heuristic(inst)?.half_surface_area() as f64))
            .collect::<Result<Vec<_>, PolicyError>>()?;
        Ok(Self { alpha, values })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn get(&self, sample_id: usize) -> Result<f64, PolicyError> {
        self.values
            .get(sample_id)
            .copied()
            .ok_or(PolicyError::NoBaseline(sample_id))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `b ← b + α·(observed − b)`.
pub fn update_baseline(
    store: &mut BaselineStore,
    sample_id: usize,
    observed: f64,
) -> Result<(), PolicyError> {
    let alpha = store.alpha;
    let b = store
        .values
        .get_mut(sample_id)
        .ok_or(PolicyError::NoBaseline(sample_id))?;
    *b += alpha * (observed - *b);
    Ok(())
}

/// `(1/M) Σ_i (SA_i − b_i) ∇_θ log p_θ(o_i | s_i)` over a batch of episodes.
///
/// `instances[record.sample_id]` must be the instance each record was drawn for.
pub fn reinforce_gradient(
    params: &PolicyParams,
    instances: &[Instance],
    records: &[EpisodeRecord],
    baselines: &BaselineStore,
) -> Result<Vec<f64>, PolicyError> {
    if records.is_empty() {
        return Err(PolicyError::EmptyBatch);
    }
    let terms = records
        .par_iter()
        .map(|r| {
            let advantage = r.reward as f64 - baselines.get(r.sample_id)?;
            let instance = instances
                .get(r.sample_id)
                .ok_or(PolicyError::UnknownSample(r.sample_id))?;
            if advantage == 0.0 {
                return Ok(None);
            }
            let (_, grad) = log_prob_gradient(params, instance, &r.sequence)?;
            Ok(Some((advantage, grad)))
        })
        .collect::<Result<Vec<_>, PolicyError>>()?;
    let mut total = vec![0.0; params.len()];
    for (advantage, grad) in terms.into_iter().flatten() {
        for (t, g) in total.iter_mut().zip(grad) {
            *t += advantage * g;
        }
    }
    let m = records.len() as f64;
    total.iter_mut().for_each(|t| *t /= m);
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainerConfig {
    pub steps: usize,
    pub batch_size: usize,
    pub schedule: LrSchedule,
    pub baseline_alpha: f64,
    pub clip_norm: f64,
    pub beam_width: usize,
    pub embed_dim: usize,
    pub init_range: f64,
    pub seed: u64,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        Self {
            steps: 2000,
            batch_size: 32,
            schedule: LrSchedule::default(),
            baseline_alpha: 0.7,
            clip_norm: 1.0,
            beam_width: 3,
            embed_dim: 16,
            init_range: 0.08,
            seed: 0,
        }
    }
}

impl TrainerConfig {
    fn check(&self) -> Result<(), PolicyError> {
        if self.batch_size == 0 || self.embed_dim == 0 || self.beam_width == 0 {
            return Err(PolicyError::BadConfig(
                "batch_size, embed_dim and beam_width must be positive".into(),
            ));
        }
        if !(self.clip_norm > 0.0 && self.init_range >= 0.0) {
            return Err(PolicyError::BadConfig("clip_norm must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingLogRow {
    pub step: usize,
    pub mean_reward: f64,
    /// Mean baseline of the batch before this step's update.
    pub mean_baseline: f64,
    pub lr: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingLog {
    pub rows: Vec<TrainingLogRow>,
}

impl TrainingLog {
    pub const CSV_HEADER: &'static str = "step,mean_reward,mean_baseline,lr";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{}", r.step, r.mean_reward, r.mean_baseline, r.lr);
        }
        out
    }

    /// Mean of `mean_reward` over a range of rows.
    pub fn mean_reward(&self, rows: std::ops::Range<usize>) -> f64 {
        let slice = &self.rows[rows];
        slice.iter().map(|r| r.mean_reward).sum::<f64>() / slice.len() as f64
    }
}

/// Position of a ChaCha stream, enough to resume it exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngState {
    pub seed: [u8; 32],
    pub stream: u64,
    /// Word position as a decimal string; it is a 128-bit counter.
    pub word_pos: String,
}

impl RngState {
    pub fn capture(rng: &ChaCha8Rng) -> Self {
        Self {
            seed: rng.get_seed(),
            stream: rng.get_stream(),
            word_pos: rng.get_word_pos().to_string(),
        }
    }

    pub fn restore(&self) -> Result<ChaCha8Rng, PolicyError> {
        let pos: u128 = self
            .word_pos
            .parse()
            .map_err(|_| PolicyError::BadConfig(format!("bad rng word position `{}`", self.word_pos)))?;
        let mut rng = ChaCha8Rng::from_seed(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos(pos);
        Ok(rng)
    }
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub params: PolicyParams,
    pub log: TrainingLog,
    pub baselines: BaselineStore,
    pub optimizer: AdamState,
    pub rng: RngState,
}

/// Runs the training loop for `config.steps` updates.
pub fn train(config: &TrainerConfig, instances: &[Instance]) -> Result<TrainOutcome, PolicyError> {
    config.check()?;
    if instances.is_empty() {
        return Err(PolicyError::EmptyTrainingSet);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params = PolicyParams::uniform(config.embed_dim, config.init_range, &mut rng);
    let mut baselines = BaselineStore::from_heuristic(config.baseline_alpha, instances)?;
    let mut optimizer = AdamState::new(params.len());
    let mut log = TrainingLog::default();

    for step in 1..=config.steps {
        let batch: Vec<usize> = if config.batch_size <= instances.len() {
            index::sample(&mut rng, instances.len(), config.batch_size).into_vec()
        } else {
            (0..config.batch_size)
                .map(|_| rng.gen_range(0..instances.len()))
                .collect()
        };
        let seeds: Vec<u64> = batch.iter().map(|_| rng.gen()).collect();
        let records = batch
            .par_iter()
            .zip(seeds.par_iter())
            .map(|(&id, &seed)| {
                let mut episode_rng = ChaCha8Rng::seed_from_u64(seed);
                sample_sequence(&params, &instances[id], id, &mut episode_rng)
            })
            .collect::<Result<Vec<_>, _>>()?;

        let mean_baseline = batch
            .iter()
            .map(|&id| baselines.get(id))
            .sum::<Result<f64, _>>()?
            / batch.len() as f64;
        let mean_reward =
            records.iter().map(|r| r.reward as f64).sum::<f64>() / records.len() as f64;

        let gradient = reinforce_gradient(&params, instances, &records, &baselines)?;
        let info = adam_step(
            &mut optimizer,
            params.as_flat_mut(),
            &gradient,
            &config.schedule,
            Some(config.clip_norm),
        )?;
        for r in &records {
            update_baseline(&mut baselines, r.sample_id, r.reward as f64)?;
        }
        log.rows.push(TrainingLogRow {
            step,
            mean_reward,
            mean_baseline,
            lr: info.lr,
        });
    }
    Ok(TrainOutcome {
        params,
        log,
        baselines,
        optimizer,
        rng: RngState::capture(&rng),
    })
}
