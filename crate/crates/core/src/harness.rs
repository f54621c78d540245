//! Synthetic instance generation and benchmark orchestration.

use std::fmt::{self, Write as _};
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Instance, ItemDims, Length};
use crate::packer::{exhaustive_optimal_sequence, pack_heuristic, pack_sequence, PackError, DEFAULT_ORACLE_LIMIT};
use crate::policy::{beam_search, sample_sequence, PolicyError, PolicyParams};

/// Environment variable bounding the benchmark worker pool.
pub const THREADS_ENV: &str = "SURFPACK_THREADS";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("dimension range {0}..={1} is empty or not positive")]
    BadRange(Length, Length),
    #[error("count and item number must be at least 1")]
    BadCount,
    #[error("no methods requested")]
    NoMethods,
    #[error("method `{0}` needs a policy checkpoint")]
    MissingPolicy(Method),
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Pack(#[from] PackError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
}

/// Generates `count` instances of `n` items with sides uniform in `range`.
///
/// The output is a pure function of the arguments.
pub fn generate_instances(
    count: usize,
    n: usize,
    range: RangeInclusive<Length>,
    seed: u64,
) -> Result<Vec<Instance>, HarnessError> {
    let (lo, hi) = (*range.start(), *range.end());
    if lo < 1 || lo > hi {
        return Err(HarnessError::BadRange(lo, hi));
    }
    if count == 0 || n == 0 {
        return Err(HarnessError::BadCount);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let items = (0..n)
                .map(|_| {
                    ItemDims::new(
                        rng.gen_range(lo..=hi),
                        rng.gen_range(lo..=hi),
                        rng.gen_range(lo..=hi),
                    )
                    .expect("range is positive")
                })
                .collect();
            Ok(Instance::new(format!("syn-s{seed}-n{n}-{k:05}"), items).expect("n >= 1"))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Random,
    Heuristic,
    PolicySampling,
    PolicyBeam,
    Oracle,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Random,
        Method::Heuristic,
        Method::PolicySampling,
        Method::PolicyBeam,
        Method::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Random => "random",
            Method::Heuristic => "heuristic",
            Method::PolicySampling => "policy-sampling",
            Method::PolicyBeam => "policy-beam",
            Method::Oracle => "oracle",
        }
    }

    fn needs_policy(self) -> bool {
        matches!(self, Method::PolicySampling | Method::PolicyBeam)
    }

    fn stream_salt(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| HarnessError::UnknownMethod(s.to_string()))
    }
}

#[derive(Clone, Debug)]
pub struct BenchmarkConfig {
    pub seed: u64,
    /// Random permutations averaged per instance by the `random` method.
    pub random_draws: usize,
    /// Samples per instance for `policy-sampling`; the best one is kept.
    pub policy_samples: usize,
    pub beam_width: usize,
    pub oracle_limit: usize,
    pub policy: Option<PolicyParams>,
    /// Worker threads; `None` reads [`THREADS_ENV`], falling back to rayon's default.
    pub threads: Option<usize>,
    /// Measure wall time per evaluation. When off, `runtime_ms` is written as 0
    /// and reports are byte-reproducible.
    pub record_timing: bool,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            random_draws: 1,
            policy_samples: 1,
            beam_width: 3,
            oracle_limit: DEFAULT_ORACLE_LIMIT,
            policy: None,
            threads: None,
            record_timing: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub instance_id: String,
    pub method: Method,
    pub half_area: f64,
    pub runtime_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    /// Average half surface area over evaluated instances.
    pub asa: f64,
    pub instances: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub seed: u64,
    pub rows: Vec<BenchmarkRow>,
    pub summary: Vec<MethodSummary>,
    /// `(instance_id, method)` pairs that were not evaluated.
    pub skipped: Vec<(String, Method)>,
}

impl BenchmarkReport {
    pub fn asa(&self, method: Method) -> Option<f64> {
        self.summary.iter().find(|s| s.method == method).map(|s| s.asa)
    }

    pub fn value(&self, instance_id: &str, method: Method) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.instance_id == instance_id && r.method == method)
            .map(|r| r.half_area)
    }

    pub const CSV_HEADER: &'static str = "instance_id,method,half_area,runtime_ms";

    /// Per-instance rows followed by a `# summary` block.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{}", r.instance_id, r.method, r.half_area, r.runtime_ms);
        }
        out.push_str("# summary\nmethod,asa,instances\n");
        for s in &self.summary {
            let _ = writeln!(out, "{},{},{}", s.method, s.asa, s.instances);
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("{:<16} {:>12} {:>10}\n", "method", "ASA", "instances");
        for s in &self.summary {
            let _ = writeln!(out, "{:<16} {:>12.4} {:>10}", s.method.name(), s.asa, s.instances);
        }
        if !self.skipped.is_empty() {
            let _ = writeln!(out, "skipped {} evaluations", self.skipped.len());
        }
        out
    }
}

fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.parse().ok().filter(|&t| t > 0)
}

fn evaluate(
    instance: &Instance,
    index: usize,
    method: Method,
    config: &BenchmarkConfig,
) -> Result<Option<f64>, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ method.stream_salt().rotate_left(32));
    rng.set_stream(index as u64);
    let n = instance.len();
    let value = match method {
        Method::Random => {
            let draws = config.random_draws.max(1);
            let mut total = 0.0;
            for _ in 0..draws {
                let mut seq: Vec<usize> = (0..n).collect();
                rand::seq::SliceRandom::shuffle(seq.as_mut_slice(), &mut rng);
                total += pack_sequence(instance, &seq)?.half_surface_area() as f64;
            }
            total / draws as f64
        }
        Method::Heuristic => pack_heuristic(instance)?.half_surface_area() as f64,
        Method::PolicySampling => {
            let params = config.policy.as_ref().ok_or(HarnessError::MissingPolicy(method))?;
            let mut best = Length::MAX;
            for _ in 0..config.policy_samples.max(1) {
                best = best.min(sample_sequence(params, instance, index, &mut rng)?.reward);
            }
            best as f64
        }
        Method::PolicyBeam => {
            let params = config.policy.as_ref().ok_or(HarnessError::MissingPolicy(method))?;
            beam_search(params, instance, config.beam_width)?.reward as f64
        }
        Method::Oracle => {
            if n > config.oracle_limit {
                log::warn!(
                    "skipping oracle on {}: {} items exceeds limit {}",
                    instance.id,
                    n,
                    config.oracle_limit
                );
                return Ok(None);
            }
            exhaustive_optimal_sequence(instance, config.oracle_limit)?
                .1
                .half_surface_area() as f64
        }
    };
    Ok(Some(value))
}

/// Evaluates every method on every instance.
///
/// Instances run in parallel; each (instance, method) pair draws from its own
/// seeded stream, so results do not depend on scheduling.
pub fn run_benchmark(
    instances: &[Instance],
    methods: &[Method],
    config: &BenchmarkConfig,
) -> Result<BenchmarkReport, HarnessError> {
    if methods.is_empty() {
        return Err(HarnessError::NoMethods);
    }
    let mut methods = methods.to_vec();
    methods.sort();
    methods.dedup();
    if let Some(&m) = methods.iter().find(|m| m.needs_policy()) {
        if config.policy.is_none() {
            return Err(HarnessError::MissingPolicy(m));
        }
    }

    let work = || {
        instances
            .par_iter()
            .enumerate()
            .map(|(index, inst)| {
                methods
                    .iter()
                    .map(|&m| {
                        let start = Instant::now();
                        let value = evaluate(inst, index, m, config)?;
                        let runtime_ms = if config.record_timing {
                            start.elapsed().as_secs_f64() * 1e3
                        } else {
                            0.0
                        };
                        Ok((inst.id.clone(), m, value, runtime_ms))
                    })
                    .collect::<Result<Vec<_>, HarnessError>>()
            })
            .collect::<Result<Vec<_>, HarnessError>>()
    };
    let results = match config.threads.or_else(threads_from_env) {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| HarnessError::ThreadPool(e.to_string()))?
            .install(work)?,
        None => work()?,
    };

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (id, method, value, runtime_ms) in results.into_iter().flatten() {
        match value {
            Some(half_area) => rows.push(BenchmarkRow {
                instance_id: id,
                method,
                half_area,
                runtime_ms,
            }),
            None => skipped.push((id, method)),
        }
    }
    rows.sort_by(|a, b| a.instance_id.cmp(&b.instance_id).then(a.method.cmp(&b.method)));
    skipped.sort();

    let summary = methods
        .iter()
        .filter_map(|&m| {
            let vals: Vec<f64> = rows.iter().filter(|r| r.method == m).map(|r| r.half_area).collect();
            (!vals.is_empty()).then(|| MethodSummary {
                method: m,
                asa: vals.iter().sum::<f64>() / vals.len() as f64,
                instances: vals.len(),
            })
        })
        .collect();
    Ok(BenchmarkReport {
        seed: config.seed,
        rows,
        summary,
        skipped,
    })
}
