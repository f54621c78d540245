//! Checkpoint file: the flat parameter vector plus the training config and RNG position.
//!
//! Layout (JSON object, version 1):
//!
//! | key               | value                                              |
//! |-------------------|----------------------------------------------------|
//! | `format`          | always `"surfpack-checkpoint"`                     |
//! | `version`         | `1`                                                |
//! | `config`          | the [`TrainerConfig`] used                         |
//! | `embed_dim`       | embedding width `d`                                |
//! | `steps_completed` | number of optimizer updates applied                |
//! | `params`          | `4d² + 6d` numbers in [`ParamLayout`] order        |
//! | `rng`             | [`RngState`] of the trainer's master stream        |
//!
//! Floats are written in shortest round-trip form, so reading a checkpoint
//! back yields bit-identical parameters.
//!
//! [`ParamLayout`]: super::network::ParamLayout

use serde::{Deserialize, Serialize};

use super::network::PolicyParams;
use super::train::{RngState, TrainOutcome, TrainerConfig};
use super::PolicyError;

pub const CHECKPOINT_FORMAT: &str = "surfpack-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub config: TrainerConfig,
    pub embed_dim: usize,
    pub steps_completed: u64,
    pub params: Vec<f64>,
    pub rng: RngState,
}

impl Checkpoint {
    pub fn from_outcome(config: &TrainerConfig, outcome: &TrainOutcome) -> Self {
        Self {
            format: CHECKPOINT_FORMAT.to_string(),
            version: CHECKPOINT_VERSION,
            config: config.clone(),
            embed_dim: outcome.params.dim(),
            steps_completed: outcome.optimizer.step,
            params: outcome.params.as_flat().to_vec(),
            rng: outcome.rng.clone(),
        }
    }

    pub fn policy(&self) -> Result<PolicyParams, PolicyError> {
        PolicyParams::from_flat(self.embed_dim, self.params.clone())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("checkpoint serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, PolicyError> {
        let ck: Checkpoint =
            serde_json::from_str(text).map_err(|e| PolicyError::Checkpoint(e.to_string()))?;
        if ck.format != CHECKPOINT_FORMAT || ck.version != CHECKPOINT_VERSION {
            return Err(PolicyError::Checkpoint(format!(
                "unsupported checkpoint {} v{}",
                ck.format, ck.version
            )));
        }
        ck.policy()?;
        Ok(ck)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Instance;
    use crate::policy::train::train;

    #[test]
    fn round_trip_is_exact() {
        let instances = vec![Instance::from_triples("a", &[(1, 2, 3), (2, 2, 1), (4, 1, 1)]).unwrap()];
        let config = TrainerConfig {
            steps: 5,
            batch_size: 2,
            embed_dim: 3,
            seed: 1,
            ..TrainerConfig::default()
        };
        let out = train(&config, &instances).unwrap();
        let ck = Checkpoint::from_outcome(&config, &out);
        let back = Checkpoint::from_json(&ck.to_json()).unwrap();
        assert_eq!(back, ck);
        assert_eq!(back.policy().unwrap(), out.params);
        assert_eq!(back.steps_completed, 5);
    }

    #[test]
    fn rejects_wrong_format() {
        let text = r#"{"format":"other","version":1,"config":{},"embed_dim":1,"steps_completed":0,
            "params":[0,0,0,0,0,0,0,0,0,0],"rng":{"seed":[0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0],"stream":0,"word_pos":"0"}}"#;
        assert!(matches!(Checkpoint::from_json(text), Err(PolicyError::Checkpoint(_))));
        let ok = text.replace("\"other\"", "\"surfpack-checkpoint\"");
        assert!(Checkpoint::from_json(&ok).is_ok());
    }
}
