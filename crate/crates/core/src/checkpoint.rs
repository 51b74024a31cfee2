//! JSON checkpoints of trained models.
//!
//! ```json
//! {"format": "freqcast-checkpoint", "version": 1, "kind": "fits",
//!  "config": {"kind": "fits", "seq_len": 360, ...}, "params": [...]}
//! ```
//!
//! `params` is the model's flat parameter vector: complex weights are stored
//! as consecutive (re, im) pairs, weight matrices are row-major with one row
//! per input, each bias follows its weights, and per-channel groups follow one
//! another.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Forecaster;
use crate::registry::{AnyModel, ModelSpec};
use crate::scalar::Scalar;

pub const FORMAT: &str = "freqcast-checkpoint";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    /// Kind reported by the built model, e.g. `deep_fits_modrelu`.
    pub kind: String,
    pub config: ModelSpec,
    pub params: Vec<f64>,
}

impl Checkpoint {
    pub fn new<T: Scalar>(config: ModelSpec, params: &[T]) -> Result<Self> {
        let model: AnyModel<T> = config.build()?;
        if params.len() != model.num_params() {
            return Err(Error::Checkpoint(format!(
                "{} parameters for a {} model with {}",
                params.len(),
                model.kind(),
                model.num_params()
            )));
        }
        Ok(Self {
            format: FORMAT.into(),
            version: VERSION,
            kind: model.kind().into(),
            config,
            params: params.iter().map(|v| v.as_f64()).collect(),
        })
    }

    /// Rebuilds the model and its parameters, checking that they agree.
    pub fn restore<T: Scalar>(&self) -> Result<(AnyModel<T>, Vec<T>)> {
        if self.format != FORMAT {
            return Err(Error::Checkpoint(format!("unrecognised format `{}`", self.format)));
        }
        if self.version != VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {}", self.version)));
        }
        let model: AnyModel<T> = self.config.build()?;
        if model.kind() != self.kind {
            return Err(Error::Checkpoint(format!(
                "kind `{}` does not match configuration `{}`",
                self.kind,
                model.kind()
            )));
        }
        if self.params.len() != model.num_params() {
            return Err(Error::Checkpoint(format!(
                "{} parameters stored, model needs {}",
                self.params.len(),
                model.num_params()
            )));
        }
        let params = self.params.iter().map(|&v| T::lit(v)).collect();
        Ok((model, params))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer(f, self)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let f = std::io::BufReader::new(std::fs::File::open(path)?);
        Ok(serde_json::from_reader(f)?)
    }
}
