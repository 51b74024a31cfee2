use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::frame::SeriesFrame;
use crate::error::{Error, Result};

fn one() -> f64 {
    1.0
}

/// One additive part of a synthetic signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Component {
    /// `amplitude · sin(2π t / period + phase)`.
    Sine {
        period: f64,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `Σ_k amplitudes[k-1] · sin(2π k t / period + phase)`.
    Harmonics {
        period: f64,
        amplitudes: Vec<f64>,
        #[serde(default)]
        phase: f64,
    },
    /// `intercept + slope · t`.
    Drift {
        slope: f64,
        #[serde(default)]
        intercept: f64,
    },
    /// Independent draws from `N(mean, variance)`.
    Noise {
        #[serde(default)]
        mean: f64,
        variance: f64,
    },
    /// Cumulative sum of `N(drift, step_std²)` steps.
    RandomWalk {
        #[serde(default = "one")]
        step_std: f64,
        #[serde(default)]
        drift: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub components: Vec<Component>,
    pub length: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_column")]
    pub column: String,
}

fn default_column() -> String {
    "OT".into()
}

impl SynthSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn normal(mean: f64, std: f64) -> Result<Normal<f64>> {
    Normal::new(mean, std).map_err(|e| Error::InvalidInput(format!("bad normal N({mean}, {std}²): {e}")))
}

/// Sums the components of `spec` into a one-channel frame. Components draw
/// from a single seeded stream in order, so output is reproducible per seed.
pub fn synth_generate(spec: &SynthSpec) -> Result<SeriesFrame> {
    if spec.length == 0 {
        return Err(Error::InvalidInput("synthetic length must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut y = vec![0.0; spec.length];
    for comp in &spec.components {
        match *comp {
            Component::Sine { period, amplitude, phase } => {
                check_period(period)?;
                for (t, v) in y.iter_mut().enumerate() {
                    *v += amplitude * (2.0 * PI * t as f64 / period + phase).sin();
                }
            }
            Component::Harmonics { period, ref amplitudes, phase } => {
                check_period(period)?;
                for (t, v) in y.iter_mut().enumerate() {
                    for (k, a) in amplitudes.iter().enumerate() {
                        *v += a * (2.0 * PI * (k + 1) as f64 * t as f64 / period + phase).sin();
                    }
                }
            }
            Component::Drift { slope, intercept } => {
                for (t, v) in y.iter_mut().enumerate() {
                    *v += intercept + slope * t as f64;
                }
            }
            Component::Noise { mean, variance } => {
                if !(variance >= 0.0) {
                    return Err(Error::InvalidInput(format!("noise variance {variance} is negative")));
                }
                let d = normal(mean, variance.sqrt())?;
                for v in y.iter_mut() {
                    *v += d.sample(&mut rng);
                }
            }
            Component::RandomWalk { step_std, drift } => {
                let d = normal(drift, step_std)?;
                let mut level = 0.0;
                for v in y.iter_mut() {
                    level += d.sample(&mut rng);
                    *v += level;
                }
            }
        }
    }
    SeriesFrame::new("synthetic", vec![spec.column.clone()], vec![y])
}

fn check_period(p: f64) -> Result<()> {
    if !(p > 0.0) {
        return Err(Error::InvalidInput(format!("period must be positive, got {p}")));
    }
    Ok(())
}
