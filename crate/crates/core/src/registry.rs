//! Named model kinds, their serializable configuration, and a single
//! [`Forecaster`] that dispatches over every trainable architecture.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fits::{ChannelMode, Fits, FitsConfig, FitsTape, Variant};
use crate::linear_models::{
    DLinear, DLinearFits, DLinearFitsTape, DLinearTape, FitsDLinear, FitsDLinearTape, Linear, NLinear,
    DEFAULT_KERNEL,
};
use crate::model::Forecaster;
use crate::scalar::Scalar;

/// Configuration of a trainable model, tagged by kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Fits(FitsConfig),
    Dlinear { seq_len: usize, pred_len: usize, kernel: usize },
    Nlinear { seq_len: usize, pred_len: usize },
    Linear { seq_len: usize, pred_len: usize },
    DlinearFits { fits: FitsConfig, kernel: usize },
    FitsDlinear { fits: FitsConfig, kernel: usize },
}

/// Forecasters that need no training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Baseline {
    Repeat,
    Mean,
    Arima { max_p: usize, max_d: usize, max_q: usize },
}

impl Baseline {
    pub const DEFAULT_ARIMA: Baseline = Baseline::Arima {
        max_p: 3,
        max_d: 2,
        max_q: 3,
    };

    pub fn name(&self) -> &'static str {
        match self {
            Baseline::Repeat => "repeat",
            Baseline::Mean => "mean",
            Baseline::Arima { .. } => "arima",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelChoice {
    Trained(ModelSpec),
    Baseline(Baseline),
}

/// Hyperparameters shared by the named models. Only the fields relevant to a
/// kind are read.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelOptions {
    pub seq_len: usize,
    pub pred_len: usize,
    pub base_period: usize,
    pub harmonic_order: usize,
    pub channel_mode: ChannelMode,
    pub channels: usize,
    pub depth: usize,
    pub hidden: usize,
    pub dropout_p: f64,
    pub kernel: usize,
}

impl ModelOptions {
    pub fn new(seq_len: usize, pred_len: usize, base_period: usize, harmonic_order: usize) -> Self {
        Self {
            seq_len,
            pred_len,
            base_period,
            harmonic_order,
            channel_mode: ChannelMode::Shared,
            channels: 1,
            depth: 1,
            hidden: 128,
            dropout_p: 0.0,
            kernel: DEFAULT_KERNEL,
        }
    }

    fn fits(&self, variant: Variant) -> FitsConfig {
        let mut cfg = FitsConfig::new(self.seq_len, self.pred_len, self.base_period, self.harmonic_order);
        cfg.channel_mode = self.channel_mode;
        cfg.channels = self.channels;
        cfg.variant = variant;
        if !matches!(variant, Variant::Plain | Variant::Bypass) {
            cfg.depth = self.depth;
            cfg.hidden = self.hidden;
            cfg.dropout_p = self.dropout_p;
        }
        cfg
    }
}

pub const MODEL_NAMES: &[&str] = &[
    "fits",
    "deep_fits_modrelu",
    "deep_fits_crelu",
    "deep_fits_after_upscaler",
    "real_deep_fits",
    "fits_bypass",
    "dlinear",
    "nlinear",
    "linear",
    "dlinear_fits",
    "fits_dlinear",
    "repeat",
    "mean",
    "arima",
];

/// Resolves a model name to its configuration.
pub fn model_choice(name: &str, o: &ModelOptions) -> Result<ModelChoice> {
    let spec = match name {
        "fits" => ModelSpec::Fits(o.fits(Variant::Plain)),
        "deep_fits_modrelu" => ModelSpec::Fits(o.fits(Variant::DeepModrelu)),
        "deep_fits_crelu" => ModelSpec::Fits(o.fits(Variant::DeepCrelu)),
        "deep_fits_after_upscaler" => ModelSpec::Fits(o.fits(Variant::DeepAfterUpscaler)),
        "real_deep_fits" => ModelSpec::Fits(o.fits(Variant::RealDeep)),
        "fits_bypass" => ModelSpec::Fits(o.fits(Variant::Bypass)),
        "dlinear" => ModelSpec::Dlinear {
            seq_len: o.seq_len,
            pred_len: o.pred_len,
            kernel: o.kernel,
        },
        "nlinear" => ModelSpec::Nlinear {
            seq_len: o.seq_len,
            pred_len: o.pred_len,
        },
        "linear" => ModelSpec::Linear {
            seq_len: o.seq_len,
            pred_len: o.pred_len,
        },
        "dlinear_fits" => ModelSpec::DlinearFits {
            fits: o.fits(Variant::Plain),
            kernel: o.kernel,
        },
        "fits_dlinear" => ModelSpec::FitsDlinear {
            fits: o.fits(Variant::Plain),
            kernel: o.kernel,
        },
        "repeat" => return Ok(ModelChoice::Baseline(Baseline::Repeat)),
        "mean" => return Ok(ModelChoice::Baseline(Baseline::Mean)),
        "arima" => return Ok(ModelChoice::Baseline(Baseline::DEFAULT_ARIMA)),
        _ => {
            return Err(Error::InvalidInput(format!(
                "unknown model `{name}` (available: {})",
                MODEL_NAMES.join(", ")
            )))
        }
    };
    Ok(ModelChoice::Trained(spec))
}

impl ModelSpec {
    pub fn build<T: Scalar>(&self) -> Result<AnyModel<T>> {
        Ok(match self {
            ModelSpec::Fits(cfg) => AnyModel::Fits(Fits::new(cfg.clone())?),
            ModelSpec::Dlinear {
                seq_len,
                pred_len,
                kernel,
            } => AnyModel::DLinear(DLinear::new(*seq_len, *pred_len, *kernel)?),
            ModelSpec::Nlinear { seq_len, pred_len } => AnyModel::NLinear(NLinear::new(*seq_len, *pred_len)?),
            ModelSpec::Linear { seq_len, pred_len } => AnyModel::Linear(Linear::new(*seq_len, *pred_len)?),
            ModelSpec::DlinearFits { fits, kernel } => AnyModel::DLinearFits(DLinearFits::new(fits.clone(), *kernel)?),
            ModelSpec::FitsDlinear { fits, kernel } => AnyModel::FitsDLinear(FitsDLinear::new(fits.clone(), *kernel)?),
        })
    }

    /// The FITS configuration inside this model, if any.
    pub fn fits_config(&self) -> Option<&FitsConfig> {
        match self {
            ModelSpec::Fits(c) | ModelSpec::DlinearFits { fits: c, .. } | ModelSpec::FitsDlinear { fits: c, .. } => {
                Some(c)
            }
            _ => None,
        }
    }
}

pub enum AnyModel<T> {
    Fits(Fits<T>),
    DLinear(DLinear<T>),
    NLinear(NLinear<T>),
    Linear(Linear<T>),
    DLinearFits(DLinearFits<T>),
    FitsDLinear(FitsDLinear<T>),
}

pub enum AnyTape<T> {
    Fits(FitsTape<T>),
    DLinear(DLinearTape<T>),
    Shifted(Vec<T>),
    DLinearFits(DLinearFitsTape<T>),
    FitsDLinear(FitsDLinearTape<T>),
}

macro_rules! each {
    ($self:expr, $m:ident => $body:expr) => {
        match $self {
            AnyModel::Fits($m) => $body,
            AnyModel::DLinear($m) => $body,
            AnyModel::NLinear($m) => $body,
            AnyModel::Linear($m) => $body,
            AnyModel::DLinearFits($m) => $body,
            AnyModel::FitsDLinear($m) => $body,
        }
    };
}

fn tape_mismatch() -> ! {
    panic!("tape recorded by a different model kind")
}

impl<T: Scalar> Forecaster<T> for AnyModel<T> {
    type Tape = AnyTape<T>;

    fn kind(&self) -> &'static str {
        each!(self, m => m.kind())
    }

    fn seq_len(&self) -> usize {
        each!(self, m => m.seq_len())
    }

    fn pred_len(&self) -> usize {
        each!(self, m => m.pred_len())
    }

    fn output_len(&self) -> usize {
        each!(self, m => m.output_len())
    }

    fn num_params(&self) -> usize {
        each!(self, m => m.num_params())
    }

    fn reported_param_count(&self) -> usize {
        each!(self, m => m.reported_param_count())
    }

    fn init_params(&self, seed: u64) -> Vec<T> {
        each!(self, m => m.init_params(seed))
    }

    fn forward(&self, params: &[T], x: &[T], channel: usize, dropout_seed: Option<u64>) -> Result<(Vec<T>, AnyTape<T>)> {
        Ok(match self {
            AnyModel::Fits(m) => {
                let (y, t) = m.forward(params, x, channel, dropout_seed)?;
                (y, AnyTape::Fits(t))
            }
            AnyModel::DLinear(m) => {
                let (y, t) = m.forward(params, x, channel, dropout_seed)?;
                (y, AnyTape::DLinear(t))
            }
            AnyModel::NLinear(m) => {
                let (y, t) = m.forward(params, x, channel, dropout_seed)?;
                (y, AnyTape::Shifted(t))
            }
            AnyModel::Linear(m) => {
                let (y, t) = m.forward(params, x, channel, dropout_seed)?;
                (y, AnyTape::Shifted(t))
            }
            AnyModel::DLinearFits(m) => {
                let (y, t) = m.forward(params, x, channel, dropout_seed)?;
                (y, AnyTape::DLinearFits(t))
            }
            AnyModel::FitsDLinear(m) => {
                let (y, t) = m.forward(params, x, channel, dropout_seed)?;
                (y, AnyTape::FitsDLinear(t))
            }
        })
    }

    fn backward(
        &self,
        params: &[T],
        tape: &AnyTape<T>,
        grad_out: &[T],
        grads: &mut [T],
        want_input_grad: bool,
    ) -> Option<Vec<T>> {
        match (self, tape) {
            (AnyModel::Fits(m), AnyTape::Fits(t)) => m.backward(params, t, grad_out, grads, want_input_grad),
            (AnyModel::DLinear(m), AnyTape::DLinear(t)) => m.backward(params, t, grad_out, grads, want_input_grad),
            (AnyModel::NLinear(m), AnyTape::Shifted(t)) => m.backward(params, t, grad_out, grads, want_input_grad),
            (AnyModel::Linear(m), AnyTape::Shifted(t)) => m.backward(params, t, grad_out, grads, want_input_grad),
            (AnyModel::DLinearFits(m), AnyTape::DLinearFits(t)) => {
                m.backward(params, t, grad_out, grads, want_input_grad)
            }
            (AnyModel::FitsDLinear(m), AnyTape::FitsDLinear(t)) => {
                m.backward(params, t, grad_out, grads, want_input_grad)
            }
            _ => tape_mismatch(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves() {
        let o = ModelOptions::new(96, 24, 24, 4);
        for name in MODEL_NAMES {
            let choice = model_choice(name, &o).unwrap();
            if let ModelChoice::Trained(spec) = choice {
                let m = spec.build::<f64>().unwrap();
                assert_eq!(m.kind(), *name);
            }
        }
        assert!(model_choice("transformer", &o).is_err());
    }

    #[test]
    fn spec_json_roundtrip() {
        let o = ModelOptions::new(96, 24, 24, 4);
        let ModelChoice::Trained(spec) = model_choice("dlinear_fits", &o).unwrap() else {
            unreachable!()
        };
        let s = serde_json::to_string(&spec).unwrap();
        assert!(s.contains("\"kind\":\"dlinear_fits\""));
        let back: ModelSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, spec);
    }
}
