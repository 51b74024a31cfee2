use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::optim::{Adam, PlateauSchedule};
use super::samples::SampleSet;
use crate::error::{Error, Result};
use crate::model::Forecaster;
use crate::scalar::Scalar;

/// Samples per gradient chunk. Chunks are fixed by position, so the summation
/// order does not depend on the number of threads.
pub const CHUNK: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    /// Loss over the reconstructed look-back and the forecast.
    Combined,
    /// Loss over the forecast only.
    Finetune,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub max_epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub lr_reduce_factor: f64,
    pub lr_patience: usize,
    pub early_stop_patience: usize,
    pub seed: u64,
    pub stages: Vec<Stage>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            max_epochs: 50,
            batch_size: 64,
            learning_rate: 5e-4,
            lr_reduce_factor: 0.5,
            lr_patience: 3,
            early_stop_patience: 10,
            seed: 0,
            stages: vec![Stage::Combined, Stage::Finetune],
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_epochs == 0 || self.batch_size == 0 || self.early_stop_patience == 0 {
            return Err(Error::InvalidInput("epochs, batch size and early-stop patience must be positive".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidInput(format!("learning rate {} must be positive", self.learning_rate)));
        }
        if !(self.lr_reduce_factor > 0.0 && self.lr_reduce_factor < 1.0) {
            return Err(Error::InvalidInput(format!(
                "lr reduce factor {} must lie in (0, 1)",
                self.lr_reduce_factor
            )));
        }
        if self.stages.is_empty() {
            return Err(Error::InvalidInput("no training stage selected".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub stage: Stage,
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub lr: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome<T> {
    /// Parameters with the best validation loss seen.
    pub params: Vec<T>,
    pub best_val: f64,
    pub history: Vec<EpochRecord>,
}

pub fn write_history(path: impl AsRef<Path>, history: &[EpochRecord]) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    for r in history {
        serde_json::to_writer(&mut f, r)?;
        f.write_all(b"\n")?;
    }
    f.flush()?;
    Ok(())
}

/// Deterministic 64-bit mixing (SplitMix64 finalizer) for per-sample seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn sample_seed(base: u64, epoch: u64, window: usize, channel: usize) -> u64 {
    mix(mix(mix(base ^ epoch) ^ window as u64) ^ channel as u64)
}

/// Output positions scored by the loss and the matching truth slice.
fn loss_targets<'a, T: Scalar, M: Forecaster<T>>(model: &M, stage: Stage, span: &'a [f64]) -> (usize, &'a [f64]) {
    let out = model.output_len();
    let h = model.pred_len();
    if stage == Stage::Combined && model.emits_backcast() {
        // Output covers the last `out` values of the span.
        (0, &span[span.len() - out..])
    } else {
        (out - h, &span[span.len() - h..])
    }
}

/// Mean squared error and its parameter gradient over the listed
/// `(window, channel)` samples.
pub fn batch_loss_and_grad<T: Scalar, M: Forecaster<T>, S: SampleSet + ?Sized>(
    model: &M,
    params: &[T],
    set: &S,
    samples: &[(usize, usize)],
    stage: Stage,
    dropout_seed: Option<u64>,
) -> Result<(f64, Vec<T>)> {
    if samples.is_empty() {
        return Err(Error::EmptySplit("empty batch".into()));
    }
    let n_elems = {
        let (_, t) = loss_targets(model, stage, set.span(samples[0].0, samples[0].1));
        t.len()
    };
    let scale = 1.0 / (samples.len() * n_elems) as f64;
    let np = params.len();
    let parts: Vec<(f64, Vec<T>)> = samples
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut g = vec![T::zero(); np];
            let mut loss = 0.0;
            for &(w, c) in chunk {
                let x: Vec<T> = set.input(w, c).iter().map(|&v| T::lit(v)).collect();
                let seed = dropout_seed.map(|s| sample_seed(s, 0, w, c));
                let (y, tape) = model.forward(params, &x, c, seed)?;
                let (off, truth) = loss_targets(model, stage, set.span(w, c));
                let mut gy = vec![T::zero(); y.len()];
                for (k, &t) in truth.iter().enumerate() {
                    let e = y[off + k].as_f64() - t;
                    loss += e * e;
                    gy[off + k] = T::lit(2.0 * e * scale);
                }
                model.backward(params, &tape, &gy, &mut g, false);
            }
            Ok((loss, g))
        })
        .collect::<Result<_>>()?;
    let mut total = 0.0;
    let mut grads = vec![T::zero(); np];
    for (l, g) in parts {
        total += l;
        for (a, b) in grads.iter_mut().zip(g) {
            *a += b;
        }
    }
    Ok((total * scale, grads))
}

/// Mean squared error only, in evaluation mode.
pub fn batch_loss<T: Scalar, M: Forecaster<T>, S: SampleSet + ?Sized>(
    model: &M,
    params: &[T],
    set: &S,
    samples: &[(usize, usize)],
    stage: Stage,
) -> Result<f64> {
    let parts: Vec<(f64, usize)> = samples
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut loss = 0.0;
            let mut n = 0;
            for &(w, c) in chunk {
                let x: Vec<T> = set.input(w, c).iter().map(|&v| T::lit(v)).collect();
                let y = model.predict(params, &x, c)?;
                let (off, truth) = loss_targets(model, stage, set.span(w, c));
                for (k, &t) in truth.iter().enumerate() {
                    let e = y[off + k].as_f64() - t;
                    loss += e * e;
                }
                n += truth.len();
            }
            Ok((loss, n))
        })
        .collect::<Result<_>>()?;
    let (l, n) = parts.into_iter().fold((0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    if n == 0 {
        return Err(Error::EmptySplit("no samples to score".into()));
    }
    Ok(l / n as f64)
}

fn all_samples<S: SampleSet + ?Sized>(set: &S) -> Vec<(usize, usize)> {
    (0..set.n_windows())
        .flat_map(|w| set.channels().iter().map(move |&c| (w, c)))
        .collect()
}

/// Forecast MSE over every window and channel of `set`.
pub fn validation_loss<T: Scalar, M: Forecaster<T>, S: SampleSet + ?Sized>(model: &M, params: &[T], set: &S) -> Result<f64> {
    batch_loss(model, params, set, &all_samples(set), Stage::Finetune)
}

/// Trains from `init` through the configured stages. Each stage has its own
/// optimizer state, learning-rate schedule and early stopping; validation is
/// always forecast MSE, and the best validation parameters over all stages are
/// returned.
pub fn train_two_stage<T: Scalar, M: Forecaster<T>, S: SampleSet + ?Sized>(
    model: &M,
    init: Vec<T>,
    train: &S,
    val: &S,
    cfg: &TrainConfig,
) -> Result<TrainOutcome<T>> {
    cfg.validate()?;
    if train.n_windows() == 0 {
        return Err(Error::EmptySplit("training split has no windows".into()));
    }
    if val.n_windows() == 0 {
        return Err(Error::EmptySplit("validation split has no windows".into()));
    }
    if init.len() != model.num_params() {
        return Err(Error::Shape(format!(
            "{} initial parameters for a model with {}",
            init.len(),
            model.num_params()
        )));
    }
    let mut params = init;
    let mut best_val = validation_loss(model, &params, val)?;
    let mut best_params = params.clone();
    let mut history = Vec::new();
    let channels = train.channels().to_vec();
    let mut order: Vec<usize> = (0..train.n_windows()).collect();
    let mut batch_counter = 0usize;

    for (si, &stage) in cfg.stages.iter().enumerate() {
        params = best_params.clone();
        let mut opt = Adam::new(params.len(), cfg.learning_rate);
        let mut sched = PlateauSchedule::new(cfg.lr_reduce_factor, cfg.lr_patience);
        let mut stage_best = best_val;
        let mut stale = 0;
        for epoch in 0..cfg.max_epochs {
            let epoch_key = mix(cfg.seed ^ ((si as u64) << 32) ^ epoch as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(epoch_key);
            order.shuffle(&mut rng);
            let mut loss_sum = 0.0;
            let mut batches = 0;
            for (bi, wins) in order.chunks(cfg.batch_size).enumerate() {
                let samples: Vec<(usize, usize)> =
                    wins.iter().flat_map(|&w| channels.iter().map(move |&c| (w, c))).collect();
                let (loss, grads) =
                    batch_loss_and_grad(model, &params, train, &samples, stage, Some(mix(epoch_key ^ bi as u64)))?;
                if !loss.is_finite() || grads.iter().any(|g| !g.is_finite()) {
                    return Err(Error::NonFiniteLoss(batch_counter));
                }
                opt.step(&mut params, &grads);
                loss_sum += loss;
                batches += 1;
                batch_counter += 1;
            }
            let val_loss = validation_loss(model, &params, val)?;
            if !val_loss.is_finite() {
                return Err(Error::NonFiniteLoss(batch_counter));
            }
            history.push(EpochRecord {
                stage,
                epoch,
                train_loss: loss_sum / batches as f64,
                val_loss,
                lr: opt.lr,
            });
            opt.lr = sched.observe(val_loss, opt.lr);
            if val_loss < best_val {
                best_val = val_loss;
                best_params.clone_from(&params);
            }
            if val_loss < stage_best {
                stage_best = val_loss;
                stale = 0;
            } else {
                stale += 1;
                if stale >= cfg.early_stop_patience {
                    break;
                }
            }
        }
    }
    Ok(TrainOutcome {
        params: best_params,
        best_val,
        history,
    })
}
