//! Dataset presets, the end-to-end run of one (dataset, model, horizon) cell,
//! and the on-disk layout of run records.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::checkpoint::Checkpoint;
use crate::classical::{arima_forecast, auto_arima, mean_forecast, repeat_forecast};
use crate::data::{clean_sentinels, load_csv, make_windows, split, standardize, Mode, SeriesFrame, SplitSpec};
use crate::error::{Error, Result};
use crate::fits::ChannelMode;
use crate::model::Forecaster;
use crate::registry::{model_choice, AnyModel, Baseline, ModelChoice, ModelOptions};
use crate::train::{evaluate, evaluate_with, subsample_windows, train_two_stage, EpochRecord, Metrics, TrainConfig};

/// Sentinel for missing readings in the weather data.
pub const WEATHER_SENTINEL: f64 = -9999.0;

/// Published hyperparameters for one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub file: &'static str,
    pub target: &'static str,
    pub split: [f64; 3],
    pub seq_len: usize,
    pub base_period: usize,
    pub harmonic_order: usize,
    /// Separate frequency layers per channel.
    pub individual: bool,
    pub mode: Mode,
    pub horizons: &'static [usize],
    pub sentinel: Option<f64>,
    /// Per-model harmonic orders that replace `harmonic_order`.
    pub harmonic_overrides: &'static [(&'static str, usize)],
}

const LONG: &[usize] = &[96, 192, 336, 720];
const ETT: [f64; 3] = [0.6, 0.2, 0.2];
const STD: [f64; 3] = [0.7, 0.1, 0.2];

const fn preset(name: &'static str, file: &'static str, split: [f64; 3], seq: usize, base: usize, h: usize) -> Preset {
    Preset {
        name,
        file,
        target: "OT",
        split,
        seq_len: seq,
        base_period: base,
        harmonic_order: h,
        individual: false,
        mode: Mode::M,
        horizons: LONG,
        sentinel: None,
        harmonic_overrides: &[],
    }
}

/// Price series: the window is its own base period, so the harmonic order is
/// the cutoff bin itself.
const fn price(name: &'static str, file: &'static str) -> Preset {
    Preset {
        target: "Adj Close",
        mode: Mode::MS,
        harmonic_overrides: &[("dlinear_fits", 49), ("fits_dlinear", 168)],
        ..preset(name, file, STD, 336, 336, 100)
    }
}

pub const PRESETS: &[Preset] = &[
    preset("etth1", "ETTh1.csv", ETT, 360, 24, 6),
    preset("etth2", "ETTh2.csv", ETT, 720, 24, 6),
    preset("ettm1", "ETTm1.csv", ETT, 720, 96, 14),
    preset("ettm2", "ETTm2.csv", ETT, 720, 96, 14),
    preset("electricity", "electricity.csv", STD, 720, 24, 10),
    preset("traffic", "traffic.csv", STD, 720, 24, 10),
    Preset {
        individual: true,
        sentinel: Some(WEATHER_SENTINEL),
        ..preset("weather", "weather.csv", STD, 720, 144, 12)
    },
    Preset {
        horizons: &[24, 36, 48, 60],
        ..preset("illness", "national_illness.csv", STD, 104, 52, 6)
    },
    preset("exchange", "exchange_rate.csv", STD, 336, 5, 1),
    price("gd", "GD.csv"),
    price("mro", "MRO.csv"),
];

pub fn find_preset(name: &str) -> Result<&'static Preset> {
    PRESETS
        .iter()
        .find(|p| p.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::UnknownPreset {
            name: name.into(),
            available: PRESETS.iter().map(|p| p.name).collect::<Vec<_>>().join(", "),
        })
}

/// Directory holding the dataset files: `FREQCAST_DATA_DIR`, else `data`.
pub fn data_dir() -> PathBuf {
    std::env::var_os("FREQCAST_DATA_DIR").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("data"))
}

/// Root of the results tree: `FREQCAST_RESULTS_DIR`, else `results`.
pub fn results_dir() -> PathBuf {
    std::env::var_os("FREQCAST_RESULTS_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("results"))
}

impl Preset {
    pub fn path_in(&self, dir: &Path) -> PathBuf {
        dir.join(self.file)
    }

    pub fn load(&self, dir: &Path) -> Result<SeriesFrame> {
        let path = self.path_in(dir);
        if !path.exists() {
            return Err(Error::InvalidInput(format!("dataset not found: {}", path.display())));
        }
        let mut frame = load_csv(&path, Some(self.target))?;
        frame.name = self.name.into();
        Ok(frame)
    }

    pub fn harmonic_order_for(&self, model: &str) -> usize {
        self.harmonic_overrides
            .iter()
            .find(|(m, _)| *m == model)
            .map_or(self.harmonic_order, |&(_, h)| h)
    }

    /// The job for `model` at `horizon` on a frame with `channels` columns.
    pub fn job(&self, model: &str, horizon: usize, channels: usize, seed: u64) -> Result<Job> {
        let mut opts = ModelOptions::new(self.seq_len, horizon, self.base_period, self.harmonic_order_for(model));
        if self.individual {
            opts.channel_mode = ChannelMode::Individual;
            opts.channels = channels;
        }
        Ok(Job {
            dataset: self.name.into(),
            model: model_choice(model, &opts)?,
            mode: self.mode,
            seq_len: self.seq_len,
            pred_len: horizon,
            split: SplitSpec::new(self.split)?,
            standardize: true,
            sentinel: self.sentinel,
            train: TrainConfig {
                seed,
                ..TrainConfig::default()
            },
            subsample: None,
        })
    }
}

/// Everything needed to train (if applicable) and score one model.
#[derive(Debug, Clone)]
pub struct Job {
    pub dataset: String,
    pub model: ModelChoice,
    pub mode: Mode,
    pub seq_len: usize,
    pub pred_len: usize,
    pub split: SplitSpec,
    /// Scale all splits with training-split statistics.
    pub standardize: bool,
    pub sentinel: Option<f64>,
    pub train: TrainConfig,
    /// Score only this many evenly spaced test windows.
    pub subsample: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct RunRecord {
    pub dataset: String,
    pub model: String,
    pub mode: String,
    pub seq_len: usize,
    pub pred_len: usize,
    pub base_T: Option<usize>,
    pub H_order: Option<usize>,
    pub cutoff: Option<usize>,
    pub seed: u64,
    pub param_count: usize,
    pub metrics: Metrics,
    pub wall_time_s: f64,
}

pub struct JobOutput {
    pub record: RunRecord,
    pub checkpoint: Option<Checkpoint>,
    pub history: Vec<EpochRecord>,
}

fn baseline_forecast(b: Baseline, x: &[f64], h: usize) -> Result<Vec<f64>> {
    match b {
        Baseline::Repeat => repeat_forecast(x, h),
        Baseline::Mean => mean_forecast(x, h),
        Baseline::Arima { max_p, max_d, max_q } => {
            // A window the order search cannot fit falls back to the random-walk forecast.
            match auto_arima(x, max_p, max_d, max_q).and_then(|m| arima_forecast(&m, x, h)) {
                Ok(y) if y.iter().all(|v| v.is_finite()) => Ok(y),
                _ => repeat_forecast(x, h),
            }
        }
    }
}

/// Runs clean, split, standardize, window, train and evaluate.
pub fn run_job(frame: &SeriesFrame, job: &Job) -> Result<JobOutput> {
    let started = Instant::now();
    if let ModelChoice::Trained(spec) = &job.model {
        let individual = spec.fits_config().is_some_and(|c| c.channel_mode == ChannelMode::Individual);
        if individual && job.mode == Mode::S {
            return Err(Error::InvalidInput(
                "individual channel layers need more than one input channel; use mode M or MS".into(),
            ));
        }
    }
    let cleaned;
    let frame = match job.sentinel {
        Some(s) => {
            cleaned = clean_sentinels(frame, s)?;
            &cleaned
        }
        None => frame,
    };
    let parts = split(frame, &job.split, job.seq_len)?;
    let parts = if job.standardize { standardize(&parts)?.0 } else { parts };
    let test = make_windows(parts.test, job.seq_len, job.pred_len, job.mode)?;
    let windows = job.subsample.map(|n| subsample_windows(test.len(), n));

    let mut record = RunRecord {
        dataset: job.dataset.clone(),
        model: String::new(),
        mode: job.mode.to_string(),
        seq_len: job.seq_len,
        pred_len: job.pred_len,
        base_T: None,
        H_order: None,
        cutoff: None,
        seed: job.train.seed,
        param_count: 0,
        metrics: Metrics {
            mse: f64::NAN,
            mae: f64::NAN,
            se: f64::NAN,
            rrmse: f64::NAN,
            n: 0,
        },
        wall_time_s: 0.0,
    };

    let (metrics, checkpoint, history) = match &job.model {
        ModelChoice::Baseline(b) => {
            record.model = b.name().into();
            let h = job.pred_len;
            let m = evaluate_with(&test, windows.as_deref(), |x, _| baseline_forecast(*b, x, h))?;
            (m, None, Vec::new())
        }
        ModelChoice::Trained(spec) => {
            let model: AnyModel<f64> = spec.build()?;
            record.model = model.kind().into();
            record.param_count = model.reported_param_count();
            if let Some(c) = spec.fits_config() {
                record.base_T = Some(c.base_period);
                record.H_order = Some(c.harmonic_order);
                record.cutoff = Some(c.cutoff_bin());
            }
            let train = make_windows(parts.train, job.seq_len, job.pred_len, job.mode)?;
            let val = make_windows(parts.val, job.seq_len, job.pred_len, job.mode)?;
            let init = model.init_params(job.train.seed);
            let out = train_two_stage(&model, init, &train, &val, &job.train)?;
            let m = match &windows {
                None => evaluate(&model, &out.params, &test)?,
                Some(w) => evaluate_with(&test, Some(w), |x, c| {
                    let y = model.predict(&out.params, x, c)?;
                    Ok(y[y.len() - job.pred_len..].to_vec())
                })?,
            };
            (m, Some(Checkpoint::new(spec.clone(), &out.params)?), out.history)
        }
    };
    record.metrics = metrics;
    record.wall_time_s = started.elapsed().as_secs_f64();
    Ok(JobOutput {
        record,
        checkpoint,
        history,
    })
}

/// `<root>/<dataset>/<model>/<horizon>.json`
pub fn record_path(root: &Path, r: &RunRecord) -> PathBuf {
    root.join(&r.dataset).join(&r.model).join(format!("{}.json", r.pred_len))
}

pub fn write_record(root: &Path, r: &RunRecord) -> Result<PathBuf> {
    let path = record_path(root, r);
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
    serde_json::to_writer_pretty(&mut f, r)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(path)
}

/// One row per record with the metrics flattened.
pub fn write_records_csv<W: Write>(records: &[RunRecord], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Io(e.into());
    out.write_record([
        "dataset",
        "model",
        "mode",
        "seq_len",
        "pred_len",
        "base_T",
        "H_order",
        "cutoff",
        "seed",
        "param_count",
        "mse",
        "mae",
        "se",
        "rrmse",
        "n",
        "wall_time_s",
    ])
    .map_err(io)?;
    let opt = |v: Option<usize>| v.map(|v| v.to_string()).unwrap_or_default();
    for r in records {
        out.write_record([
            r.dataset.clone(),
            r.model.clone(),
            r.mode.clone(),
            r.seq_len.to_string(),
            r.pred_len.to_string(),
            opt(r.base_T),
            opt(r.H_order),
            opt(r.cutoff),
            r.seed.to_string(),
            r.param_count.to_string(),
            r.metrics.mse.to_string(),
            r.metrics.mae.to_string(),
            r.metrics.se.to_string(),
            r.metrics.rrmse.to_string(),
            r.metrics.n.to_string(),
            format!("{:.3}", r.wall_time_s),
        ])
        .map_err(io)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn etth1_preset() {
        let p = find_preset("etth1").unwrap();
        assert_eq!((p.seq_len, p.base_period, p.harmonic_order), (360, 24, 6));
        assert_eq!(p.split, [0.6, 0.2, 0.2]);
    }

    #[test]
    fn weather_is_individual() {
        let p = find_preset("weather").unwrap();
        assert!(p.individual);
        let job = p.job("fits", 96, 21, 0).unwrap();
        let ModelChoice::Trained(spec) = job.model else { panic!() };
        let cfg = spec.fits_config().unwrap();
        assert_eq!(cfg.channel_mode, ChannelMode::Individual);
        assert_eq!(cfg.channels, 21);
    }

    #[test]
    fn unknown_preset_lists_names() {
        let msg = find_preset("nope").unwrap_err().to_string();
        assert!(msg.contains("etth1") && msg.contains("weather"), "{msg}");
    }

    #[test]
    fn price_cutoffs() {
        let p = find_preset("gd").unwrap();
        let cut = |m| {
            let ModelChoice::Trained(s) = p.job(m, 96, 6, 0).unwrap().model else { panic!() };
            s.fits_config().unwrap().cutoff_bin()
        };
        assert_eq!(cut("fits"), 100);
        assert_eq!(cut("dlinear_fits"), 49);
        assert_eq!(cut("fits_dlinear"), 168);
    }

    #[test]
    fn every_preset_builds_every_model() {
        for p in PRESETS {
            for m in crate::registry::MODEL_NAMES {
                let job = p.job(m, p.horizons[0], 7, 0).unwrap();
                if let ModelChoice::Trained(s) = job.model {
                    s.build::<f64>().unwrap_or_else(|e| panic!("{} {m}: {e}", p.name));
                }
            }
        }
    }
}
