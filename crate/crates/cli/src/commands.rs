use std::fmt;
use std::path::{Path, PathBuf};

use freqcast::benchmark::{
    data_dir, find_preset, results_dir, run_job, write_record, write_records_csv, Job, JobOutput, RunRecord, PRESETS,
};
use freqcast::data::{load_csv, save_csv, synth_generate, Mode, SeriesFrame, SplitSpec, SynthSpec};
use freqcast::diagnostics::{acf, hurst, low_pass_series, AcfReport, HurstReport};
use freqcast::fits::ChannelMode;
use freqcast::registry::{model_choice, Baseline, ModelChoice, ModelOptions};
use freqcast::train::{write_history, TrainConfig};
use serde::Serialize;

use crate::{BenchmarkArgs, DiagnoseArgs, ModeArg, SplitArg, SynthArgs, TrainArgs, TrainingOpts};

pub enum CliError {
    /// Bad flags or unusable input files.
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<freqcast::Error> for CliError {
    fn from(e: freqcast::Error) -> Self {
        match e {
            freqcast::Error::MissingColumn(_) | freqcast::Error::UnknownPreset { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn runtime(msg: impl fmt::Display) -> CliError {
    CliError::Runtime(msg.to_string())
}

fn require_file(path: &Path) -> CliResult {
    if path.is_file() {
        Ok(())
    } else {
        Err(usage(format!("file not found: {}", path.display())))
    }
}

fn mode_of(m: ModeArg) -> Mode {
    match m {
        ModeArg::S => Mode::S,
        ModeArg::Ms => Mode::MS,
        ModeArg::M => Mode::M,
    }
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().to_lowercase())
        .unwrap_or_else(|| "dataset".into())
}

fn train_config(o: &TrainingOpts) -> CliResult<TrainConfig> {
    let mut cfg = TrainConfig {
        seed: o.seed,
        ..TrainConfig::default()
    };
    if let Some(e) = o.epochs {
        cfg.max_epochs = e;
    }
    if let Some(b) = o.batch_size {
        cfg.batch_size = b;
    }
    if let Some(lr) = o.lr {
        cfg.learning_rate = lr;
    }
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn print_json<T: Serialize>(v: &T) -> CliResult {
    println!("{}", serde_json::to_string_pretty(v).map_err(runtime)?);
    Ok(())
}

/// Writes the record plus, for trained models, the checkpoint and epoch
/// history next to it.
fn store(root: &Path, out: &JobOutput) -> CliResult<PathBuf> {
    let path = write_record(root, &out.record)?;
    if let Some(ck) = &out.checkpoint {
        ck.save(path.with_extension("ckpt.json"))?;
        write_history(path.with_extension("history.jsonl"), &out.history)?;
    }
    Ok(path)
}

pub fn train(a: TrainArgs) -> CliResult {
    require_file(&a.data)?;
    let mode = mode_of(a.mode);
    if a.individual && mode == Mode::S {
        return Err(usage("--individual needs several input channels; use --mode M or MS"));
    }
    if a.seq_len == 0 || a.pred_len == 0 {
        return Err(usage("--seq-len and --pred-len must be positive"));
    }
    let frame = load_csv(&a.data, a.target.as_deref())?;

    let uses_fits = a.model.contains("fits");
    let (base, h) = match (a.base_t, a.h_order) {
        (Some(b), Some(h)) => (b, h),
        _ if uses_fits => return Err(usage(format!("--base-t and --h-order are required for model `{}`", a.model))),
        _ => (a.seq_len, 1),
    };
    let mut opts = ModelOptions::new(a.seq_len, a.pred_len, base, h);
    opts.depth = a.depth;
    opts.hidden = a.hidden;
    opts.dropout_p = a.dropout;
    opts.kernel = a.kernel;
    if a.individual {
        opts.channel_mode = ChannelMode::Individual;
        opts.channels = frame.n_channels();
    }
    let model = model_choice(&a.model, &opts).map_err(|e| usage(e.to_string()))?;
    if let ModelChoice::Trained(spec) = &model {
        spec.build::<f64>().map_err(|e| usage(e.to_string()))?;
    }

    let name = dataset_name(&a.data);
    let split = match a.split {
        SplitArg::Standard => SplitSpec::standard(),
        SplitArg::Ett => SplitSpec::ett(),
        SplitArg::Auto if name.starts_with("ett") => SplitSpec::ett(),
        SplitArg::Auto => SplitSpec::standard(),
    };
    let job = Job {
        dataset: name,
        model,
        mode,
        seq_len: a.seq_len,
        pred_len: a.pred_len,
        split,
        standardize: !a.training.no_standardize,
        sentinel: a.sentinel,
        train: train_config(&a.training)?,
        subsample: a.training.subsample,
    };
    let out = run_job(&frame, &job)?;
    let root = a.out.unwrap_or_else(results_dir);
    let path = store(&root, &out)?;
    eprintln!("wrote {}", path.display());
    print_json(&out.record)
}

#[derive(Serialize)]
struct ChannelReport {
    channel: String,
    hurst: Option<HurstReport>,
    hurst_low_pass: Option<HurstReport>,
    acf: Option<AcfReport>,
    errors: Vec<String>,
}

fn keep<V>(errors: &mut Vec<String>, what: &str, r: freqcast::Result<V>) -> Option<V> {
    r.map_err(|e| errors.push(format!("{what}: {e}"))).ok()
}

fn diagnose_channel(name: &str, x: &[f64], max_lag: usize, low_pass: Option<usize>) -> ChannelReport {
    let mut errors = Vec::new();
    let h = keep(&mut errors, "hurst", hurst(x));
    let hl = low_pass.and_then(|c| keep(&mut errors, "hurst_low_pass", low_pass_series(x, c).and_then(|y| hurst(&y))));
    let a = keep(&mut errors, "acf", acf(x, max_lag));
    ChannelReport {
        channel: name.into(),
        hurst: h,
        hurst_low_pass: hl,
        acf: a,
        errors,
    }
}

pub fn diagnose(a: DiagnoseArgs) -> CliResult {
    require_file(&a.data)?;
    let frame: SeriesFrame = load_csv(&a.data, None)?;
    let reports: Vec<ChannelReport> = frame
        .columns
        .iter()
        .zip(&frame.channels)
        .map(|(name, x)| diagnose_channel(name, x, a.max_lag, a.low_pass))
        .collect();
    let text = serde_json::to_string_pretty(&reports).map_err(runtime)?;
    match &a.out {
        Some(p) => std::fs::write(p, text + "\n").map_err(runtime)?,
        None => println!("{text}"),
    }
    let failed = reports.iter().filter(|r| r.hurst.is_none() && r.acf.is_none()).count();
    for r in &reports {
        for e in &r.errors {
            eprintln!("{}: {e}", r.channel);
        }
    }
    if failed == reports.len() {
        return Err(runtime("no channel could be analysed"));
    }
    Ok(())
}

pub fn benchmark(a: BenchmarkArgs) -> CliResult {
    let presets = if a.preset.iter().any(|p| p == "all") {
        PRESETS.iter().collect::<Vec<_>>()
    } else {
        a.preset.iter().map(|p| find_preset(p)).collect::<Result<Vec<_>, _>>()?
    };
    let dir = a.data_dir.clone().unwrap_or_else(data_dir);
    for p in &presets {
        require_file(&p.path_in(&dir))?;
    }
    let probe = ModelOptions::new(96, 96, 24, 1);
    for m in &a.models {
        model_choice(m, &probe).map_err(|e| usage(e.to_string()))?;
    }
    let cfg = train_config(&a.training)?;
    let root = a.out.clone().unwrap_or_else(results_dir);

    let mut records: Vec<RunRecord> = Vec::new();
    let mut failures = 0;
    for p in presets {
        let frame = p.load(&dir)?;
        let horizons = if a.horizons.is_empty() { p.horizons.to_vec() } else { a.horizons.clone() };
        for model in &a.models {
            for &h in &horizons {
                let mut job = p.job(model, h, frame.n_channels(), cfg.seed)?;
                job.train = cfg.clone();
                job.standardize = !a.training.no_standardize;
                job.subsample = match (a.training.subsample, &job.model) {
                    (Some(n), _) => Some(n),
                    (None, ModelChoice::Baseline(Baseline::Arima { .. })) => Some(100),
                    (None, _) => None,
                };
                match run_job(&frame, &job).map_err(CliError::from).and_then(|out| {
                    store(&root, &out)?;
                    Ok(out.record)
                }) {
                    Ok(r) => {
                        eprintln!(
                            "{} {} h={}: mse {:.4} mae {:.4} ({:.1}s)",
                            r.dataset, r.model, r.pred_len, r.metrics.mse, r.metrics.mae, r.wall_time_s
                        );
                        records.push(r);
                    }
                    Err(e) => {
                        eprintln!("{} {model} h={h}: {e}", p.name);
                        failures += 1;
                    }
                }
            }
        }
    }
    std::fs::create_dir_all(&root).map_err(runtime)?;
    let csv = std::fs::File::create(root.join("benchmark.csv")).map_err(runtime)?;
    write_records_csv(&records, csv)?;
    let json = serde_json::to_string_pretty(&records).map_err(runtime)?;
    std::fs::write(root.join("benchmark.json"), json + "\n").map_err(runtime)?;
    print_json(&records)?;
    if failures > 0 {
        return Err(runtime(format!("{failures} benchmark cell(s) failed")));
    }
    Ok(())
}

pub fn synth(a: SynthArgs) -> CliResult {
    require_file(&a.spec)?;
    let text = std::fs::read_to_string(&a.spec).map_err(runtime)?;
    let spec = SynthSpec::from_json(&text).map_err(|e| usage(format!("{}: {e}", a.spec.display())))?;
    let frame = synth_generate(&spec).map_err(|e| usage(format!("{}: {e}", a.spec.display())))?;
    save_csv(&frame, &a.out)?;
    eprintln!("wrote {} rows to {}", frame.len(), a.out.display());
    Ok(())
}
