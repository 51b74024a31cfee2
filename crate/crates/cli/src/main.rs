use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Frequency-domain time series forecasting.
#[derive(Parser)]
#[command(name = "freqcast", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train and evaluate one model on a CSV dataset.
    Train(TrainArgs),
    /// Hurst exponent and autocorrelation of every channel.
    Diagnose(DiagnoseArgs),
    /// Run the preset grid of datasets, models and horizons.
    Benchmark(BenchmarkArgs),
    /// Write a synthetic series described by a JSON spec.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    #[value(name = "S")]
    S,
    #[value(name = "MS")]
    Ms,
    #[value(name = "M")]
    M,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    /// 60:20:20 for files named ETT*, 70:10:20 otherwise.
    Auto,
    Standard,
    Ett,
}

/// Options shared by training-based commands.
#[derive(Args, Clone)]
struct TrainingOpts {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Epochs per stage.
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    /// Train on raw values instead of training-split standardized ones.
    #[arg(long)]
    no_standardize: bool,
    /// Score only this many evenly spaced test windows.
    #[arg(long)]
    subsample: Option<usize>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "fits")]
    model: String,
    #[arg(long)]
    seq_len: usize,
    #[arg(long)]
    pred_len: usize,
    /// Samples per dominant cycle (FITS models).
    #[arg(long)]
    base_t: Option<usize>,
    /// Harmonic of the base period used as cutoff (FITS models).
    #[arg(long)]
    h_order: Option<usize>,
    #[arg(long, value_enum, default_value = "M")]
    mode: ModeArg,
    /// One frequency layer per channel.
    #[arg(long)]
    individual: bool,
    /// Target column.
    #[arg(long)]
    target: Option<String>,
    #[arg(long, value_enum, default_value = "auto")]
    split: SplitArg,
    /// Replace this sentinel value by interpolation before training.
    #[arg(long, allow_hyphen_values = true)]
    sentinel: Option<f64>,
    /// Hidden layers of deep variants.
    #[arg(long, default_value_t = 1)]
    depth: usize,
    #[arg(long, default_value_t = 128)]
    hidden: usize,
    #[arg(long, default_value_t = 0.0)]
    dropout: f64,
    /// Moving-average kernel of DLinear models.
    #[arg(long, default_value_t = 25)]
    kernel: usize,
    /// Results root; defaults to $FREQCAST_RESULTS_DIR or ./results.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    training: TrainingOpts,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 100)]
    max_lag: usize,
    /// Also report the Hurst exponent after a low-pass filter at this bin.
    #[arg(long, num_args = 0..=1, default_missing_value = "200")]
    low_pass: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Dataset presets, or `all`.
    #[arg(long, required = true, value_delimiter = ',')]
    preset: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "fits")]
    models: Vec<String>,
    /// Override the preset horizons.
    #[arg(long, value_delimiter = ',')]
    horizons: Vec<usize>,
    /// Dataset directory; defaults to $FREQCAST_DATA_DIR or ./data.
    #[arg(long)]
    data_dir: Option<PathBuf>,
    /// Results root; defaults to $FREQCAST_RESULTS_DIR or ./results.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    training: TrainingOpts,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(a) => commands::train(a),
        Command::Diagnose(a) => commands::diagnose(a),
        Command::Benchmark(a) => commands::benchmark(a),
        Command::Synth(a) => commands::synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
