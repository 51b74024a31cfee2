use freqcast::data::{make_windows, split, standardize, synth_generate, Mode, SplitSpec, SynthSpec};
use freqcast::fits::{Fits, FitsConfig};
use freqcast::train::*;
use freqcast::Forecaster;

fn harmonic_windows(seq: usize, pred: usize) -> (freqcast::data::WindowSet, freqcast::data::WindowSet, freqcast::data::WindowSet) {
    let spec = SynthSpec::from_json(
        r#"{"components":[{"kind":"harmonics","period":60,"amplitudes":[1.0,0.6,0.4,0.3,0.2]}],"length":2400,"seed":1}"#,
    )
    .unwrap();
    let frame = synth_generate(&spec).unwrap();
    let s = split(&frame, &SplitSpec::standard(), seq).unwrap();
    let (s, _) = standardize(&s).unwrap();
    (
        make_windows(s.train, seq, pred, Mode::S).unwrap(),
        make_windows(s.val, seq, pred, Mode::S).unwrap(),
        make_windows(s.test, seq, pred, Mode::S).unwrap(),
    )
}

#[test]
fn learns_harmonic_mix() {
    let (train, val, test) = harmonic_windows(240, 60);
    let model = Fits::<f64>::new(FitsConfig::new(240, 60, 60, 5)).unwrap();
    let cfg = TrainConfig {
        max_epochs: 15,
        learning_rate: 1e-2,
        ..TrainConfig::default()
    };
    let out = train_two_stage(&model, model.init_params(0), &train, &val, &cfg).unwrap();
    let m = evaluate(&model, &out.params, &test).unwrap();
    assert!(m.mse < 1e-2, "test mse {}", m.mse);
    // Best-validation checkpoints never get worse on validation.
    let mut best = f64::INFINITY;
    for r in &out.history {
        best = best.min(r.val_loss);
    }
    assert_eq!(best.min(out.best_val), out.best_val);
}

#[test]
fn seeded_runs_repeat_exactly() {
    let (train, val, _) = harmonic_windows(120, 30);
    let model = Fits::<f64>::new(FitsConfig::new(120, 30, 60, 3)).unwrap();
    let cfg = TrainConfig {
        max_epochs: 3,
        batch_size: 16,
        seed: 7,
        ..TrainConfig::default()
    };
    let a = train_two_stage(&model, model.init_params(3), &train, &val, &cfg).unwrap();
    let b = train_two_stage(&model, model.init_params(3), &train, &val, &cfg).unwrap();
    assert_eq!(a.history, b.history);
    assert_eq!(a.params, b.params);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("history.jsonl");
    write_history(&path, &a.history).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), a.history.len());
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    for key in ["stage", "epoch", "train_loss", "val_loss", "lr"] {
        assert!(first.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn parallel_degree_does_not_change_results() {
    let (train, val, _) = harmonic_windows(120, 30);
    let model = Fits::<f64>::new(FitsConfig::new(120, 30, 60, 3)).unwrap();
    let cfg = TrainConfig {
        max_epochs: 2,
        batch_size: 32,
        ..TrainConfig::default()
    };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| train_two_stage(&model, model.init_params(1), &train, &val, &cfg).unwrap())
    };
    let (a, b) = (run(1), run(4));
    assert_eq!(a.params, b.params);
}

#[test]
fn zero_residual_batch_has_zero_gradient() {
    // A zero-weight FITS predicts the window mean; a constant series is matched exactly.
    let mut cfg = FitsConfig::new(24, 8, 8, 2);
    cfg.zero_init = true;
    let model = Fits::<f64>::new(cfg).unwrap();
    let set = SpanSet::sliding(&[2.5; 60], 24, 8);
    let samples: Vec<(usize, usize)> = (0..set.n_windows()).map(|w| (w, 0)).collect();
    let (loss, g) = batch_loss_and_grad(&model, &model.init_params(0), &set, &samples, Stage::Combined, None).unwrap();
    assert_eq!(loss, 0.0);
    assert!(g.iter().all(|&v| v == 0.0));
}

#[test]
fn empty_splits_rejected() {
    let model = Fits::<f64>::new(FitsConfig::new(24, 8, 8, 2)).unwrap();
    let set = SpanSet::sliding(&(0..40).map(f64::from).collect::<Vec<_>>(), 24, 8);
    let empty = SpanSet::new(24, 8, vec![]);
    let cfg = TrainConfig::default();
    assert!(train_two_stage(&model, model.init_params(0), &empty, &set, &cfg).is_err());
    assert!(train_two_stage(&model, model.init_params(0), &set, &empty, &cfg).is_err());
}

#[test]
fn lr_halves_each_epoch_when_validation_worsens() {
    // Train and validation sets pull in opposite directions, so validation
    // only worsens and the schedule with zero patience halves every epoch.
    let model = freqcast::linear_models::Linear::<f64>::new(4, 1).unwrap();
    let up: Vec<Vec<Vec<f64>>> = (0..8).map(|_| vec![vec![1.0, 1.0, 1.0, 1.0, 10.0]]).collect();
    let down: Vec<Vec<Vec<f64>>> = (0..8).map(|_| vec![vec![1.0, 1.0, 1.0, 1.0, -10.0]]).collect();
    let train = SpanSet::new(4, 1, up);
    let val = SpanSet::new(4, 1, down);
    let cfg = TrainConfig {
        max_epochs: 6,
        lr_patience: 0,
        early_stop_patience: 100,
        learning_rate: 0.1,
        stages: vec![Stage::Finetune],
        ..TrainConfig::default()
    };
    let out = train_two_stage(&model, vec![0.0; 5], &train, &val, &cfg).unwrap();
    let lrs: Vec<f64> = out.history.iter().map(|r| r.lr).collect();
    // The schedule sees its first value after epoch 0, so halving starts after epoch 1.
    for (k, w) in lrs.windows(2).enumerate().skip(1) {
        assert_eq!(w[1], w[0] * 0.5, "epoch {k}: {lrs:?}");
    }
}
