use std::f64::consts::PI;

use freqcast::diagnostics::*;
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn gaussian(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Step-by-step rescaled range.
fn rs_oracle(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mut mu = 0.0;
    for v in x {
        mu += v;
    }
    mu /= n;
    let mut z = 0.0;
    let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
    let mut ss = 0.0;
    for v in x {
        z += v - mu;
        hi = hi.max(z);
        lo = lo.min(z);
        ss += (v - mu) * (v - mu);
    }
    (hi - lo) / (ss / n).sqrt()
}

#[test]
fn rescaled_range_examples() {
    assert!((rescaled_range(&[1.0, -1.0, 1.0, -1.0]).unwrap() - 1.0).abs() < 1e-15);
    assert!(rescaled_range(&[4.0; 16]).is_err());
    let x = gaussian(300, 1);
    assert!((rescaled_range(&x).unwrap() - rs_oracle(&x)).abs() < 1e-12);
}

#[test]
fn random_walks_average_half() {
    let hs: Vec<f64> = (0..100)
        .map(|s| hurst(&simulate_random_walk(10_000, 0.0, StepKind::Coin, s)).unwrap().h)
        .collect();
    let mean = hs.iter().sum::<f64>() / hs.len() as f64;
    assert!((0.45..=0.55).contains(&mean), "mean H {mean}");
}

#[test]
fn hurst_report_shape() {
    let r = hurst(&simulate_random_walk(4096, 0.0, StepKind::Gaussian, 3)).unwrap();
    assert!(r.window_sizes.len() >= 4);
    assert!(r.window_sizes.windows(2).all(|w| w[0] < w[1]));
    assert!(r.window_sizes[0] >= MIN_WINDOW);
    assert!(r.rs_values.iter().all(|&v| v > 0.0));
    assert!(hurst(&[1.0; 50]).is_err());
}

#[test]
fn hurst_is_deterministic() {
    let x = simulate_random_walk(2000, 0.1, StepKind::Gaussian, 8);
    assert_eq!(hurst(&x).unwrap(), hurst(&x).unwrap());
    assert_eq!(x, simulate_random_walk(2000, 0.1, StepKind::Gaussian, 8));
}

#[test]
fn sine_acf_peaks_at_period() {
    let m = 25;
    let x: Vec<f64> = (0..20 * m).map(|t| (2.0 * PI * t as f64 / m as f64).sin()).collect();
    let r = acf(&x, m).unwrap();
    assert_eq!(r.rho[0], 1.0);
    assert!((r.rho[m] - 1.0).abs() < 0.02, "rho[m] = {}", r.rho[m]);
    assert_eq!(acf(&x, 0).unwrap().rho, vec![1.0]);
    assert!(acf(&[2.0; 30], 3).is_err());
    assert!(acf(&x, x.len()).is_err());
}

#[test]
fn iid_acf_is_small() {
    let r = acf(&gaussian(10_000, 5), 20).unwrap();
    for k in 1..=20 {
        assert!(r.rho[k].abs() < 0.05, "lag {k}: {}", r.rho[k]);
    }
}

#[test]
fn walk_mean_tracks_drift() {
    let walks = 10_000;
    let at = 999;
    let mean = (0..walks)
        .map(|s| simulate_random_walk(1000, 0.0, StepKind::Coin, s)[at])
        .sum::<f64>()
        / walks as f64;
    assert!(mean.abs() < 2.0, "mean {mean}");

    let n = 200;
    let mut avg = vec![0.0; n];
    for s in 0..500 {
        for (a, v) in avg.iter_mut().zip(simulate_random_walk(n, 0.15, StepKind::Gaussian, s)) {
            *a += v / 500.0;
        }
    }
    let slope = (avg[n - 1] - avg[0]) / (n - 1) as f64;
    assert!((slope - 0.15).abs() < 0.02, "slope {slope}");
    assert!(simulate_random_walk(0, 0.0, StepKind::Coin, 0).is_empty());
}

#[test]
fn ranking_rules() {
    let r = rank_reports(vec![
        ("a".into(), 0.3, 10),
        ("b".into(), 0.5, 10),
        ("c".into(), 0.58, 10),
    ]);
    let order: Vec<f64> = r.iter().map(|s| s.h).collect();
    assert_eq!(order, vec![0.3, 0.58, 0.5]);
    let tie = rank_reports(vec![("short".into(), 0.4, 100), ("long".into(), 0.6, 500)]);
    assert_eq!(tie[0].name, "long");
}

#[test]
fn ranking_pipeline_matches_two_step_oracle() {
    let set: Vec<(String, Vec<f64>)> = (0..4)
        .map(|s| {
            let mut x = simulate_random_walk(1500, 0.0, StepKind::Gaussian, 40 + s);
            for (t, v) in x.iter_mut().enumerate() {
                *v += (s as f64) * (t as f64 * 0.2).sin();
            }
            (format!("s{s}"), x)
        })
        .collect();
    let got = rank_by_hurst_deviation(&set, Some(200)).unwrap();
    let manual = rank_reports(
        set.iter()
            .map(|(n, x)| (n.clone(), hurst(&low_pass_series(x, 200).unwrap()).unwrap().h, x.len()))
            .collect(),
    );
    assert_eq!(got, manual);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hurst_affine_invariant(seed in any::<u64>(), a in prop_oneof![-50.0f64..-0.01, 0.01f64..50.0], b in -1e3f64..1e3) {
        let x = simulate_random_walk(1000, 0.0, StepKind::Gaussian, seed);
        let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let (hx, hy) = (hurst(&x).unwrap().h, hurst(&y).unwrap().h);
        prop_assert!((hx - hy).abs() < 1e-12, "{} vs {}", hx, hy);
    }

    #[test]
    fn acf_affine_invariant_and_bounded(seed in any::<u64>(), a in prop_oneof![-50.0f64..-0.01, 0.01f64..50.0], b in -1e3f64..1e3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..300).map(|t| (t as f64 * 0.1).sin() + rng.random::<f64>()).collect();
        let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let (rx, ry) = (acf(&x, 40).unwrap(), acf(&y, 40).unwrap());
        for k in 0..=40 {
            prop_assert!((rx.raw[k] - ry.raw[k]).abs() < 1e-9);
            prop_assert!(rx.rho[k].abs() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn rescaled_range_matches_oracle(x in prop::collection::vec(-10.0f64..10.0, 8..200)) {
        prop_assume!(x.iter().any(|v| (v - x[0]).abs() > 1e-6));
        let got = rescaled_range(&x).unwrap();
        prop_assert!((got - rs_oracle(&x)).abs() <= 1e-12 * got.max(1.0));
    }
}
