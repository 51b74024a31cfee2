use std::f64::consts::PI;

use freqcast::spectral::*;
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex<f64>;

fn naive_dft(x: &[C]) -> Vec<C> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(t, &v)| v * C::from_polar(1.0, -2.0 * PI * ((k * t) % n) as f64 / n as f64))
                .sum()
        })
        .collect()
}

fn max_abs(v: &[C]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn rel_err(a: &[C], b: &[C]) -> f64 {
    let d: Vec<C> = a.iter().zip(b).map(|(u, v)| u - v).collect();
    max_abs(&d) / max_abs(b).max(1e-300)
}

fn random_complex(n: usize, rng: &mut ChaCha8Rng) -> Vec<C> {
    (0..n)
        .map(|_| C::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0))
        .collect()
}

#[test]
fn fft_matches_naive_dft_up_to_64() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for case in 0..200 {
        let n = case % 64 + 1;
        let x = random_complex(n, &mut rng);
        let err = rel_err(&fft(&x).unwrap(), &naive_dft(&x));
        assert!(err <= 1e-10, "length {n}: relative error {err:e}");
    }
}

#[test]
fn fft_small_examples() {
    let ones = vec![C::new(1.0, 0.0); 4];
    assert!(rel_err(&fft(&ones).unwrap(), &[C::new(4.0, 0.0), C::default(), C::default(), C::default()]) < 1e-15);
    let impulse = [C::new(1.0, 0.0), C::default(), C::default(), C::default()];
    assert!(rel_err(&fft(&impulse).unwrap(), &ones) < 1e-15);
    let back = ifft(&[C::new(4.0, 0.0), C::default(), C::default(), C::default()]).unwrap();
    assert!(rel_err(&back, &ones) < 1e-15);
    assert!(max_abs(&ifft(&[C::default(); 4]).unwrap()) == 0.0);
}

#[test]
fn rfft_examples() {
    assert_eq!(rfft(&vec![0.5; 720]).unwrap().len(), 361);
    let cos: Vec<f64> = (0..8).map(|t| (2.0 * PI * t as f64 / 8.0).cos()).collect();
    let s = rfft(&cos).unwrap();
    for (k, z) in s.bins.iter().enumerate() {
        let want = if k == 1 { C::new(4.0, 0.0) } else { C::default() };
        assert!((z - want).norm() < 1e-12, "bin {k}: {z}");
    }
    let c = rfft(&[3.0; 10]).unwrap();
    assert!((c.bins[0] - C::new(30.0, 0.0)).norm() < 1e-12);
    assert!(c.bins[1..].iter().all(|z| z.norm() < 1e-12));
    let flat = irfft(&Spectrum::new(vec![C::new(6.0, 0.0)], 6), 6).unwrap();
    assert!(flat.iter().all(|v| (v - 1.0).abs() < 1e-15));
}

#[test]
fn low_pass_keeps_the_smooth_component() {
    let n = 360;
    let smooth: Vec<f64> = (0..n).map(|t| (2.0 * PI * 3.0 * t as f64 / n as f64).sin()).collect();
    let mixed: Vec<f64> = smooth
        .iter()
        .enumerate()
        .map(|(t, v)| v + 0.5 * (2.0 * PI * 40.0 * t as f64 / n as f64).cos())
        .collect();
    let s = rfft(&mixed).unwrap();
    let low = low_pass(&s, 10).unwrap();
    assert_eq!(low.len(), 11);
    let back = irfft(&low, n).unwrap();
    for (a, b) in back.iter().zip(&smooth) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn moving_average_examples() {
    assert_eq!(moving_average(&[0.0, 0.0, 3.0, 0.0, 0.0], 3).unwrap(), vec![0.0, 1.0, 1.0, 1.0, 0.0]);
    assert_eq!(moving_average(&[2.5; 13], 25).unwrap(), vec![2.5; 13]);
    let var = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64
    };
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..200).map(|_| rng.random::<f64>() - 0.5).collect();
        assert!(var(&moving_average(&x, 25).unwrap()) < var(&x));
    }
}

fn real_vec(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0f64..100.0, 2..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fft_roundtrip(n in 1usize..=128, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_complex(n, &mut rng);
        let back = ifft(&fft(&x).unwrap()).unwrap();
        prop_assert!(rel_err(&back, &x) <= 1e-9);
    }

    #[test]
    fn rfft_roundtrip(x in real_vec(400)) {
        let back = irfft(&rfft(&x).unwrap(), x.len()).unwrap();
        let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (a, b) in back.iter().zip(&x) {
            prop_assert!((a - b).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn parseval(x in real_vec(300)) {
        let n = x.len();
        let s = rfft(&x).unwrap();
        let energy: f64 = x.iter().map(|v| v * v).sum();
        let mut spec = s.bins[0].norm_sqr();
        for k in 1..s.len() {
            let w = if n % 2 == 0 && k == n / 2 { 1.0 } else { 2.0 };
            spec += w * s.bins[k].norm_sqr();
        }
        spec /= n as f64;
        prop_assert!((energy - spec).abs() <= 1e-8 * energy.max(1e-12));
    }

    #[test]
    fn rfft_is_half_of_fft_and_conjugate_symmetric(x in real_vec(100)) {
        let s = rfft(&x).unwrap();
        let full: Vec<C> = x.iter().map(|&v| C::new(v, 0.0)).collect();
        let f = fft(&full).unwrap();
        prop_assert!(rel_err(&s.bins, &f[..s.len()]) <= 1e-12);
        prop_assert_eq!(s.bins[0].im, 0.0);
        let back = ifft(&s.to_full()).unwrap();
        for (z, v) in back.iter().zip(&x) {
            prop_assert!(z.im.abs() < 1e-10 * (1.0 + v.abs()));
            prop_assert!((z.re - v).abs() < 1e-9 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn filters_split_the_spectrum(x in real_vec(200), frac in 0.0f64..1.0) {
        let s = rfft(&x).unwrap();
        let cut = ((s.len() - 1) as f64 * frac) as usize;
        let low = low_pass(&s, cut).unwrap();
        prop_assert_eq!(&low_pass(&low, cut).unwrap().bins, &low.bins);
        let high = high_pass(&s, cut + 1).unwrap();
        let n = x.len();
        let mut padded = low.bins.clone();
        padded.resize(s.len(), C::default());
        let a = irfft(&Spectrum::new(padded, n), n).unwrap();
        let b = irfft(&high, n).unwrap();
        let whole = irfft(&s, n).unwrap();
        for i in 0..n {
            prop_assert!((a[i] + b[i] - whole[i]).abs() <= 1e-9 * (1.0 + whole[i].abs()));
        }
    }
}
