//! Frequency-domain truncation filters and the time-domain moving average.

use num_complex::Complex;

use super::real::Spectrum;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Keeps bins `0..=cutoff_bin` and drops the rest.
pub fn low_pass<T: Scalar>(spectrum: &Spectrum<T>, cutoff_bin: usize) -> Result<Spectrum<T>> {
    if spectrum.bins.is_empty() || cutoff_bin > spectrum.bins.len() - 1 {
        return Err(Error::CutoffOutOfRange {
            cutoff: cutoff_bin,
            bins: spectrum.bins.len(),
        });
    }
    Ok(Spectrum::new(
        spectrum.bins[..=cutoff_bin].to_vec(),
        spectrum.source_len,
    ))
}

/// Zeroes bins below `cutoff_bin`, keeping the spectrum length.
///
/// `low_pass(x, c - 1)` and `high_pass(x, c)` partition the bins of `x`.
pub fn high_pass<T: Scalar>(spectrum: &Spectrum<T>, cutoff_bin: usize) -> Result<Spectrum<T>> {
    if cutoff_bin > spectrum.bins.len() {
        return Err(Error::CutoffOutOfRange {
            cutoff: cutoff_bin,
            bins: spectrum.bins.len(),
        });
    }
    let zero = Complex::new(T::zero(), T::zero());
    let bins = spectrum
        .bins
        .iter()
        .enumerate()
        .map(|(k, &b)| if k < cutoff_bin { zero } else { b })
        .collect();
    Ok(Spectrum::new(bins, spectrum.source_len))
}

/// Centered moving average with replicate padding; output length equals input length.
pub fn moving_average<T: Scalar>(x: &[T], kernel: usize) -> Result<Vec<T>> {
    if kernel == 0 || kernel % 2 == 0 {
        return Err(Error::InvalidInput(format!(
            "moving-average kernel must be odd and positive, got {kernel}"
        )));
    }
    if x.is_empty() {
        return Err(Error::InvalidInput("moving average of empty series".into()));
    }
    if kernel > 2 * x.len() - 1 {
        return Err(Error::InvalidInput(format!(
            "kernel {kernel} too wide for {} samples",
            x.len()
        )));
    }
    let half = (kernel - 1) / 2;
    let n = x.len();
    let at = |i: isize| -> T { x[i.clamp(0, n as isize - 1) as usize] };
    let k = T::of_usize(kernel);
    Ok((0..n as isize)
        .map(|c| {
            let mut s = T::zero();
            for j in (c - half as isize)..=(c + half as isize) {
                s += at(j);
            }
            s / k
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{irfft, rfft};

    #[test]
    fn identity_cutoff() {
        let s = rfft(&[1.0f64, 3.0, -2.0, 0.5, 4.0, 1.0]).unwrap();
        assert_eq!(low_pass(&s, s.len() - 1).unwrap(), s);
        assert_eq!(high_pass(&s, 0).unwrap(), s);
    }

    #[test]
    fn high_pass_everything() {
        let s = rfft(&[1.0f64, 3.0, -2.0, 0.5]).unwrap();
        let h = high_pass(&s, s.len()).unwrap();
        assert_eq!(h.len(), s.len());
        assert!(h.bins.iter().all(|b| b.norm() == 0.0));
        assert!(high_pass(&s, s.len() + 1).is_err());
    }

    #[test]
    fn cutoff_beyond_spectrum() {
        let s = rfft(&[1.0f64, 2.0, 3.0, 4.0]).unwrap();
        assert!(matches!(
            low_pass(&s, 3),
            Err(Error::CutoffOutOfRange { cutoff: 3, bins: 3 })
        ));
    }

    #[test]
    fn low_pass_removes_fast_component() {
        let n = 128;
        let slow: Vec<f64> = (0..n)
            .map(|t| (std::f64::consts::TAU * 2.0 * t as f64 / n as f64).sin())
            .collect();
        let x: Vec<f64> = slow
            .iter()
            .enumerate()
            .map(|(t, s)| s + 0.5 * (std::f64::consts::TAU * 40.0 * t as f64 / n as f64).cos())
            .collect();
        let lp = low_pass(&rfft(&x).unwrap(), 10).unwrap();
        let y = irfft(&lp, n).unwrap();
        for (a, b) in y.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn ma_hand_example() {
        let y = moving_average(&[0.0f64, 0.0, 3.0, 0.0, 0.0], 3).unwrap();
        assert_eq!(y, vec![0.0, 1.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn ma_constant_and_errors() {
        let x = [4.0f64; 7];
        assert_eq!(moving_average(&x, 5).unwrap(), x.to_vec());
        assert!(moving_average(&x, 4).is_err());
        assert!(moving_average(&x, 15).is_err());
        assert!(moving_average(&x, 13).is_ok());
    }
}
