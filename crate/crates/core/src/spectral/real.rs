//! Real-input transforms and the half spectrum they produce.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::fft::{check_finite, FftPlan};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Non-negative-frequency half of the DFT of a real signal.
///
/// For a spectrum produced by [`rfft`], `bins.len() == source_len / 2 + 1`.
/// Filters may shorten `bins`; the missing high bins are then implicitly zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum<T> {
    pub bins: Vec<Complex<T>>,
    pub source_len: usize,
}

impl<T: Scalar> Spectrum<T> {
    pub fn new(bins: Vec<Complex<T>>, source_len: usize) -> Self {
        Self { bins, source_len }
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    /// Rebuilds the full two-sided spectrum using `X[N-k] = conj(X[k])`.
    pub fn to_full(&self) -> Vec<Complex<T>> {
        let n = self.source_len;
        let mut full = vec![Complex::new(T::zero(), T::zero()); n];
        for (k, &b) in self.bins.iter().enumerate().take(n / 2 + 1) {
            full[k] = b;
            if k > 0 && k < n - k {
                full[n - k] = b.conj();
            }
        }
        full
    }
}

/// Number of bins in the real spectrum of a length-`n` signal.
#[inline]
pub fn half_len(n: usize) -> usize {
    n / 2 + 1
}

/// Cached plan for real forward/inverse transforms of one length.
#[derive(Debug, Clone)]
pub struct RealFftPlan<T> {
    len: usize,
    plan: FftPlan<T>,
}

impl<T: Scalar> RealFftPlan<T> {
    pub fn new(len: usize) -> Result<Self> {
        Ok(Self {
            len,
            plan: FftPlan::new(len)?,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Writes the `len/2 + 1` non-negative-frequency bins of `x` into `out`.
    pub fn forward(&self, x: &[T], out: &mut Vec<Complex<T>>) {
        assert_eq!(x.len(), self.len);
        let mut buf: Vec<Complex<T>> = x.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.plan.forward_in_place(&mut buf);
        buf.truncate(half_len(self.len));
        // DC and Nyquist of a real signal are real.
        buf[0].im = T::zero();
        if self.len % 2 == 0 {
            let last = buf.len() - 1;
            buf[last].im = T::zero();
        }
        *out = buf;
    }

    /// Synthesizes a real signal of the plan length from `bins`
    /// (at most `len/2 + 1`; absent bins are zero). The imaginary parts of the
    /// DC and Nyquist bins do not contribute.
    pub fn inverse(&self, bins: &[Complex<T>], out: &mut Vec<T>) -> Result<()> {
        let n = self.len;
        if bins.len() > half_len(n) {
            return Err(Error::SpectrumTooLong {
                bins: bins.len(),
                out_len: n,
            });
        }
        let mut full = vec![Complex::new(T::zero(), T::zero()); n];
        for (k, &b) in bins.iter().enumerate() {
            if k == 0 || 2 * k == n {
                full[k] = Complex::new(b.re, T::zero());
            } else {
                full[k] = b;
                full[n - k] = b.conj();
            }
        }
        self.plan.inverse_in_place(&mut full);
        out.clear();
        out.extend(full.iter().map(|z| z.re));
        Ok(())
    }
}

impl<T: Scalar> RealFftPlan<T> {
    /// Adjoint of [`RealFftPlan::forward`] restricted to the first `grad.len()`
    /// bins. Takes `dL/dRe(X_k) + i·dL/dIm(X_k)` and returns `dL/dx`.
    pub fn forward_adjoint(&self, grad: &[Complex<T>]) -> Vec<T> {
        let n = self.len;
        let mut buf = vec![Complex::new(T::zero(), T::zero()); n];
        for (k, &g) in grad.iter().enumerate().take(half_len(n)) {
            buf[k] = if k == 0 || 2 * k == n {
                Complex::new(g.re, T::zero())
            } else {
                g
            };
        }
        self.plan.inverse_in_place(&mut buf);
        let scale = T::of_usize(n);
        buf.iter().map(|z| z.re * scale).collect()
    }

    /// Adjoint of [`RealFftPlan::inverse`] for a spectrum of `n_bins` bins.
    /// Takes `dL/dy` and returns `dL/dRe(X_k) + i·dL/dIm(X_k)`.
    pub fn inverse_adjoint(&self, grad: &[T], n_bins: usize) -> Vec<Complex<T>> {
        let n = self.len;
        let mut spec = Vec::new();
        self.forward(grad, &mut spec);
        spec.truncate(n_bins);
        let inv_n = T::one() / T::of_usize(n);
        let two = T::lit(2.0);
        for (k, g) in spec.iter_mut().enumerate() {
            let weight = if k == 0 || 2 * k == n { inv_n } else { two * inv_n };
            *g = *g * weight;
        }
        spec
    }
}

/// Real FFT: the `floor(N/2)+1` non-negative-frequency bins of `x`.
pub fn rfft<T: Scalar>(x: &[T]) -> Result<Spectrum<T>> {
    if x.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "rfft needs at least 2 samples, got {}",
            x.len()
        )));
    }
    check_finite(x.iter().copied())?;
    let plan = RealFftPlan::new(x.len())?;
    let mut bins = Vec::new();
    plan.forward(x, &mut bins);
    Ok(Spectrum::new(bins, x.len()))
}

/// Inverse real FFT to `out_len` samples. Supplying fewer bins than
/// `out_len/2 + 1` zero-pads the spectrum, which upsamples in time.
pub fn irfft<T: Scalar>(spectrum: &Spectrum<T>, out_len: usize) -> Result<Vec<T>> {
    if out_len == 0 {
        return Err(Error::InvalidInput("irfft output length must be positive".into()));
    }
    for (i, z) in spectrum.bins.iter().enumerate() {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite(i));
        }
    }
    let plan = RealFftPlan::new(out_len)?;
    let mut out = Vec::with_capacity(out_len);
    plan.inverse(&spectrum.bins, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bin_count() {
        let x = vec![0.5f64; 720];
        assert_eq!(rfft(&x).unwrap().len(), 361);
        assert_eq!(rfft(&[1.0f64, 2.0, 3.0]).unwrap().len(), 2);
    }

    #[test]
    fn cosine_lands_in_bin_one() {
        let x: Vec<f64> = (0..8)
            .map(|t| (std::f64::consts::TAU * t as f64 / 8.0).cos())
            .collect();
        let s = rfft(&x).unwrap();
        assert!((s.bins[1].re - 4.0).abs() < 1e-12);
        assert!(s.bins[1].im.abs() < 1e-12);
        for (k, b) in s.bins.iter().enumerate() {
            if k != 1 {
                assert!(b.norm() < 1e-12, "bin {k} = {b}");
            }
        }
    }

    #[test]
    fn constant_signal() {
        let s = rfft(&[2.5f64; 10]).unwrap();
        assert_eq!(s.bins[0], Complex::new(25.0, 0.0));
        assert!(s.bins[1..].iter().all(|b| b.norm() < 1e-12));
    }

    #[test]
    fn dc_only_inverse_is_constant() {
        let n = 12;
        let s = Spectrum::new(vec![Complex::new(n as f64, 0.0)], n);
        let y = irfft(&s, n).unwrap();
        assert!(y.iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn too_many_bins() {
        let s = Spectrum::new(vec![Complex::new(1.0f64, 0.0); 5], 8);
        assert!(matches!(irfft(&s, 6), Err(Error::SpectrumTooLong { .. })));
    }

    #[test]
    fn short_input_rejected() {
        assert!(rfft(&[1.0f64]).is_err());
    }

    #[test]
    fn padded_sine_continues_with_scaled_amplitude() {
        // Period-60 sine over 360 samples, resynthesized at 456 samples.
        let l = 360;
        let lo = 456;
        let x: Vec<f64> = (0..l)
            .map(|t| (std::f64::consts::TAU * t as f64 / 60.0).sin())
            .collect();
        let s = rfft(&x).unwrap();
        // Bin 6 of 360 keeps its index, so in 456 samples the period becomes 76.
        let y = irfft(&s, lo).unwrap();
        let scale = l as f64 / lo as f64;
        for (t, v) in y.iter().enumerate() {
            let want = scale * (std::f64::consts::TAU * 6.0 * t as f64 / lo as f64).sin();
            assert!((v - want).abs() < 1e-9);
        }
    }
}
