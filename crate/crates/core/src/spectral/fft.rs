//! Complex FFT: iterative radix-2 Cooley-Tukey for power-of-two lengths and
//! Bluestein's chirp-z algorithm for everything else.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
enum Algorithm<T> {
    /// Length 1: the transform is the identity.
    Identity,
    Radix2 {
        /// `exp(-2πik/N)` for `k < N/2`.
        twiddles: Vec<Complex<T>>,
        /// Bit-reversed index for every position.
        reversed: Vec<usize>,
    },
    Bluestein {
        /// `exp(-iπ n²/N)` for `n < N`.
        chirp: Vec<Complex<T>>,
        /// Forward transform of the conjugate chirp filter, length `inner.len()`.
        filter_spectrum: Vec<Complex<T>>,
        inner: Box<FftPlan<T>>,
    },
}

/// Precomputed plan for a complex DFT of a fixed length.
///
/// The forward transform is unnormalized; the inverse carries the `1/N`
/// factor, so `inverse(forward(x)) == x`.
#[derive(Debug, Clone)]
pub struct FftPlan<T> {
    len: usize,
    algorithm: Algorithm<T>,
}

impl<T: Scalar> FftPlan<T> {
    pub fn new(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidInput("fft length must be at least 1".into()));
        }
        if len == 1 {
            return Ok(Self {
                len,
                algorithm: Algorithm::Identity,
            });
        }
        if len.is_power_of_two() {
            return Ok(Self::radix2(len));
        }
        Ok(Self::bluestein(len))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn radix2(len: usize) -> Self {
        let bits = len.trailing_zeros();
        let reversed = (0..len)
            .map(|i| i.reverse_bits() >> (usize::BITS - bits))
            .collect();
        let n = T::of_usize(len);
        let twiddles = (0..len / 2)
            .map(|k| {
                let angle = -T::TAU() * T::of_usize(k) / n;
                Complex::new(angle.cos(), angle.sin())
            })
            .collect();
        Self {
            len,
            algorithm: Algorithm::Radix2 { twiddles, reversed },
        }
    }

    fn bluestein(len: usize) -> Self {
        let inner_len = (2 * len - 1).next_power_of_two();
        let inner = Self::radix2(inner_len);
        let n = T::of_usize(len);
        // n² is reduced modulo 2N so the chirp angle stays small and exact.
        let chirp: Vec<Complex<T>> = (0..len)
            .map(|i| {
                let sq = (i as u128 * i as u128 % (2 * len as u128)) as usize;
                let angle = -T::PI() * T::of_usize(sq) / n;
                Complex::new(angle.cos(), angle.sin())
            })
            .collect();
        let mut filter = vec![Complex::new(T::zero(), T::zero()); inner_len];
        filter[0] = chirp[0].conj();
        for i in 1..len {
            filter[i] = chirp[i].conj();
            filter[inner_len - i] = chirp[i].conj();
        }
        inner.forward_in_place(&mut filter);
        Self {
            len,
            algorithm: Algorithm::Bluestein {
                chirp,
                filter_spectrum: filter,
                inner: Box::new(inner),
            },
        }
    }

    /// Forward transform in place. The buffer length must equal the plan length.
    pub fn forward_in_place(&self, buf: &mut [Complex<T>]) {
        assert_eq!(buf.len(), self.len, "buffer length does not match plan");
        match &self.algorithm {
            Algorithm::Identity => {}
            Algorithm::Radix2 { twiddles, reversed } => radix2_in_place(buf, twiddles, reversed),
            Algorithm::Bluestein {
                chirp,
                filter_spectrum,
                inner,
            } => {
                let m = inner.len;
                let mut work = vec![Complex::new(T::zero(), T::zero()); m];
                for ((w, &x), &c) in work.iter_mut().zip(buf.iter()).zip(chirp) {
                    *w = x * c;
                }
                inner.forward_in_place(&mut work);
                for (w, &f) in work.iter_mut().zip(filter_spectrum) {
                    *w = *w * f;
                }
                // Inverse of the inner transform via conjugation.
                for w in work.iter_mut() {
                    *w = w.conj();
                }
                inner.forward_in_place(&mut work);
                let scale = T::one() / T::of_usize(m);
                for ((out, w), &c) in buf.iter_mut().zip(&work).zip(chirp) {
                    *out = w.conj() * c * scale;
                }
            }
        }
    }

    /// Inverse transform (with `1/N`) in place.
    pub fn inverse_in_place(&self, buf: &mut [Complex<T>]) {
        for v in buf.iter_mut() {
            *v = v.conj();
        }
        self.forward_in_place(buf);
        let scale = T::one() / T::of_usize(self.len);
        for v in buf.iter_mut() {
            *v = v.conj() * scale;
        }
    }
}

fn radix2_in_place<T: Scalar>(buf: &mut [Complex<T>], twiddles: &[Complex<T>], reversed: &[usize]) {
    let n = buf.len();
    for i in 0..n {
        let j = reversed[i];
        if i < j {
            buf.swap(i, j);
        }
    }
    let mut half = 1;
    while half < n {
        let span = half * 2;
        let stride = n / span;
        for start in (0..n).step_by(span) {
            for k in 0..half {
                let w = twiddles[k * stride];
                let even = buf[start + k];
                let odd = buf[start + k + half] * w;
                buf[start + k] = even + odd;
                buf[start + k + half] = even - odd;
            }
        }
        half = span;
    }
}

pub(crate) fn check_finite<T: Scalar>(values: impl IntoIterator<Item = T>) -> Result<()> {
    for (i, v) in values.into_iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite(i));
        }
    }
    Ok(())
}

fn check_complex<T: Scalar>(x: &[Complex<T>]) -> Result<()> {
    for (i, z) in x.iter().enumerate() {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite(i));
        }
    }
    Ok(())
}

/// Discrete Fourier transform of an arbitrary-length complex vector.
pub fn fft<T: Scalar>(x: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    check_complex(x)?;
    let plan = FftPlan::new(x.len())?;
    let mut out = x.to_vec();
    plan.forward_in_place(&mut out);
    Ok(out)
}

/// Inverse DFT including the `1/N` normalization.
pub fn ifft<T: Scalar>(x: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    check_complex(x)?;
    let plan = FftPlan::new(x.len())?;
    let mut out = x.to_vec();
    plan.inverse_in_place(&mut out);
    Ok(out)
}
