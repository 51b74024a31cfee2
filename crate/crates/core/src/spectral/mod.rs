//! Complex FFT, real-signal transforms, and the filters built on them.

mod fft;
mod filter;
mod real;

pub use fft::{fft, ifft, FftPlan};
pub use filter::{high_pass, low_pass, moving_average};
pub use real::{half_len, irfft, rfft, RealFftPlan, Spectrum};

pub use num_complex::Complex;
