//! DLinear, NLinear, a plain linear map, and the two DLinear/FITS hybrids.

use std::marker::PhantomData;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fits::{raffine_backward, raffine_forward, Fits, FitsConfig, FitsTape};
use crate::model::Forecaster;
use crate::scalar::Scalar;
use crate::spectral::moving_average;

pub const DEFAULT_KERNEL: usize = 25;

/// Splits `x` into a moving-average trend and the remainder.
pub fn decompose<T: Scalar>(x: &[T], kernel: usize) -> Result<(Vec<T>, Vec<T>)> {
    let trend = moving_average(x, kernel)?;
    let seasonal = x.iter().zip(&trend).map(|(&a, &b)| a - b).collect();
    Ok((trend, seasonal))
}

/// Transpose of the replicate-padded moving average.
fn moving_average_adjoint<T: Scalar>(g: &[T], kernel: usize) -> Vec<T> {
    let n = g.len() as isize;
    let half = (kernel as isize - 1) / 2;
    let k = T::of_usize(kernel);
    let mut out = vec![T::zero(); g.len()];
    for c in 0..n {
        let share = g[c as usize] / k;
        for j in (c - half)..=(c + half) {
            out[j.clamp(0, n - 1) as usize] += share;
        }
    }
    out
}

fn uniform_init<T: Scalar>(rng: &mut ChaCha8Rng, n: usize, fan_in: usize) -> Vec<T> {
    let bound = 1.0 / (fan_in as f64).sqrt();
    (0..n)
        .map(|_| T::lit((rng.random::<f64>() * 2.0 - 1.0) * bound))
        .collect()
}

fn check_window(x: &[usize; 2]) -> Result<()> {
    if x[0] != x[1] {
        return Err(Error::Shape(format!("window of length {} for seq_len {}", x[0], x[1])));
    }
    Ok(())
}

fn check_params(got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::Shape(format!("{got} parameters supplied, model has {want}")));
    }
    Ok(())
}

/// Explicit DLinear weights, row-major `seq_len × out_len`.
#[derive(Debug, Clone, PartialEq)]
pub struct DLinearParams<T> {
    pub seq_len: usize,
    pub out_len: usize,
    pub trend_weights: Vec<T>,
    pub seasonal_weights: Vec<T>,
    pub kernel: usize,
}

impl<T: Scalar> DLinearParams<T> {
    pub fn zeros(seq_len: usize, out_len: usize, kernel: usize) -> Self {
        Self {
            seq_len,
            out_len,
            trend_weights: vec![T::zero(); seq_len * out_len],
            seasonal_weights: vec![T::zero(); seq_len * out_len],
            kernel,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kernel % 2 == 0 {
            return Err(Error::InvalidInput(format!("kernel {} is not odd", self.kernel)));
        }
        let n = self.seq_len * self.out_len;
        if self.trend_weights.len() != n || self.seasonal_weights.len() != n {
            return Err(Error::Shape("trend and seasonal weights must both be seq_len × out_len".into()));
        }
        Ok(())
    }

    /// Flat layout used by [`DLinear`]: trend block then seasonal block.
    pub fn to_flat(&self) -> Vec<T> {
        let mut v = self.trend_weights.clone();
        v.extend_from_slice(&self.seasonal_weights);
        v
    }
}

pub fn dlinear_forward<T: Scalar>(x: &[T], p: &DLinearParams<T>) -> Result<Vec<T>> {
    p.validate()?;
    check_window(&[x.len(), p.seq_len])?;
    let (trend, seasonal) = decompose(x, p.kernel)?;
    let a = raffine_forward(&trend, &p.trend_weights, None, p.out_len);
    let b = raffine_forward(&seasonal, &p.seasonal_weights, None, p.out_len);
    Ok(a.into_iter().zip(b).map(|(u, v)| u + v).collect())
}

/// `(x - x_last)·W + x_last` with `W` row-major `len(x) × pred_len`.
pub fn nlinear_forward<T: Scalar>(x: &[T], w: &[T], pred_len: usize) -> Result<Vec<T>> {
    let last = *x.last().ok_or_else(|| Error::InvalidInput("empty window".into()))?;
    if w.len() != x.len() * pred_len {
        return Err(Error::Shape(format!(
            "weights of length {} for a {}×{pred_len} map",
            w.len(),
            x.len()
        )));
    }
    let shifted: Vec<T> = x.iter().map(|&v| v - last).collect();
    Ok(raffine_forward(&shifted, w, None, pred_len)
        .into_iter()
        .map(|v| v + last)
        .collect())
}

/// Trend/seasonal decomposition followed by one linear map per component.
#[derive(Debug, Clone)]
pub struct DLinear<T> {
    seq_len: usize,
    pred_len: usize,
    out_len: usize,
    kernel: usize,
    _scalar: PhantomData<T>,
}

#[derive(Debug, Clone)]
pub struct DLinearTape<T> {
    trend: Vec<T>,
    seasonal: Vec<T>,
}

impl<T: Scalar> DLinear<T> {
    pub fn new(seq_len: usize, pred_len: usize, kernel: usize) -> Result<Self> {
        Self::with_output(seq_len, pred_len, pred_len, kernel)
    }

    /// DLinear whose output spans `out_len` samples (e.g. backcast + forecast).
    pub fn with_output(seq_len: usize, pred_len: usize, out_len: usize, kernel: usize) -> Result<Self> {
        if seq_len == 0 || pred_len == 0 || out_len < pred_len {
            return Err(Error::InvalidInput(format!(
                "bad DLinear lengths seq {seq_len}, pred {pred_len}, out {out_len}"
            )));
        }
        if kernel % 2 == 0 || kernel > 2 * seq_len - 1 {
            return Err(Error::InvalidInput(format!(
                "kernel {kernel} must be odd and at most {}",
                2 * seq_len - 1
            )));
        }
        Ok(Self {
            seq_len,
            pred_len,
            out_len,
            kernel,
            _scalar: PhantomData,
        })
    }

    pub fn kernel(&self) -> usize {
        self.kernel
    }

    pub fn unpack(&self, params: &[T]) -> DLinearParams<T> {
        let n = self.seq_len * self.out_len;
        DLinearParams {
            seq_len: self.seq_len,
            out_len: self.out_len,
            trend_weights: params[..n].to_vec(),
            seasonal_weights: params[n..2 * n].to_vec(),
            kernel: self.kernel,
        }
    }

    fn run(&self, p: &[T], x: &[T]) -> Result<(Vec<T>, DLinearTape<T>)> {
        let n = self.seq_len * self.out_len;
        let (trend, seasonal) = decompose(x, self.kernel)?;
        let a = raffine_forward(&trend, &p[..n], None, self.out_len);
        let b = raffine_forward(&seasonal, &p[n..2 * n], None, self.out_len);
        let y = a.into_iter().zip(b).map(|(u, v)| u + v).collect();
        Ok((y, DLinearTape { trend, seasonal }))
    }

    fn run_backward(
        &self,
        p: &[T],
        tape: &DLinearTape<T>,
        g: &[T],
        grads: &mut [T],
        want_input: bool,
    ) -> Option<Vec<T>> {
        let n = self.seq_len * self.out_len;
        let (gt, gs) = grads[..2 * n].split_at_mut(n);
        let d_trend = raffine_backward(&tape.trend, &p[..n], g, gt, None, want_input);
        let d_seasonal = raffine_backward(&tape.seasonal, &p[n..2 * n], g, gs, None, want_input);
        let (dt, ds) = (d_trend?, d_seasonal?);
        // seasonal = x - trend, trend = MA(x)
        let diff: Vec<T> = dt.iter().zip(&ds).map(|(&a, &b)| a - b).collect();
        let back = moving_average_adjoint(&diff, self.kernel);
        Some(ds.iter().zip(&back).map(|(&a, &b)| a + b).collect())
    }
}

impl<T: Scalar> Forecaster<T> for DLinear<T> {
    type Tape = DLinearTape<T>;

    fn kind(&self) -> &'static str {
        "dlinear"
    }
    fn seq_len(&self) -> usize {
        self.seq_len
    }
    fn pred_len(&self) -> usize {
        self.pred_len
    }
    fn output_len(&self) -> usize {
        self.out_len
    }
    fn num_params(&self) -> usize {
        2 * self.seq_len * self.out_len
    }
    fn init_params(&self, seed: u64) -> Vec<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        uniform_init(&mut rng, self.num_params(), self.seq_len)
    }
    fn forward(&self, params: &[T], x: &[T], _channel: usize, _dropout_seed: Option<u64>) -> Result<(Vec<T>, DLinearTape<T>)> {
        check_window(&[x.len(), self.seq_len])?;
        check_params(params.len(), self.num_params())?;
        self.run(params, x)
    }
    fn backward(&self, params: &[T], tape: &DLinearTape<T>, grad_out: &[T], grads: &mut [T], want_input_grad: bool) -> Option<Vec<T>> {
        self.run_backward(params, tape, grad_out, grads, want_input_grad)
    }
}

/// Linear map applied to the window shifted by its last value.
#[derive(Debug, Clone)]
pub struct NLinear<T> {
    seq_len: usize,
    pred_len: usize,
    _scalar: PhantomData<T>,
}

impl<T: Scalar> NLinear<T> {
    pub fn new(seq_len: usize, pred_len: usize) -> Result<Self> {
        if seq_len == 0 || pred_len == 0 {
            return Err(Error::InvalidInput("NLinear lengths must be positive".into()));
        }
        Ok(Self {
            seq_len,
            pred_len,
            _scalar: PhantomData,
        })
    }
}

impl<T: Scalar> Forecaster<T> for NLinear<T> {
    type Tape = Vec<T>;

    fn kind(&self) -> &'static str {
        "nlinear"
    }
    fn seq_len(&self) -> usize {
        self.seq_len
    }
    fn pred_len(&self) -> usize {
        self.pred_len
    }
    fn output_len(&self) -> usize {
        self.pred_len
    }
    fn num_params(&self) -> usize {
        self.seq_len * self.pred_len
    }
    fn init_params(&self, seed: u64) -> Vec<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        uniform_init(&mut rng, self.num_params(), self.seq_len)
    }
    fn forward(&self, params: &[T], x: &[T], _channel: usize, _dropout_seed: Option<u64>) -> Result<(Vec<T>, Vec<T>)> {
        check_window(&[x.len(), self.seq_len])?;
        check_params(params.len(), self.num_params())?;
        let last = x[x.len() - 1];
        let shifted: Vec<T> = x.iter().map(|&v| v - last).collect();
        let y = raffine_forward(&shifted, params, None, self.pred_len)
            .into_iter()
            .map(|v| v + last)
            .collect();
        Ok((y, shifted))
    }
    fn backward(&self, params: &[T], tape: &Vec<T>, grad_out: &[T], grads: &mut [T], want_input_grad: bool) -> Option<Vec<T>> {
        let mut dx = raffine_backward(tape, params, grad_out, grads, None, want_input_grad)?;
        let n = dx.len();
        let through_last: T = grad_out.iter().copied().sum::<T>() - dx.iter().copied().sum::<T>();
        dx[n - 1] += through_last;
        Some(dx)
    }
}

/// Single affine map from window to horizon.
#[derive(Debug, Clone)]
pub struct Linear<T> {
    seq_len: usize,
    pred_len: usize,
    _scalar: PhantomData<T>,
}

impl<T: Scalar> Linear<T> {
    pub fn new(seq_len: usize, pred_len: usize) -> Result<Self> {
        if seq_len == 0 || pred_len == 0 {
            return Err(Error::InvalidInput("Linear lengths must be positive".into()));
        }
        Ok(Self {
            seq_len,
            pred_len,
            _scalar: PhantomData,
        })
    }
}

impl<T: Scalar> Forecaster<T> for Linear<T> {
    type Tape = Vec<T>;

    fn kind(&self) -> &'static str {
        "linear"
    }
    fn seq_len(&self) -> usize {
        self.seq_len
    }
    fn pred_len(&self) -> usize {
        self.pred_len
    }
    fn output_len(&self) -> usize {
        self.pred_len
    }
    fn num_params(&self) -> usize {
        self.seq_len * self.pred_len + self.pred_len
    }
    fn init_params(&self, seed: u64) -> Vec<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = uniform_init(&mut rng, self.seq_len * self.pred_len, self.seq_len);
        p.resize(self.num_params(), T::zero());
        p
    }
    fn forward(&self, params: &[T], x: &[T], _channel: usize, _dropout_seed: Option<u64>) -> Result<(Vec<T>, Vec<T>)> {
        check_window(&[x.len(), self.seq_len])?;
        check_params(params.len(), self.num_params())?;
        let n = self.seq_len * self.pred_len;
        Ok((raffine_forward(x, &params[..n], Some(&params[n..]), self.pred_len), x.to_vec()))
    }
    fn backward(&self, params: &[T], tape: &Vec<T>, grad_out: &[T], grads: &mut [T], want_input_grad: bool) -> Option<Vec<T>> {
        let n = self.seq_len * self.pred_len;
        let (gw, gb) = grads.split_at_mut(n);
        raffine_backward(tape, &params[..n], grad_out, gw, Some(gb), want_input_grad)
    }
}

/// DLinear over backcast + forecast, with FITS fitted to what DLinear leaves
/// unexplained in the look-back window. Trained jointly.
#[derive(Debug, Clone)]
pub struct DLinearFits<T> {
    dlinear: DLinear<T>,
    fits: Fits<T>,
}

#[derive(Debug, Clone)]
pub struct DLinearFitsTape<T> {
    dlinear: DLinearTape<T>,
    fits: FitsTape<T>,
}

impl<T: Scalar> DLinearFits<T> {
    pub fn new(fits_cfg: FitsConfig, kernel: usize) -> Result<Self> {
        let fits = Fits::new(fits_cfg)?;
        let (l, h) = (fits.seq_len(), fits.pred_len());
        Ok(Self {
            dlinear: DLinear::with_output(l, h, l + h, kernel)?,
            fits,
        })
    }

    pub fn dlinear(&self) -> &DLinear<T> {
        &self.dlinear
    }

    pub fn fits(&self) -> &Fits<T> {
        &self.fits
    }

    /// Splits a flat parameter vector into its DLinear and FITS parts.
    pub fn split<'a>(&self, params: &'a [T]) -> (&'a [T], &'a [T]) {
        params.split_at(Forecaster::<T>::num_params(&self.dlinear))
    }
}

impl<T: Scalar> Forecaster<T> for DLinearFits<T> {
    type Tape = DLinearFitsTape<T>;

    fn kind(&self) -> &'static str {
        "dlinear_fits"
    }
    fn seq_len(&self) -> usize {
        self.fits.seq_len()
    }
    fn pred_len(&self) -> usize {
        self.fits.pred_len()
    }
    fn output_len(&self) -> usize {
        self.fits.output_len()
    }
    fn num_params(&self) -> usize {
        self.dlinear.num_params() + self.fits.num_params()
    }
    fn init_params(&self, seed: u64) -> Vec<T> {
        let mut p = self.dlinear.init_params(seed);
        p.extend(self.fits.init_params(seed.wrapping_add(1)));
        p
    }
    fn forward(&self, params: &[T], x: &[T], channel: usize, dropout_seed: Option<u64>) -> Result<(Vec<T>, DLinearFitsTape<T>)> {
        check_params(params.len(), self.num_params())?;
        let (pd, pf) = self.split(params);
        let (dl, dtape) = self.dlinear.forward(pd, x, channel, dropout_seed)?;
        let residual: Vec<T> = x.iter().zip(&dl).map(|(&a, &b)| a - b).collect();
        let (f, ftape) = self.fits.forward(pf, &residual, channel, dropout_seed)?;
        let y = dl.iter().zip(&f).map(|(&a, &b)| a + b).collect();
        Ok((y, DLinearFitsTape { dlinear: dtape, fits: ftape }))
    }
    fn backward(&self, params: &[T], tape: &DLinearFitsTape<T>, grad_out: &[T], grads: &mut [T], want_input_grad: bool) -> Option<Vec<T>> {
        let (pd, pf) = self.split(params);
        let (gd, gf) = grads.split_at_mut(pd.len());
        let g_res = self
            .fits
            .backward(pf, &tape.fits, grad_out, gf, true)
            .expect("input gradient requested");
        // dl feeds the output directly and the residual with a minus sign on its first seq_len entries.
        let mut g_dl = grad_out.to_vec();
        for (g, &r) in g_dl.iter_mut().zip(&g_res) {
            *g -= r;
        }
        let gx = self.dlinear.run_backward(pd, &tape.dlinear, &g_dl, gd, want_input_grad)?;
        Some(gx.iter().zip(&g_res).map(|(&a, &b)| a + b).collect())
    }
}

/// FITS first; DLinear then forecasts from the FITS reconstruction of the
/// look-back window.
#[derive(Debug, Clone)]
pub struct FitsDLinear<T> {
    fits: Fits<T>,
    dlinear: DLinear<T>,
}

#[derive(Debug, Clone)]
pub struct FitsDLinearTape<T> {
    fits: FitsTape<T>,
    dlinear: DLinearTape<T>,
}

impl<T: Scalar> FitsDLinear<T> {
    pub fn new(fits_cfg: FitsConfig, kernel: usize) -> Result<Self> {
        let fits = Fits::new(fits_cfg)?;
        let (l, h) = (fits.seq_len(), fits.pred_len());
        Ok(Self {
            dlinear: DLinear::new(l, h, kernel)?,
            fits,
        })
    }

    pub fn fits(&self) -> &Fits<T> {
        &self.fits
    }

    pub fn dlinear(&self) -> &DLinear<T> {
        &self.dlinear
    }

    /// Splits a flat parameter vector into its FITS and DLinear parts.
    pub fn split<'a>(&self, params: &'a [T]) -> (&'a [T], &'a [T]) {
        params.split_at(self.fits.num_params())
    }
}

impl<T: Scalar> Forecaster<T> for FitsDLinear<T> {
    type Tape = FitsDLinearTape<T>;

    fn kind(&self) -> &'static str {
        "fits_dlinear"
    }
    fn seq_len(&self) -> usize {
        self.fits.seq_len()
    }
    fn pred_len(&self) -> usize {
        self.fits.pred_len()
    }
    fn output_len(&self) -> usize {
        self.fits.pred_len()
    }
    fn num_params(&self) -> usize {
        self.fits.num_params() + Forecaster::<T>::num_params(&self.dlinear)
    }
    fn init_params(&self, seed: u64) -> Vec<T> {
        let mut p = self.fits.init_params(seed);
        p.extend(self.dlinear.init_params(seed.wrapping_add(1)));
        p
    }
    fn forward(&self, params: &[T], x: &[T], channel: usize, dropout_seed: Option<u64>) -> Result<(Vec<T>, FitsDLinearTape<T>)> {
        check_params(params.len(), self.num_params())?;
        let (pf, pd) = self.split(params);
        let (f, ftape) = self.fits.forward(pf, x, channel, dropout_seed)?;
        let (y, dtape) = self.dlinear.forward(pd, &f[..self.fits.seq_len()], channel, dropout_seed)?;
        Ok((y, FitsDLinearTape { fits: ftape, dlinear: dtape }))
    }
    fn backward(&self, params: &[T], tape: &FitsDLinearTape<T>, grad_out: &[T], grads: &mut [T], want_input_grad: bool) -> Option<Vec<T>> {
        let (pf, pd) = self.split(params);
        let (gf, gd) = grads.split_at_mut(pf.len());
        let g_back = self
            .dlinear
            .run_backward(pd, &tape.dlinear, grad_out, gd, true)
            .expect("input gradient requested");
        let mut g_f = vec![T::zero(); self.fits.output_len()];
        g_f[..g_back.len()].copy_from_slice(&g_back);
        self.fits.backward(pf, &tape.fits, &g_f, gf, want_input_grad)
    }
}
