//! The FITS forecaster and its deep variants.

use num_complex::Complex;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::activation::{c_relu, c_relu_backward, dropout_mask, mod_relu, mod_relu_backward};
use super::config::{ChannelMode, FitsConfig, Variant};
use super::layers::{caffine_backward, caffine_forward, raffine_backward, raffine_forward, ComplexMatrix};
use super::norm::InstanceStats;
use crate::error::{Error, Result};
use crate::model::Forecaster;
use crate::scalar::Scalar;
use crate::spectral::RealFftPlan;

/// One affine layer inside a parameter group. Bias, when present, directly
/// follows the weights.
#[derive(Debug, Clone, Copy)]
struct Block {
    off: usize,
    n_in: usize,
    n_out: usize,
    bias: bool,
    complex: bool,
}

impl Block {
    fn weight_len(&self) -> usize {
        let w = self.n_in * self.n_out;
        if self.complex {
            2 * w
        } else {
            w
        }
    }

    fn bias_len(&self) -> usize {
        match (self.bias, self.complex) {
            (false, _) => 0,
            (true, true) => 2 * self.n_out,
            (true, false) => self.n_out,
        }
    }

    fn len(&self) -> usize {
        self.weight_len() + self.bias_len()
    }

    fn weights<'a, T>(&self, p: &'a [T]) -> &'a [T] {
        &p[self.off..self.off + self.weight_len()]
    }

    fn bias_of<'a, T>(&self, p: &'a [T]) -> Option<&'a [T]> {
        self.bias.then(|| {
            let s = self.off + self.weight_len();
            &p[s..s + self.bias_len()]
        })
    }

    fn grads_mut<'a, T>(&self, g: &'a mut [T]) -> (&'a mut [T], Option<&'a mut [T]>) {
        let (w, rest) = g[self.off..self.off + self.len()].split_at_mut(self.weight_len());
        (w, self.bias.then_some(rest))
    }
}

#[derive(Debug, Clone, Default)]
struct Layout {
    complex: Vec<Block>,
    /// ModReLU thresholds, one vector per hidden complex layer.
    act_bias: Vec<usize>,
    real: Vec<Block>,
    mlp: Vec<Block>,
    bypass: Option<Block>,
    beta: Option<usize>,
    group_size: usize,
}

struct LayoutBuilder {
    next: usize,
}

impl LayoutBuilder {
    fn block(&mut self, n_in: usize, n_out: usize, bias: bool, complex: bool) -> Block {
        let b = Block {
            off: self.next,
            n_in,
            n_out,
            bias,
            complex,
        };
        self.next += b.len();
        b
    }

    fn chain(&mut self, n_in: usize, hidden: usize, depth: usize, n_out: usize, bias: bool, complex: bool) -> Vec<Block> {
        if depth == 0 {
            return vec![self.block(n_in, n_out, bias, complex)];
        }
        let mut v = vec![self.block(n_in, hidden, bias, complex)];
        for _ in 1..depth {
            v.push(self.block(hidden, hidden, bias, complex));
        }
        v.push(self.block(hidden, n_out, bias, complex));
        v
    }

    fn scalars(&mut self, n: usize) -> usize {
        let o = self.next;
        self.next += n;
        o
    }
}

impl Layout {
    fn build(cfg: &FitsConfig) -> Self {
        let (ib, ob, h, d) = (cfg.in_bins(), cfg.out_bins(), cfg.hidden, cfg.depth);
        let mut b = LayoutBuilder { next: 0 };
        let mut l = Layout::default();
        match cfg.variant {
            Variant::Plain | Variant::DeepAfterUpscaler | Variant::Bypass => {
                l.complex = vec![b.block(ib, ob, cfg.bias, true)];
            }
            Variant::DeepModrelu | Variant::DeepCrelu => {
                l.complex = b.chain(ib, h, d, ob, cfg.bias, true);
            }
            Variant::RealDeep => {
                l.real = b.chain(2 * ib, h, d, 2 * ob, cfg.bias, false);
            }
        }
        if cfg.variant == Variant::DeepModrelu {
            let hidden_layers = l.complex.len() - 1;
            l.act_bias = (0..hidden_layers).map(|_| b.scalars(h)).collect();
        }
        if cfg.variant == Variant::DeepAfterUpscaler && d > 0 {
            let lo = cfg.output_len();
            l.mlp = b.chain(lo, h, d, lo, true, false);
        }
        if cfg.variant == Variant::Bypass {
            l.bypass = Some(b.block(cfg.seq_len, cfg.output_len(), true, false));
            l.beta = Some(b.scalars(1));
        }
        l.group_size = b.next;
        l
    }
}

/// Frequency-interpolation forecaster: normalize, rFFT, low-pass, complex
/// linear interpolation of the spectrum, irFFT at the output length, denormalize.
#[derive(Debug, Clone)]
pub struct Fits<T> {
    cfg: FitsConfig,
    layout: Layout,
    in_plan: RealFftPlan<T>,
    out_plan: RealFftPlan<T>,
}

/// State kept from a forward pass for backpropagation.
#[derive(Debug, Clone)]
pub struct FitsTape<T> {
    group: usize,
    stats: InstanceStats<T>,
    x_norm: Vec<T>,
    c_inputs: Vec<Vec<Complex<T>>>,
    c_pre: Vec<Vec<Complex<T>>>,
    masks: Vec<Vec<T>>,
    r_inputs: Vec<Vec<T>>,
    r_pre: Vec<Vec<T>>,
    fits_time: Vec<T>,
    mlp_inputs: Vec<Vec<T>>,
    mlp_pre: Vec<Vec<T>>,
    linear: Vec<T>,
    beta: T,
    y_norm: Vec<T>,
}

impl<T: Scalar> FitsTape<T> {
    pub fn stats(&self) -> &InstanceStats<T> {
        &self.stats
    }

    /// Model output in normalized coordinates (before denormalization).
    pub fn normalized_output(&self) -> &[T] {
        &self.y_norm
    }
}

fn sigmoid<T: Scalar>(v: T) -> T {
    T::one() / (T::one() + (-v).exp())
}

fn relu_inplace<T: Scalar>(v: &mut [T]) {
    for x in v {
        if *x < T::zero() {
            *x = T::zero();
        }
    }
}

fn mlp_forward<T: Scalar>(
    p: &[T],
    layers: &[Block],
    x: Vec<T>,
    inputs: &mut Vec<Vec<T>>,
    pre: &mut Vec<Vec<T>>,
) -> Vec<T> {
    let mut h = x;
    for (l, blk) in layers.iter().enumerate() {
        let mut z = raffine_forward(&h, blk.weights(p), blk.bias_of(p), blk.n_out);
        inputs.push(h);
        if l + 1 < layers.len() {
            pre.push(z.clone());
            relu_inplace(&mut z);
        }
        h = z;
    }
    h
}

fn mlp_backward<T: Scalar>(
    p: &[T],
    layers: &[Block],
    inputs: &[Vec<T>],
    pre: &[Vec<T>],
    mut g: Vec<T>,
    grads: &mut [T],
    want_input: bool,
) -> Option<Vec<T>> {
    for l in (0..layers.len()).rev() {
        if l + 1 < layers.len() {
            for (gi, &z) in g.iter_mut().zip(&pre[l]) {
                if z <= T::zero() {
                    *gi = T::zero();
                }
            }
        }
        let blk = layers[l];
        let (gw, gb) = blk.grads_mut(grads);
        match raffine_backward(&inputs[l], blk.weights(p), &g, gw, gb, l > 0 || want_input) {
            Some(next) => g = next,
            None => return None,
        }
    }
    Some(g)
}

fn interleave<T: Scalar>(z: &[Complex<T>]) -> Vec<T> {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

fn deinterleave<T: Scalar>(v: &[T]) -> Vec<Complex<T>> {
    v.chunks_exact(2).map(|p| Complex::new(p[0], p[1])).collect()
}

impl<T: Scalar> Fits<T> {
    pub fn new(cfg: FitsConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            layout: Layout::build(&cfg),
            in_plan: RealFftPlan::new(cfg.seq_len)?,
            out_plan: RealFftPlan::new(cfg.output_len())?,
            cfg,
        })
    }

    pub fn config(&self) -> &FitsConfig {
        &self.cfg
    }

    pub fn group_size(&self) -> usize {
        self.layout.group_size
    }

    fn group_of(&self, channel: usize) -> Result<usize> {
        match self.cfg.channel_mode {
            ChannelMode::Shared => Ok(0),
            ChannelMode::Individual if channel < self.cfg.channels => Ok(channel),
            ChannelMode::Individual => Err(Error::Shape(format!(
                "channel {channel} outside {} individual groups",
                self.cfg.channels
            ))),
        }
    }

    fn group<'a>(&self, params: &'a [T], g: usize) -> &'a [T] {
        let s = self.layout.group_size;
        &params[g * s..(g + 1) * s]
    }

    /// First frequency layer of a group as a matrix (`in_bins × out_bins` for
    /// the plain model).
    pub fn freq_weights(&self, params: &[T], group: usize) -> Option<ComplexMatrix<T>> {
        let blk = self.layout.complex.first()?;
        Some(ComplexMatrix::from_interleaved(
            blk.n_in,
            blk.n_out,
            blk.weights(self.group(params, group)),
        ))
    }

    /// Current bypass mixing weight β of a group.
    pub fn beta(&self, params: &[T], group: usize) -> Option<T> {
        self.layout.beta.map(|o| sigmoid(self.group(params, group)[o]))
    }

    /// Forecasts every channel of a batch; `windows[c]` is channel `c`.
    pub fn forward_batch(&self, params: &[T], windows: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
        windows
            .iter()
            .enumerate()
            .map(|(c, w)| self.predict(params, w, c))
            .collect()
    }

    fn frequency_path(
        &self,
        p: &[T],
        spec: Vec<Complex<T>>,
        dropout_seed: Option<u64>,
        tape: &mut FitsTape<T>,
    ) -> Vec<Complex<T>> {
        if !self.layout.real.is_empty() {
            let v = mlp_forward(p, &self.layout.real, interleave(&spec), &mut tape.r_inputs, &mut tape.r_pre);
            return deinterleave(&v);
        }
        let layers = &self.layout.complex;
        let training = dropout_seed.is_some() && self.cfg.dropout_p > 0.0;
        let mut rng = dropout_seed.map(ChaCha8Rng::seed_from_u64);
        let mut h = spec;
        for (l, blk) in layers.iter().enumerate() {
            let mut z = caffine_forward(&h, blk.weights(p), blk.bias_of(p), blk.n_out);
            tape.c_inputs.push(h);
            if l + 1 < layers.len() {
                tape.c_pre.push(z.clone());
                match self.cfg.variant {
                    Variant::DeepModrelu => {
                        let b = &p[self.layout.act_bias[l]..self.layout.act_bias[l] + blk.n_out];
                        for (zj, &bj) in z.iter_mut().zip(b) {
                            *zj = mod_relu(*zj, bj);
                        }
                    }
                    _ => {
                        for zj in z.iter_mut() {
                            *zj = c_relu(*zj);
                        }
                    }
                }
                if training {
                    let mask: Vec<T> = dropout_mask(z.len(), self.cfg.dropout_p, rng.as_mut().expect("rng"));
                    for (zj, &m) in z.iter_mut().zip(&mask) {
                        *zj = *zj * m;
                    }
                    tape.masks.push(mask);
                }
            }
            h = z;
        }
        h
    }

    fn frequency_path_backward(
        &self,
        p: &[T],
        tape: &FitsTape<T>,
        g_out: Vec<Complex<T>>,
        grads: &mut [T],
        want_input: bool,
    ) -> Option<Vec<Complex<T>>> {
        if !self.layout.real.is_empty() {
            let g = mlp_backward(p, &self.layout.real, &tape.r_inputs, &tape.r_pre, interleave(&g_out), grads, want_input);
            return g.map(|v| deinterleave(&v));
        }
        let layers = &self.layout.complex;
        let mut g = g_out;
        for l in (0..layers.len()).rev() {
            let blk = layers[l];
            if l + 1 < layers.len() {
                if let Some(mask) = tape.masks.get(l) {
                    for (gj, &m) in g.iter_mut().zip(mask) {
                        *gj = *gj * m;
                    }
                }
                let pre = &tape.c_pre[l];
                match self.cfg.variant {
                    Variant::DeepModrelu => {
                        let bo = self.layout.act_bias[l];
                        for j in 0..g.len() {
                            let (dz, db) = mod_relu_backward(pre[j], p[bo + j], g[j]);
                            grads[bo + j] += db;
                            g[j] = dz;
                        }
                    }
                    _ => {
                        for (gj, &z) in g.iter_mut().zip(pre) {
                            *gj = c_relu_backward(z, *gj);
                        }
                    }
                }
            }
            let (gw, gb) = blk.grads_mut(grads);
            match caffine_backward(&tape.c_inputs[l], blk.weights(p), &g, gw, gb, l > 0 || want_input) {
                Some(next) => g = next,
                None => return None,
            }
        }
        Some(g)
    }

    fn init_group(&self, rng: &mut ChaCha8Rng, out: &mut [T]) {
        let uniform = |rng: &mut ChaCha8Rng, bound: f64| T::lit((rng.random::<f64>() * 2.0 - 1.0) * bound);
        let freq_zero = self.cfg.zero_init;
        for blk in &self.layout.complex {
            let bound = 1.0 / blk.n_in as f64;
            for v in &mut out[blk.off..blk.off + blk.weight_len()] {
                *v = if freq_zero { T::zero() } else { uniform(rng, bound) };
            }
        }
        for blk in &self.layout.real {
            let bound = 1.0 / blk.n_in as f64;
            for v in &mut out[blk.off..blk.off + blk.weight_len()] {
                *v = if freq_zero { T::zero() } else { uniform(rng, bound) };
            }
        }
        for blk in self.layout.mlp.iter().chain(self.layout.bypass.iter()) {
            let bound = 1.0 / (blk.n_in as f64).sqrt();
            for v in &mut out[blk.off..blk.off + blk.weight_len()] {
                *v = uniform(rng, bound);
            }
        }
        // Biases, ModReLU thresholds and the β logit start at zero.
    }
}

impl<T: Scalar> Forecaster<T> for Fits<T> {
    type Tape = FitsTape<T>;

    fn kind(&self) -> &'static str {
        match self.cfg.variant {
            Variant::Plain => "fits",
            Variant::DeepModrelu => "deep_fits_modrelu",
            Variant::DeepCrelu => "deep_fits_crelu",
            Variant::DeepAfterUpscaler => "deep_fits_after_upscaler",
            Variant::RealDeep => "real_deep_fits",
            Variant::Bypass => "fits_bypass",
        }
    }

    fn seq_len(&self) -> usize {
        self.cfg.seq_len
    }

    fn pred_len(&self) -> usize {
        self.cfg.pred_len
    }

    fn output_len(&self) -> usize {
        self.cfg.output_len()
    }

    fn num_params(&self) -> usize {
        self.layout.group_size * self.cfg.groups()
    }

    fn init_params(&self, seed: u64) -> Vec<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = vec![T::zero(); self.num_params()];
        for chunk in params.chunks_mut(self.layout.group_size.max(1)) {
            self.init_group(&mut rng, chunk);
        }
        params
    }

    fn forward(
        &self,
        params: &[T],
        x: &[T],
        channel: usize,
        dropout_seed: Option<u64>,
    ) -> Result<(Vec<T>, FitsTape<T>)> {
        if x.len() != self.cfg.seq_len {
            return Err(Error::Shape(format!(
                "window of length {} for seq_len {}",
                x.len(),
                self.cfg.seq_len
            )));
        }
        if params.len() != self.num_params() {
            return Err(Error::Shape(format!(
                "{} parameters supplied, model has {}",
                params.len(),
                self.num_params()
            )));
        }
        let group = self.group_of(channel)?;
        let p = self.group(params, group);
        let stats = InstanceStats::of(x);
        let x_norm: Vec<T> = x.iter().map(|&v| (v - stats.mean) / stats.std).collect();
        let mut tape = FitsTape {
            group,
            stats,
            x_norm,
            c_inputs: Vec::new(),
            c_pre: Vec::new(),
            masks: Vec::new(),
            r_inputs: Vec::new(),
            r_pre: Vec::new(),
            fits_time: Vec::new(),
            mlp_inputs: Vec::new(),
            mlp_pre: Vec::new(),
            linear: Vec::new(),
            beta: T::zero(),
            y_norm: Vec::new(),
        };

        let mut spec = Vec::new();
        self.in_plan.forward(&tape.x_norm, &mut spec);
        spec.truncate(self.cfg.in_bins());

        let mut out_spec = self.frequency_path(p, spec, dropout_seed, &mut tape);
        let eta = T::lit(self.cfg.eta());
        for z in out_spec.iter_mut() {
            *z = *z * eta;
        }
        let mut fits_time = Vec::with_capacity(self.cfg.output_len());
        self.out_plan.inverse(&out_spec, &mut fits_time)?;

        let y_norm = match self.cfg.variant {
            Variant::DeepAfterUpscaler if !self.layout.mlp.is_empty() => {
                let delta = mlp_forward(p, &self.layout.mlp, fits_time.clone(), &mut tape.mlp_inputs, &mut tape.mlp_pre);
                fits_time.iter().zip(&delta).map(|(&a, &b)| a + b).collect()
            }
            Variant::Bypass => {
                let blk = self.layout.bypass.expect("bypass block");
                let linear = raffine_forward(&tape.x_norm, blk.weights(p), blk.bias_of(p), blk.n_out);
                let beta = sigmoid(p[self.layout.beta.expect("beta")]);
                let y = bypass_mix(&fits_time, &linear, beta)?;
                tape.linear = linear;
                tape.beta = beta;
                y
            }
            _ => fits_time.clone(),
        };
        tape.fits_time = fits_time;
        let out = y_norm.iter().map(|&v| v * stats.std + stats.mean).collect();
        tape.y_norm = y_norm;
        Ok((out, tape))
    }

    fn backward(
        &self,
        params: &[T],
        tape: &FitsTape<T>,
        grad_out: &[T],
        grads: &mut [T],
        want_input_grad: bool,
    ) -> Option<Vec<T>> {
        let s = self.layout.group_size;
        let p = self.group(params, tape.group);
        let gp = &mut grads[tape.group * s..(tape.group + 1) * s];
        let sigma = tape.stats.std;
        let gy: Vec<T> = grad_out.iter().map(|&g| g * sigma).collect();

        // d loss / d normalized input collected from the bypass branch.
        let mut g_xnorm_direct: Option<Vec<T>> = None;
        let g_time: Vec<T> = match self.cfg.variant {
            Variant::DeepAfterUpscaler if !self.layout.mlp.is_empty() => {
                let g_mlp = mlp_backward(p, &self.layout.mlp, &tape.mlp_inputs, &tape.mlp_pre, gy.clone(), gp, true)
                    .expect("input gradient requested");
                gy.iter().zip(&g_mlp).map(|(&a, &b)| a + b).collect()
            }
            Variant::Bypass => {
                let beta = tape.beta;
                let blk = self.layout.bypass.expect("bypass block");
                let g_lin: Vec<T> = gy.iter().map(|&g| g * beta).collect();
                let dbeta: T = gy
                    .iter()
                    .zip(tape.linear.iter().zip(&tape.fits_time))
                    .map(|(&g, (&l, &f))| g * (l - f))
                    .sum();
                gp[self.layout.beta.expect("beta")] += dbeta * beta * (T::one() - beta);
                let (gw, gb) = blk.grads_mut(gp);
                g_xnorm_direct = raffine_backward(&tape.x_norm, blk.weights(p), &g_lin, gw, gb, want_input_grad);
                gy.iter().map(|&g| g * (T::one() - beta)).collect()
            }
            _ => gy.clone(),
        };

        let eta = T::lit(self.cfg.eta());
        let mut g_spec = self.out_plan.inverse_adjoint(&g_time, self.cfg.out_bins());
        for z in g_spec.iter_mut() {
            *z = *z * eta;
        }
        let g_in_spec = self.frequency_path_backward(p, tape, g_spec, gp, want_input_grad);
        if !want_input_grad {
            return None;
        }
        let mut g_xnorm = self.in_plan.forward_adjoint(&g_in_spec.expect("input gradient requested"));
        if let Some(extra) = g_xnorm_direct {
            for (a, b) in g_xnorm.iter_mut().zip(extra) {
                *a += b;
            }
        }

        // Back through x_norm = (x - mean) / std and out = y_norm * std + mean.
        let n = T::of_usize(self.cfg.seq_len);
        let sum_g: T = grad_out.iter().copied().sum();
        let sum_gx: T = g_xnorm.iter().copied().sum();
        let d_mean = sum_g - sum_gx / sigma;
        let d_std = if tape.stats.is_floored() {
            T::zero()
        } else {
            let direct: T = grad_out.iter().zip(&tape.y_norm).map(|(&g, &y)| g * y).sum();
            let through: T = g_xnorm.iter().zip(&tape.x_norm).map(|(&g, &x)| g * x).sum();
            direct - through / sigma
        };
        Some(
            g_xnorm
                .iter()
                .zip(&tape.x_norm)
                .map(|(&g, &xn)| g / sigma + d_mean / n + d_std * xn / n)
                .collect(),
        )
    }
}

/// `(1 - β)·fits_out + β·linear_out`, elementwise.
pub fn bypass_mix<T: Scalar>(fits_out: &[T], linear_out: &[T], beta: T) -> Result<Vec<T>> {
    if fits_out.len() != linear_out.len() {
        return Err(Error::Shape(format!(
            "bypass mix of lengths {} and {}",
            fits_out.len(),
            linear_out.len()
        )));
    }
    if !(beta >= T::zero() && beta <= T::one()) {
        return Err(Error::InvalidInput(format!("beta {beta} outside [0, 1]")));
    }
    Ok(fits_out
        .iter()
        .zip(linear_out)
        .map(|(&f, &l)| (T::one() - beta) * f + beta * l)
        .collect())
}

/// Takes every `factor`-th sample starting at index 0.
pub fn downsample<T: Scalar>(x: &[T], factor: usize) -> Result<Vec<T>> {
    if factor == 0 || x.len() % factor != 0 {
        return Err(Error::InvalidInput(format!(
            "window length {} not divisible by downsample factor {factor}",
            x.len()
        )));
    }
    Ok(x.iter().step_by(factor).copied().collect())
}

/// Reconstructs a full-rate window from its `factor`-downsampled version.
/// `model` must be configured by [`FitsConfig::for_reconstruction`].
pub fn fits_reconstruct<T: Scalar>(x: &[T], factor: usize, model: &Fits<T>, params: &[T]) -> Result<Vec<T>> {
    let low = downsample(x, factor)?;
    if model.output_len() != x.len() || model.seq_len() != low.len() {
        return Err(Error::Shape(format!(
            "reconstruction model maps {} -> {}, window needs {} -> {}",
            model.seq_len(),
            model.output_len(),
            low.len(),
            x.len()
        )));
    }
    model.predict(params, &low, 0)
}
