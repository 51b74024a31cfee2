use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::half_len;

/// Whether channels share one frequency layer or each gets its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ChannelMode {
    #[default]
    Shared,
    Individual,
}

/// Model variants built around the frequency interpolation layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// One complex linear layer.
    #[default]
    Plain,
    /// Stacked complex layers with ModReLU and complex dropout between them.
    DeepModrelu,
    /// Stacked complex layers with CReLU and complex dropout between them.
    DeepCrelu,
    /// Plain frequency layer followed by a residual real MLP on the time-domain output.
    DeepAfterUpscaler,
    /// Real MLP on interleaved (re, im) pairs in place of the complex layer.
    RealDeep,
    /// Plain FITS mixed with a direct real linear map: `(1-β)·fits + β·linear`.
    Bypass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitsConfig {
    pub seq_len: usize,
    pub pred_len: usize,
    /// Samples per dominant cycle.
    pub base_period: usize,
    /// Harmonic of the base period at which the low-pass cutoff sits.
    pub harmonic_order: usize,
    #[serde(default)]
    pub channel_mode: ChannelMode,
    /// Number of independent layer groups in individual mode.
    #[serde(default = "one")]
    pub channels: usize,
    #[serde(default)]
    pub variant: Variant,
    #[serde(default)]
    pub depth: usize,
    #[serde(default = "default_hidden")]
    pub hidden: usize,
    #[serde(default)]
    pub dropout_p: f64,
    /// Complex bias on the frequency layer(s).
    #[serde(default = "yes")]
    pub bias: bool,
    /// Start from all-zero weights instead of the uniform initialization.
    #[serde(default)]
    pub zero_init: bool,
}

fn one() -> usize {
    1
}
fn default_hidden() -> usize {
    128
}
fn yes() -> bool {
    true
}

impl FitsConfig {
    pub fn new(seq_len: usize, pred_len: usize, base_period: usize, harmonic_order: usize) -> Self {
        Self {
            seq_len,
            pred_len,
            base_period,
            harmonic_order,
            channel_mode: ChannelMode::Shared,
            channels: 1,
            variant: Variant::Plain,
            depth: 0,
            hidden: default_hidden(),
            dropout_p: 0.0,
            bias: true,
            zero_init: false,
        }
    }

    /// Configuration that upsamples a window downsampled by `factor` back to
    /// `window_len` samples.
    pub fn for_reconstruction(
        window_len: usize,
        factor: usize,
        base_period: usize,
        harmonic_order: usize,
    ) -> Result<Self> {
        if factor == 0 || window_len % factor != 0 {
            return Err(Error::InvalidInput(format!(
                "window length {window_len} not divisible by downsample factor {factor}"
            )));
        }
        let seq_len = window_len / factor;
        Ok(Self::new(seq_len, window_len - seq_len, base_period, harmonic_order))
    }

    pub fn with_variant(mut self, variant: Variant, depth: usize, hidden: usize) -> Self {
        self.variant = variant;
        self.depth = depth;
        self.hidden = hidden;
        self
    }

    pub fn individual(mut self, channels: usize) -> Self {
        self.channel_mode = ChannelMode::Individual;
        self.channels = channels;
        self
    }

    /// `floor(harmonic_order · seq_len / base_period)`.
    pub fn cutoff_bin(&self) -> usize {
        self.harmonic_order * self.seq_len / self.base_period.max(1)
    }

    pub fn output_len(&self) -> usize {
        self.seq_len + self.pred_len
    }

    /// Interpolation rate `output_len / seq_len`.
    pub fn eta(&self) -> f64 {
        self.output_len() as f64 / self.seq_len as f64
    }

    pub fn in_bins(&self) -> usize {
        self.cutoff_bin() + 1
    }

    /// `floor(in_bins · η)`, capped at the bins available for `output_len`.
    pub fn out_bins(&self) -> usize {
        (self.in_bins() * self.output_len() / self.seq_len).min(half_len(self.output_len()))
    }

    pub fn groups(&self) -> usize {
        match self.channel_mode {
            ChannelMode::Shared => 1,
            ChannelMode::Individual => self.channels,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if self.seq_len < 2 {
            return bad(format!("seq_len must be at least 2, got {}", self.seq_len));
        }
        if self.base_period == 0 || self.harmonic_order == 0 {
            return bad("base_period and harmonic_order must be positive".into());
        }
        if self.cutoff_bin() > self.seq_len / 2 {
            return bad(format!(
                "cutoff bin {} exceeds {} (seq_len {}, base_period {}, harmonic_order {})",
                self.cutoff_bin(),
                self.seq_len / 2,
                self.seq_len,
                self.base_period,
                self.harmonic_order
            ));
        }
        if self.channel_mode == ChannelMode::Individual && self.channels == 0 {
            return bad("individual mode needs at least one channel".into());
        }
        if !(0.0..1.0).contains(&self.dropout_p) {
            return bad(format!("dropout probability {} outside [0, 1)", self.dropout_p));
        }
        let needs_hidden = !matches!(self.variant, Variant::Plain | Variant::Bypass) && self.depth > 0;
        if needs_hidden && self.hidden == 0 {
            return bad("hidden width must be positive".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn etth1_cutoff() {
        let cfg = FitsConfig::new(360, 96, 24, 6);
        assert_eq!(cfg.cutoff_bin(), 90);
        assert_eq!(cfg.in_bins(), 91);
        assert_eq!(cfg.out_bins(), 115);
        assert!((cfg.eta() - 456.0 / 360.0).abs() < 1e-15);
        cfg.validate().unwrap();
    }

    #[test]
    fn cutoff_past_nyquist_rejected() {
        assert!(FitsConfig::new(100, 10, 2, 3).validate().is_err());
    }

    #[test]
    fn reconstruction_factor_must_divide() {
        assert!(FitsConfig::for_reconstruction(100, 3, 10, 2).is_err());
        let c = FitsConfig::for_reconstruction(120, 2, 20, 3).unwrap();
        assert_eq!((c.seq_len, c.output_len()), (60, 120));
        assert!((c.eta() - 2.0).abs() < 1e-15);
    }
}
