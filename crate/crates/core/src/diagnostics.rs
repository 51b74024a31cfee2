//! Predictability diagnostics: Hurst exponent, autocorrelation, random walks.

use rand::SeedableRng;
use rand::RngExt;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{irfft, low_pass, rfft};

/// Smallest window used in the rescaled-range regression.
pub const MIN_WINDOW: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HurstReport {
    /// Slope of `log(R/S)` against `log n`.
    pub h: f64,
    /// Intercept `log C`.
    pub intercept: f64,
    pub window_sizes: Vec<usize>,
    pub rs_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcfReport {
    pub lags: Vec<usize>,
    /// Autocorrelations clamped to `[-1, 1]`.
    pub rho: Vec<f64>,
    /// Unclamped values.
    pub raw: Vec<f64>,
}

/// Range of the cumulative mean deviations over the population standard deviation.
pub fn rescaled_range(x: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::InvalidInput("rescaled range of an empty segment".into()));
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let mut z = 0.0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut ss = 0.0;
    for &v in x {
        let y = v - mean;
        z += y;
        lo = lo.min(z);
        hi = hi.max(z);
        ss += y * y;
    }
    let s = (ss / n).sqrt();
    if s == 0.0 {
        return Err(Error::ZeroVariance("zero variance segment".into()));
    }
    Ok((hi - lo) / s)
}

/// Ordinary least squares `y = a + b x`; returns `(b, a)`.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Hurst exponent of a level series, estimated by rescaled-range analysis of
/// its increments. Window sizes double from 8 up to half the increment count;
/// each size averages R/S over disjoint segments, skipping segments without
/// variance.
pub fn hurst(x: &[f64]) -> Result<HurstReport> {
    if x.len() < 100 {
        return Err(Error::InvalidInput(format!(
            "Hurst estimation needs at least 100 samples, got {}",
            x.len()
        )));
    }
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let inc: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let mut window_sizes = Vec::new();
    let mut rs_values = Vec::new();
    let mut n = MIN_WINDOW;
    while n <= inc.len() / 2 {
        let vals: Vec<f64> = inc.chunks_exact(n).filter_map(|seg| rescaled_range(seg).ok()).collect();
        if !vals.is_empty() {
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            if mean > 0.0 {
                window_sizes.push(n);
                rs_values.push(mean);
            }
        }
        n *= 2;
    }
    if window_sizes.len() < 4 {
        return Err(Error::InvalidInput(format!(
            "only {} usable window sizes, need at least 4",
            window_sizes.len()
        )));
    }
    let lx: Vec<f64> = window_sizes.iter().map(|&n| (n as f64).ln()).collect();
    let ly: Vec<f64> = rs_values.iter().map(|v| v.ln()).collect();
    let (h, intercept) = line_fit(&lx, &ly);
    Ok(HurstReport {
        h,
        intercept,
        window_sizes,
        rs_values,
    })
}

/// Autocorrelation for lags `0..=max_lag`, with autocovariance normalized by
/// `n - k` and variance by `n`.
pub fn acf(x: &[f64], max_lag: usize) -> Result<AcfReport> {
    if max_lag >= x.len() {
        return Err(Error::InvalidInput(format!(
            "max lag {max_lag} needs more than {} samples",
            x.len()
        )));
    }
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let dev: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let var = dev.iter().map(|d| d * d).sum::<f64>() / n as f64;
    if !(var > 0.0) {
        return Err(Error::ZeroVariance("zero variance".into()));
    }
    let raw: Vec<f64> = (0..=max_lag)
        .map(|k| {
            if k == 0 {
                return 1.0;
            }
            let cov = dev[k..].iter().zip(&dev).map(|(a, b)| a * b).sum::<f64>() / (n - k) as f64;
            cov / var
        })
        .collect();
    Ok(AcfReport {
        lags: (0..=max_lag).collect(),
        rho: raw.iter().map(|r| r.clamp(-1.0, 1.0)).collect(),
        raw,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// ±1 with equal probability.
    Coin,
    /// Standard normal.
    Gaussian,
}

/// Random walk of `steps` values: value `t` (1-based) is the sum of the first
/// `t` steps plus `drift · t`.
pub fn simulate_random_walk(steps: usize, drift: f64, kind: StepKind, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level = 0.0;
    (0..steps)
        .map(|_| {
            let s = match kind {
                StepKind::Coin => {
                    if rng.random::<bool>() {
                        1.0
                    } else {
                        -1.0
                    }
                }
                StepKind::Gaussian => StandardNormal.sample(&mut rng),
            };
            level += s + drift;
            level
        })
        .collect()
}

/// Keeps spectral content up to `cutoff` (clamped to the available bins).
pub fn low_pass_series(x: &[f64], cutoff: usize) -> Result<Vec<f64>> {
    let spec = rfft(x)?;
    let keep = cutoff.min(spec.len() - 1);
    irfft(&low_pass(&spec, keep)?, x.len())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedSeries {
    pub name: String,
    pub h: f64,
    pub deviation: f64,
    pub len: usize,
}

/// Orders series by `|H - 0.5|`, largest first; equal deviations put the
/// longer series first. With `low_pass_cutoff`, each series is low-pass
/// filtered before estimation.
pub fn rank_by_hurst_deviation(
    series: &[(String, Vec<f64>)],
    low_pass_cutoff: Option<usize>,
) -> Result<Vec<RankedSeries>> {
    let mut out = series
        .iter()
        .map(|(name, x)| {
            let report = match low_pass_cutoff {
                Some(c) => hurst(&low_pass_series(x, c)?)?,
                None => hurst(x)?,
            };
            Ok(RankedSeries {
                name: name.clone(),
                h: report.h,
                deviation: (report.h - 0.5).abs(),
                len: x.len(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| b.deviation.total_cmp(&a.deviation).then(b.len.cmp(&a.len)));
    Ok(out)
}

/// Orders already-computed Hurst values the same way as [`rank_by_hurst_deviation`].
pub fn rank_reports(entries: Vec<(String, f64, usize)>) -> Vec<RankedSeries> {
    let mut out: Vec<RankedSeries> = entries
        .into_iter()
        .map(|(name, h, len)| RankedSeries {
            name,
            h,
            deviation: (h - 0.5).abs(),
            len,
        })
        .collect();
    out.sort_by(|a, b| b.deviation.total_cmp(&a.deviation).then(b.len.cmp(&a.len)));
    out
}
