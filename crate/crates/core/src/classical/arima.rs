//! ARIMA with conditional (sum-of-squares) likelihood.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, DVector, Schur};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::optimize::{nelder_mead, SimplexOptions};
use crate::error::{Error, Result};

/// `∇^d z_t - μ = Σ φ_i (∇^d z_{t-i} - μ) + ε_t + Σ θ_j ε_{t-j}`, `ε_t ~ N(0, σ²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArimaModel {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    pub mu: f64,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub sigma2: f64,
}

impl ArimaModel {
    pub fn new(d: usize, mu: f64, phi: Vec<f64>, theta: Vec<f64>, sigma2: f64) -> Self {
        Self {
            p: phi.len(),
            d,
            q: theta.len(),
            mu,
            phi,
            theta,
            sigma2,
        }
    }

    /// Estimated parameter count used by the AIC: `p + q + 2`.
    pub fn num_estimated(&self) -> usize {
        self.p + self.q + 2
    }

    pub fn is_stationary(&self) -> bool {
        unit_root_violation(&self.phi) == 0.0
    }

    pub fn is_invertible(&self) -> bool {
        let neg: Vec<f64> = self.theta.iter().map(|t| -t).collect();
        unit_root_violation(&neg) == 0.0
    }
}

/// Applies the difference operator `d` times.
pub fn difference(x: &[f64], d: usize) -> Result<Vec<f64>> {
    if d > x.len() {
        return Err(Error::InvalidInput(format!(
            "cannot difference {} samples {d} times",
            x.len()
        )));
    }
    let mut v = x.to_vec();
    for _ in 0..d {
        v = v.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(v)
}

/// Integrates `dx` back `anchors.len()` times. `anchors` are the original
/// values immediately preceding the differenced span; the result starts with
/// them.
pub fn undifference(dx: &[f64], anchors: &[f64]) -> Vec<f64> {
    let d = anchors.len();
    // Last value of each difference level of the anchors, level 0 first.
    let mut level = anchors.to_vec();
    let mut lasts = Vec::with_capacity(d);
    for _ in 0..d {
        lasts.push(*level.last().expect("nonempty level"));
        level = level.windows(2).map(|w| w[1] - w[0]).collect();
    }
    let mut s = dx.to_vec();
    for &start in lasts.iter().rev() {
        let mut acc = start;
        for v in s.iter_mut() {
            acc += *v;
            *v = acc;
        }
    }
    let mut out = anchors.to_vec();
    out.extend(s);
    out
}

/// Sum of how far the roots of `1 - Σ c_i B^i` fall inside (or on) the unit
/// circle, measured via the companion matrix eigenvalues. Zero when all roots
/// lie strictly outside.
fn unit_root_violation(c: &[f64]) -> f64 {
    root_excess(c, 1.0 - 1e-6)
}

/// Inverse roots of `1 - Σ c_i B^i` (eigenvalues of its companion matrix).
fn inverse_roots(c: &[f64]) -> Option<Vec<Complex<f64>>> {
    let p = c.len();
    if c.iter().any(|v| !v.is_finite()) {
        return None;
    }
    if p == 0 {
        return Some(Vec::new());
    }
    let mut m = DMatrix::<f64>::zeros(p, p);
    for (j, &v) in c.iter().enumerate() {
        m[(0, j)] = v;
    }
    for i in 1..p {
        m[(i, i - 1)] = 1.0;
    }
    Schur::try_new(m, f64::EPSILON, 500).map(|s| s.complex_eigenvalues().iter().copied().collect())
}

/// Sum of `max(0, |λ| - limit)` over the inverse roots `λ` of `1 - Σ c_i B^i`.
fn root_excess(c: &[f64], limit: f64) -> f64 {
    let l1: f64 = c.iter().map(|v| v.abs()).sum();
    if l1 < limit {
        return 0.0;
    }
    match inverse_roots(c) {
        Some(r) => r.iter().map(|z| (z.norm() - limit).max(0.0)).sum(),
        // Non-finite coefficients or a failed decomposition.
        None if l1.is_finite() => l1,
        None => f64::INFINITY,
    }
}

/// One-step prediction errors with presample errors set to zero, for
/// `t = p..n` on the level-`d` series `z`.
pub fn css_residuals(z: &[f64], mu: f64, phi: &[f64], theta: &[f64]) -> Vec<f64> {
    let p = phi.len();
    let mut eps = vec![0.0; z.len()];
    for t in p..z.len() {
        let mut e = z[t] - mu;
        for (i, &f) in phi.iter().enumerate() {
            e -= f * (z[t - 1 - i] - mu);
        }
        for (j, &th) in theta.iter().enumerate() {
            if t > j {
                e -= th * eps[t - 1 - j];
            }
        }
        eps[t] = e;
    }
    eps.split_off(p.min(z.len()))
}

fn gaussian_loglik(n: usize, sse: f64, sigma2: f64) -> f64 {
    let n = n as f64;
    -0.5 * n * (2.0 * PI).ln() - 0.5 * n * sigma2.ln() - sse / (2.0 * sigma2)
}

/// Conditional log-likelihood of `x` (differenced `m.d` times) under `m`,
/// summed from `t = p + 1` with zero presample errors.
pub fn css_loglik(x: &[f64], m: &ArimaModel) -> Result<f64> {
    if !(m.sigma2 > 0.0) {
        return Err(Error::InvalidInput(format!("sigma2 must be positive, got {}", m.sigma2)));
    }
    let z = difference(x, m.d)?;
    if z.len() <= m.p {
        return Err(Error::InvalidInput(format!(
            "{} observations leave nothing to condition on for p = {}",
            z.len(),
            m.p
        )));
    }
    let eps = css_residuals(&z, m.mu, &m.phi, &m.theta);
    let sse: f64 = eps.iter().map(|e| e * e).sum();
    Ok(gaussian_loglik(eps.len(), sse, m.sigma2))
}

fn mean_and_variance(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    (m, x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n)
}

/// Least-squares AR(p) with intercept, conditioning on the first `p` values.
pub fn fit_ar(x: &[f64], p: usize) -> Result<ArimaModel> {
    if x.len() <= 10 * p || x.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "AR({p}) needs more than {} observations, got {}",
            (10 * p).max(1),
            x.len()
        )));
    }
    let rows = x.len() - p;
    let design = DMatrix::from_fn(rows, p + 1, |r, c| if c == 0 { 1.0 } else { x[p + r - c] });
    let target = DVector::from_iterator(rows, x[p..].iter().copied());
    let svd = design.svd(true, true);
    let sv = &svd.singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    if !(smax > 0.0) || smin <= smax * 1e-10 {
        return Err(Error::DegenerateRegression(format!(
            "AR({p}) design matrix is singular (constant series?)"
        )));
    }
    let beta = svd
        .solve(&target, 0.0)
        .map_err(|e| Error::DegenerateRegression(e.to_string()))?;
    let phi: Vec<f64> = beta.iter().skip(1).copied().collect();
    let sum_phi: f64 = phi.iter().sum();
    let mu = if (1.0 - sum_phi).abs() > 1e-12 {
        beta[0] / (1.0 - sum_phi)
    } else {
        mean_and_variance(x).0
    };
    let eps = css_residuals(x, mu, &phi, &[]);
    let sigma2 = eps.iter().map(|e| e * e).sum::<f64>() / eps.len() as f64;
    Ok(ArimaModel::new(0, mu, phi, Vec::new(), sigma2))
}

const PENALTY: f64 = 1e6;

/// Profiled negative CSS log-likelihood plus stationarity/invertibility penalty.
fn profiled_objective(z: &[f64], mu: f64, phi: &[f64], theta: &[f64]) -> f64 {
    let eps = css_residuals(z, mu, phi, theta);
    let n = eps.len();
    let sse: f64 = eps.iter().map(|e| e * e).sum();
    let sigma2 = (sse / n as f64).max(f64::MIN_POSITIVE);
    let neg: Vec<f64> = theta.iter().map(|t| -t).collect();
    let violation = unit_root_violation(phi) + unit_root_violation(&neg);
    -gaussian_loglik(n, sse, sigma2) + PENALTY * violation
}

fn fit_arma_level(z: &[f64], p: usize, q: usize, with_mean: bool) -> Result<ArimaModel> {
    if z.len() <= 10 * (p + q + 1) {
        return Err(Error::InvalidInput(format!(
            "ARMA({p},{q}) needs more than {} observations, got {}",
            10 * (p + q + 1),
            z.len()
        )));
    }
    let (mean, var) = mean_and_variance(z);
    if var == 0.0 && (p + q) > 0 {
        return Err(Error::DegenerateRegression("constant series".into()));
    }
    if p == 0 && q == 0 {
        let mu = if with_mean { mean } else { 0.0 };
        let sigma2 = z.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / z.len() as f64;
        return Ok(ArimaModel::new(0, mu, Vec::new(), Vec::new(), sigma2));
    }

    let offset = usize::from(with_mean);
    let unpack = |v: &[f64]| -> (f64, Vec<f64>, Vec<f64>) {
        let mu = if with_mean { v[0] } else { 0.0 };
        (mu, v[offset..offset + p].to_vec(), v[offset + p..].to_vec())
    };
    let objective = |v: &[f64]| {
        let (mu, phi, theta) = unpack(v);
        profiled_objective(z, mu, &phi, &theta)
    };

    let mut start = Vec::with_capacity(offset + p + q);
    if with_mean {
        start.push(mean);
    }
    match fit_ar(z, p) {
        Ok(ar) if p > 0 && ar.is_stationary() => start.extend(&ar.phi),
        _ => start.extend(std::iter::repeat_n(0.0, p)),
    }
    start.extend(std::iter::repeat_n(0.0, q));
    let scale = var.sqrt().max(1e-3);
    let steps: Vec<f64> = (0..start.len())
        .map(|i| if with_mean && i == 0 { 0.1 * scale } else { 0.1 })
        .collect();

    let opts = SimplexOptions::default();
    let mut best = nelder_mead(objective, &start, &steps, opts);
    let mut total = best.iterations;
    let mut any_converged = best.converged;
    // Restarts from the incumbent with fixed perturbations.
    for seed in 0..3u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let from: Vec<f64> = best
            .point
            .iter()
            .zip(&steps)
            .map(|(&v, &s)| {
                let n: f64 = StandardNormal.sample(&mut rng);
                v + 0.5 * s * n
            })
            .collect();
        let run = nelder_mead(objective, &from, &steps, opts);
        total += run.iterations;
        any_converged |= run.converged;
        if run.value < best.value {
            best = run;
        }
    }
    if !any_converged || !best.value.is_finite() {
        return Err(Error::NoConvergence {
            iterations: total,
            best_value: best.value,
            best_point: best.point,
        });
    }
    let (mu, phi, theta) = unpack(&best.point);
    let eps = css_residuals(z, mu, &phi, &theta);
    let sigma2 = eps.iter().map(|e| e * e).sum::<f64>() / eps.len() as f64;
    Ok(ArimaModel::new(0, mu, phi, theta, sigma2))
}

/// ARMA(p, q) by simplex maximization of the conditional likelihood.
pub fn fit_arma(x: &[f64], p: usize, q: usize) -> Result<ArimaModel> {
    fit_arma_level(x, p, q, true)
}

/// ARIMA(p, d, q): ARMA on the `d`-times differenced series. For `d > 0` the
/// level `μ` of the differenced series is fixed at zero (no drift).
pub fn fit_arima(x: &[f64], p: usize, d: usize, q: usize) -> Result<ArimaModel> {
    let z = difference(x, d)?;
    let mut m = fit_arma_level(&z, p, q, d == 0)?;
    m.d = d;
    Ok(m)
}

/// Forecasts `horizon` steps past the end of `history` with future errors set to zero.
pub fn arima_forecast(m: &ArimaModel, history: &[f64], horizon: usize) -> Result<Vec<f64>> {
    if history.len() < m.d + m.p.max(1) {
        return Err(Error::InvalidInput(format!(
            "history of {} samples too short for ARIMA({},{},{})",
            history.len(),
            m.p,
            m.d,
            m.q
        )));
    }
    let z = difference(history, m.d)?;
    let mut eps = vec![0.0; m.p.min(z.len())];
    eps.extend(css_residuals(&z, m.mu, &m.phi, &m.theta));
    let mut dev: Vec<f64> = z.iter().map(|v| v - m.mu).collect();
    let n = dev.len();
    for h in 0..horizon {
        let t = n + h;
        let mut v = 0.0;
        for (i, &f) in m.phi.iter().enumerate() {
            if t > i {
                v += f * dev[t - 1 - i];
            }
        }
        for (j, &th) in m.theta.iter().enumerate() {
            if t > j && t - 1 - j < n {
                v += th * eps[t - 1 - j];
            }
        }
        dev.push(v);
    }
    let future: Vec<f64> = dev[n..].iter().map(|v| v + m.mu).collect();
    let anchors = &history[history.len() - m.d..];
    Ok(undifference(&future, anchors).split_off(m.d))
}

/// `2k - 2·loglik` with `k = p + q + 2`.
pub fn aic(loglik: f64, m: &ArimaModel) -> f64 {
    2.0 * m.num_estimated() as f64 - 2.0 * loglik
}

/// Conditional log-likelihood over the last `n_terms` one-step errors only.
fn tail_loglik(x: &[f64], m: &ArimaModel, n_terms: usize) -> Result<f64> {
    let z = difference(x, m.d)?;
    let eps = css_residuals(&z, m.mu, &m.phi, &m.theta);
    if eps.len() < n_terms || n_terms == 0 {
        return Err(Error::InvalidInput("not enough residuals for the common sample".into()));
    }
    let sse: f64 = eps[eps.len() - n_terms..].iter().map(|e| e * e).sum();
    Ok(gaussian_loglik(n_terms, sse, m.sigma2))
}

/// Candidates allowed into the order search: every AR and MA root has modulus
/// at least 1.01, and no AR root sits within 0.1 of an MA root. Fits on the
/// boundary or with a near-common factor are redundant parameterizations of a
/// smaller model whose extra freedom only lets the conditional likelihood chase
/// noise.
fn admissible(m: &ArimaModel) -> bool {
    let neg: Vec<f64> = m.theta.iter().map(|t| -t).collect();
    let (Some(ar), Some(ma)) = (inverse_roots(&m.phi), inverse_roots(&neg)) else {
        return false;
    };
    let limit = 1.0 / 1.01;
    if ar.iter().chain(&ma).any(|z| z.norm() > limit) {
        return false;
    }
    !ar.iter().any(|a| ma.iter().any(|b| (a - b).norm() < 0.1))
}

/// Order search over `p ≤ max_p`, `d ≤ max_d`, `q ≤ max_q` minimizing AIC.
/// Every candidate is scored on the same trailing `T - max_d - max_p` errors so
/// that conditioning on more presample values does not shrink its sum.
/// Orders that cannot be fitted or are not admissible are skipped; ties keep
/// the smaller order.
pub fn auto_arima(x: &[f64], max_p: usize, max_d: usize, max_q: usize) -> Result<ArimaModel> {
    let common = x.len().saturating_sub(max_d + max_p);
    let mut best: Option<(f64, ArimaModel)> = None;
    let mut last_err = None;
    for d in 0..=max_d {
        for p in 0..=max_p {
            for q in 0..=max_q {
                let fitted = fit_arima(x, p, d, q).and_then(|m| {
                    let ll = tail_loglik(x, &m, common)?;
                    Ok((aic(ll, &m), m))
                });
                match fitted {
                    Ok((_, m)) if !admissible(&m) => {}
                    Ok((score, m)) if score.is_finite() => {
                        if best.as_ref().is_none_or(|(b, _)| score < *b) {
                            best = Some((score, m));
                        }
                    }
                    Ok(_) => {}
                    Err(e) => last_err = Some(e),
                }
            }
        }
    }
    best.map(|(_, m)| m).ok_or_else(|| {
        last_err.unwrap_or_else(|| Error::InvalidInput("no ARIMA order could be fitted".into()))
    })
}

/// Simulates an ARMA process (plus-sign MA convention) after a burn-in of 500 steps.
pub fn simulate_arma(mu: f64, phi: &[f64], theta: &[f64], sigma: f64, n: usize, seed: u64) -> Vec<f64> {
    let burn = 500;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = n + burn;
    let mut dev = vec![0.0; total];
    let mut eps = vec![0.0; total];
    for t in 0..total {
        let e: f64 = StandardNormal.sample(&mut rng);
        eps[t] = sigma * e;
        let mut v = eps[t];
        for (i, &f) in phi.iter().enumerate() {
            if t > i {
                v += f * dev[t - 1 - i];
            }
        }
        for (j, &th) in theta.iter().enumerate() {
            if t > j {
                v += th * eps[t - 1 - j];
            }
        }
        dev[t] = v;
    }
    dev[burn..].iter().map(|v| v + mu).collect()
}
