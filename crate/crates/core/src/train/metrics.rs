use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::samples::SampleSet;
use crate::error::{Error, Result};
use crate::model::Forecaster;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub mse: f64,
    pub mae: f64,
    /// Squared error of the final forecast step, averaged over forecasts.
    pub se: f64,
    /// `100 · sqrt(mse) / mean |y|`.
    pub rrmse: f64,
    /// Number of scored forecasts (window, channel pairs).
    pub n: usize,
}

#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    sq: f64,
    abs: f64,
    last_sq: f64,
    mag: f64,
    elems: usize,
    n: usize,
}

impl Sums {
    fn add(&mut self, pred: &[f64], truth: &[f64]) {
        for (p, t) in pred.iter().zip(truth) {
            let e = p - t;
            self.sq += e * e;
            self.abs += e.abs();
            self.mag += t.abs();
        }
        let e = pred[pred.len() - 1] - truth[truth.len() - 1];
        self.last_sq += e * e;
        self.elems += truth.len();
        self.n += 1;
    }

    fn merge(mut self, o: Sums) -> Sums {
        self.sq += o.sq;
        self.abs += o.abs;
        self.last_sq += o.last_sq;
        self.mag += o.mag;
        self.elems += o.elems;
        self.n += o.n;
        self
    }

    fn finish(self) -> Metrics {
        let m = self.elems as f64;
        let mse = self.sq / m;
        Metrics {
            mse,
            mae: self.abs / m,
            se: self.last_sq / self.n as f64,
            rrmse: 100.0 * mse.sqrt() / (self.mag / m),
            n: self.n,
        }
    }
}

/// Metrics of explicit prediction/truth pairs.
pub fn metrics_of(pairs: &[(Vec<f64>, Vec<f64>)]) -> Result<Metrics> {
    if pairs.is_empty() {
        return Err(Error::EmptySplit("no forecasts to score".into()));
    }
    let mut s = Sums::default();
    for (p, t) in pairs {
        if p.len() != t.len() || p.is_empty() {
            return Err(Error::Shape(format!("prediction of {} vs truth of {}", p.len(), t.len())));
        }
        s.add(p, t);
    }
    Ok(s.finish())
}

/// Scores an arbitrary forecasting function on the windows listed in
/// `windows` (all windows when `None`). `forecast(input, channel)` returns the
/// `pred_len` forecast. Per-window sums are reduced in window order.
pub fn evaluate_with<S, F>(set: &S, windows: Option<&[usize]>, forecast: F) -> Result<Metrics>
where
    S: SampleSet + ?Sized,
    F: Fn(&[f64], usize) -> Result<Vec<f64>> + Sync,
{
    let all: Vec<usize>;
    let idx = match windows {
        Some(w) => w,
        None => {
            all = (0..set.n_windows()).collect();
            &all
        }
    };
    if idx.is_empty() {
        return Err(Error::EmptySplit("no windows to evaluate".into()));
    }
    let pred_len = set.pred_len();
    let seq_len = set.seq_len();
    let parts: Vec<Sums> = idx
        .par_iter()
        .map(|&w| {
            let mut s = Sums::default();
            for &c in set.channels() {
                let y = forecast(set.input(w, c), c)?;
                if y.len() != pred_len {
                    return Err(Error::Shape(format!("forecast of {} for horizon {pred_len}", y.len())));
                }
                s.add(&y, &set.span(w, c)[seq_len..]);
            }
            Ok(s)
        })
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().fold(Sums::default(), Sums::merge).finish())
}

/// Scores a trained model on its forecast segment.
pub fn evaluate<T: Scalar, M: Forecaster<T>, S: SampleSet + ?Sized>(
    model: &M,
    params: &[T],
    set: &S,
) -> Result<Metrics> {
    let h = model.pred_len();
    evaluate_with(set, None, |x, c| {
        let xt: Vec<T> = x.iter().map(|&v| T::lit(v)).collect();
        let y = model.predict(params, &xt, c)?;
        Ok(y[y.len() - h..].iter().map(|v| v.as_f64()).collect())
    })
}

/// `n` window indices spread evenly over `0..total`.
pub fn subsample_windows(total: usize, n: usize) -> Vec<usize> {
    if n >= total {
        return (0..total).collect();
    }
    (0..n).map(|i| i * total / n).collect()
}
