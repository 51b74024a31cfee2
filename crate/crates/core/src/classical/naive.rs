use crate::error::{Error, Result};

/// Repeats the last observed value `horizon` times.
pub fn repeat_forecast(x: &[f64], horizon: usize) -> Result<Vec<f64>> {
    let last = *x
        .last()
        .ok_or_else(|| Error::InvalidInput("repeat forecast of an empty window".into()))?;
    Ok(vec![last; horizon])
}

/// Forecasts the window mean for every step.
pub fn mean_forecast(x: &[f64], horizon: usize) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::InvalidInput("mean forecast of an empty window".into()));
    }
    let m = x.iter().sum::<f64>() / x.len() as f64;
    Ok(vec![m; horizon])
}
