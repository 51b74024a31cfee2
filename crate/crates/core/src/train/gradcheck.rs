use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Forecaster;

/// Gradients below this magnitude are compared absolutely rather than relatively.
pub const REL_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct GradCheck {
    /// Largest `|analytic - numeric| / max(|analytic|, |numeric|, REL_FLOOR)` over parameters.
    pub max_param_error: f64,
    /// Same over input samples.
    pub max_input_error: f64,
    pub params_checked: usize,
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(REL_FLOOR)
}

fn mse(y: &[f64], target: &[f64]) -> f64 {
    y.iter().zip(target).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / y.len() as f64
}

/// Compares backpropagated gradients of the output MSE against `target` with
/// central differences of step `h`. At most `max_params` evenly spaced
/// parameters are probed; every input sample is. A fixed dropout seed keeps the
/// stochastic layers identical across evaluations.
pub fn check_gradients<M: Forecaster<f64>>(
    model: &M,
    params: &[f64],
    x: &[f64],
    channel: usize,
    target: &[f64],
    h: f64,
    max_params: usize,
) -> Result<GradCheck> {
    if target.len() != model.output_len() {
        return Err(Error::Shape(format!(
            "target of {} for output of {}",
            target.len(),
            model.output_len()
        )));
    }
    const SEED: Option<u64> = Some(0x5eed);
    let loss = |p: &[f64], x: &[f64]| -> Result<f64> { Ok(mse(&model.forward(p, x, channel, SEED)?.0, target)) };
    let (y, tape) = model.forward(params, x, channel, SEED)?;
    let n = y.len() as f64;
    let gy: Vec<f64> = y.iter().zip(target).map(|(a, b)| 2.0 * (a - b) / n).collect();
    let mut g = vec![0.0; params.len()];
    let gx = model
        .backward(params, &tape, &gy, &mut g, true)
        .expect("input gradient requested");

    let stride = (params.len() / max_params.max(1)).max(1);
    let mut max_param_error: f64 = 0.0;
    let mut checked = 0;
    let mut p = params.to_vec();
    for k in (0..params.len()).step_by(stride) {
        p[k] = params[k] + h;
        let up = loss(&p, x)?;
        p[k] = params[k] - h;
        let down = loss(&p, x)?;
        p[k] = params[k];
        max_param_error = max_param_error.max(rel_err(g[k], (up - down) / (2.0 * h)));
        checked += 1;
    }
    let mut max_input_error: f64 = 0.0;
    let mut xv = x.to_vec();
    for k in 0..x.len() {
        xv[k] = x[k] + h;
        let up = loss(params, &xv)?;
        xv[k] = x[k] - h;
        let down = loss(params, &xv)?;
        xv[k] = x[k];
        max_input_error = max_input_error.max(rel_err(gx[k], (up - down) / (2.0 * h)));
    }
    Ok(GradCheck {
        max_param_error,
        max_input_error,
        params_checked: checked,
    })
}
