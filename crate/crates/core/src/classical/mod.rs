//! Naive baselines and ARIMA fitted by conditional maximum likelihood.

mod arima;
mod naive;
mod optimize;

pub use arima::{
    aic, arima_forecast, auto_arima, css_loglik, css_residuals, difference, fit_ar, fit_arima, fit_arma,
    simulate_arma, undifference, ArimaModel,
};
pub use naive::{mean_forecast, repeat_forecast};
pub use optimize::{nelder_mead, SimplexOptions, SimplexResult};
