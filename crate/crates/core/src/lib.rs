//! Frequency-domain forecasting: FITS and its variants, linear baselines,
//! ARIMA, series diagnostics, data handling and training.

pub mod benchmark;
pub mod checkpoint;
pub mod classical;
pub mod data;
pub mod diagnostics;
pub mod error;
pub mod fits;
pub mod linear_models;
pub mod model;
pub mod registry;
pub mod scalar;
pub mod spectral;
pub mod train;

pub use error::{Error, Result};
pub use model::Forecaster;
pub use registry::{AnyModel, ModelSpec};
pub use scalar::Scalar;

pub type Spectrum64 = spectral::Spectrum<f64>;
pub type Fits64 = fits::Fits<f64>;
pub type Fits32 = fits::Fits<f32>;
