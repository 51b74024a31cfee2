//! The FITS model: instance normalization, real FFT, low-pass truncation,
//! complex spectral interpolation and inverse FFT at the output length.

mod activation;
mod config;
mod layers;
mod model;
mod norm;

pub use activation::{c_relu, c_relu_backward, complex_dropout, mod_relu, mod_relu_backward};
pub use config::{ChannelMode, FitsConfig, Variant};
pub use layers::{complex_linear, ComplexMatrix};
pub use model::{bypass_mix, downsample, fits_reconstruct, Fits, FitsTape};
pub use norm::{denormalize, normalize, InstanceStats, STD_FLOOR};

pub(crate) use layers::{raffine_backward, raffine_forward};
