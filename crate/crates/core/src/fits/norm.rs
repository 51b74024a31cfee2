use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Floor applied to the per-window standard deviation.
pub const STD_FLOOR: f64 = 1e-5;

/// Mean and (floored, population) standard deviation of one channel window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceStats<T> {
    pub mean: T,
    pub std: T,
    /// Population std before flooring.
    pub raw_std: T,
}

impl<T: Scalar> InstanceStats<T> {
    pub fn of(x: &[T]) -> Self {
        let n = T::of_usize(x.len());
        let mean = x.iter().copied().sum::<T>() / n;
        let var = x.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n;
        let raw_std = var.sqrt();
        Self {
            mean,
            std: raw_std.max(T::lit(STD_FLOOR)),
            raw_std,
        }
    }

    /// True when the floor is active, i.e. the std no longer depends on the input.
    pub fn is_floored(&self) -> bool {
        self.raw_std < T::lit(STD_FLOOR)
    }
}

/// Zero-mean, unit-variance scaling of a window.
pub fn normalize<T: Scalar>(x: &[T]) -> Result<(Vec<T>, InstanceStats<T>)> {
    if x.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "normalization needs at least 2 samples, got {}",
            x.len()
        )));
    }
    let stats = InstanceStats::of(x);
    Ok((
        x.iter().map(|&v| (v - stats.mean) / stats.std).collect(),
        stats,
    ))
}

/// `y * std + mean`, elementwise.
pub fn denormalize<T: Scalar>(y: &[T], stats: &InstanceStats<T>) -> Vec<T> {
    y.iter().map(|&v| v * stats.std + stats.mean).collect()
}
