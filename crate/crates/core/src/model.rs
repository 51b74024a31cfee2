//! The interface every trainable forecaster implements.
//!
//! An architecture is immutable; its parameters live in a flat vector owned by
//! the caller. Complex parameters occupy two consecutive slots (re, im).

use crate::error::Result;
use crate::scalar::Scalar;

pub trait Forecaster<T: Scalar>: Send + Sync {
    /// Per-sample state recorded by [`Forecaster::forward`] for the backward pass.
    type Tape: Send;

    fn kind(&self) -> &'static str;

    fn seq_len(&self) -> usize;

    fn pred_len(&self) -> usize;

    /// Length of the produced sequence: `pred_len`, or `seq_len + pred_len`
    /// when the model reconstructs the look-back span as well.
    fn output_len(&self) -> usize;

    fn emits_backcast(&self) -> bool {
        self.output_len() > self.pred_len()
    }

    /// Length of the flat parameter vector.
    fn num_params(&self) -> usize;

    /// Parameter count as reported in results: complex entries count twice.
    fn reported_param_count(&self) -> usize {
        self.num_params()
    }

    fn init_params(&self, seed: u64) -> Vec<T>;

    /// Runs one channel window through the model. `dropout_seed` switches on
    /// training-mode stochastic layers.
    fn forward(
        &self,
        params: &[T],
        x: &[T],
        channel: usize,
        dropout_seed: Option<u64>,
    ) -> Result<(Vec<T>, Self::Tape)>;

    /// Accumulates `d loss / d params` into `grads`; returns `d loss / d x`
    /// when `want_input_grad` is set.
    fn backward(
        &self,
        params: &[T],
        tape: &Self::Tape,
        grad_out: &[T],
        grads: &mut [T],
        want_input_grad: bool,
    ) -> Option<Vec<T>>;

    fn predict(&self, params: &[T], x: &[T], channel: usize) -> Result<Vec<T>> {
        self.forward(params, x, channel, None).map(|(y, _)| y)
    }
}
