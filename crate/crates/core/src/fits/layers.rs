//! Affine layers over flat parameter slices, complex and real.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major complex matrix of shape `rows × cols`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex<T>>,
}

impl<T: Scalar> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        self.data[i * self.cols + j] = v;
    }

    /// Reads a matrix stored as interleaved (re, im) pairs.
    pub fn from_interleaved(rows: usize, cols: usize, flat: &[T]) -> Self {
        assert_eq!(flat.len(), 2 * rows * cols);
        Self {
            rows,
            cols,
            data: flat.chunks_exact(2).map(|p| Complex::new(p[0], p[1])).collect(),
        }
    }
}

/// `out_j = Σ_i x_i W_ij + b_j` with complex arithmetic.
pub fn complex_linear<T: Scalar>(
    x: &[Complex<T>],
    w: &ComplexMatrix<T>,
    b: &[Complex<T>],
) -> Result<Vec<Complex<T>>> {
    if x.len() != w.rows || b.len() != w.cols {
        return Err(Error::Shape(format!(
            "complex_linear: input {}, weights {}x{}, bias {}",
            x.len(),
            w.rows,
            w.cols,
            b.len()
        )));
    }
    let mut out = b.to_vec();
    for (i, &xi) in x.iter().enumerate() {
        let row = &w.data[i * w.cols..(i + 1) * w.cols];
        for (o, &wij) in out.iter_mut().zip(row) {
            *o += xi * wij;
        }
    }
    Ok(out)
}

/// Complex affine map with weights interleaved in `w` (`2·n_in·n_out` reals)
/// and optional interleaved bias (`2·n_out`).
pub(crate) fn caffine_forward<T: Scalar>(
    x: &[Complex<T>],
    w: &[T],
    b: Option<&[T]>,
    n_out: usize,
) -> Vec<Complex<T>> {
    debug_assert_eq!(w.len(), 2 * x.len() * n_out);
    let mut out: Vec<Complex<T>> = match b {
        Some(b) => b.chunks_exact(2).map(|p| Complex::new(p[0], p[1])).collect(),
        None => vec![Complex::new(T::zero(), T::zero()); n_out],
    };
    for (i, &xi) in x.iter().enumerate() {
        if xi.re == T::zero() && xi.im == T::zero() {
            continue;
        }
        let row = &w[2 * i * n_out..2 * (i + 1) * n_out];
        for (o, p) in out.iter_mut().zip(row.chunks_exact(2)) {
            o.re += xi.re * p[0] - xi.im * p[1];
            o.im += xi.re * p[1] + xi.im * p[0];
        }
    }
    out
}

/// Backward of [`caffine_forward`]. With `g_j = dL/dRe(out_j) + i dL/dIm(out_j)`,
/// `dW_ij = conj(x_i) g_j`, `db_j = g_j`, `dx_i = Σ_j g_j conj(W_ij)`.
pub(crate) fn caffine_backward<T: Scalar>(
    x: &[Complex<T>],
    w: &[T],
    g: &[Complex<T>],
    gw: &mut [T],
    gb: Option<&mut [T]>,
    want_input: bool,
) -> Option<Vec<Complex<T>>> {
    let n_out = g.len();
    for (i, &xi) in x.iter().enumerate() {
        let row = &mut gw[2 * i * n_out..2 * (i + 1) * n_out];
        for (p, &gj) in row.chunks_exact_mut(2).zip(g) {
            p[0] += xi.re * gj.re + xi.im * gj.im;
            p[1] += xi.re * gj.im - xi.im * gj.re;
        }
    }
    if let Some(gb) = gb {
        for (p, &gj) in gb.chunks_exact_mut(2).zip(g) {
            p[0] += gj.re;
            p[1] += gj.im;
        }
    }
    if !want_input {
        return None;
    }
    Some(
        (0..x.len())
            .map(|i| {
                let row = &w[2 * i * n_out..2 * (i + 1) * n_out];
                let mut acc = Complex::new(T::zero(), T::zero());
                for (p, &gj) in row.chunks_exact(2).zip(g) {
                    // g * conj(w)
                    acc.re += gj.re * p[0] + gj.im * p[1];
                    acc.im += gj.im * p[0] - gj.re * p[1];
                }
                acc
            })
            .collect(),
    )
}

/// Real affine map `out_j = Σ_i x_i W_ij + b_j`, `W` row-major `n_in × n_out`.
pub(crate) fn raffine_forward<T: Scalar>(x: &[T], w: &[T], b: Option<&[T]>, n_out: usize) -> Vec<T> {
    debug_assert_eq!(w.len(), x.len() * n_out);
    let mut out = match b {
        Some(b) => b.to_vec(),
        None => vec![T::zero(); n_out],
    };
    for (i, &xi) in x.iter().enumerate() {
        if xi == T::zero() {
            continue;
        }
        let row = &w[i * n_out..(i + 1) * n_out];
        for (o, &wij) in out.iter_mut().zip(row) {
            *o += xi * wij;
        }
    }
    out
}

pub(crate) fn raffine_backward<T: Scalar>(
    x: &[T],
    w: &[T],
    g: &[T],
    gw: &mut [T],
    gb: Option<&mut [T]>,
    want_input: bool,
) -> Option<Vec<T>> {
    let n_out = g.len();
    for (i, &xi) in x.iter().enumerate() {
        if xi == T::zero() {
            continue;
        }
        let row = &mut gw[i * n_out..(i + 1) * n_out];
        for (p, &gj) in row.iter_mut().zip(g) {
            *p += xi * gj;
        }
    }
    if let Some(gb) = gb {
        for (p, &gj) in gb.iter_mut().zip(g) {
            *p += gj;
        }
    }
    if !want_input {
        return None;
    }
    Some(
        (0..x.len())
            .map(|i| {
                w[i * n_out..(i + 1) * n_out]
                    .iter()
                    .zip(g)
                    .map(|(&wij, &gj)| wij * gj)
                    .sum()
            })
            .collect(),
    )
}
