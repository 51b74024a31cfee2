//! Complex activations and dropout used by the deep variants.

use num_complex::Complex;
use rand::RngExt;

use crate::scalar::Scalar;

/// Magnitude-shifting ReLU: `(|z| + b) z/|z|` when `|z| + b >= 0`, else 0.
pub fn mod_relu<T: Scalar>(z: Complex<T>, b: T) -> Complex<T> {
    let r = z.norm();
    if r == T::zero() || r + b < T::zero() {
        return Complex::new(T::zero(), T::zero());
    }
    z * ((r + b) / r)
}

/// Gradients of [`mod_relu`] given the upstream gradient `g = dL/dRe + i dL/dIm`.
/// Returns `(dL/dz, dL/db)`.
pub fn mod_relu_backward<T: Scalar>(z: Complex<T>, b: T, g: Complex<T>) -> (Complex<T>, T) {
    let r = z.norm();
    if r == T::zero() || r + b < T::zero() {
        return (Complex::new(T::zero(), T::zero()), T::zero());
    }
    let r3 = r * r * r;
    let scale = T::one() + b / r;
    let cross = -b * z.re * z.im / r3;
    let drr = scale - b * z.re * z.re / r3;
    let dii = scale - b * z.im * z.im / r3;
    let dz = Complex::new(g.re * drr + g.im * cross, g.re * cross + g.im * dii);
    let db = (g.re * z.re + g.im * z.im) / r;
    (dz, db)
}

/// ReLU applied independently to the real and imaginary parts.
pub fn c_relu<T: Scalar>(z: Complex<T>) -> Complex<T> {
    Complex::new(z.re.max(T::zero()), z.im.max(T::zero()))
}

/// Subgradient at 0 is 0 per component.
pub fn c_relu_backward<T: Scalar>(z: Complex<T>, g: Complex<T>) -> Complex<T> {
    Complex::new(
        if z.re > T::zero() { g.re } else { T::zero() },
        if z.im > T::zero() { g.im } else { T::zero() },
    )
}

/// Draws the per-bin dropout multipliers: 0 with probability `p`, else `1/(1-p)`.
pub fn dropout_mask<T: Scalar, R: rand::Rng + ?Sized>(len: usize, p: f64, rng: &mut R) -> Vec<T> {
    if p <= 0.0 {
        return vec![T::one(); len];
    }
    let keep = T::lit(1.0 / (1.0 - p));
    (0..len)
        .map(|_| {
            if rng.random::<f64>() < p {
                T::zero()
            } else {
                keep
            }
        })
        .collect()
}

/// Complex dropout: whole bins are zeroed jointly, survivors rescaled.
/// Identity when `training` is false.
pub fn complex_dropout<T: Scalar, R: rand::Rng + ?Sized>(
    bins: &[Complex<T>],
    p: f64,
    training: bool,
    rng: &mut R,
) -> Vec<Complex<T>> {
    if !training || p <= 0.0 {
        return bins.to_vec();
    }
    let mask: Vec<T> = dropout_mask(bins.len(), p, rng);
    bins.iter().zip(&mask).map(|(&z, &m)| z * m).collect()
}
