//! Small dense-math helpers shared by the neural modules.

use ndarray::{Array1, Array2, ArrayView1};
use rand::Rng;

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Xavier/Glorot uniform initialisation for a `fan_in x fan_out` matrix.
pub(crate) fn xavier_uniform<R: Rng>(fan_in: usize, fan_out: usize, gain: f64, rng: &mut R) -> Array2<f64> {
    let bound = gain * (6.0 / (fan_in + fan_out) as f64).sqrt();
    uniform2(fan_in, fan_out, bound, rng)
}

pub(crate) fn uniform2<R: Rng>(rows: usize, cols: usize, bound: f64, rng: &mut R) -> Array2<f64> {
    // Row-major fill keeps the draw order fixed for a given seed.
    let data: Vec<f64> = (0..rows * cols)
        .map(|_| rng.gen_range(-bound..bound))
        .collect();
    Array2::from_shape_vec((rows, cols), data).expect("shape matches data length")
}

pub(crate) fn uniform1<R: Rng>(len: usize, bound: f64, rng: &mut R) -> Array1<f64> {
    (0..len).map(|_| rng.gen_range(-bound..bound)).collect()
}

/// Numerically stable softmax of a small vector.
pub(crate) fn softmax(logits: ArrayView1<f64>) -> Array1<f64> {
    let max = logits.fold(f64::NEG_INFINITY, |m, &x| m.max(x));
    let exp = logits.mapv(|x| (x - max).exp());
    let sum = exp.sum();
    exp / sum
}

/// Cosine similarity; zero when either vector has zero norm.
pub fn cosine(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    let na = a.dot(&a).sqrt();
    let nb = b.dot(&b).sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    a.dot(&b) / (na * nb)
}

pub(crate) fn all_finite<'a>(values: impl IntoIterator<Item = &'a f64>) -> bool {
    values.into_iter().all(|v| v.is_finite())
}
