//! Named parameter tensors.
//!
//! Every trainable component exposes its tensors in a fixed order under
//! stable names. Gradients and optimizer state reuse the same types, so
//! walking two instances side by side pairs tensors by position.

use ndarray::{ArrayViewD, ArrayViewMutD};

pub trait Parameters {
    fn tensors(&self) -> Vec<(String, ArrayViewD<'_, f64>)>;

    fn tensors_mut(&mut self) -> Vec<(String, ArrayViewMutD<'_, f64>)>;

    /// Same shapes, all zeros.
    fn zeros_like(&self) -> Self
    where
        Self: Sized;

    fn num_params(&self) -> usize {
        self.tensors().iter().map(|(_, t)| t.len()).sum()
    }

    fn fill_zero(&mut self) {
        for (_, mut t) in self.tensors_mut() {
            t.fill(0.0);
        }
    }

    fn is_finite(&self) -> bool {
        self.tensors()
            .iter()
            .all(|(_, t)| t.iter().all(|v| v.is_finite()))
    }
}

/// Prefixes tensor names with a component path, e.g. `composer.layer0.`.
pub(crate) fn prefixed<'a, T>(prefix: &str, items: Vec<(String, T)>) -> Vec<(String, T)>
where
    T: 'a,
{
    items
        .into_iter()
        .map(|(n, t)| (format!("{prefix}{n}"), t))
        .collect()
}
