use ndarray::{Array1, Array2, ArrayView1, ArrayViewD, ArrayViewMutD, Axis};
use rand::Rng;

use crate::error::{Error, Result};
use crate::params::Parameters;
use crate::tensor::{softmax, xavier_uniform};

/// Width of the hidden layer of each fine-tuning head.
pub const HEAD_HIDDEN: usize = 384;

/// Two-layer classifier: `softmax(tanh(x W1 + b1) W2 + b2)`. Learning heads
/// have two outputs; wider `W2` gives a k-way classifier.
#[derive(Clone, Debug, PartialEq)]
pub struct HeadParams {
    /// `input x hidden`
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    /// `hidden x classes`
    pub w2: Array2<f64>,
    pub b2: Array1<f64>,
}

pub struct HeadCache {
    x: Array1<f64>,
    h: Array1<f64>,
    /// Class probabilities; `[negative, positive]` for learning heads.
    pub probs: Array1<f64>,
}

impl HeadParams {
    /// Xavier-uniform weights with gain 1, zero biases.
    pub fn new<R: Rng>(input: usize, hidden: usize, rng: &mut R) -> Self {
        HeadParams {
            w1: xavier_uniform(input, hidden, 1.0, rng),
            b1: Array1::zeros(hidden),
            w2: xavier_uniform(hidden, 2, 1.0, rng),
            b2: Array1::zeros(2),
        }
    }

    pub fn zeros(input: usize, hidden: usize) -> Self {
        HeadParams {
            w1: Array2::zeros((input, hidden)),
            b1: Array1::zeros(hidden),
            w2: Array2::zeros((hidden, 2)),
            b2: Array1::zeros(2),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.w1.nrows()
    }

    pub fn forward(&self, x: ArrayView1<f64>) -> Result<HeadCache> {
        if x.len() != self.input_dim() {
            return Err(Error::Shape(format!(
                "head input {} != expected {}",
                x.len(),
                self.input_dim()
            )));
        }
        let h = (x.dot(&self.w1) + &self.b1).mapv(f64::tanh);
        let logits = h.dot(&self.w2) + &self.b2;
        Ok(HeadCache {
            x: x.to_owned(),
            h,
            probs: softmax(logits.view()),
        })
    }

    /// Accumulates gradients of the cross-entropy loss for `label` and
    /// returns `dL/dx`.
    pub fn backward(&self, cache: &HeadCache, label: bool, grads: &mut HeadParams) -> Array1<f64> {
        let mut dlogits = cache.probs.clone();
        dlogits[usize::from(label)] -= 1.0;
        self.backward_from_logits(cache, dlogits.view(), grads)
    }

    /// Backpropagates an arbitrary `dL/dlogits`.
    pub fn backward_from_logits(
        &self,
        cache: &HeadCache,
        dlogits: ArrayView1<f64>,
        grads: &mut HeadParams,
    ) -> Array1<f64> {
        grads.b2 += &dlogits;
        grads.w2 += &outer(cache.h.view(), dlogits);
        let dh = self.w2.dot(&dlogits);
        let dz = &dh * &cache.h.mapv(|v| 1.0 - v * v);
        grads.b1 += &dz;
        grads.w1 += &outer(cache.x.view(), dz.view());
        self.w1.dot(&dz)
    }
}

impl HeadCache {
    pub fn positive_probability(&self) -> f64 {
        self.probs[1]
    }
}

/// Two-class cross-entropy of `probs` against `label`.
pub fn cross_entropy(probs: ArrayView1<f64>, label: bool) -> f64 {
    -probs[usize::from(label)].max(f64::MIN_POSITIVE).ln()
}

fn outer(a: ArrayView1<f64>, b: ArrayView1<f64>) -> Array2<f64> {
    a.insert_axis(Axis(1)).dot(&b.insert_axis(Axis(0)))
}

impl Parameters for HeadParams {
    fn tensors(&self) -> Vec<(String, ArrayViewD<'_, f64>)> {
        vec![
            ("w1".into(), self.w1.view().into_dyn()),
            ("b1".into(), self.b1.view().into_dyn()),
            ("w2".into(), self.w2.view().into_dyn()),
            ("b2".into(), self.b2.view().into_dyn()),
        ]
    }

    fn tensors_mut(&mut self) -> Vec<(String, ArrayViewMutD<'_, f64>)> {
        vec![
            ("w1".into(), self.w1.view_mut().into_dyn()),
            ("b1".into(), self.b1.view_mut().into_dyn()),
            ("w2".into(), self.w2.view_mut().into_dyn()),
            ("b2".into(), self.b2.view_mut().into_dyn()),
        ]
    }

    fn zeros_like(&self) -> Self {
        HeadParams {
            w1: Array2::zeros(self.w1.raw_dim()),
            b1: Array1::zeros(self.b1.len()),
            w2: Array2::zeros(self.w2.raw_dim()),
            b2: Array1::zeros(self.b2.len()),
        }
    }
}
