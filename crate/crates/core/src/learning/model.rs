use ndarray::{concatenate, s, Array1, Array2, ArrayViewD, ArrayViewMutD, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::head::{cross_entropy, HeadCache, HeadParams, HEAD_HIDDEN};
use super::{LinkSample, Task};
use crate::composer::{ComposedEmbeddings, ComposerCache, ComposerConfig, ComposerParams};
use crate::corpus::Corpus;
use crate::embeddings::DEFAULT_DIM;
use crate::encoder::{node_input, DocumentMask, DocumentVectors, EncoderCache, EncoderParams};
use crate::error::{Error, Result};
use crate::graphgen::DiscourseGraph;
use crate::params::{prefixed, Parameters};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelMode {
    /// Encoder, composer and heads over `[E_s, U_s, E_o, U_o, S]`.
    CompositionalReader,
    /// Encoder and heads over `[E_s, E_o]`; the composer is absent.
    EncoderOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub mode: ModelMode,
    pub d_model: usize,
    pub n_heads: usize,
    pub d_k: usize,
    pub d_v: usize,
    pub n_layers: usize,
    pub head_hidden: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let c = ComposerConfig::default();
        ModelConfig {
            mode: ModelMode::CompositionalReader,
            d_model: DEFAULT_DIM,
            n_heads: c.n_heads,
            d_k: c.d_k,
            d_v: c.d_v,
            n_layers: c.n_layers,
            head_hidden: HEAD_HIDDEN,
        }
    }
}

impl ModelConfig {
    pub fn composer(&self) -> ComposerConfig {
        ComposerConfig {
            d_model: self.d_model,
            n_heads: self.n_heads,
            d_k: self.d_k,
            d_v: self.d_v,
            n_layers: self.n_layers,
        }
    }

    /// Width of the head input.
    pub fn feature_dim(&self) -> usize {
        match self.mode {
            ModelMode::CompositionalReader => 5 * self.d_model,
            ModelMode::EncoderOnly => 2 * self.d_model,
        }
    }
}

/// Shared encoder and composer plus one head per task.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub config: ModelConfig,
    pub encoder: EncoderParams,
    pub composer: Option<ComposerParams>,
    pub authorship: HeadParams,
    pub ref_entity: HeadParams,
}

impl Model {
    /// Draws encoder, composer, authorship head and entity head in that order.
    pub fn new<R: Rng>(config: ModelConfig, rng: &mut R) -> Result<Self> {
        if config.head_hidden == 0 {
            return Err(Error::Shape("head_hidden must be positive".into()));
        }
        let encoder = EncoderParams::new(config.d_model, rng)?;
        let composer = match config.mode {
            ModelMode::CompositionalReader => Some(ComposerParams::new(config.composer(), rng)?),
            ModelMode::EncoderOnly => None,
        };
        let f = config.feature_dim();
        let authorship = HeadParams::new(f, config.head_hidden, rng);
        let ref_entity = HeadParams::new(f, config.head_hidden, rng);
        Ok(Model {
            config,
            encoder,
            composer,
            authorship,
            ref_entity,
        })
    }

    pub fn zeros(config: ModelConfig) -> Result<Self> {
        let composer = match config.mode {
            ModelMode::CompositionalReader => Some(ComposerParams::zeros(config.composer())?),
            ModelMode::EncoderOnly => None,
        };
        let f = config.feature_dim();
        Ok(Model {
            config,
            encoder: EncoderParams::zeros(config.d_model)?,
            composer,
            authorship: HeadParams::zeros(f, config.head_hidden),
            ref_entity: HeadParams::zeros(f, config.head_hidden),
        })
    }

    pub fn head(&self, task: Task) -> &HeadParams {
        match task {
            Task::Authorship => &self.authorship,
            Task::RefEntity => &self.ref_entity,
        }
    }

    fn head_mut(&mut self, task: Task) -> &mut HeadParams {
        match task {
            Task::Authorship => &mut self.authorship,
            Task::RefEntity => &mut self.ref_entity,
        }
    }

    /// Initial embeddings of every node and, in compositional mode, the
    /// composed embeddings. In encoder-only mode `U = E` and `S` is the row
    /// mean of `E`.
    pub fn embed_graph(
        &self,
        graph: &DiscourseGraph,
        corpus: &Corpus,
        vectors: &mut DocumentVectors<'_>,
        mask: DocumentMask<'_>,
    ) -> Result<(Array2<f64>, ComposedEmbeddings)> {
        let nodes: Vec<usize> = (0..graph.len()).collect();
        let (e, _) = self.encode_nodes(graph, &nodes, corpus, vectors, mask)?;
        let composed = match &self.composer {
            Some(c) => c.forward(e.view(), &graph.mask())?.0,
            None => ComposedEmbeddings {
                u: e.clone(),
                s: e.mean_axis(Axis(0))
                    .ok_or_else(|| Error::Shape("empty graph".into()))?,
            },
        };
        Ok((e, composed))
    }

    fn encode_nodes(
        &self,
        graph: &DiscourseGraph,
        nodes: &[usize],
        corpus: &Corpus,
        vectors: &mut DocumentVectors<'_>,
        mask: DocumentMask<'_>,
    ) -> Result<(Array2<f64>, Vec<(usize, EncoderCache)>)> {
        if vectors.dim() != self.config.d_model {
            return Err(Error::Shape(format!(
                "provider dimension {} != model width {}",
                vectors.dim(),
                self.config.d_model
            )));
        }
        let mut e = Array2::zeros((graph.len(), self.config.d_model));
        let mut caches = Vec::with_capacity(nodes.len());
        for &i in nodes {
            let input = node_input(graph, i, corpus, vectors, mask)?;
            let (v, cache) = self.encoder.forward(input.view())?;
            e.row_mut(i).assign(&v);
            caches.push((i, cache));
        }
        Ok((e, caches))
    }

    /// Full forward pass for one link sample.
    pub fn link_forward(
        &self,
        sample: &LinkSample,
        corpus: &Corpus,
        vectors: &mut DocumentVectors<'_>,
    ) -> Result<LinkForward> {
        let n = sample.graph.len();
        let (si, oi) = (sample.subject_node, sample.object_node);
        if si >= n || oi >= n {
            return Err(Error::Graph(format!(
                "sample nodes ({si}, {oi}) out of range for {n}-node graph"
            )));
        }
        let mask = sample.document_mask();
        let d = self.config.d_model;
        match &self.composer {
            Some(composer) => {
                let nodes: Vec<usize> = (0..n).collect();
                let (e, encoded) = self.encode_nodes(&sample.graph, &nodes, corpus, vectors, mask)?;
                let (composed, cache) = composer.forward(e.view(), &sample.graph.mask())?;
                let x = concatenate(
                    Axis(0),
                    &[
                        e.row(si),
                        composed.u.row(si),
                        e.row(oi),
                        composed.u.row(oi),
                        composed.s.view(),
                    ],
                )
                .expect("all parts have width d_model");
                debug_assert_eq!(x.len(), 5 * d);
                let head = self.head(sample.task).forward(x.view())?;
                Ok(LinkForward {
                    encoded,
                    composer: Some(cache),
                    head,
                    n,
                })
            }
            None => {
                let (e, encoded) = self.encode_nodes(&sample.graph, &[si, oi], corpus, vectors, mask)?;
                let x = concatenate(Axis(0), &[e.row(si), e.row(oi)]).expect("same width");
                let head = self.head(sample.task).forward(x.view())?;
                Ok(LinkForward {
                    encoded,
                    composer: None,
                    head,
                    n,
                })
            }
        }
    }

    /// Probability that the sample's link holds.
    pub fn link_predict(
        &self,
        sample: &LinkSample,
        corpus: &Corpus,
        vectors: &mut DocumentVectors<'_>,
    ) -> Result<f64> {
        Ok(self.link_forward(sample, corpus, vectors)?.probability())
    }

    /// Accumulates gradients of the sample's cross-entropy loss into `grads`
    /// and returns the loss.
    pub fn link_backward(&self, fwd: &LinkForward, sample: &LinkSample, grads: &mut Model) -> f64 {
        let d = self.config.d_model;
        let loss = cross_entropy(fwd.head.probs.view(), sample.label);
        let dx = self
            .head(sample.task)
            .backward(&fwd.head, sample.label, grads.head_mut(sample.task));
        let (si, oi) = (sample.subject_node, sample.object_node);
        let mut de = Array2::zeros((fwd.n, d));
        match (&self.composer, &fwd.composer) {
            (Some(composer), Some(cache)) => {
                let mut du = Array2::zeros((fwd.n, d));
                de.row_mut(si).assign(&dx.slice(s![0..d]));
                du.row_mut(si).assign(&dx.slice(s![d..2 * d]));
                de.row_mut(oi).scaled_add(1.0, &dx.slice(s![2 * d..3 * d]));
                du.row_mut(oi).scaled_add(1.0, &dx.slice(s![3 * d..4 * d]));
                let ds = dx.slice(s![4 * d..5 * d]).to_owned();
                let grads_composer = grads.composer.as_mut().expect("same mode as model");
                de += &composer.backward(cache, &du, &ds, grads_composer);
            }
            _ => {
                de.row_mut(si).assign(&dx.slice(s![0..d]));
                de.row_mut(oi).scaled_add(1.0, &dx.slice(s![d..2 * d]));
            }
        }
        for (i, cache) in &fwd.encoded {
            self.encoder.backward(cache, de.row(*i), &mut grads.encoder);
        }
        loss
    }
}

/// Intermediates of [`Model::link_forward`].
pub struct LinkForward {
    encoded: Vec<(usize, EncoderCache)>,
    composer: Option<ComposerCache>,
    head: HeadCache,
    n: usize,
}

impl LinkForward {
    pub fn probability(&self) -> f64 {
        self.head.positive_probability()
    }

    pub fn probs(&self) -> &Array1<f64> {
        &self.head.probs
    }
}

impl Parameters for Model {
    fn tensors(&self) -> Vec<(String, ArrayViewD<'_, f64>)> {
        let mut out = prefixed("encoder.", self.encoder.tensors());
        if let Some(c) = &self.composer {
            out.extend(prefixed("composer.", c.tensors()));
        }
        out.extend(prefixed("head.authorship.", self.authorship.tensors()));
        out.extend(prefixed("head.ref_entity.", self.ref_entity.tensors()));
        out
    }

    fn tensors_mut(&mut self) -> Vec<(String, ArrayViewMutD<'_, f64>)> {
        let mut out = prefixed("encoder.", self.encoder.tensors_mut());
        if let Some(c) = &mut self.composer {
            out.extend(prefixed("composer.", c.tensors_mut()));
        }
        out.extend(prefixed("head.authorship.", self.authorship.tensors_mut()));
        out.extend(prefixed("head.ref_entity.", self.ref_entity.tensors_mut()));
        out
    }

    fn zeros_like(&self) -> Self {
        Model::zeros(self.config).expect("existing config is valid")
    }
}

/// Stochastic gradient descent with momentum: `v = mu v + g; p -= lr v`.
///
/// Only the shared components and the head of the sample's task are
/// stepped; the other head keeps both its parameters and its velocity.
#[derive(Clone, Debug)]
pub struct Sgd {
    pub learning_rate: f64,
    pub momentum: f64,
    velocity: Model,
}

impl Sgd {
    pub fn new(model: &Model, learning_rate: f64, momentum: f64) -> Self {
        Sgd {
            learning_rate,
            momentum,
            velocity: model.zeros_like(),
        }
    }

    pub fn reset(&mut self) {
        self.velocity.fill_zero();
    }

    pub fn step(&mut self, model: &mut Model, grads: &Model, task: Task) {
        let (lr, mu) = (self.learning_rate, self.momentum);
        step_component(&mut model.encoder, &grads.encoder, &mut self.velocity.encoder, lr, mu);
        if let (Some(p), Some(g), Some(v)) = (
            model.composer.as_mut(),
            grads.composer.as_ref(),
            self.velocity.composer.as_mut(),
        ) {
            step_component(p, g, v, lr, mu);
        }
        step_component(
            model.head_mut(task),
            grads.head(task),
            self.velocity.head_mut(task),
            lr,
            mu,
        );
    }
}

fn step_component<P: Parameters>(p: &mut P, g: &P, v: &mut P, lr: f64, mu: f64) {
    let gs = g.tensors();
    for (((_, mut pt), (_, mut vt)), (_, gt)) in p.tensors_mut().into_iter().zip(v.tensors_mut()).zip(gs) {
        vt.zip_mut_with(&gt, |vi, &gi| *vi = mu * *vi + gi);
        pt.zip_mut_with(&vt, |pi, &vi| *pi -= lr * vi);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_scale_parameter_count() {
        let m = Model::zeros(ModelConfig::default()).unwrap();
        let shared = m.encoder.num_params() + m.composer.as_ref().unwrap().num_params();
        assert_eq!(shared, 8_263_680);
    }

    #[test]
    fn encoder_only_has_no_composer_tensors() {
        let cfg = ModelConfig {
            mode: ModelMode::EncoderOnly,
            d_model: 8,
            n_heads: 2,
            d_k: 4,
            d_v: 4,
            n_layers: 2,
            head_hidden: 6,
        };
        let m = Model::zeros(cfg).unwrap();
        assert!(m.tensors().iter().all(|(n, _)| !n.starts_with("composer.")));
        assert_eq!(m.authorship.input_dim(), 16);
    }
}
