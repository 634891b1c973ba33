//! Composer: stacked adjacency-masked multi-head attention over graph nodes.
//!
//! Each layer is a transformer encoder layer without the position-wise
//! feed-forward block:
//!
//! ```text
//! G = LN(E)                       per node, over features
//! Q = G Wq,  K = G Wk,  V = G Wv  split into heads
//! M = Q K^T / sqrt(d_k)           entries with A[i][j] = 0 set to -inf
//! P = softmax_rows(M)
//! U = concat_h(P V) Wo + E
//! ```
//!
//! Embeddings are stored one row per node (`n x d_model`). Row `i` attends
//! to node `j` iff `A[i][j] = 1`, i.e. edges point from the node being
//! updated to the node it reads from. The summary `S` is the mean of the
//! final rows.

use ndarray::{s, Array1, Array2, ArrayView2, ArrayViewD, ArrayViewMutD, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{prefixed, Parameters};
use crate::tensor::xavier_uniform;

pub const LAYER_NORM_EPS: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComposerConfig {
    pub d_model: usize,
    pub n_heads: usize,
    pub d_k: usize,
    pub d_v: usize,
    pub n_layers: usize,
}

impl Default for ComposerConfig {
    fn default() -> Self {
        ComposerConfig {
            d_model: 768,
            n_heads: 12,
            d_k: 64,
            d_v: 64,
            n_layers: 2,
        }
    }
}

/// Parameters of one attention layer: layer norm plus the four projections.
#[derive(Clone, Debug, PartialEq)]
pub struct AttentionLayerParams {
    pub ln_gain: Array1<f64>,
    pub ln_bias: Array1<f64>,
    /// `d_model x n_heads*d_k`
    pub w_q: Array2<f64>,
    /// `d_model x n_heads*d_k`
    pub w_k: Array2<f64>,
    /// `d_model x n_heads*d_v`
    pub w_v: Array2<f64>,
    /// `n_heads*d_v x d_model`
    pub w_o: Array2<f64>,
}

impl AttentionLayerParams {
    fn init<R: Rng>(c: &ComposerConfig, rng: &mut R) -> Self {
        let hk = c.n_heads * c.d_k;
        let hv = c.n_heads * c.d_v;
        AttentionLayerParams {
            ln_gain: Array1::ones(c.d_model),
            ln_bias: Array1::zeros(c.d_model),
            w_q: xavier_uniform(c.d_model, hk, 1.0, rng),
            w_k: xavier_uniform(c.d_model, hk, 1.0, rng),
            w_v: xavier_uniform(c.d_model, hv, 1.0, rng),
            w_o: xavier_uniform(hv, c.d_model, 1.0, rng),
        }
    }

    fn zeros(c: &ComposerConfig) -> Self {
        let hk = c.n_heads * c.d_k;
        let hv = c.n_heads * c.d_v;
        AttentionLayerParams {
            ln_gain: Array1::zeros(c.d_model),
            ln_bias: Array1::zeros(c.d_model),
            w_q: Array2::zeros((c.d_model, hk)),
            w_k: Array2::zeros((c.d_model, hk)),
            w_v: Array2::zeros((c.d_model, hv)),
            w_o: Array2::zeros((hv, c.d_model)),
        }
    }

    fn tensors(&self) -> Vec<(String, ArrayViewD<'_, f64>)> {
        vec![
            ("ln_gain".into(), self.ln_gain.view().into_dyn()),
            ("ln_bias".into(), self.ln_bias.view().into_dyn()),
            ("w_q".into(), self.w_q.view().into_dyn()),
            ("w_k".into(), self.w_k.view().into_dyn()),
            ("w_v".into(), self.w_v.view().into_dyn()),
            ("w_o".into(), self.w_o.view().into_dyn()),
        ]
    }

    fn tensors_mut(&mut self) -> Vec<(String, ArrayViewMutD<'_, f64>)> {
        vec![
            ("ln_gain".into(), self.ln_gain.view_mut().into_dyn()),
            ("ln_bias".into(), self.ln_bias.view_mut().into_dyn()),
            ("w_q".into(), self.w_q.view_mut().into_dyn()),
            ("w_k".into(), self.w_k.view_mut().into_dyn()),
            ("w_v".into(), self.w_v.view_mut().into_dyn()),
            ("w_o".into(), self.w_o.view_mut().into_dyn()),
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComposerParams {
    pub config: ComposerConfig,
    pub layers: Vec<AttentionLayerParams>,
}

impl ComposerParams {
    /// Xavier-uniform projections, unit layer-norm gain, zero bias.
    pub fn new<R: Rng>(config: ComposerConfig, rng: &mut R) -> Result<Self> {
        validate_config(&config)?;
        let layers = (0..config.n_layers)
            .map(|_| AttentionLayerParams::init(&config, rng))
            .collect();
        Ok(ComposerParams { config, layers })
    }

    pub fn zeros(config: ComposerConfig) -> Result<Self> {
        validate_config(&config)?;
        let layers = (0..config.n_layers)
            .map(|_| AttentionLayerParams::zeros(&config))
            .collect();
        Ok(ComposerParams { config, layers })
    }
}

fn validate_config(c: &ComposerConfig) -> Result<()> {
    if c.d_model == 0 || c.n_heads == 0 || c.d_k == 0 || c.d_v == 0 || c.n_layers == 0 {
        return Err(Error::Shape(format!("degenerate composer config {c:?}")));
    }
    Ok(())
}

impl Parameters for ComposerParams {
    fn tensors(&self) -> Vec<(String, ArrayViewD<'_, f64>)> {
        self.layers
            .iter()
            .enumerate()
            .flat_map(|(i, l)| prefixed(&format!("layer{i}."), l.tensors()))
            .collect()
    }

    fn tensors_mut(&mut self) -> Vec<(String, ArrayViewMutD<'_, f64>)> {
        self.layers
            .iter_mut()
            .enumerate()
            .flat_map(|(i, l)| prefixed(&format!("layer{i}."), l.tensors_mut()))
            .collect()
    }

    fn zeros_like(&self) -> Self {
        ComposerParams::zeros(self.config).expect("existing config is valid")
    }
}

/// Updated node embeddings and the graph summary.
#[derive(Clone, Debug, PartialEq)]
pub struct ComposedEmbeddings {
    /// `n x d_model`
    pub u: Array2<f64>,
    pub s: Array1<f64>,
}

struct LayerNormCache {
    xhat: Array2<f64>,
    rstd: Array1<f64>,
}

fn layer_norm(x: ArrayView2<f64>, gain: &Array1<f64>, bias: &Array1<f64>) -> (Array2<f64>, LayerNormCache) {
    let d = x.ncols() as f64;
    let mut xhat = x.to_owned();
    let mut rstd = Array1::zeros(x.nrows());
    for (mut row, r) in xhat.outer_iter_mut().zip(rstd.iter_mut()) {
        let mean = row.sum() / d;
        row.mapv_inplace(|v| v - mean);
        let var = row.iter().map(|v| v * v).sum::<f64>() / d;
        *r = 1.0 / (var + LAYER_NORM_EPS).sqrt();
        row *= *r;
    }
    let y = &xhat * gain + bias;
    (y, LayerNormCache { xhat, rstd })
}

fn layer_norm_backward(
    dy: &Array2<f64>,
    cache: &LayerNormCache,
    gain: &Array1<f64>,
    d_gain: &mut Array1<f64>,
    d_bias: &mut Array1<f64>,
) -> Array2<f64> {
    *d_gain += &(dy * &cache.xhat).sum_axis(Axis(0));
    *d_bias += &dy.sum_axis(Axis(0));
    let dxhat = dy * gain;
    let d = dy.ncols() as f64;
    let mut dx = Array2::zeros(dy.raw_dim());
    for i in 0..dy.nrows() {
        let g = dxhat.row(i);
        let xh = cache.xhat.row(i);
        let mean_g = g.sum() / d;
        let mean_gx = g.dot(&xh) / d;
        let r = cache.rstd[i];
        let mut out = dx.row_mut(i);
        for j in 0..g.len() {
            out[j] = r * (g[j] - mean_g - xh[j] * mean_gx);
        }
    }
    dx
}

/// Row-wise softmax over permitted entries; forbidden entries are exactly 0.
fn masked_softmax(scores: &Array2<f64>, mask: &Array2<bool>) -> Array2<f64> {
    let mut p = Array2::zeros(scores.raw_dim());
    for i in 0..scores.nrows() {
        let mut max = f64::NEG_INFINITY;
        for j in 0..scores.ncols() {
            if mask[[i, j]] {
                max = max.max(scores[[i, j]]);
            }
        }
        let mut sum = 0.0;
        for j in 0..scores.ncols() {
            if mask[[i, j]] {
                let e = (scores[[i, j]] - max).exp();
                p[[i, j]] = e;
                sum += e;
            }
        }
        p.row_mut(i).mapv_inplace(|v| v / sum);
    }
    p
}

/// Checks that the mask is square, matches `n` and has every self-loop.
pub fn validate_mask(mask: &Array2<bool>, n: usize) -> Result<()> {
    if mask.dim() != (n, n) {
        return Err(Error::Shape(format!(
            "mask is {:?}, expected ({n}, {n})",
            mask.dim()
        )));
    }
    if let Some(i) = (0..n).find(|&i| !mask[[i, i]]) {
        return Err(Error::Validation(format!(
            "adjacency mask lacks self-loop on node {i}"
        )));
    }
    Ok(())
}

/// Intermediates of one layer, including per-head attention weights.
pub struct LayerCache {
    ln: LayerNormCache,
    g: Array2<f64>,
    q: Array2<f64>,
    k: Array2<f64>,
    v: Array2<f64>,
    o: Array2<f64>,
    /// One `n x n` row-stochastic matrix per head.
    pub attention: Vec<Array2<f64>>,
}

fn layer_forward(
    x: ArrayView2<f64>,
    mask: &Array2<bool>,
    p: &AttentionLayerParams,
    c: &ComposerConfig,
) -> Result<(Array2<f64>, LayerCache)> {
    let n = x.nrows();
    if x.ncols() != c.d_model {
        return Err(Error::Shape(format!(
            "embedding width {} != d_model {}",
            x.ncols(),
            c.d_model
        )));
    }
    validate_mask(mask, n)?;
    let (g, ln) = layer_norm(x, &p.ln_gain, &p.ln_bias);
    let q = g.dot(&p.w_q);
    let k = g.dot(&p.w_k);
    let v = g.dot(&p.w_v);
    let scale = 1.0 / (c.d_k as f64).sqrt();
    let mut o = Array2::zeros((n, c.n_heads * c.d_v));
    let mut attention = Vec::with_capacity(c.n_heads);
    for h in 0..c.n_heads {
        let qh = q.slice(s![.., h * c.d_k..(h + 1) * c.d_k]);
        let kh = k.slice(s![.., h * c.d_k..(h + 1) * c.d_k]);
        let vh = v.slice(s![.., h * c.d_v..(h + 1) * c.d_v]);
        let scores = qh.dot(&kh.t()) * scale;
        let ph = masked_softmax(&scores, mask);
        o.slice_mut(s![.., h * c.d_v..(h + 1) * c.d_v])
            .assign(&ph.dot(&vh));
        attention.push(ph);
    }
    let y = o.dot(&p.w_o) + x;
    Ok((
        y,
        LayerCache {
            ln,
            g,
            q,
            k,
            v,
            o,
            attention,
        },
    ))
}

fn layer_backward(
    dy: &Array2<f64>,
    cache: &LayerCache,
    p: &AttentionLayerParams,
    c: &ComposerConfig,
    grads: &mut AttentionLayerParams,
) -> Array2<f64> {
    let mut dx = dy.clone();
    grads.w_o += &cache.o.t().dot(dy);
    let d_o = dy.dot(&p.w_o.t());
    let scale = 1.0 / (c.d_k as f64).sqrt();
    let mut dq = Array2::zeros(cache.q.raw_dim());
    let mut dk = Array2::zeros(cache.k.raw_dim());
    let mut dv = Array2::zeros(cache.v.raw_dim());
    for h in 0..c.n_heads {
        let ks = s![.., h * c.d_k..(h + 1) * c.d_k];
        let vs = s![.., h * c.d_v..(h + 1) * c.d_v];
        let ph = &cache.attention[h];
        let doh = d_o.slice(vs);
        let dph = doh.dot(&cache.v.slice(vs).t());
        dv.slice_mut(vs).assign(&ph.t().dot(&doh));
        // Softmax Jacobian; forbidden entries have P = 0 and get no gradient.
        let row_dot = (&dph * ph).sum_axis(Axis(1)).insert_axis(Axis(1));
        let ds = ph * &(&dph - &row_dot) * scale;
        dq.slice_mut(ks).assign(&ds.dot(&cache.k.slice(ks)));
        dk.slice_mut(ks).assign(&ds.t().dot(&cache.q.slice(ks)));
    }
    grads.w_q += &cache.g.t().dot(&dq);
    grads.w_k += &cache.g.t().dot(&dk);
    grads.w_v += &cache.g.t().dot(&dv);
    let dg = dq.dot(&p.w_q.t()) + dk.dot(&p.w_k.t()) + dv.dot(&p.w_v.t());
    dx += &layer_norm_backward(
        &dg,
        &cache.ln,
        &p.ln_gain,
        &mut grads.ln_gain,
        &mut grads.ln_bias,
    );
    dx
}

/// One masked attention layer applied to `e` (`n x d_model`).
pub fn graph_attention_layer(
    e: ArrayView2<f64>,
    mask: &Array2<bool>,
    layer: &AttentionLayerParams,
    config: &ComposerConfig,
) -> Result<Array2<f64>> {
    Ok(layer_forward(e, mask, layer, config)?.0)
}

/// Forward-pass intermediates of [`compose`].
pub struct ComposerCache {
    pub layers: Vec<LayerCache>,
}

impl ComposerParams {
    pub fn forward(
        &self,
        e: ArrayView2<f64>,
        mask: &Array2<bool>,
    ) -> Result<(ComposedEmbeddings, ComposerCache)> {
        if e.nrows() == 0 {
            return Err(Error::Shape("cannot compose an empty graph".into()));
        }
        let mut x = e.to_owned();
        let mut caches = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let (y, cache) = layer_forward(x.view(), mask, layer, &self.config)?;
            caches.push(cache);
            x = y;
        }
        let s = x.mean_axis(Axis(0)).expect("non-empty");
        Ok((ComposedEmbeddings { u: x, s }, ComposerCache { layers: caches }))
    }

    /// Accumulates parameter gradients and returns `dL/dE` given `dL/dU`
    /// and `dL/dS`.
    pub fn backward(
        &self,
        cache: &ComposerCache,
        du: &Array2<f64>,
        ds: &Array1<f64>,
        grads: &mut ComposerParams,
    ) -> Array2<f64> {
        let n = du.nrows() as f64;
        let mut d = du + &(ds / n).insert_axis(Axis(0));
        for (l, lc) in cache.layers.iter().enumerate().rev() {
            d = layer_backward(&d, lc, &self.layers[l], &self.config, &mut grads.layers[l]);
        }
        d
    }
}

/// Applies every layer and mean-pools the result.
pub fn compose(
    e: ArrayView2<f64>,
    mask: &Array2<bool>,
    params: &ComposerParams,
) -> Result<ComposedEmbeddings> {
    Ok(params.forward(e, mask)?.0)
}

/// Attention weights of every layer and head for one forward pass.
pub fn attention_weights(
    e: ArrayView2<f64>,
    mask: &Array2<bool>,
    params: &ComposerParams,
) -> Result<Vec<Vec<Array2<f64>>>> {
    let (_, cache) = params.forward(e, mask)?;
    Ok(cache.layers.into_iter().map(|l| l.attention).collect())
}
