//! Node encoder: pooled document embeddings through a bidirectional LSTM.
//!
//! Each node is read as a temporally ordered sequence of documents. Every
//! document becomes one vector (pooled sentence embeddings), the sequence
//! runs through a single-layer bidirectional LSTM with `d_model / 2` hidden
//! units per direction, and the concatenated per-step outputs are averaged
//! into the node's initial embedding.

use std::collections::HashMap;

use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, ArrayViewD, ArrayViewMutD, Axis};
use rand::Rng;

use crate::corpus::{Corpus, Document};
use crate::embeddings::{document_key, embed_document, pool_document, EmbeddingProvider};
use crate::error::{Error, Result};
use crate::graphgen::DiscourseGraph;
use crate::params::{prefixed, Parameters};
use crate::tensor::{sigmoid, uniform1, uniform2};

/// One direction of the LSTM. Gate rows are ordered input, forget, cell,
/// output.
#[derive(Clone, Debug, PartialEq)]
pub struct LstmDirection {
    pub w_ih: Array2<f64>,
    pub w_hh: Array2<f64>,
    pub bias: Array1<f64>,
}

impl LstmDirection {
    fn init<R: Rng>(input: usize, hidden: usize, rng: &mut R) -> Self {
        let k = 1.0 / (hidden as f64).sqrt();
        LstmDirection {
            w_ih: uniform2(4 * hidden, input, k, rng),
            w_hh: uniform2(4 * hidden, hidden, k, rng),
            bias: uniform1(4 * hidden, k, rng),
        }
    }

    fn zeros(input: usize, hidden: usize) -> Self {
        LstmDirection {
            w_ih: Array2::zeros((4 * hidden, input)),
            w_hh: Array2::zeros((4 * hidden, hidden)),
            bias: Array1::zeros(4 * hidden),
        }
    }

    fn hidden(&self) -> usize {
        self.w_hh.ncols()
    }
}

#[derive(Clone, Debug)]
struct Step {
    input: usize,
    h_prev: Array1<f64>,
    c_prev: Array1<f64>,
    i: Array1<f64>,
    f: Array1<f64>,
    g: Array1<f64>,
    o: Array1<f64>,
    tanh_c: Array1<f64>,
    h: Array1<f64>,
}

impl LstmDirection {
    /// Runs over `order` (indices into `xs` rows) from zero initial state.
    fn run(&self, xs: ArrayView2<f64>, order: impl Iterator<Item = usize>) -> Vec<Step> {
        let hd = self.hidden();
        let mut h = Array1::zeros(hd);
        let mut c = Array1::zeros(hd);
        let mut steps = Vec::with_capacity(xs.nrows());
        for t in order {
            let z = self.w_ih.dot(&xs.row(t)) + self.w_hh.dot(&h) + &self.bias;
            let i = z.slice(s![0..hd]).mapv(sigmoid);
            let f = z.slice(s![hd..2 * hd]).mapv(sigmoid);
            let g = z.slice(s![2 * hd..3 * hd]).mapv(f64::tanh);
            let o = z.slice(s![3 * hd..4 * hd]).mapv(sigmoid);
            let c_new = &f * &c + &i * &g;
            let tanh_c = c_new.mapv(f64::tanh);
            let h_new = &o * &tanh_c;
            steps.push(Step {
                input: t,
                h_prev: h,
                c_prev: c,
                i,
                f,
                g,
                o,
                tanh_c,
                h: h_new.clone(),
            });
            h = h_new;
            c = c_new;
        }
        steps
    }

    /// Backpropagation through time. `dh[k]` is the loss gradient w.r.t. the
    /// output of step `k` (in run order).
    fn backprop(&self, xs: ArrayView2<f64>, steps: &[Step], dh: &[Array1<f64>], grads: &mut LstmDirection) {
        let hd = self.hidden();
        let mut dh_next = Array1::zeros(hd);
        let mut dc_next = Array1::zeros(hd);
        let mut dz = Array1::zeros(4 * hd);
        for (k, st) in steps.iter().enumerate().rev() {
            let dh_total = &dh[k] + &dh_next;
            let d_o = &dh_total * &st.tanh_c;
            let dc = &dh_total * &st.o * &st.tanh_c.mapv(|t| 1.0 - t * t) + &dc_next;
            let di = &dc * &st.g;
            let dg = &dc * &st.i;
            let df = &dc * &st.c_prev;
            dc_next = &dc * &st.f;

            dz.slice_mut(s![0..hd]).assign(&(&di * &st.i.mapv(|v| v * (1.0 - v))));
            dz.slice_mut(s![hd..2 * hd]).assign(&(&df * &st.f.mapv(|v| v * (1.0 - v))));
            dz.slice_mut(s![2 * hd..3 * hd]).assign(&(&dg * &st.g.mapv(|v| 1.0 - v * v)));
            dz.slice_mut(s![3 * hd..4 * hd]).assign(&(&d_o * &st.o.mapv(|v| v * (1.0 - v))));

            let x = xs.row(st.input);
            outer_add(&mut grads.w_ih, dz.view(), x);
            outer_add(&mut grads.w_hh, dz.view(), st.h_prev.view());
            grads.bias += &dz;
            dh_next = self.w_hh.t().dot(&dz);
        }
    }
}

fn outer_add(target: &mut Array2<f64>, col: ArrayView1<f64>, row: ArrayView1<f64>) {
    let c = col.insert_axis(Axis(1));
    let r = row.insert_axis(Axis(0));
    general_mat_mul(1.0, &c, &r, 1.0, target);
}

/// Shared encoder parameters for all node types.
#[derive(Clone, Debug, PartialEq)]
pub struct EncoderParams {
    pub forward: LstmDirection,
    pub backward: LstmDirection,
}

/// Forward-pass intermediates needed for backpropagation.
#[derive(Clone, Debug)]
pub struct EncoderCache {
    inputs: Array2<f64>,
    fwd: Vec<Step>,
    bwd: Vec<Step>,
}

impl EncoderParams {
    /// Uniform(-1/sqrt(h), 1/sqrt(h)) initialisation, `h = d_model / 2`.
    pub fn new<R: Rng>(d_model: usize, rng: &mut R) -> Result<Self> {
        let hidden = half(d_model)?;
        Ok(EncoderParams {
            forward: LstmDirection::init(d_model, hidden, rng),
            backward: LstmDirection::init(d_model, hidden, rng),
        })
    }

    pub fn zeros(d_model: usize) -> Result<Self> {
        let hidden = half(d_model)?;
        Ok(EncoderParams {
            forward: LstmDirection::zeros(d_model, hidden),
            backward: LstmDirection::zeros(d_model, hidden),
        })
    }

    pub fn d_model(&self) -> usize {
        self.forward.w_ih.ncols()
    }

    /// Encodes a `(documents x d_model)` sequence into one `d_model` vector.
    pub fn forward(&self, seq: ArrayView2<f64>) -> Result<(Array1<f64>, EncoderCache)> {
        let (t, d) = seq.dim();
        if t == 0 {
            return Err(Error::Shape("empty document sequence".into()));
        }
        if d != self.d_model() {
            return Err(Error::Shape(format!(
                "sequence width {d} != encoder width {}",
                self.d_model()
            )));
        }
        let fwd = self.forward.run(seq, 0..t);
        let bwd = self.backward.run(seq, (0..t).rev());
        let hd = self.forward.hidden();
        let mut out = Array1::zeros(2 * hd);
        for st in &fwd {
            out.slice_mut(s![0..hd]).scaled_add(1.0, &st.h);
        }
        for st in &bwd {
            out.slice_mut(s![hd..]).scaled_add(1.0, &st.h);
        }
        out /= t as f64;
        Ok((
            out,
            EncoderCache {
                inputs: seq.to_owned(),
                fwd,
                bwd,
            },
        ))
    }

    /// Per-step outputs `e_t = [h_fwd_t ; h_bwd_t]` in document order.
    pub fn step_outputs(&self, seq: ArrayView2<f64>) -> Result<Array2<f64>> {
        let (_, cache) = self.forward(seq)?;
        let t = seq.nrows();
        let hd = self.forward.hidden();
        let mut out = Array2::zeros((t, 2 * hd));
        for st in &cache.fwd {
            out.slice_mut(s![st.input, 0..hd]).assign(&st.h);
        }
        for st in &cache.bwd {
            out.slice_mut(s![st.input, hd..]).assign(&st.h);
        }
        Ok(out)
    }

    /// Accumulates parameter gradients for `dout = dL/d(output)`.
    pub fn backward(&self, cache: &EncoderCache, dout: ArrayView1<f64>, grads: &mut EncoderParams) {
        let t = cache.inputs.nrows();
        let hd = self.forward.hidden();
        let scale = 1.0 / t as f64;
        let df = dout.slice(s![0..hd]).mapv(|v| v * scale);
        let db = dout.slice(s![hd..]).mapv(|v| v * scale);
        let dh_f = vec![df; t];
        let dh_b = vec![db; t];
        self.forward
            .backprop(cache.inputs.view(), &cache.fwd, &dh_f, &mut grads.forward);
        self.backward
            .backprop(cache.inputs.view(), &cache.bwd, &dh_b, &mut grads.backward);
    }
}

fn half(d_model: usize) -> Result<usize> {
    if d_model == 0 || d_model % 2 != 0 {
        return Err(Error::Shape(format!(
            "d_model {d_model} must be positive and even"
        )));
    }
    Ok(d_model / 2)
}

impl Parameters for EncoderParams {
    fn tensors(&self) -> Vec<(String, ArrayViewD<'_, f64>)> {
        let mut out = Vec::new();
        for (name, dir) in [("fwd.", &self.forward), ("bwd.", &self.backward)] {
            out.extend(prefixed(
                name,
                vec![
                    ("w_ih".to_string(), dir.w_ih.view().into_dyn()),
                    ("w_hh".to_string(), dir.w_hh.view().into_dyn()),
                    ("bias".to_string(), dir.bias.view().into_dyn()),
                ],
            ));
        }
        out
    }

    fn tensors_mut(&mut self) -> Vec<(String, ArrayViewMutD<'_, f64>)> {
        let mut out = Vec::new();
        for (name, dir) in [("fwd.", &mut self.forward), ("bwd.", &mut self.backward)] {
            out.extend(prefixed(
                name,
                vec![
                    ("w_ih".to_string(), dir.w_ih.view_mut().into_dyn()),
                    ("w_hh".to_string(), dir.w_hh.view_mut().into_dyn()),
                    ("bias".to_string(), dir.bias.view_mut().into_dyn()),
                ],
            ));
        }
        out
    }

    fn zeros_like(&self) -> Self {
        EncoderParams::zeros(self.d_model()).expect("existing shape is valid")
    }
}

/// Documents a node is encoded from, oldest first. Undated documents go last;
/// ties break on document id.
pub fn node_document_sequence<'c>(
    graph: &DiscourseGraph,
    node: usize,
    corpus: &'c Corpus,
) -> Result<Vec<&'c Document>> {
    let n = graph.node(node);
    if n.docs.is_empty() {
        return Err(Error::Encode {
            node: n.id(),
            reason: "node has no documents".into(),
        });
    }
    let mut docs = Vec::with_capacity(n.docs.len());
    for id in &n.docs {
        let d = corpus.document(id).ok_or_else(|| Error::Encode {
            node: n.id(),
            reason: format!("document {id} not in corpus"),
        })?;
        docs.push(d);
    }
    docs.sort_by(|a, b| {
        (a.date.is_none(), a.date, &a.id).cmp(&(b.date.is_none(), b.date, &b.id))
    });
    Ok(docs)
}

/// Memoised pooled document vectors for one provider.
pub struct DocumentVectors<'p> {
    provider: &'p dyn EmbeddingProvider,
    cache: HashMap<String, Array1<f64>>,
}

impl<'p> DocumentVectors<'p> {
    pub fn new(provider: &'p dyn EmbeddingProvider) -> Self {
        DocumentVectors {
            provider,
            cache: HashMap::new(),
        }
    }

    pub fn provider(&self) -> &'p dyn EmbeddingProvider {
        self.provider
    }

    pub fn dim(&self) -> usize {
        self.provider.dim()
    }

    pub fn vector(&mut self, doc: &Document) -> Result<Array1<f64>> {
        let key = document_key(doc);
        if let Some(v) = self.cache.get(&key) {
            return Ok(v.clone());
        }
        let v = pool_document(&embed_document(self.provider, doc)?)?;
        self.cache.insert(key, v.clone());
        Ok(v)
    }
}

/// Masked stand-in for one document: `(document id, entity id)`.
pub type DocumentMask<'a> = Option<(&'a str, &'a str)>;

/// Stacks the pooled vectors of a node's document sequence.
pub fn node_input(
    graph: &DiscourseGraph,
    node: usize,
    corpus: &Corpus,
    vectors: &mut DocumentVectors<'_>,
    mask: DocumentMask<'_>,
) -> Result<Array2<f64>> {
    let docs = node_document_sequence(graph, node, corpus)?;
    let mut rows = Array2::zeros((docs.len(), vectors.dim()));
    for (mut row, doc) in rows.outer_iter_mut().zip(docs) {
        let v = match mask {
            Some((doc_id, entity)) if doc_id == doc.id => vectors.vector(&doc.masked(entity)),
            _ => vectors.vector(doc),
        }
        .map_err(|e| Error::Encode {
            node: graph.node(node).id(),
            reason: e.to_string(),
        })?;
        row.assign(&v);
    }
    Ok(rows)
}

/// Initial embedding of one node from its ordered documents.
pub fn encode_node(
    params: &EncoderParams,
    docs: &[&Document],
    vectors: &mut DocumentVectors<'_>,
) -> Result<Array1<f64>> {
    if docs.is_empty() {
        return Err(Error::Shape("cannot encode zero documents".into()));
    }
    let mut rows = Array2::zeros((docs.len(), vectors.dim()));
    for (mut row, doc) in rows.outer_iter_mut().zip(docs) {
        row.assign(&vectors.vector(doc)?);
    }
    let (out, _) = params.forward(rows.view())?;
    if !out.iter().all(|v| v.is_finite()) {
        return Err(Error::Provider("non-finite encoder output".into()));
    }
    Ok(out)
}

/// Initial embeddings `E`, one row per graph node (`n x d_model`).
pub fn encode_graph(
    params: &EncoderParams,
    graph: &DiscourseGraph,
    corpus: &Corpus,
    vectors: &mut DocumentVectors<'_>,
    mask: DocumentMask<'_>,
) -> Result<Array2<f64>> {
    let mut e = Array2::zeros((graph.len(), params.d_model()));
    for i in 0..graph.len() {
        let input = node_input(graph, i, corpus, vectors, mask)?;
        let (v, _) = params.forward(input.view()).map_err(|err| Error::Encode {
            node: graph.node(i).id(),
            reason: err.to_string(),
        })?;
        e.row_mut(i).assign(&v);
    }
    Ok(e)
}
