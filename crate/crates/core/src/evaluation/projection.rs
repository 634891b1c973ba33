use log::warn;
use nalgebra::DMatrix;
use ndarray::Array2;

use crate::error::{Error, Result};

/// Mean-centred principal-component coordinates (`n x dims`).
///
/// Each component is signed so its largest-magnitude loading is positive
/// (first index wins ties). Components beyond the data rank yield zero
/// columns.
pub fn project_embeddings(vectors: &Array2<f64>, dims: usize) -> Result<Array2<f64>> {
    let (n, d) = vectors.dim();
    if n < 2 {
        return Err(Error::Evaluation(format!("need at least 2 vectors, got {n}")));
    }
    if dims == 0 {
        return Err(Error::Evaluation("dims must be positive".into()));
    }
    if !vectors.iter().all(|v| v.is_finite()) {
        return Err(Error::Evaluation("non-finite input".into()));
    }
    let mean = vectors.mean_axis(ndarray::Axis(0)).expect("n >= 2");
    let centred = vectors - &mean;
    let x = DMatrix::from_fn(n, d, |i, j| centred[[i, j]]);
    // Eigendecomposition of the smaller Gram matrix: nalgebra's SVD loses
    // accuracy on some rank-deficient inputs.
    let wide = n <= d;
    let gram = if wide { &x * x.transpose() } else { x.transpose() * &x };
    let eig = gram.symmetric_eigen();

    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let tol = 1e-20 * top.max(1.0) * (n.max(d) as f64).powi(2);

    let mut out = Array2::zeros((n, dims));
    let mut rank = 0;
    for (k, &c) in order.iter().take(dims).enumerate() {
        let lambda = eig.eigenvalues[c];
        if lambda <= tol {
            break;
        }
        rank += 1;
        let vec = eig.eigenvectors.column(c);
        let loading: Vec<f64> = if wide {
            let sigma = lambda.sqrt();
            (0..d).map(|j| (0..n).map(|i| x[(i, j)] * vec[i]).sum::<f64>() / sigma).collect()
        } else {
            vec.iter().copied().collect()
        };
        let mut lead = 0;
        for j in 0..d {
            if loading[j].abs() > loading[lead].abs() {
                lead = j;
            }
        }
        let sign = if loading[lead] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            let mut s = 0.0;
            for j in 0..d {
                s += centred[[i, j]] * loading[j];
            }
            out[[i, k]] = sign * s;
        }
    }
    if rank < dims {
        warn!("data rank {rank} < {dims} projection dims; trailing coordinates are zero");
    }
    Ok(out)
}

/// Tab-separated `id x1 x2 ...` lines.
pub fn projection_text(ids: &[String], coords: &Array2<f64>) -> String {
    let mut out = String::new();
    for (id, row) in ids.iter().zip(coords.outer_iter()) {
        out.push_str(id);
        for v in row {
            out.push('\t');
            out.push_str(&format!("{v:.12}"));
        }
        out.push('\n');
    }
    out
}
