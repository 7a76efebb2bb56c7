//! Minimal dense linear algebra for forward-only inference.
//!
//! All values are `f64`. Every operation is bit-deterministic given identical
//! inputs: matrix products reduce row-major left-to-right, while reductions
//! over *unordered* collections (softmax denominators, attention-weighted
//! aggregations) sum their terms in value-sorted order so the result does not
//! depend on how the collection happened to be ordered. The latter is what
//! makes the policy network exactly equivariant under candidate permutations.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TensorError {
    #[error("dimension mismatch in {op}: left is {left}, right is {right}")]
    DimensionMismatch {
        op: &'static str,
        left: String,
        right: String,
    },
}

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must be rows*cols");
        let m = Matrix { rows, cols, data };
        m.debug_check_finite();
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix::from_vec(r, c, data)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Matrix with the given rows of `self`, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(idx.len(), self.cols);
        for (k, &i) in idx.iter().enumerate() {
            out.row_mut(k).copy_from_slice(self.row(i));
        }
        out
    }

    fn debug_check_finite(&self) {
        debug_assert!(
            self.data.iter().all(|v| v.is_finite()),
            "matrix contains non-finite values"
        );
    }

    fn dim_err(op: &'static str, a: &Matrix, b: &Matrix) -> TensorError {
        TensorError::DimensionMismatch {
            op,
            left: format!("{}x{}", a.rows, a.cols),
            right: format!("{}x{}", b.rows, b.cols),
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Sums `terms` in ascending value order (ties by bit pattern).
///
/// The result is a pure function of the multiset of terms, so callers may
/// present the terms in any order and still get a bit-identical sum.
pub fn ordered_sum(terms: &mut [f64]) -> f64 {
    terms.sort_unstable_by(|a, b| a.total_cmp(b));
    terms.iter().sum()
}

/// Standard product with deterministic row-major, left-to-right reduction.
pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix, TensorError> {
    if a.cols != b.rows {
        return Err(Matrix::dim_err("matmul", a, b));
    }
    let mut out = Matrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        let arow = a.row(i);
        let orow = out.row_mut(i);
        for (k, &aik) in arow.iter().enumerate() {
            let brow = b.row(k);
            for (j, &bkj) in brow.iter().enumerate() {
                orow[j] += aik * bkj;
            }
        }
    }
    out.debug_check_finite();
    Ok(out)
}

/// Row-wise softmax with max-subtraction, optionally masked.
///
/// Each unmasked row sums to 1. A fully masked row falls back to the uniform
/// distribution over all entries; `softmax_rows_flagged` reports which rows
/// fell back. Denominators use value-sorted summation.
pub fn softmax_rows(m: &Matrix, mask: Option<&Matrix>) -> Result<Matrix, TensorError> {
    softmax_rows_flagged(m, mask).map(|(out, _)| out)
}

pub fn softmax_rows_flagged(
    m: &Matrix,
    mask: Option<&Matrix>,
) -> Result<(Matrix, Vec<usize>), TensorError> {
    if let Some(mk) = mask {
        if mk.rows != m.rows || mk.cols != m.cols {
            return Err(Matrix::dim_err("softmax_rows mask", m, mk));
        }
    }
    let mut out = Matrix::zeros(m.rows, m.cols);
    let mut fully_masked = Vec::new();
    let mut terms = Vec::with_capacity(m.cols);
    for i in 0..m.rows {
        let row = m.row(i);
        let live = |j: usize| mask.is_none_or(|mk| mk[(i, j)] != 0.0);
        let mut max = f64::NEG_INFINITY;
        for (j, &v) in row.iter().enumerate() {
            if live(j) && v > max {
                max = v;
            }
        }
        if max == f64::NEG_INFINITY {
            // Fully masked row: uniform over all entries.
            fully_masked.push(i);
            let u = 1.0 / m.cols as f64;
            out.row_mut(i).fill(u);
            continue;
        }
        terms.clear();
        for (j, &v) in row.iter().enumerate() {
            if live(j) {
                terms.push((v - max).exp());
            }
        }
        let denom = ordered_sum(&mut terms);
        let orow = out.row_mut(i);
        for (j, &v) in row.iter().enumerate() {
            if live(j) {
                orow[j] = (v - max).exp() / denom;
            }
        }
    }
    Ok((out, fully_masked))
}

/// Elementwise ReLU.
pub fn relu(m: &Matrix) -> Matrix {
    map(m, |v| if v > 0.0 { v } else { 0.0 })
}

/// Elementwise LeakyReLU with the given negative slope.
pub fn leaky_relu(m: &Matrix, slope: f64) -> Matrix {
    map(m, |v| if v > 0.0 { v } else { slope * v })
}

pub fn map(m: &Matrix, f: impl Fn(f64) -> f64) -> Matrix {
    Matrix {
        rows: m.rows,
        cols: m.cols,
        data: m.data.iter().map(|&v| f(v)).collect(),
    }
}

/// Per-row normalization to mean 0 / variance 1, then `gain * x + bias`.
///
/// `gain` and `bias` are length-`cols` vectors. Uses population variance with
/// a tiny epsilon so that constant rows map to the bias.
pub fn layer_norm(m: &Matrix, gain: &[f64], bias: &[f64]) -> Result<Matrix, TensorError> {
    if gain.len() != m.cols || bias.len() != m.cols {
        return Err(TensorError::DimensionMismatch {
            op: "layer_norm",
            left: format!("{}x{}", m.rows, m.cols),
            right: format!("gain {} bias {}", gain.len(), bias.len()),
        });
    }
    const EPS: f64 = 1e-12;
    let n = m.cols as f64;
    let mut out = Matrix::zeros(m.rows, m.cols);
    for i in 0..m.rows {
        let row = m.row(i);
        let mean = row.iter().sum::<f64>() / n;
        let var = row.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let inv = 1.0 / (var + EPS).sqrt();
        let orow = out.row_mut(i);
        for j in 0..m.cols {
            orow[j] = gain[j] * ((row[j] - mean) * inv) + bias[j];
        }
    }
    out.debug_check_finite();
    Ok(out)
}

/// Horizontal concatenation; all inputs must share a row count.
pub fn concat_cols(ms: &[&Matrix]) -> Result<Matrix, TensorError> {
    assert!(!ms.is_empty(), "concat_cols of nothing");
    let rows = ms[0].rows;
    for m in ms {
        if m.rows != rows {
            return Err(Matrix::dim_err("concat_cols", ms[0], m));
        }
    }
    let cols = ms.iter().map(|m| m.cols).sum();
    let mut out = Matrix::zeros(rows, cols);
    for i in 0..rows {
        let orow = out.row_mut(i);
        let mut at = 0;
        for m in ms {
            orow[at..at + m.cols].copy_from_slice(m.row(i));
            at += m.cols;
        }
    }
    Ok(out)
}

/// Column means as a 1-row matrix.
pub fn mean_rows(m: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(1, m.cols);
    let n = m.rows as f64;
    for j in 0..m.cols {
        let mut acc = 0.0;
        for i in 0..m.rows {
            acc += m[(i, j)];
        }
        out[(0, j)] = acc / n;
    }
    out
}

/// Adds a 1-row bias to every row.
pub fn add_row_broadcast(m: &Matrix, bias: &[f64]) -> Result<Matrix, TensorError> {
    if bias.len() != m.cols {
        return Err(TensorError::DimensionMismatch {
            op: "add_row_broadcast",
            left: format!("{}x{}", m.rows, m.cols),
            right: format!("1x{}", bias.len()),
        });
    }
    let mut out = m.clone();
    for i in 0..out.rows {
        let row = out.row_mut(i);
        for j in 0..bias.len() {
            row[j] += bias[j];
        }
    }
    Ok(out)
}

pub fn add(a: &Matrix, b: &Matrix) -> Result<Matrix, TensorError> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(Matrix::dim_err("add", a, b));
    }
    let data = a
        .data
        .iter()
        .zip(&b.data)
        .map(|(&x, &y)| x + y)
        .collect();
    Ok(Matrix {
        rows: a.rows,
        cols: a.cols,
        data,
    })
}

/// `Σ_j weights[i][j] * values.row(j)` per output row `i`, with each output
/// component summed in value-sorted order so the result is invariant to a
/// simultaneous permutation of weight columns and value rows.
pub fn weighted_mix(weights: &Matrix, values: &Matrix) -> Result<Matrix, TensorError> {
    if weights.cols != values.rows {
        return Err(Matrix::dim_err("weighted_mix", weights, values));
    }
    let mut out = Matrix::zeros(weights.rows, values.cols);
    let mut terms = Vec::with_capacity(weights.cols);
    for i in 0..weights.rows {
        let w = weights.row(i);
        for c in 0..values.cols {
            terms.clear();
            for (j, &wj) in w.iter().enumerate() {
                terms.push(wj * values[(j, c)]);
            }
            out[(i, c)] = ordered_sum(&mut terms);
        }
    }
    out.debug_check_finite();
    Ok(out)
}

/// Like `weighted_mix` for one output row over a subset of value rows.
pub fn weighted_mix_rows(
    weights: &[f64],
    row_idx: &[usize],
    values: &Matrix,
) -> Vec<f64> {
    assert_eq!(weights.len(), row_idx.len());
    let mut out = vec![0.0; values.cols];
    let mut terms = Vec::with_capacity(weights.len());
    for (c, slot) in out.iter_mut().enumerate() {
        terms.clear();
        for (&w, &j) in weights.iter().zip(row_idx) {
            terms.push(w * values[(j, c)]);
        }
        *slot = ordered_sum(&mut terms);
    }
    out
}
