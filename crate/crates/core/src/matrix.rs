//! Dense matrices shared by every stage: the generic row-major [`Matrix`], the
//! [`DissimilarityMatrix`] of pairwise distance estimates and the integer
//! [`ActivationMatrix`] of contagion activation times.

use crate::error::{Error, Result};

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "matrix data has {} entries, expected {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    pub(crate) fn to_faer(&self) -> faer::Mat<f64> {
        faer::Mat::from_fn(self.rows, self.cols, |i, j| self.data[i * self.cols + j])
    }
}

/// Square matrix of nonnegative, finite pairwise distance estimates with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    inner: Matrix,
}

impl DissimilarityMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::InvalidInput(format!(
                "dissimilarity matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = m.get(i, j);
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "entry ({i},{j}) = {v} is not a finite nonnegative number"
                    )));
                }
            }
            if m.get(i, i) != 0.0 {
                return Err(Error::InvalidInput(format!(
                    "diagonal entry ({i},{i}) = {} is not zero",
                    m.get(i, i)
                )));
            }
        }
        Ok(Self { inner: m })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    /// Skips validation; callers guarantee the invariants.
    pub(crate) fn new_unchecked(m: Matrix) -> Self {
        debug_assert_eq!(m.rows(), m.cols());
        Self { inner: m }
    }

    pub fn n(&self) -> usize {
        self.inner.rows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner.get(i, j)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.inner.row(i)
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.inner
    }

    pub fn into_matrix(self) -> Matrix {
        self.inner
    }

    pub fn is_symmetric(&self) -> bool {
        self.inner.is_symmetric(0.0)
    }

    /// Entries of the strict upper triangle in row-major order.
    pub fn upper_triangle(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            out.extend_from_slice(&self.row(i)[i + 1..]);
        }
        out
    }

    /// Entrywise multiple; `c` must be nonnegative and finite.
    pub fn scaled(&self, c: f64) -> DissimilarityMatrix {
        assert!(c >= 0.0 && c.is_finite());
        let data = self.inner.as_slice().iter().map(|v| v * c).collect();
        Self::new_unchecked(Matrix::from_vec(self.n(), self.n(), data).unwrap())
    }

    /// Principal submatrix on `indices`, in the given order.
    pub fn submatrix(&self, indices: &[usize]) -> DissimilarityMatrix {
        let k = indices.len();
        let mut m = Matrix::zeros(k, k);
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                m.set(a, b, self.get(i, j));
            }
        }
        Self::new_unchecked(m)
    }

    /// Pairwise distances between the columns of this matrix (the point cloud
    /// whose coordinate vectors are its columns).
    pub fn p_dist(&self) -> DissimilarityMatrix {
        p_dist(&self.inner)
    }
}

/// Activation times of threshold contagions: row `j` holds the realization
/// seeded around node `j`, so entry `(j, i)` is the activation time of node
/// `i` in that realization and column `i` is the regular contagion map image
/// of node `i`. Never-activated nodes carry the sentinel `2N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivationMatrix {
    n: usize,
    times: Vec<u32>,
}

impl ActivationMatrix {
    pub fn from_rows(rows: Vec<Vec<u32>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("activation matrix must be square".into()));
        }
        let times = rows.concat();
        let sentinel = 2 * n as u32;
        if let Some(v) = times.iter().find(|&&t| t > sentinel) {
            return Err(Error::InvalidInput(format!(
                "activation time {v} exceeds the sentinel {sentinel}"
            )));
        }
        Ok(Self { n, times })
    }

    pub(crate) fn from_flat(n: usize, times: Vec<u32>) -> Self {
        debug_assert_eq!(times.len(), n * n);
        Self { n, times }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Value marking nodes that never activate: `2N`.
    pub fn sentinel(&self) -> u32 {
        2 * self.n as u32
    }

    /// Activation time of `node` in the realization seeded around `seed`.
    #[inline]
    pub fn time(&self, seed: usize, node: usize) -> u32 {
        self.times[seed * self.n + node]
    }

    pub fn realization(&self, seed: usize) -> &[u32] {
        &self.times[seed * self.n..(seed + 1) * self.n]
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_vec(self.n, self.n, self.times.iter().map(|&t| f64::from(t)).collect()).unwrap()
    }

    /// `D + Dᵀ`, the dissimilarity behind the symmetric contagion map.
    pub fn symmetrize(&self) -> DissimilarityMatrix {
        symmetrize(self)
    }

    /// Regular-map dissimilarity: distances between the columns of `D`.
    pub fn p_dist(&self) -> DissimilarityMatrix {
        p_dist(&self.to_matrix())
    }
}

/// Entrywise `x + xᵀ`. Sentinel entries are kept as plain numbers.
pub fn symmetrize(x: &ActivationMatrix) -> DissimilarityMatrix {
    let n = x.n();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, f64::from(x.time(i, j)) + f64::from(x.time(j, i)));
        }
    }
    DissimilarityMatrix::new_unchecked(m)
}

/// Euclidean distances between the columns of `d`: `out[i][j] = |d[:,i] - d[:,j]|`.
///
/// Uses the Gram identity `|a-b|² = a·a + b·b - 2a·b` through a blocked matrix
/// product. When the input is small-integer valued every product and sum is
/// exact; otherwise entries whose squared distance is small relative to the
/// column norms are recomputed directly to avoid cancellation.
pub fn p_dist(d: &Matrix) -> DissimilarityMatrix {
    let n = d.cols();
    let cols = d.transpose();
    if n == 0 {
        return DissimilarityMatrix::new_unchecked(Matrix::zeros(0, 0));
    }
    // `cols` is row-major n x rows, so read column-major it is `d` itself.
    let x = faer::mat::from_column_major_slice::<f64>(cols.as_slice(), d.rows(), n);
    let gram = x.transpose() * x;

    let exact = is_small_integer(d);
    let norms: Vec<f64> = (0..n).map(|i| gram[(i, i)]).collect();
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let scale = norms[i] + norms[j];
            let mut sq = norms[i] + norms[j] - 2.0 * gram[(i, j)];
            if !exact && sq <= 1e-6 * scale {
                sq = squared_distance(cols.row(i), cols.row(j));
            }
            let v = sq.max(0.0).sqrt();
            out.set(i, j, v);
            out.set(j, i, v);
        }
    }
    DissimilarityMatrix::new_unchecked(out)
}

fn is_small_integer(d: &Matrix) -> bool {
    let mut max = 0.0f64;
    for &v in d.as_slice() {
        if v.fract() != 0.0 {
            return false;
        }
        max = max.max(v.abs());
    }
    // every partial sum of products stays below 2^52
    max * max * (d.rows() as f64) < 4.0e15
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            let t = x[k] - y[k];
            acc[k] += t * t;
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in ra.iter().zip(rb) {
        s += (x - y) * (x - y);
    }
    s
}
