//! Classical multidimensional scaling, residual variances and the approximate
//! embedding dimension.
//!
//! `τ(D) = -H S H / 2` with `S = D∘D` and the centering matrix `H = I - 11ᵀ/N`.
//! Coordinates come from the largest eigenpairs of `τ(D)`, each eigenvector
//! scaled by the square root of its eigenvalue. Eigenvalues that are negative
//! or negligible (below `N · 1e-12 · λ_max`) produce zero columns.
//!
//! The residual variance of a `p`-dimensional embedding is `1 - ρ²`, `ρ` being
//! the Pearson correlation over unordered pairs `i < j` between the input
//! dissimilarities and the embedded Euclidean distances.

use serde::{Deserialize, Serialize};

use crate::eigen::{top_eigenpairs_upto, Eigenpairs};
use crate::error::{Error, Result};
use crate::matrix::{DissimilarityMatrix, Matrix};
use crate::stats::{moments, pearson, pearson_with};

/// MDS coordinates, one row per point, columns by descending eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub coords: Matrix,
    /// Eigenvalues behind each column after clamping negatives to zero.
    pub eigenvalues: Vec<f64>,
}

impl Embedding {
    pub fn dim(&self) -> usize {
        self.coords.cols()
    }

    pub fn len(&self) -> usize {
        self.coords.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.rows() == 0
    }

    /// Euclidean distances between embedded points.
    pub fn distances(&self) -> DissimilarityMatrix {
        let n = self.len();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let d = crate::cloud::euclidean(self.coords.row(i), self.coords.row(j));
                m.set(i, j, d);
                m.set(j, i, d);
            }
        }
        DissimilarityMatrix::new_unchecked(m)
    }
}

/// Residual variances `R_1, …, R_{p_max}` and the approximate embedding
/// dimension `P = min{p : R_p < criterion}`, capped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualProfile {
    /// `residuals[p - 1] = R_p`.
    pub residuals: Vec<f64>,
    pub criterion: f64,
    pub cap: usize,
    /// `P`, or `cap` when no dimension up to the cap meets the criterion.
    pub dimension: usize,
}

impl ResidualProfile {
    pub fn residual(&self, p: usize) -> Option<f64> {
        self.residuals.get(p.checked_sub(1)?).copied()
    }
}

/// `-H S H / 2` with `S_ij = D_ij²`.
pub fn double_center(d: &DissimilarityMatrix) -> Matrix {
    let n = d.n();
    let mut out = Matrix::zeros(n, n);
    if n == 0 {
        return out;
    }
    let mut row_mean = vec![0.0; n];
    for i in 0..n {
        row_mean[i] = d.row(i).iter().map(|v| v * v).sum::<f64>() / n as f64;
    }
    // S is symmetric, so column means equal row means
    let grand = row_mean.iter().sum::<f64>() / n as f64;
    for i in 0..n {
        let row = d.row(i);
        let out_row = out.row_mut(i);
        for j in 0..n {
            out_row[j] = -0.5 * (row[j] * row[j] - row_mean[i] - row_mean[j] + grand);
        }
    }
    out
}

fn check_square_symmetric(d: &DissimilarityMatrix) -> Result<()> {
    if !d
        .as_matrix()
        .is_symmetric(1e-9 * max_abs(d.as_matrix().as_slice()).max(1.0))
    {
        return Err(Error::InvalidInput("MDS needs a symmetric dissimilarity matrix".into()));
    }
    Ok(())
}

fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn eigen_of(d: &DissimilarityMatrix, p: usize) -> Result<Eigenpairs> {
    eigen_upto(d, p, p)
}

fn eigen_upto(d: &DissimilarityMatrix, p: usize, p_dense: usize) -> Result<Eigenpairs> {
    let b = double_center(d).to_faer();
    top_eigenpairs_upto(b.as_ref(), p, p_dense)
}

fn scaled_columns(e: &Eigenpairs, n: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let lmax = e.values.first().copied().unwrap_or(0.0).max(0.0);
    let floor = n as f64 * 1e-12 * lmax;
    let mut cols = Vec::with_capacity(e.values.len());
    let mut used = Vec::with_capacity(e.values.len());
    for (c, &lambda) in e.values.iter().enumerate() {
        if lambda > floor && lambda > 0.0 {
            let s = lambda.sqrt();
            cols.push(e.vectors.col_as_slice(c).iter().map(|v| v * s).collect());
            used.push(lambda);
        } else {
            cols.push(vec![0.0; n]);
            used.push(0.0);
        }
    }
    (cols, used)
}

/// Classical MDS of `d` into `R^p`.
pub fn classical_mds(d: &DissimilarityMatrix, p: usize) -> Result<Embedding> {
    let n = d.n();
    if p == 0 || p > n {
        return Err(Error::InvalidInput(format!(
            "target dimension must satisfy 1 <= p <= N, got p={p}, N={n}"
        )));
    }
    check_square_symmetric(d)?;
    let e = eigen_of(d, p)?;
    let (cols, used) = scaled_columns(&e, n);
    let mut coords = Matrix::zeros(n, p);
    for (c, col) in cols.iter().enumerate() {
        for i in 0..n {
            coords.set(i, c, col[i]);
        }
    }
    Ok(Embedding {
        coords,
        eigenvalues: used,
    })
}

/// `1 - ρ²` between the upper triangles of `d` and of the embedding's distances.
pub fn residual_variance(d: &DissimilarityMatrix, emb: &Embedding) -> Result<f64> {
    if emb.len() != d.n() {
        return Err(Error::InvalidInput(format!(
            "embedding has {} points, dissimilarity matrix {}",
            emb.len(),
            d.n()
        )));
    }
    let rho = pearson(&d.upper_triangle(), &emb.distances().upper_triangle())?;
    Ok(1.0 - rho * rho)
}

/// Squared embedded distances over unordered pairs, extended one coordinate
/// at a time.
struct ResidualTracker {
    target: Vec<f64>,
    mean: f64,
    ss: f64,
    squared: Vec<f64>,
    scratch: Vec<f64>,
    n: usize,
}

impl ResidualTracker {
    fn new(d: &DissimilarityMatrix) -> Result<Self> {
        let target = d.upper_triangle();
        if target.len() < 2 {
            return Err(Error::InvalidInput(
                "residual variance needs at least three points".into(),
            ));
        }
        let (mean, ss) = moments(&target);
        if ss == 0.0 {
            return Err(Error::ConstantInput("dissimilarity"));
        }
        let len = target.len();
        Ok(Self {
            target,
            mean,
            ss,
            squared: vec![0.0; len],
            scratch: vec![0.0; len],
            n: d.n(),
        })
    }

    fn add(&mut self, col: &[f64]) -> Result<f64> {
        let mut k = 0;
        for i in 0..self.n {
            let ci = col[i];
            for &cj in &col[i + 1..] {
                let t = ci - cj;
                self.squared[k] += t * t;
                k += 1;
            }
        }
        for (s, q) in self.scratch.iter_mut().zip(&self.squared) {
            *s = q.sqrt();
        }
        let rho = pearson_with(&self.target, self.mean, self.ss, &self.scratch)?;
        Ok(1.0 - rho * rho)
    }
}

/// Residual variances for `p = 1..=p_max` plus the approximate embedding
/// dimension. One eigendecomposition serves all `p`; it is extended to
/// `cap` eigenpairs only if the criterion is not met by `p_max`.
pub fn residual_profile(d: &DissimilarityMatrix, p_max: usize, criterion: f64, cap: usize) -> Result<ResidualProfile> {
    Ok(profile_with_embedding(d, p_max, criterion, cap)?.0)
}

/// [`residual_profile`] together with the `p_max`-dimensional embedding it
/// was computed from.
pub fn profile_with_embedding(
    d: &DissimilarityMatrix,
    p_max: usize,
    criterion: f64,
    cap: usize,
) -> Result<(ResidualProfile, Embedding)> {
    if !(criterion > 0.0 && criterion < 1.0) {
        return Err(Error::InvalidInput(format!(
            "criterion must lie in (0, 1), got {criterion}"
        )));
    }
    if p_max == 0 || cap == 0 {
        return Err(Error::InvalidInput("p_max and cap must be positive".into()));
    }
    check_square_symmetric(d)?;
    let n = d.n();
    let mut tracker = ResidualTracker::new(d)?;
    let first = p_max.min(n);
    let limit = cap.min(n);
    let e = eigen_upto(d, first, limit)?;
    let (mut cols, mut used) = scaled_columns(&e, n);
    let mut rest = cols.split_off(first.min(cols.len()));
    used.truncate(first);
    let mut coords = Matrix::zeros(n, first);
    for (c, col) in cols.iter().enumerate() {
        for i in 0..n {
            coords.set(i, c, col[i]);
        }
    }
    let embedding = Embedding {
        coords,
        eigenvalues: used,
    };
    let mut residuals = Vec::with_capacity(first);
    let mut dimension = None;
    for (p, col) in cols.iter().enumerate() {
        let r = tracker.add(col)?;
        residuals.push(r);
        if dimension.is_none() && r < criterion && p < cap {
            dimension = Some(p + 1);
        }
    }
    if dimension.is_none() && limit > first {
        if first + rest.len() < limit {
            let e = eigen_of(d, limit)?;
            rest = scaled_columns(&e, n).0.split_off(first);
        }
        for (p, col) in rest.iter().enumerate().map(|(i, c)| (i + first, c)) {
            if tracker.add(col)? < criterion {
                dimension = Some(p + 1);
                break;
            }
        }
    }
    let profile = ResidualProfile {
        residuals,
        criterion,
        cap,
        dimension: dimension.unwrap_or(cap),
    };
    Ok((profile, embedding))
}

/// `P = min{p : R_p < criterion}`, or `cap` if no `p <= cap` qualifies.
pub fn approximate_embedding_dimension(d: &DissimilarityMatrix, criterion: f64, cap: usize) -> Result<usize> {
    Ok(residual_profile(d, 1, criterion, cap)?.dimension)
}
