//! Largest eigenpairs of dense symmetric matrices.
//!
//! A block Krylov subspace with full reorthogonalization and Rayleigh–Ritz
//! extraction handles the common case of a few well-separated leading
//! eigenvalues cheaply. Blocks of several vectors let repeated eigenvalues
//! converge together. Convergence is judged on true residual norms
//! `|Ax - θx|`. When the basis grows past a fixed budget without converging
//! (densely clustered spectra), or the matrix is small, a full dense
//! decomposition is used instead.

use faer::{Mat, MatRef, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const DENSE_LIMIT: usize = 400;
const BLOCK: usize = 8;
/// Relative residual tolerance.
pub(crate) const TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub(crate) struct Eigenpairs {
    /// Descending.
    pub values: Vec<f64>,
    /// One column per eigenvalue.
    pub vectors: Mat<f64>,
}

/// At least the `k` algebraically largest eigenpairs of the symmetric
/// matrix `a`; when a full decomposition turns out
/// to be necessary the leading `k_dense >= k` pairs are returned, since they
/// come at no extra cost.
pub(crate) fn top_eigenpairs_upto(a: MatRef<'_, f64>, k: usize, k_dense: usize) -> Result<Eigenpairs> {
    let n = a.nrows();
    let k = k.min(n);
    let k_dense = k_dense.clamp(k, n);
    if n <= DENSE_LIMIT || 4 * k >= n {
        return dense(a, k_dense);
    }
    match krylov(a, k, 3 * k + 12 * BLOCK)? {
        Some(pairs) => Ok(pairs),
        None => dense(a, k_dense),
    }
}

pub(crate) fn dense(a: MatRef<'_, f64>, k: usize) -> Result<Eigenpairs> {
    let n = a.nrows();
    if !a.is_all_finite() {
        return Err(Error::EigenFailure(format!("{n}x{n} matrix has non-finite entries")));
    }
    let eig = a.selfadjoint_eigendecomposition(Side::Lower);
    let s = eig.s().column_vector();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]).then(i.cmp(&j)));
    order.truncate(k);
    let values = order.iter().map(|&i| s[i]).collect();
    let u = eig.u();
    let vectors = Mat::from_fn(n, k, |r, c| u[(r, order[c])]);
    Ok(Eigenpairs { values, vectors })
}

/// Block Krylov iteration; `None` if not converged within `max_basis`
/// vectors.
fn krylov(a: MatRef<'_, f64>, k: usize, max_basis: usize) -> Result<Option<Eigenpairs>> {
    let n = a.nrows();
    let max_basis = max_basis.min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b72_796c_6f76);
    let mut q = Mat::<f64>::zeros(n, max_basis);
    let mut aq = Mat::<f64>::zeros(n, max_basis);
    let mut m = 0usize;

    let mut block = Mat::from_fn(n, BLOCK.min(n), |_, _| rng.gen_range(-1.0..1.0));
    orthonormalize(&mut block, q.as_ref().subcols(0, 0), &mut rng);
    let mut next_check = (2 * k + 2 * BLOCK).min(max_basis);
    loop {
        let b = block.ncols().min(max_basis - m);
        let block_ref = block.as_ref().subcols(0, b);
        let w = a * block_ref;
        q.as_mut().subcols_mut(m, b).copy_from(block_ref);
        aq.as_mut().subcols_mut(m, b).copy_from(&w);
        m += b;

        if m >= next_check || m == max_basis {
            if let Some(pairs) = rayleigh_ritz(q.as_ref().subcols(0, m), aq.as_ref().subcols(0, m), k, m == n)? {
                return Ok(Some(pairs));
            }
            if m == max_basis {
                return Ok(None);
            }
            next_check = (m + m / 4).max(m + BLOCK).min(max_basis);
        }

        block = w.as_ref().subcols(0, BLOCK.min(n - m).min(b)).to_owned();
        orthonormalize(&mut block, q.as_ref().subcols(0, m), &mut rng);
    }
}

/// Ritz pairs from the basis `q` with `aq = A q`; `None` if not yet converged.
fn rayleigh_ritz(q: MatRef<'_, f64>, aq: MatRef<'_, f64>, k: usize, exhaustive: bool) -> Result<Option<Eigenpairs>> {
    let m = q.ncols();
    let h = q.transpose() * aq;
    let h = Mat::from_fn(m, m, |i, j| 0.5 * (h[(i, j)] + h[(j, i)]));
    let small = dense(h.as_ref(), m)?;
    let norm = small
        .values
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let s = small.vectors.as_ref().subcols(0, k);
    let x = q * s;
    if !exhaustive {
        let ax = aq * s;
        for c in 0..k {
            let theta = small.values[c];
            let r: f64 = (0..q.nrows())
                .map(|i| {
                    let t = ax[(i, c)] - theta * x[(i, c)];
                    t * t
                })
                .sum::<f64>()
                .sqrt();
            if r > TOLERANCE * norm {
                return Ok(None);
            }
        }
    }
    Ok(Some(Eigenpairs {
        values: small.values[..k].to_vec(),
        vectors: x,
    }))
}

/// Orthonormalize the columns of `v` against the columns of `q` and each
/// other (block classical Gram–Schmidt, two passes). Columns that vanish are
/// replaced by fresh random directions.
fn orthonormalize(v: &mut Mat<f64>, q: MatRef<'_, f64>, rng: &mut ChaCha8Rng) {
    let n = v.nrows();
    for c in 0..v.ncols() {
        let mut attempts = 0;
        loop {
            let before = v.as_ref().col(c).norm_l2();
            for _ in 0..2 {
                if q.ncols() > 0 {
                    let coeff = q.transpose() * v.as_ref().col(c);
                    let proj = q * &coeff;
                    let col = v.col_as_slice_mut(c);
                    for (x, p) in col.iter_mut().zip(proj.as_slice()) {
                        *x -= p;
                    }
                }
                for p in 0..c {
                    let (prev, cur) = two_cols(v, p, c);
                    let d: f64 = prev.iter().zip(cur.iter()).map(|(a, b)| a * b).sum();
                    for (x, y) in cur.iter_mut().zip(prev) {
                        *x -= d * y;
                    }
                }
            }
            let after = v.as_ref().col(c).norm_l2();
            if after > 1e-10 * before.max(f64::MIN_POSITIVE) && after > 0.0 {
                for x in v.col_as_slice_mut(c) {
                    *x /= after;
                }
                break;
            }
            attempts += 1;
            assert!(attempts < 20, "cannot extend an orthonormal basis of R^{n}");
            for x in v.col_as_slice_mut(c) {
                *x = rng.gen_range(-1.0..1.0);
            }
        }
    }
}

/// Column `p` (read-only) and column `c > p` (mutable) of `v`.
fn two_cols(v: &mut Mat<f64>, p: usize, c: usize) -> (Vec<f64>, &mut [f64]) {
    let prev = v.col_as_slice(p).to_vec();
    (prev, v.col_as_slice_mut(c))
}
