//! Simplices encoded by the combinatorial number system: the simplex with
//! vertices `v_0 < v_1 < … < v_d` has index `Σ_i C(v_i, i + 1)`.

use crate::matrix::DissimilarityMatrix;

pub(crate) struct Binomial {
    table: Vec<Vec<u64>>,
}

impl Binomial {
    /// `C(v, k)` for `v <= n`, `k <= max_k`.
    pub fn new(n: usize, max_k: usize) -> Self {
        let mut table = vec![vec![0u64; max_k + 1]; n + 1];
        for v in 0..=n {
            table[v][0] = 1;
            for k in 1..=max_k.min(v) {
                table[v][k] = table[v - 1][k - 1].saturating_add(if k < v { table[v - 1][k] } else { 0 });
            }
        }
        Self { table }
    }

    #[inline]
    pub fn get(&self, v: usize, k: usize) -> u64 {
        if k > v {
            0
        } else {
            self.table[v][k]
        }
    }

    /// Index of a simplex given its vertices in ascending order.
    #[inline]
    pub fn index(&self, vertices: &[usize]) -> u64 {
        vertices.iter().enumerate().map(|(i, &v)| self.get(v, i + 1)).sum()
    }

    /// Vertices (ascending) of the `dim`-simplex with index `idx`.
    pub fn vertices(&self, mut idx: u64, dim: usize, n: usize, out: &mut Vec<usize>) {
        out.clear();
        let mut hi = n;
        for k in (1..=dim + 1).rev() {
            // largest v < hi with C(v, k) <= idx
            let mut v = hi - 1;
            while self.get(v, k) > idx {
                v -= 1;
            }
            out.push(v);
            idx -= self.get(v, k);
            hi = v;
        }
        out.reverse();
    }
}

/// Filtration value of a simplex: its largest pairwise dissimilarity.
#[inline]
pub(crate) fn diameter(d: &DissimilarityMatrix, vertices: &[usize]) -> f64 {
    let mut m = 0.0f64;
    for (a, &u) in vertices.iter().enumerate() {
        for &v in &vertices[a + 1..] {
            m = m.max(d.get(u, v));
        }
    }
    m
}
