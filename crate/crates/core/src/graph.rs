use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Undirected simple graph on `n` nodes with optional positive edge weights.
///
/// Edges are stored once as `(i, j)` with `i < j`, sorted. Adjacency lists are
/// sorted as well, so every traversal is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighbourhoodGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    weights: Option<Vec<f64>>,
    offsets: Vec<usize>,
    adjacency: Vec<usize>,
}

impl NeighbourhoodGraph {
    /// Unweighted graph from an edge list. Duplicate edges collapse.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::from_edge_list(n, edges.into_iter().map(|(i, j)| (i, j, None)))
    }

    /// Graph from `(i, j, weight)` triples. Either every edge carries a
    /// positive weight or none does. Duplicates collapse; a repeated weighted
    /// edge keeps the smallest weight.
    pub fn from_edge_list(n: usize, edges: impl IntoIterator<Item = (usize, usize, Option<f64>)>) -> Result<Self> {
        let mut map: BTreeMap<(usize, usize), Option<f64>> = BTreeMap::new();
        let mut weighted: Option<bool> = None;
        for (i, j, w) in edges {
            for idx in [i, j] {
                if idx >= n {
                    return Err(Error::IndexOutOfRange { index: idx, n });
                }
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            match (weighted, w.is_some()) {
                (None, b) => weighted = Some(b),
                (Some(a), b) if a != b => {
                    return Err(Error::InvalidInput(
                        "weights must be given for every edge or for none".into(),
                    ))
                }
                _ => {}
            }
            if let Some(w) = w {
                if !(w.is_finite() && w > 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "edge ({i},{j}) has non-positive weight {w}"
                    )));
                }
            }
            let key = (i.min(j), i.max(j));
            map.entry(key)
                .and_modify(|old| {
                    if let (Some(a), Some(b)) = (*old, w) {
                        *old = Some(a.min(b));
                    }
                })
                .or_insert(w);
        }
        let edges: Vec<(usize, usize)> = map.keys().copied().collect();
        let weights = if weighted == Some(true) {
            Some(map.values().map(|w| w.unwrap()).collect())
        } else {
            None
        };
        Ok(Self::build(n, edges, weights))
    }

    /// `edges` must be sorted, deduplicated, `i < j < n`.
    pub(crate) fn build(n: usize, edges: Vec<(usize, usize)>, weights: Option<Vec<f64>>) -> Self {
        let mut degree = vec![0usize; n];
        for &(i, j) in &edges {
            degree[i] += 1;
            degree[j] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut fill = offsets[..n].to_vec();
        let mut adjacency = vec![0usize; offsets[n]];
        for &(i, j) in &edges {
            adjacency[fill[i]] = j;
            fill[i] += 1;
            adjacency[fill[j]] = i;
            fill[j] += 1;
        }
        for i in 0..n {
            adjacency[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        Self {
            n,
            edges,
            weights,
            offsets,
            adjacency,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    /// Edges with their weight, if any.
    pub fn weighted_edges(&self) -> impl Iterator<Item = (usize, usize, Option<f64>)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .map(|(k, &(i, j))| (i, j, self.weights.as_ref().map(|w| w[k])))
    }

    /// Same edges without weights.
    pub fn unweighted(&self) -> NeighbourhoodGraph {
        let mut g = self.clone();
        g.weights = None;
        g
    }

    #[inline]
    pub fn neighbours(&self, i: usize) -> &[usize] {
        &self.adjacency[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Binary adjacency entry `A_ij`.
    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        self.neighbours(i).binary_search(&j).is_ok()
    }

    /// Weight of edge `(i, j)`, if the edge exists and the graph is weighted.
    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        let key = (i.min(j), i.max(j));
        let k = self.edges.binary_search(&key).ok()?;
        self.weights.as_ref().map(|w| w[k])
    }

    /// Dense binary adjacency matrix, row-major.
    pub fn adjacency_matrix(&self) -> Vec<Vec<u8>> {
        let mut a = vec![vec![0u8; self.n]; self.n];
        for &(i, j) in &self.edges {
            a[i][j] = 1;
            a[j][i] = 1;
        }
        a
    }

    /// Number of connected components.
    pub fn components(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for &w in self.neighbours(v) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.components() <= 1
    }
}
