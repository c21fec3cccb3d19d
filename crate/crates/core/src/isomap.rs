//! All-pairs shortest paths (the Isomap dissimilarity).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::graph::NeighbourhoodGraph;
use crate::matrix::{DissimilarityMatrix, Matrix};
use crate::neighbourhood::{GraphKind, GraphSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum UnreachablePolicy {
    /// Fail with [`Error::GraphDisconnected`].
    #[default]
    Error,
    /// Fill unreachable pairs with this value; `None` means `2N`.
    Sentinel(Option<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShortestPathConfig {
    /// Sum edge weights; otherwise count hops.
    pub use_weights: bool,
    #[serde(default)]
    pub unreachable: UnreachablePolicy,
}

impl ShortestPathConfig {
    pub fn weighted() -> Self {
        Self {
            use_weights: true,
            unreachable: UnreachablePolicy::Error,
        }
    }

    pub fn hops() -> Self {
        Self {
            use_weights: false,
            unreachable: UnreachablePolicy::Error,
        }
    }
}

/// Shortest-path lengths between all node pairs by Floyd–Warshall.
pub fn floyd_warshall(graph: &NeighbourhoodGraph, cfg: &ShortestPathConfig) -> Result<DissimilarityMatrix> {
    let n = graph.n_nodes();
    if cfg.use_weights && !graph.is_weighted() {
        return Err(Error::InvalidInput(
            "weighted shortest paths requested on an unweighted graph".into(),
        ));
    }
    let mut d = vec![f64::INFINITY; n * n];
    for i in 0..n {
        d[i * n + i] = 0.0;
    }
    for (i, j, w) in graph.weighted_edges() {
        let w = if cfg.use_weights { w.unwrap() } else { 1.0 };
        if w < d[i * n + j] {
            d[i * n + j] = w;
            d[j * n + i] = w;
        }
    }

    let mut row_k = vec![0.0; n];
    for k in 0..n {
        row_k.copy_from_slice(&d[k * n..(k + 1) * n]);
        let row_k = &row_k;
        d.par_chunks_mut(n).for_each(|row| {
            let dik = row[k];
            if dik == f64::INFINITY {
                return;
            }
            for (r, &dkj) in row.iter_mut().zip(row_k) {
                let c = dik + dkj;
                *r = if c < *r { c } else { *r };
            }
        });
    }

    let max_finite = d.iter().copied().filter(|v| v.is_finite()).fold(0.0f64, f64::max);
    if let Some(pos) = d.iter().position(|v| v.is_infinite()) {
        match cfg.unreachable {
            UnreachablePolicy::Error => {
                return Err(Error::GraphDisconnected {
                    from: pos / n,
                    to: pos % n,
                })
            }
            UnreachablePolicy::Sentinel(value) => {
                let s = value.unwrap_or(2.0 * n as f64);
                if !(s.is_finite() && s > max_finite) {
                    return Err(Error::InvalidInput(format!(
                        "sentinel {s} must exceed the longest finite path {max_finite}"
                    )));
                }
                for v in d.iter_mut().filter(|v| v.is_infinite()) {
                    *v = s;
                }
            }
        }
    }
    Ok(DissimilarityMatrix::new_unchecked(Matrix::from_vec(n, n, d)?))
}

/// Data for [`isomap_dissimilarity`]: a point cloud to build a graph on, or a
/// ready-made network.
#[derive(Debug, Clone, Copy)]
pub enum IsomapInput<'a> {
    Cloud(&'a PointCloud),
    Graph(&'a NeighbourhoodGraph),
}

/// Graph construction followed by [`floyd_warshall`].
pub fn isomap_dissimilarity(
    input: IsomapInput<'_>,
    spec: &GraphSpec,
    cfg: &ShortestPathConfig,
) -> Result<DissimilarityMatrix> {
    match (input, spec.kind) {
        (IsomapInput::Graph(g), GraphKind::External) => floyd_warshall(g, cfg),
        (IsomapInput::Cloud(c), _) => floyd_warshall(&spec.build(c)?, cfg),
        (IsomapInput::Graph(_), _) => Err(Error::InvalidInput(
            "a supplied network needs an external graph spec".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    fn dijkstra_all(g: &NeighbourhoodGraph) -> Vec<Vec<f64>> {
        let n = g.n_nodes();
        (0..n)
            .map(|s| {
                let mut dist = vec![f64::INFINITY; n];
                dist[s] = 0.0;
                // keys are nonnegative, so the IEEE bit pattern orders correctly
                let mut heap = BinaryHeap::new();
                heap.push(Reverse((0f64.to_bits(), s)));
                while let Some(Reverse((bits, v))) = heap.pop() {
                    let dv = f64::from_bits(bits);
                    if dv > dist[v] {
                        continue;
                    }
                    for &w in g.neighbours(v) {
                        let nd = dv + g.weight(v, w).unwrap();
                        if nd < dist[w] {
                            dist[w] = nd;
                            heap.push(Reverse((nd.to_bits(), w)));
                        }
                    }
                }
                dist
            })
            .collect()
    }

    #[test]
    fn weighted_path() {
        let g = NeighbourhoodGraph::from_edge_list(3, [(0, 1, Some(1.0)), (1, 2, Some(2.0))]).unwrap();
        let d = floyd_warshall(&g, &ShortestPathConfig::weighted()).unwrap();
        assert_eq!(d.get(0, 2), 3.0);
        assert_eq!(d.get(2, 0), 3.0);
    }

    #[test]
    fn unweighted_cycle() {
        let g = NeighbourhoodGraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let d = floyd_warshall(&g, &ShortestPathConfig::hops()).unwrap();
        assert_eq!(d.get(0, 2), 2.0);
        assert!(d
            .as_matrix()
            .as_slice()
            .iter()
            .all(|&v| v == 0.0 || v == 1.0 || v == 2.0));
        assert!(d.is_symmetric());
    }

    #[test]
    fn disconnected_policies() {
        let g = NeighbourhoodGraph::from_edges(3, [(0, 1)]).unwrap();
        assert!(matches!(
            floyd_warshall(&g, &ShortestPathConfig::hops()),
            Err(Error::GraphDisconnected { .. })
        ));
        let cfg = ShortestPathConfig {
            use_weights: false,
            unreachable: UnreachablePolicy::Sentinel(None),
        };
        let d = floyd_warshall(&g, &cfg).unwrap();
        assert_eq!(d.get(0, 2), 6.0);
        assert_eq!(d.get(0, 1), 1.0);
        let bad = ShortestPathConfig {
            use_weights: false,
            unreachable: UnreachablePolicy::Sentinel(Some(0.5)),
        };
        assert!(floyd_warshall(&g, &bad).is_err());
    }

    #[test]
    fn matches_dijkstra_on_random_weighted_graph() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 30;
        let mut edges: Vec<(usize, usize, Option<f64>)> = (1..n)
            .map(|i| (rng.gen_range(0..i), i, Some(rng.gen_range(0.1..5.0))))
            .collect();
        for _ in 0..40 {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if a != b {
                edges.push((a, b, Some(rng.gen_range(0.1..5.0))));
            }
        }
        let g = NeighbourhoodGraph::from_edge_list(n, edges).unwrap();
        let d = floyd_warshall(&g, &ShortestPathConfig::weighted()).unwrap();
        let oracle = dijkstra_all(&g);
        for i in 0..n {
            for j in 0..n {
                assert!((d.get(i, j) - oracle[i][j]).abs() <= 1e-12 * oracle[i][j].max(1.0));
            }
        }
    }

    #[test]
    fn adding_an_edge_never_increases_distances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let n = 20;
            let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
            let g = NeighbourhoodGraph::from_edges(n, edges.clone()).unwrap();
            let before = floyd_warshall(&g, &ShortestPathConfig::hops()).unwrap();
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if a == b {
                continue;
            }
            edges.push((a, b));
            let g2 = NeighbourhoodGraph::from_edges(n, edges).unwrap();
            let after = floyd_warshall(&g2, &ShortestPathConfig::hops()).unwrap();
            for i in 0..n {
                for j in 0..n {
                    assert!(after.get(i, j) <= before.get(i, j));
                }
            }
        }
    }
}
