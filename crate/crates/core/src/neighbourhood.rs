//! Neighbourhood graphs on point clouds.
//!
//! Both constructions compute all `O(N²)` pairwise distances. Distance ties in
//! the k-nearest-neighbour selection go to the smaller point index, so the
//! output is deterministic.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::{euclidean, PointCloud};
use crate::error::{Error, Result};
use crate::graph::NeighbourhoodGraph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    Knn(usize),
    Epsilon(f64),
    /// Use the supplied network as is.
    External,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub kind: GraphKind,
    #[serde(default)]
    pub weighted: bool,
}

impl GraphSpec {
    pub fn knn(k: usize, weighted: bool) -> Self {
        Self {
            kind: GraphKind::Knn(k),
            weighted,
        }
    }

    pub fn epsilon(eps: f64, weighted: bool) -> Self {
        Self {
            kind: GraphKind::Epsilon(eps),
            weighted,
        }
    }

    /// Build the graph this spec describes on `cloud`.
    pub fn build(&self, cloud: &PointCloud) -> Result<NeighbourhoodGraph> {
        match self.kind {
            GraphKind::Knn(k) => knn_graph(cloud, k, self.weighted),
            GraphKind::Epsilon(eps) => epsilon_graph(cloud, eps, self.weighted),
            GraphKind::External => Err(Error::InvalidInput(
                "an external graph spec needs a supplied network, not a point cloud".into(),
            )),
        }
    }
}

/// k-nearest-neighbour graph: `(i, j)` is an edge iff `p_i` is among the `k`
/// nearest neighbours of `p_j` or vice versa. Degrees are at least `k`.
pub fn knn_graph(cloud: &PointCloud, k: usize, weighted: bool) -> Result<NeighbourhoodGraph> {
    let n = cloud.len();
    if k == 0 || k >= n {
        return Err(Error::InvalidInput(format!(
            "k must satisfy 1 <= k < N, got k={k}, N={n}"
        )));
    }
    let lists: Vec<(Vec<usize>, bool)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let p = cloud.point(i);
            let mut cand: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (euclidean(p, cloud.point(j)), j))
                .collect();
            let coincident = cand.iter().any(|c| c.0 == 0.0);
            let by_dist = |a: &(f64, usize), b: &(f64, usize)| {
                a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1))
            };
            if k < cand.len() {
                cand.select_nth_unstable_by(k - 1, by_dist);
                cand.truncate(k);
            }
            (cand.into_iter().map(|c| c.1).collect(), coincident)
        })
        .collect();
    if lists.iter().any(|l| l.1) {
        log::warn!("point cloud contains coincident points; k-NN ties resolved by index");
    }
    let mut edges: Vec<(usize, usize)> = lists
        .iter()
        .enumerate()
        .flat_map(|(i, (nbrs, _))| nbrs.iter().map(move |&j| (i.min(j), i.max(j))))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    Ok(finish(cloud, edges, weighted))
}

/// ε-neighbourhood graph: `(i, j)` is an edge iff `d(p_i, p_j) <= ε`.
pub fn epsilon_graph(cloud: &PointCloud, eps: f64, weighted: bool) -> Result<NeighbourhoodGraph> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {eps}")));
    }
    let n = cloud.len();
    let rows: Vec<Vec<(usize, usize)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let p = cloud.point(i);
            (i + 1..n)
                .filter(|&j| euclidean(p, cloud.point(j)) <= eps)
                .map(|j| (i, j))
                .collect()
        })
        .collect();
    let edges = rows.concat();
    Ok(finish(cloud, edges, weighted))
}

fn finish(cloud: &PointCloud, edges: Vec<(usize, usize)>, weighted: bool) -> NeighbourhoodGraph {
    let weights = weighted.then(|| {
        edges
            .iter()
            .map(|&(i, j)| euclidean(cloud.point(i), cloud.point(j)))
            .collect()
    });
    NeighbourhoodGraph::build(cloud.len(), edges, weights)
}
