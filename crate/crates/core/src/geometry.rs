//! Agreement between distance estimates and a known base geometry.

use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::contagion::{contagion_matrix, ContagionConfig};
use crate::error::{Error, Result};
use crate::graph::NeighbourhoodGraph;
use crate::isomap::{floyd_warshall, ShortestPathConfig};
use crate::matrix::{self, DissimilarityMatrix, Matrix};
use crate::stats;

/// Euclidean distance matrix of a point cloud.
pub fn pairwise_euclidean(cloud: &PointCloud) -> DissimilarityMatrix {
    // points as columns
    let coords: Vec<f64> = cloud.points().flatten().copied().collect();
    let m = Matrix::from_vec(cloud.len(), cloud.dim(), coords).expect("consistent shape");
    matrix::p_dist(&m.transpose())
}

/// Two equal-length vectors of unordered-pair distances, paired in row-major
/// upper-triangle order.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceVectorPair {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl DistanceVectorPair {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidInput(format!(
                "distance vectors of lengths {} and {}",
                a.len(),
                b.len()
            )));
        }
        if a.len() < 2 {
            return Err(Error::InvalidInput("need at least two distance pairs".into()));
        }
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite distance".into()));
        }
        Ok(Self { a, b })
    }

    pub fn from_matrices(a: &DissimilarityMatrix, b: &DissimilarityMatrix) -> Result<Self> {
        if a.n() != b.n() {
            return Err(Error::InvalidInput(format!(
                "matrices of sizes {} and {}",
                a.n(),
                b.n()
            )));
        }
        Self::new(a.upper_triangle(), b.upper_triangle())
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }
}

/// Sample Pearson correlation coefficient.
pub fn pearson(pair: &DistanceVectorPair) -> Result<f64> {
    stats::pearson(&pair.a, &pair.b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub threshold: f64,
    pub r_direct: f64,
    pub r_pointcloud: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryProfile {
    /// Isomap (hop-count) baseline: `(direct, pointcloud)`.
    pub isomap: (f64, f64),
    pub rows: Vec<ProfileRow>,
}

impl GeometryProfile {
    /// Threshold with the largest correlation for the chosen variant; ties
    /// go to the smaller threshold.
    pub fn argmax(&self, pointcloud: bool) -> Option<f64> {
        let value = |r: &ProfileRow| if pointcloud { r.r_pointcloud } else { r.r_direct };
        self.rows
            .iter()
            .fold(None::<&ProfileRow>, |best, r| match best {
                Some(b) if value(b) >= value(r) => Some(b),
                _ => Some(r),
            })
            .map(|r| r.threshold)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ProfileOptions {
    /// Drop pairs whose symmetrized activation time involves a never-activated
    /// node from the direct correlation.
    #[serde(default)]
    pub exclude_sentinel: bool,
}

/// Correlation of symmetric contagion maps (entries and point-cloud distances)
/// with reference distances, one row per threshold, plus the Isomap baseline.
pub fn geometry_profile(
    graph: &NeighbourhoodGraph,
    reference: &PointCloud,
    thresholds: &[f64],
    opts: &ProfileOptions,
) -> Result<GeometryProfile> {
    if reference.len() != graph.n_nodes() {
        return Err(Error::InvalidInput(format!(
            "reference has {} points for a graph with {} nodes",
            reference.len(),
            graph.n_nodes()
        )));
    }
    let truth = pairwise_euclidean(reference).upper_triangle();
    let (mean, ss) = stats::moments(&truth);
    if ss == 0.0 {
        return Err(Error::ConstantInput("reference"));
    }
    let corr = |d: &DissimilarityMatrix| stats::pearson_with(&truth, mean, ss, &d.upper_triangle());

    let iso = floyd_warshall(graph, &ShortestPathConfig::hops())?;
    let isomap = (corr(&iso)?, corr(&iso.p_dist())?);

    let mut rows = Vec::with_capacity(thresholds.len());
    for &t in thresholds {
        let x = contagion_matrix(graph, &ContagionConfig::new(t)?)?;
        let direct = x.symmetrize();
        let r_pointcloud = corr(&direct.p_dist())?;
        let r_direct = if opts.exclude_sentinel {
            let sentinel = f64::from(x.sentinel());
            let (a, b): (Vec<f64>, Vec<f64>) = truth
                .iter()
                .zip(direct.upper_triangle())
                .filter(|(_, v)| *v < sentinel)
                .map(|(r, v)| (*r, v))
                .unzip();
            stats::pearson(&a, &b)?
        } else {
            corr(&direct)?
        };
        rows.push(ProfileRow {
            threshold: t,
            r_direct,
            r_pointcloud,
        });
    }
    Ok(GeometryProfile { isomap, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{torus_network, torus_reference, TorusNetSpec};

    #[test]
    fn affine_relations() {
        let a = vec![1.0, 4.0, 2.5, 7.0, 0.3];
        let b: Vec<f64> = a.iter().map(|x| 2.0 * x + 3.0).collect();
        let c: Vec<f64> = a.iter().map(|x| -x).collect();
        let r = pearson(&DistanceVectorPair::new(a.clone(), b).unwrap()).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        let r = pearson(&DistanceVectorPair::new(a, c).unwrap()).unwrap();
        assert!((r + 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_vector_is_an_error() {
        let pair = DistanceVectorPair::new(vec![1.0, 2.0, 3.0], vec![5.0; 3]).unwrap();
        assert!(matches!(pearson(&pair), Err(Error::ConstantInput(_))));
    }

    #[test]
    fn pairwise_euclidean_matches_direct_loop() {
        let cloud = PointCloud::new(vec![vec![0.0, 0.0, 1.0], vec![3.0, 4.0, 1.0], vec![-1.5, 0.25, 2.0]]).unwrap();
        let d = pairwise_euclidean(&cloud);
        for i in 0..3 {
            for j in 0..3 {
                let want = crate::cloud::euclidean(cloud.point(i), cloud.point(j));
                assert!((d.get(i, j) - want).abs() < 1e-12);
            }
        }
        assert_eq!(d.get(0, 1), 5.0);
    }

    #[test]
    fn zero_threshold_matches_isomap_direct() {
        let g = torus_network(&TorusNetSpec::new(8, 2, 5)).unwrap();
        let reference = torus_reference(8).unwrap();
        let p = geometry_profile(&g, &reference, &[0.0], &ProfileOptions::default()).unwrap();
        assert!((p.rows[0].r_direct - p.isomap.0).abs() < 1e-9);
        assert!((p.rows[0].r_pointcloud - p.isomap.1).abs() < 0.05);
    }
}
