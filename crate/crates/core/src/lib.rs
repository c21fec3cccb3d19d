//! Contagion maps and Isomap for manifold learning.
//!
//! The library builds neighbourhood graphs on point clouds (or takes a given
//! network), estimates distances either by shortest paths (Isomap) or by the
//! activation times of threshold contagions started around every node
//! (contagion maps), and infers structure from the estimates through
//! classical multidimensional scaling, Vietoris–Rips persistent homology and
//! correlation with a known base geometry.
//!
//! ```
//! use contagion_maps::{contagion_matrix, torus_network, ContagionConfig, TorusNetSpec};
//!
//! let graph = torus_network(&TorusNetSpec::new(6, 0, 1)).unwrap();
//! let x = contagion_matrix(&graph, &ContagionConfig::new(0.3).unwrap()).unwrap();
//! let d = x.symmetrize();
//! assert_eq!(d.n(), 36);
//! ```

pub mod cloud;
pub mod contagion;
pub(crate) mod eigen;
pub mod error;
pub mod generators;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod isomap;
pub mod matrix;
pub mod mds;
pub mod neighbourhood;
pub mod persistence;
pub mod pipeline;
pub(crate) mod stats;

pub use cloud::PointCloud;
pub use contagion::{
    contagion_matrix, run_realization, seed_set, symmetric_contagion_map, ContagionConfig, ContagionProcess,
};
pub use error::{Error, Result};
pub use generators::{
    add_gaussian_noise, swiss_roll, swiss_roll_regular, torus_network, torus_reference, SwissRollSpec, TorusNetSpec,
};
pub use geometry::{geometry_profile, pairwise_euclidean, pearson, DistanceVectorPair};
pub use graph::NeighbourhoodGraph;
pub use isomap::{floyd_warshall, isomap_dissimilarity, ShortestPathConfig, UnreachablePolicy};
pub use matrix::{p_dist, symmetrize, ActivationMatrix, DissimilarityMatrix, Matrix};
pub use mds::{
    approximate_embedding_dimension, classical_mds, double_center, profile_with_embedding, residual_profile,
    residual_variance, Embedding, ResidualProfile,
};
pub use neighbourhood::{epsilon_graph, knn_graph, GraphKind, GraphSpec};
pub use persistence::{dominant_bars, vr_persistence, Barcode, Interval, VRConfig};
pub use pipeline::{run_pipeline, PipelineConfig, RunReport};
