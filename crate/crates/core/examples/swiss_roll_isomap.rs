//! Isomap on a noisy Swiss roll: k-nearest-neighbour graph, Floyd–Warshall
//! geodesics, and the MDS residual-variance profile.

use contagion_maps::{floyd_warshall, knn_graph, residual_profile, swiss_roll, ShortestPathConfig, SwissRollSpec};

fn main() -> contagion_maps::Result<()> {
    let spec = SwissRollSpec {
        snr: Some(30.0),
        rng_seed: 1,
        ..SwissRollSpec::default()
    }
    .with_points(800);
    let cloud = swiss_roll(&spec)?;
    let graph = knn_graph(&cloud, 8, true)?;
    println!("{} points, {} edges", cloud.len(), graph.n_edges());

    let d = floyd_warshall(&graph, &ShortestPathConfig::weighted())?;
    // the unrolled sheet is long and narrow, so one coordinate already
    // explains most of the variance; a 1% criterion separates the second
    let profile = residual_profile(&d, 6, 0.01, 100)?;
    for (p, r) in profile.residuals.iter().enumerate() {
        println!("R_{} = {r:.4}", p + 1);
    }
    println!("approximate embedding dimension: {}", profile.dimension);
    Ok(())
}
