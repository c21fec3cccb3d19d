//! k-nearest-neighbour and ε-neighbourhood graphs on the same point cloud,
//! and the edge-list format they are exchanged in.

use contagion_maps::io::{read_edgelist, write_edgelist};
use contagion_maps::{epsilon_graph, knn_graph, swiss_roll, SwissRollSpec};

fn main() -> contagion_maps::Result<()> {
    let spec = SwissRollSpec {
        snr: Some(30.0),
        rng_seed: 2,
        ..SwissRollSpec::default()
    }
    .with_points(600);
    let cloud = swiss_roll(&spec)?;

    for k in [4, 8, 12] {
        let g = knn_graph(&cloud, k, false)?;
        println!("knn k={k}: {} edges, {} components", g.n_edges(), g.components());
    }
    for eps in [0.3, 0.5, 0.8] {
        let g = epsilon_graph(&cloud, eps, true)?;
        println!("epsilon {eps}: {} edges, {} components", g.n_edges(), g.components());
    }

    let path = std::env::temp_dir().join("contagion-maps-knn8.txt");
    let g = knn_graph(&cloud, 8, true)?;
    write_edgelist(&path, &g)?;
    let back = read_edgelist(&path)?;
    println!("round trip through {}: {} edges", path.display(), back.n_edges());
    Ok(())
}
