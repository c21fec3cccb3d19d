//! Contagion maps versus Isomap on a torus network with non-geometric edges.
//!
//! Shortcuts make shortest paths useless for recovering the torus, while a
//! threshold contagion with T=0.2 only spreads along the geometric lattice.

use contagion_maps::{
    approximate_embedding_dimension, contagion_matrix, floyd_warshall, torus_network, ContagionConfig,
    ShortestPathConfig, TorusNetSpec,
};

fn main() -> contagion_maps::Result<()> {
    let n = 24;
    let graph = torus_network(&TorusNetSpec::new(n, 2, 7))?;
    println!(
        "{}x{} torus, {} nodes, {} edges",
        n,
        n,
        graph.n_nodes(),
        graph.n_edges()
    );

    let iso = floyd_warshall(&graph, &ShortestPathConfig::hops())?;
    println!(
        "Isomap point cloud: P = {}",
        approximate_embedding_dimension(&iso.p_dist(), 0.05, 100)?
    );

    for t in [0.0, 0.1, 0.2, 0.3] {
        let x = contagion_matrix(&graph, &ContagionConfig::new(t)?)?;
        let pc = x.symmetrize().p_dist();
        println!(
            "contagion T={t}: P = {}",
            approximate_embedding_dimension(&pc, 0.05, 100)?
        );
    }
    Ok(())
}
