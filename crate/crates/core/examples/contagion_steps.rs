//! Stepping a single threshold contagion by hand on a ring lattice.

use contagion_maps::{seed_set, ContagionProcess, NeighbourhoodGraph};

fn main() -> contagion_maps::Result<()> {
    // each node linked to its two nearest neighbours on either side
    let n = 30;
    let edges = (0..n).flat_map(|i| [(i, (i + 1) % n), (i, (i + 2) % n)]);
    let graph = NeighbourhoodGraph::from_edges(n, edges)?;

    let seeds = seed_set(&graph, 0)?;
    println!("seed set: {seeds:?}");
    for threshold in [0.2, 0.3, 0.5] {
        let mut process = ContagionProcess::new(&graph, threshold, &seeds)?;
        let mut fronts = Vec::new();
        loop {
            let new = process.step();
            if new == 0 {
                break;
            }
            fronts.push(new);
        }
        let active = process.state().iter().filter(|&&a| a).count();
        println!(
            "T={threshold}: {} steps, new nodes per step {fronts:?}, {active}/{n} active",
            process.step_count() - 1
        );
    }
    Ok(())
}
