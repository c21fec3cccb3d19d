//! Pearson correlation of contagion maps with the torus base geometry across
//! thresholds.

use contagion_maps::geometry::ProfileOptions;
use contagion_maps::{geometry_profile, torus_network, torus_reference, TorusNetSpec};

fn main() -> contagion_maps::Result<()> {
    let n = 20;
    let graph = torus_network(&TorusNetSpec::new(n, 4, 3))?;
    let reference = torus_reference(n)?;
    let thresholds: Vec<f64> = (0..=5).map(|i| i as f64 / 10.0).collect();
    let profile = geometry_profile(&graph, &reference, &thresholds, &ProfileOptions::default())?;

    println!("{:>6} {:>10} {:>12}", "T", "direct", "point cloud");
    println!("{:>6} {:>10.4} {:>12.4}", "isomap", profile.isomap.0, profile.isomap.1);
    for row in &profile.rows {
        println!("{:>6} {:>10.4} {:>12.4}", row.threshold, row.r_direct, row.r_pointcloud);
    }
    println!("best threshold (point cloud): {:?}", profile.argmax(true));
    Ok(())
}
