//! Vietoris–Rips persistence of a noisy circle, written as CSV and SVG.

use contagion_maps::io::{barcode_svg, write_barcode, write_text};
use contagion_maps::{dominant_bars, pairwise_euclidean, vr_persistence, PointCloud, VRConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> anyhow::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let points: Vec<Vec<f64>> = (0..120)
        .map(|_| {
            let a = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = 1.0 + rng.gen_range(-0.1..0.1);
            vec![r * a.cos(), r * a.sin()]
        })
        .collect();
    let d = pairwise_euclidean(&PointCloud::new(points)?);

    let barcode = vr_persistence(&d, &VRConfig::with_max_dim(1))?;
    for dim in 0..=1 {
        println!(
            "H{dim}: {} bars, {} infinite, {} dominant",
            barcode.count(dim),
            barcode.infinite_count(dim),
            dominant_bars(&barcode, dim, 3.0)
        );
    }

    let out = std::env::temp_dir().join("contagion-maps-circle");
    std::fs::create_dir_all(&out)?;
    write_barcode(out.join("barcode.csv"), &barcode)?;
    write_text(out.join("barcode.svg"), &barcode_svg(&barcode, "noisy circle"))?;
    println!("wrote {}", out.display());
    Ok(())
}
