//! The full workflow from a JSON configuration: generate a torus network,
//! estimate distances with Isomap and contagion maps, and analyse them.

use contagion_maps::{run_pipeline, PipelineConfig};

fn main() -> contagion_maps::Result<()> {
    let out = std::env::temp_dir().join("contagion-maps-pipeline");
    let json = format!(
        r#"{{
            "input": {{"generator": {{"torus": {{"n": 16, "d_ng": 2}}}}}},
            "estimators": [
                {{"isomap": {{"use_weights": false}}}},
                {{"contagion": {{"thresholds": [0.1, 0.2, 0.3]}}}}
            ],
            "analyses": {{
                "mds_profile": {{"p_max": 6}},
                "persistence": {{"max_dim": 1, "subsample": {{"count": 120, "strategy": "max_min"}}}},
                "pearson": {{}}
            }},
            "variant": "both",
            "output_dir": {:?},
            "rng_seed": 11
        }}"#,
        out.display().to_string()
    );
    let cfg = PipelineConfig::from_json(&json)?;
    let report = run_pipeline(&cfg)?;
    print!("{}", report.to_text());
    println!("outputs in {}", out.display());
    Ok(())
}
