use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::mds::ResidualProfile;
use crate::persistence::{dominant_bars, Barcode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdsSummary {
    pub residuals: Vec<f64>,
    pub criterion: f64,
    pub cap: usize,
    pub dimension: usize,
}

impl From<&ResidualProfile> for MdsSummary {
    fn from(p: &ResidualProfile) -> Self {
        Self {
            residuals: p.residuals.clone(),
            criterion: p.criterion,
            cap: p.cap,
            dimension: p.dimension,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionSummary {
    pub dim: usize,
    pub bars: usize,
    pub infinite: usize,
    pub zero_length: usize,
    pub dominant: usize,
    pub max_persistence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarcodeSummary {
    pub points: usize,
    pub ratio: f64,
    pub dims: Vec<DimensionSummary>,
}

impl BarcodeSummary {
    pub fn new(b: &Barcode, points: usize, ratio: f64) -> Self {
        let dims = (0..=b.max_dim)
            .map(|dim| DimensionSummary {
                dim,
                bars: b.count(dim),
                infinite: b.infinite_count(dim),
                zero_length: b.zero_length_count(dim),
                dominant: dominant_bars(b, dim, ratio),
                max_persistence: b
                    .in_dim(dim)
                    .filter(|i| !i.is_infinite())
                    .map(|i| i.persistence())
                    .fold(0.0, f64::max),
            })
            .collect();
        Self { points, ratio, dims }
    }

    pub fn dominant(&self, dim: usize) -> Option<usize> {
        self.dims.get(dim).map(|d| d.dominant)
    }
}

/// Results of all analyses for one distance estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    /// `ambient`, `isomap` or `contagion`.
    pub estimator: String,
    pub threshold: Option<f64>,
    /// `direct` or `pointcloud`.
    pub variant: String,
    pub mds: Option<MdsSummary>,
    pub persistence: Option<BarcodeSummary>,
    pub pearson: Option<f64>,
    /// `(stage, message)` for each failed step.
    pub errors: Vec<(String, String)>,
}

impl Record {
    pub(crate) fn new(estimator: &str, threshold: Option<f64>, variant: &str) -> Self {
        Self {
            estimator: estimator.to_string(),
            threshold,
            variant: variant.to_string(),
            mds: None,
            persistence: None,
            pearson: None,
            errors: Vec::new(),
        }
    }

    pub fn label(&self) -> String {
        match self.threshold {
            Some(t) => format!("{}_t{}_{}", self.estimator, t, self.variant),
            None => format!("{}_{}", self.estimator, self.variant),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSummary {
    pub nodes: usize,
    pub edges: usize,
    /// Ambient dimension for point-cloud inputs.
    pub dim: Option<usize>,
    pub components: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    /// SHA-256 of the canonical JSON form of the configuration.
    pub config_hash: String,
    pub rng_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub provenance: Provenance,
    pub input: Option<InputSummary>,
    pub records: Vec<Record>,
    /// Failures that prevented whole branches from running.
    pub errors: Vec<(String, String)>,
    /// Wall-clock times; kept out of `report.json` so that identical runs
    /// produce identical reports.
    #[serde(skip)]
    pub timings: Vec<StageTiming>,
}

impl RunReport {
    pub fn find(&self, estimator: &str, threshold: Option<f64>, variant: &str) -> Option<&Record> {
        self.records
            .iter()
            .find(|r| r.estimator == estimator && r.threshold == threshold && r.variant == variant)
    }

    pub fn has_errors(&self) -> bool {
        !self.errors.is_empty() || self.records.iter().any(|r| !r.errors.is_empty())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "contagion-maps {}", self.provenance.version);
        let _ = writeln!(s, "config sha256 {}", self.provenance.config_hash);
        if let Some(seed) = self.provenance.rng_seed {
            let _ = writeln!(s, "seed {seed}");
        }
        if let Some(i) = &self.input {
            let _ = write!(
                s,
                "input: {} nodes, {} edges, {} component(s)",
                i.nodes, i.edges, i.components
            );
            if let Some(d) = i.dim {
                let _ = write!(s, ", ambient dimension {d}");
            }
            s.push('\n');
        }
        for (stage, msg) in &self.errors {
            let _ = writeln!(s, "error in {stage}: {msg}");
        }
        for r in &self.records {
            let _ = write!(s, "\n[{}", r.estimator);
            if let Some(t) = r.threshold {
                let _ = write!(s, " T={t}");
            }
            let _ = writeln!(s, " {}]", r.variant);
            if let Some(m) = &r.mds {
                let shown: Vec<String> = m.residuals.iter().map(|v| format!("{v:.4}")).collect();
                let _ = writeln!(s, "  residual variances: {}", shown.join(" "));
                let _ = writeln!(
                    s,
                    "  approximate embedding dimension: {}{}",
                    m.dimension,
                    if m.dimension == m.cap { " (cap)" } else { "" }
                );
            }
            if let Some(p) = &r.persistence {
                for d in &p.dims {
                    let _ = writeln!(
                        s,
                        "  H{}: {} bars, {} infinite, {} zero-length, {} dominant, longest finite {:.4} ({} points)",
                        d.dim, d.bars, d.infinite, d.zero_length, d.dominant, d.max_persistence, p.points
                    );
                }
            }
            if let Some(r) = r.pearson {
                let _ = writeln!(s, "  pearson correlation with base geometry: {r:.4}");
            }
            for (stage, msg) in &r.errors {
                let _ = writeln!(s, "  error in {stage}: {msg}");
            }
        }
        s
    }
}
