//! End-to-end workflow: data → neighbourhood graph → distance estimates →
//! (optionally) point-cloud distances of the estimates → structural inference.
//!
//! Every distance estimate produces one [`Record`] per variant. A failing
//! analysis is recorded in its record and never stops the other branches.

mod config;
mod report;

use std::fs;
use std::path::Path;
use std::time::Instant;

use sha2::{Digest, Sha256};

use crate::cloud::PointCloud;
use crate::contagion::{contagion_matrix, ContagionConfig};
use crate::error::{Error, Result};
use crate::generators::{swiss_roll, torus_network, torus_reference_distances, TorusMetric, TorusNetSpec};
use crate::geometry::pairwise_euclidean;
use crate::graph::NeighbourhoodGraph;
use crate::io;
use crate::isomap::floyd_warshall;
use crate::matrix::{ActivationMatrix, DissimilarityMatrix};
use crate::mds::{profile_with_embedding, Embedding, ResidualProfile};
use crate::persistence::{vr_persistence, Barcode};
use crate::stats;

pub use config::{
    Analyses, EstimatorSpec, GeneratorSpec, InputSpec, MdsAnalysis, PearsonAnalysis, PersistenceAnalysis,
    PipelineConfig, ReferenceSpec, Variant,
};
pub use report::{
    BarcodeSummary, DimensionSummary, InputSummary, MdsSummary, Provenance, Record, RunReport, StageTiming,
};

/// Loaded input: always a graph, plus the point cloud when there is one.
#[derive(Debug, Clone)]
pub struct Input {
    pub cloud: Option<PointCloud>,
    pub graph: NeighbourhoodGraph,
    /// Grid side when the input is a generated torus network.
    pub torus_side: Option<usize>,
}

/// Generates data from `spec` with `seed`.
pub fn generate(spec: &GeneratorSpec, seed: u64) -> Result<(Option<PointCloud>, Option<NeighbourhoodGraph>)> {
    match spec {
        GeneratorSpec::Torus { n, d_ng, model } => {
            let g = torus_network(&TorusNetSpec {
                n: *n,
                d_ng: *d_ng,
                rng_seed: seed,
                model: *model,
            })?;
            Ok((None, Some(g)))
        }
        GeneratorSpec::SwissRoll { spec, points } => {
            let mut spec = spec.clone();
            spec.rng_seed = seed;
            if let Some(p) = points {
                spec = spec.with_points(*p);
            }
            Ok((Some(swiss_roll(&spec)?), None))
        }
    }
}

/// Reads or generates the input and builds its neighbourhood graph.
pub fn load_input(cfg: &PipelineConfig) -> Result<Input> {
    let seed = cfg.rng_seed.unwrap_or(0);
    let (cloud, graph, torus_side) = match &cfg.input {
        InputSpec::PointcloudCsv(path) => (Some(io::read_pointcloud_csv(path)?), None, None),
        InputSpec::Edgelist(path) => (None, Some(io::read_edgelist(path)?), None),
        InputSpec::Generator(g) => {
            let side = match g {
                GeneratorSpec::Torus { n, .. } => Some(*n),
                _ => None,
            };
            let (c, gr) = generate(g, seed)?;
            (c, gr, side)
        }
    };
    let graph = match (graph, &cloud) {
        (Some(g), _) => g,
        (None, Some(c)) => cfg
            .graph
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("point-cloud input needs a graph spec".into()))?
            .build(c)?,
        (None, None) => unreachable!("every input yields a cloud or a graph"),
    };
    Ok(Input {
        cloud,
        graph,
        torus_side,
    })
}

/// SHA-256 of the configuration's canonical JSON form.
pub fn config_hash(cfg: &PipelineConfig) -> String {
    let json = serde_json::to_string(cfg).expect("config serializes");
    format!("{:x}", Sha256::digest(json.as_bytes()))
}

/// The error message followed by its chain of causes.
fn describe(e: &Error) -> String {
    let mut msg = e.to_string();
    let mut source = std::error::Error::source(e);
    while let Some(s) = source {
        msg.push_str(": ");
        msg.push_str(&s.to_string());
        source = s.source();
    }
    msg
}

struct Timer(Vec<StageTiming>);

impl Timer {
    fn time<T>(&mut self, stage: impl Into<String>, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.0.push(StageTiming {
            stage: stage.into(),
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }
}

/// Reference distances (upper triangle with its moments) for Pearson analyses.
struct Reference {
    upper: Vec<f64>,
    mean: f64,
    ss: f64,
}

fn resolve_reference(spec: &PearsonAnalysis, input: &Input) -> Result<Reference> {
    let n = input.graph.n_nodes();
    let d = match &spec.reference {
        ReferenceSpec::Auto => match (input.torus_side, &input.cloud) {
            (Some(side), _) => torus_reference_distances(side, TorusMetric::Ambient)?,
            (None, Some(c)) if c.intrinsic_dim().is_some() => {
                pairwise_euclidean(&c.intrinsic_cloud().expect("intrinsic present"))
            }
            _ => {
                return Err(Error::InvalidInput(
                    "no base geometry available: configure a pearson reference".into(),
                ))
            }
        },
        ReferenceSpec::Intrinsic => {
            let c = input
                .cloud
                .as_ref()
                .and_then(PointCloud::intrinsic_cloud)
                .ok_or_else(|| Error::InvalidInput("input has no intrinsic coordinates".into()))?;
            pairwise_euclidean(&c)
        }
        ReferenceSpec::Ambient => pairwise_euclidean(
            input
                .cloud
                .as_ref()
                .ok_or_else(|| Error::InvalidInput("input is not a point cloud".into()))?,
        ),
        ReferenceSpec::Torus { n, metric } => torus_reference_distances(*n, *metric)?,
        ReferenceSpec::PointcloudCsv(path) => pairwise_euclidean(&io::read_pointcloud_csv(path)?),
    };
    if d.n() != n {
        return Err(Error::InvalidInput(format!(
            "reference has {} points for {n} nodes",
            d.n()
        )));
    }
    let upper = d.upper_triangle();
    let (mean, ss) = stats::moments(&upper);
    if ss == 0.0 {
        return Err(Error::ConstantInput("reference"));
    }
    Ok(Reference { upper, mean, ss })
}

struct Runner<'a> {
    cfg: &'a PipelineConfig,
    out: &'a Path,
    reference: Option<std::result::Result<Reference, String>>,
    timer: Timer,
    residual_series: Vec<(String, Vec<(f64, f64)>)>,
}

/// Results of the configured analyses on one dissimilarity matrix, before
/// they are written out under a record label.
#[derive(Clone)]
struct Analysis {
    mds: Option<std::result::Result<(ResidualProfile, Embedding), String>>,
    pearson: Option<std::result::Result<f64, String>>,
    persistence: Option<std::result::Result<(Barcode, usize), String>>,
}

impl Runner<'_> {
    fn analyze(&mut self, d: &DissimilarityMatrix, record: Record, sentinel: Option<f64>) -> (Record, Analysis) {
        let analysis = self.compute(d, &record, sentinel);
        (self.emit(record, &analysis), analysis)
    }

    fn compute(&mut self, d: &DissimilarityMatrix, record: &Record, sentinel: Option<f64>) -> Analysis {
        let label = record.label();
        let a = &self.cfg.analyses;
        let mds = a.mds_profile.as_ref().map(|m| {
            self.timer
                .time(format!("{label}/mds"), || {
                    profile_with_embedding(d, m.p_max, m.criterion, m.cap)
                })
                .map_err(|e| describe(&e))
        });
        let pearson = match (&a.pearson, record.estimator.as_str()) {
            (None, _) | (_, "ambient") => None,
            (Some(p), _) => Some(match self.reference.as_ref().expect("resolved when requested") {
                Ok(r) => {
                    let res = match sentinel {
                        Some(s) if p.exclude_sentinel => {
                            let raw = record.variant == "direct";
                            let (x, y): (Vec<f64>, Vec<f64>) = r
                                .upper
                                .iter()
                                .zip(d.upper_triangle())
                                .filter(|(_, v)| !raw || *v < s)
                                .map(|(a, b)| (*a, b))
                                .unzip();
                            stats::pearson(&x, &y)
                        }
                        _ => stats::pearson_with(&r.upper, r.mean, r.ss, &d.upper_triangle()),
                    };
                    res.map_err(|e| describe(&e))
                }
                Err(msg) => Err(msg.clone()),
            }),
        };
        let persistence = a.persistence.as_ref().map(|p| {
            let mut vr = p.vr;
            if let (Some(s), Some(seed)) = (vr.subsample.as_mut(), self.cfg.rng_seed) {
                s.seed = seed;
            }
            let points = vr.subsample.map_or(d.n(), |s| s.count.min(d.n()));
            self.timer
                .time(format!("{label}/persistence"), || vr_persistence(d, &vr))
                .map(|b| (b, points))
                .map_err(|e| describe(&e))
        });
        Analysis {
            mds,
            pearson,
            persistence,
        }
    }

    /// Fills `record` from `analysis` and writes the per-record files.
    fn emit(&mut self, mut record: Record, analysis: &Analysis) -> Record {
        let label = record.label();
        match &analysis.mds {
            Some(Ok((profile, emb))) => {
                let written = io::write_residual_csv(self.out.join(format!("{label}_residuals.csv")), profile)
                    .and_then(|_| io::write_embedding_csv(self.out.join(format!("{label}_embedding.csv")), emb))
                    .and_then(|_| {
                        let pts: Vec<(f64, f64)> = (0..emb.len())
                            .map(|i| {
                                let r = emb.coords.row(i);
                                (r[0], r.get(1).copied().unwrap_or(0.0))
                            })
                            .collect();
                        io::write_text(
                            self.out.join(format!("{label}_embedding.svg")),
                            &io::scatter_svg(&format!("{label} MDS embedding"), &pts),
                        )
                    });
                if let Err(e) = written {
                    record.errors.push(("output".into(), describe(&e)));
                }
                self.residual_series.push((
                    label.clone(),
                    profile
                        .residuals
                        .iter()
                        .enumerate()
                        .map(|(p, r)| ((p + 1) as f64, *r))
                        .collect(),
                ));
                record.mds = Some(MdsSummary::from(profile));
            }
            Some(Err(e)) => record.errors.push(("mds_profile".into(), e.clone())),
            None => {}
        }
        match &analysis.pearson {
            Some(Ok(v)) => record.pearson = Some(*v),
            Some(Err(e)) => record.errors.push(("pearson".into(), e.clone())),
            None => {}
        }
        match &analysis.persistence {
            Some(Ok((b, points))) => {
                let written = io::write_barcode(self.out.join(format!("{label}_barcode.csv")), b).and_then(|_| {
                    io::write_text(
                        self.out.join(format!("{label}_barcode.svg")),
                        &io::barcode_svg(b, &format!("{label} barcode")),
                    )
                });
                if let Err(e) = written {
                    record.errors.push(("output".into(), describe(&e)));
                }
                let ratio = self.cfg.analyses.persistence.as_ref().map_or(3.0, |p| p.ratio);
                record.persistence = Some(BarcodeSummary::new(b, *points, ratio));
            }
            Some(Err(e)) => record.errors.push(("persistence".into(), e.clone())),
            None => {}
        }
        record
    }

    fn write_matrix(&self, name: &str, m: &crate::matrix::Matrix, errors: &mut Vec<(String, String)>) {
        if self.cfg.write_matrices {
            if let Err(e) = io::write_matrix_csv(self.out.join(name), m) {
                errors.push(("output".into(), describe(&e)));
            }
        }
    }
}

/// Runs the configured workflow, writing intermediates and reports to the
/// output directory. Fails only for invalid configurations and unreadable
/// input; analysis failures are recorded in the report.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<RunReport> {
    cfg.validate()?;
    let out = cfg.output_dir.as_path();
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut timer = Timer(Vec::new());

    let input = timer.time("input", || load_input(cfg))?;
    io::write_edgelist(out.join("graph.edgelist"), &input.graph)?;
    if let (Some(c), InputSpec::Generator(_)) = (&input.cloud, &cfg.input) {
        io::write_pointcloud_csv(out.join("points.csv"), c)?;
    }
    let n = input.graph.n_nodes();
    let isolated = (0..n).filter(|&i| input.graph.degree(i) == 0).count();
    if isolated > 0 {
        log::warn!("{isolated} isolated node(s) in the neighbourhood graph");
    }

    let mut report = RunReport {
        provenance: Provenance {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config_hash(cfg),
            rng_seed: cfg.rng_seed,
        },
        input: Some(InputSummary {
            nodes: n,
            edges: input.graph.n_edges(),
            dim: input.cloud.as_ref().map(PointCloud::dim),
            components: input.graph.components(),
        }),
        records: Vec::new(),
        errors: Vec::new(),
        timings: Vec::new(),
    };

    let reference = cfg.analyses.pearson.as_ref().map(|p| {
        timer
            .time("reference", || resolve_reference(p, &input))
            .map_err(|e| describe(&e))
    });
    let mut runner = Runner {
        cfg,
        out,
        reference,
        timer,
        residual_series: Vec::new(),
    };

    if cfg.ambient_persistence {
        match &input.cloud {
            Some(c) => {
                let d = pairwise_euclidean(c);
                let (rec, _) = runner.analyze(&d, Record::new("ambient", None, "direct"), None);
                report.records.push(rec);
            }
            None => report
                .errors
                .push(("ambient".into(), "input is a network, not a point cloud".into())),
        }
    }

    for est in &cfg.estimators {
        match est {
            EstimatorSpec::Isomap(sp) => {
                let d = match runner.timer.time("isomap", || floyd_warshall(&input.graph, sp)) {
                    Ok(d) => d,
                    Err(e) => {
                        report.errors.push(("isomap".into(), describe(&e)));
                        continue;
                    }
                };
                let mut errs = Vec::new();
                runner.write_matrix("isomap.csv", d.as_matrix(), &mut errs);
                report.errors.extend(errs);
                if cfg.variant.direct() {
                    let (rec, _) = runner.analyze(&d, Record::new("isomap", None, "direct"), None);
                    report.records.push(rec);
                }
                if cfg.variant.pointcloud() {
                    let pd = runner.timer.time("isomap/p_dist", || d.p_dist());
                    let (rec, _) = runner.analyze(&pd, Record::new("isomap", None, "pointcloud"), None);
                    report.records.push(rec);
                }
            }
            EstimatorSpec::Contagion { thresholds, regular } => {
                // consecutive thresholds often give the same activation times
                let mut previous: Option<(ActivationMatrix, Option<Analysis>, Option<Analysis>)> = None;
                for &t in thresholds {
                    let stage = format!("contagion_t{t}");
                    let x = match ContagionConfig::new(t)
                        .and_then(|c| runner.timer.time(&stage, || contagion_matrix(&input.graph, &c)))
                    {
                        Ok(x) => x,
                        Err(e) => {
                            report.errors.push((stage, describe(&e)));
                            continue;
                        }
                    };
                    let cached = previous.take().filter(|(px, _, _)| *px == x);
                    let sentinel = Some(f64::from(x.sentinel()));
                    let direct = x.symmetrize();
                    let mut errs = Vec::new();
                    runner.write_matrix(&format!("activation_t{t}.csv"), &x.to_matrix(), &mut errs);
                    runner.write_matrix(&format!("contagion_t{t}.csv"), direct.as_matrix(), &mut errs);
                    report.errors.extend(errs);
                    let (cached_direct, cached_pc) = cached.map_or((None, None), |(_, a, b)| (a, b));
                    let mut done_direct = None;
                    let mut done_pc = None;
                    if cfg.variant.direct() {
                        let record = Record::new("contagion", Some(t), "direct");
                        let (rec, a) = match cached_direct {
                            Some(a) => (runner.emit(record, &a), a),
                            None => runner.analyze(&direct, record, sentinel),
                        };
                        report.records.push(rec);
                        done_direct = Some(a);
                    }
                    if cfg.variant.pointcloud() {
                        let record = Record::new("contagion", Some(t), "pointcloud");
                        let (rec, a) = match cached_pc {
                            Some(a) => (runner.emit(record, &a), a),
                            None => {
                                let pd = runner.timer.time(format!("{stage}/p_dist"), || {
                                    if *regular {
                                        x.p_dist()
                                    } else {
                                        direct.p_dist()
                                    }
                                });
                                runner.analyze(&pd, record, sentinel)
                            }
                        };
                        report.records.push(rec);
                        done_pc = Some(a);
                    }
                    previous = Some((x, done_direct, done_pc));
                }
            }
        }
    }

    write_summaries(out, &report, &runner.residual_series)?;
    report.timings = runner.timer.0;
    io::write_text(out.join("report.json"), &report.to_json())?;
    io::write_text(out.join("report.txt"), &report.to_text())?;
    io::write_text(
        out.join("timings.json"),
        &(serde_json::to_string_pretty(&report.timings)? + "\n"),
    )?;
    Ok(report)
}

fn write_summaries(out: &Path, report: &RunReport, residuals: &[(String, Vec<(f64, f64)>)]) -> Result<()> {
    if !residuals.is_empty() {
        io::write_text(
            out.join("residuals.svg"),
            &io::line_plot_svg("Residual variance", "dimension p", "R_p", residuals),
        )?;
    }
    let rows: Vec<Vec<String>> = report
        .records
        .iter()
        .filter(|r| r.mds.is_some() || r.pearson.is_some())
        .map(|r| {
            vec![
                r.estimator.clone(),
                r.threshold.map_or(String::new(), io::format_f64),
                r.variant.clone(),
                r.mds.as_ref().map_or(String::new(), |m| m.dimension.to_string()),
                r.pearson.map_or(String::new(), io::format_f64),
            ]
        })
        .collect();
    if !rows.is_empty() {
        io::write_rows(
            out.join("summary.csv"),
            &["estimator", "threshold", "variant", "embedding_dimension", "pearson"],
            rows,
        )?;
    }
    let pearson: Vec<(String, Vec<(f64, f64)>)> = ["direct", "pointcloud"]
        .iter()
        .map(|v| {
            let pts = report
                .records
                .iter()
                .filter(|r| r.variant == *v && r.estimator == "contagion")
                .filter_map(|r| Some((r.threshold?, r.pearson?)))
                .collect::<Vec<_>>();
            (format!("contagion {v}"), pts)
        })
        .filter(|s| s.1.len() > 1)
        .collect();
    if !pearson.is_empty() {
        io::write_text(
            out.join("pearson.svg"),
            &io::line_plot_svg("Pearson correlation with base geometry", "threshold T", "r", &pearson),
        )?;
    }
    Ok(())
}
