use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::generators::{NonGeometricModel, SwissRollSpec, TorusMetric};
use crate::isomap::ShortestPathConfig;
use crate::neighbourhood::{GraphKind, GraphSpec};
use crate::persistence::VRConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorSpec {
    /// Torus-based network; its seed is the pipeline seed.
    Torus {
        n: usize,
        d_ng: usize,
        #[serde(default)]
        model: NonGeometricModel,
    },
    /// Swiss roll; `rng_seed` is replaced by the pipeline seed. `points`,
    /// when given, sets the scale so the roll holds about that many points.
    SwissRoll {
        #[serde(flatten)]
        spec: SwissRollSpec,
        #[serde(default)]
        points: Option<usize>,
    },
}

impl GeneratorSpec {
    pub fn is_stochastic(&self) -> bool {
        match self {
            GeneratorSpec::Torus { d_ng, .. } => *d_ng > 0,
            GeneratorSpec::SwissRoll { spec, .. } => spec.snr.is_some(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSpec {
    PointcloudCsv(PathBuf),
    Edgelist(PathBuf),
    Generator(GeneratorSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorSpec {
    Isomap(ShortestPathConfig),
    Contagion {
        thresholds: Vec<f64>,
        /// Use the regular (unsymmetrized) map for the point-cloud variant.
        #[serde(default)]
        regular: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Direct,
    Pointcloud,
    Both,
}

impl Variant {
    pub fn direct(self) -> bool {
        matches!(self, Variant::Direct | Variant::Both)
    }

    pub fn pointcloud(self) -> bool {
        matches!(self, Variant::Pointcloud | Variant::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MdsAnalysis {
    #[serde(default = "default_p_max")]
    pub p_max: usize,
    #[serde(default = "default_criterion")]
    pub criterion: f64,
    #[serde(default = "default_cap")]
    pub cap: usize,
}

fn default_p_max() -> usize {
    10
}
fn default_criterion() -> f64 {
    0.05
}
fn default_cap() -> usize {
    100
}

impl Default for MdsAnalysis {
    fn default() -> Self {
        Self {
            p_max: default_p_max(),
            criterion: default_criterion(),
            cap: default_cap(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistenceAnalysis {
    #[serde(flatten)]
    pub vr: VRConfig,
    /// Dominance ratio for counting dominant bars.
    #[serde(default = "default_ratio")]
    pub ratio: f64,
}

fn default_ratio() -> f64 {
    3.0
}

impl Default for PersistenceAnalysis {
    fn default() -> Self {
        Self {
            vr: VRConfig::default(),
            ratio: default_ratio(),
        }
    }
}

/// Base geometry for Pearson comparisons.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceSpec {
    /// The regular torus for torus generators, otherwise the input's
    /// intrinsic coordinates.
    #[default]
    Auto,
    Intrinsic,
    /// Ambient coordinates of the input point cloud.
    Ambient,
    Torus {
        n: usize,
        #[serde(default)]
        metric: TorusMetric,
    },
    PointcloudCsv(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PearsonAnalysis {
    #[serde(default)]
    pub reference: ReferenceSpec,
    /// Drop pairs involving never-activated nodes from direct correlations.
    #[serde(default)]
    pub exclude_sentinel: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Analyses {
    #[serde(default)]
    pub mds_profile: Option<MdsAnalysis>,
    #[serde(default)]
    pub persistence: Option<PersistenceAnalysis>,
    #[serde(default)]
    pub pearson: Option<PearsonAnalysis>,
}

impl Analyses {
    pub fn is_empty(&self) -> bool {
        self.mds_profile.is_none() && self.persistence.is_none() && self.pearson.is_none()
    }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub input: InputSpec,
    /// Neighbourhood graph on point-cloud inputs; ignored for networks.
    #[serde(default)]
    pub graph: Option<GraphSpec>,
    #[serde(alias = "estimator", deserialize_with = "one_or_many")]
    pub estimators: Vec<EstimatorSpec>,
    pub analyses: Analyses,
    #[serde(default = "default_variant")]
    pub variant: Variant,
    /// Also compute the persistence of the input point cloud itself.
    #[serde(default)]
    pub ambient_persistence: bool,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub rng_seed: Option<u64>,
    /// Write dissimilarity and activation matrices as CSV.
    #[serde(default = "default_true")]
    pub write_matrices: bool,
}

fn default_variant() -> Variant {
    Variant::Direct
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<EstimatorSpec>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(EstimatorSpec),
        Many(Vec<EstimatorSpec>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(e) => vec![e],
        OneOrMany::Many(v) => v,
    })
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Whether any stage draws random numbers.
    pub fn is_stochastic(&self) -> bool {
        let generator = matches!(&self.input, InputSpec::Generator(g) if g.is_stochastic());
        let subsample = self
            .analyses
            .persistence
            .as_ref()
            .is_some_and(|p| p.vr.subsample.is_some());
        generator || subsample
    }

    pub fn validate(&self) -> Result<()> {
        if self.analyses.is_empty() && !self.ambient_persistence {
            return Err(Error::InvalidInput("no analysis requested".into()));
        }
        if self.estimators.is_empty() && !self.ambient_persistence {
            return Err(Error::InvalidInput("no estimator requested".into()));
        }
        for e in &self.estimators {
            if let EstimatorSpec::Contagion { thresholds, .. } = e {
                if thresholds.is_empty() {
                    return Err(Error::InvalidInput("contagion estimator without thresholds".into()));
                }
                if let Some(t) = thresholds.iter().find(|t| !(0.0..=1.0).contains(*t)) {
                    return Err(Error::InvalidInput(format!("threshold {t} outside [0, 1]")));
                }
            }
        }
        if self.ambient_persistence && self.analyses.persistence.is_none() {
            return Err(Error::InvalidInput(
                "ambient persistence needs a persistence analysis configuration".into(),
            ));
        }
        if self.is_stochastic() && self.rng_seed.is_none() {
            return Err(Error::InvalidInput(
                "a seed is required: the configuration contains a stochastic stage".into(),
            ));
        }
        let point_input = matches!(
            self.input,
            InputSpec::PointcloudCsv(_) | InputSpec::Generator(GeneratorSpec::SwissRoll { .. })
        );
        if point_input {
            match self.graph {
                None => return Err(Error::InvalidInput("point-cloud input needs a graph spec".into())),
                Some(GraphSpec {
                    kind: GraphKind::External,
                    ..
                }) => {
                    return Err(Error::InvalidInput(
                        "point-cloud input needs a knn or epsilon graph".into(),
                    ))
                }
                _ => {}
            }
        }
        Ok(())
    }
}
