use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use contagion_maps::generators::{NonGeometricModel, SwissRollSpec};
use contagion_maps::io;
use contagion_maps::persistence::{Subsample, SubsampleStrategy};
use contagion_maps::pipeline::{generate, BarcodeSummary, GeneratorSpec, MdsSummary, Record, Variant};
use contagion_maps::{
    contagion_matrix, floyd_warshall, pairwise_euclidean, pearson, profile_with_embedding, torus_reference,
    vr_persistence, ContagionConfig, DissimilarityMatrix, DistanceVectorPair, GraphKind, GraphSpec, PipelineConfig,
    ShortestPathConfig,
};

#[derive(Parser)]
#[command(
    name = "contagion-maps",
    version,
    about = "Contagion maps and Isomap for manifold learning"
)]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a torus network (edge list) or a Swiss roll (point CSV).
    Generate(GenerateArgs),
    /// Build a neighbourhood graph on a point cloud.
    Graph(GraphArgs),
    /// Estimate pairwise distances on a network by shortest paths or contagion.
    Estimate(EstimateArgs),
    /// Dimension, topology and geometry analyses of a dissimilarity matrix.
    Analyze(AnalyzeArgs),
    /// Run a complete workflow from a pipeline configuration.
    Pipeline(PipelineArgs),
}

/// A command-line mistake, reported with exit code 1.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Usage(msg.into()))
}

fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", p.display())))
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Torus,
    SwissRoll,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    /// Torus grid side.
    #[arg(long)]
    n: Option<usize>,
    /// Non-geometric edges per torus node.
    #[arg(long)]
    d_ng: Option<usize>,
    /// Draw non-geometric endpoints independently per node instead of stub matching.
    #[arg(long)]
    per_node_draws: bool,
    /// Approximate number of Swiss-roll points.
    #[arg(long)]
    points: Option<usize>,
    /// Signal-to-noise ratio in dB of Gaussian noise added to the roll.
    #[arg(long)]
    snr: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Also write the torus base geometry (grid coordinates embedded in R^4).
    #[arg(long)]
    reference_out: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct GenerateConfig {
    generator: Option<GeneratorSpec>,
    rng_seed: Option<u64>,
    output: Option<PathBuf>,
    reference_output: Option<PathBuf>,
}

fn cmd_generate(a: GenerateArgs) -> Result<()> {
    let cfg: GenerateConfig = load_config(a.config.as_deref())?;
    let mut spec = match (a.kind, cfg.generator) {
        (Some(Kind::Torus), Some(g @ GeneratorSpec::Torus { .. }))
        | (Some(Kind::SwissRoll), Some(g @ GeneratorSpec::SwissRoll { .. }))
        | (None, Some(g)) => g,
        (Some(Kind::Torus), _) => GeneratorSpec::Torus {
            n: 50,
            d_ng: 2,
            model: NonGeometricModel::default(),
        },
        (Some(Kind::SwissRoll), _) => GeneratorSpec::SwissRoll {
            spec: SwissRollSpec::default(),
            points: None,
        },
        (None, None) => return Err(usage("no generator: pass --kind or a config with `generator`")),
    };
    match &mut spec {
        GeneratorSpec::Torus { n, d_ng, model } => {
            if let Some(v) = a.n {
                *n = v;
            }
            if let Some(v) = a.d_ng {
                *d_ng = v;
            }
            if a.per_node_draws {
                *model = NonGeometricModel::PerNodeDraws;
            }
        }
        GeneratorSpec::SwissRoll { spec, points } => {
            if a.points.is_some() {
                *points = a.points;
            }
            if a.snr.is_some() {
                spec.snr = a.snr;
            }
        }
    }
    let seed = a.seed.or(cfg.rng_seed);
    if spec.is_stochastic() && seed.is_none() {
        return Err(usage("--seed is required for a stochastic generator"));
    }
    let out = a
        .out
        .or(cfg.output)
        .ok_or_else(|| usage("no output path: pass --out"))?;
    let (cloud, graph) = generate(&spec, seed.unwrap_or(0))?;
    if let Some(g) = graph {
        io::write_edgelist(&out, &g)?;
        log::info!(
            "wrote {} nodes, {} edges to {}",
            g.n_nodes(),
            g.n_edges(),
            out.display()
        );
    }
    if let Some(c) = cloud {
        io::write_pointcloud_csv(&out, &c)?;
        log::info!("wrote {} points in R^{} to {}", c.len(), c.dim(), out.display());
    }
    if let Some(path) = a.reference_out.or(cfg.reference_output) {
        let GeneratorSpec::Torus { n, .. } = spec else {
            return Err(usage("a reference geometry exists only for torus networks"));
        };
        io::write_pointcloud_csv(&path, &torus_reference(n)?)?;
    }
    Ok(())
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Point-cloud CSV.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// k-nearest-neighbour rule.
    #[arg(long, conflicts_with = "epsilon")]
    knn: Option<usize>,
    /// ε-ball rule.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Attach Euclidean edge lengths as weights.
    #[arg(long)]
    weighted: bool,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct GraphConfig {
    input: Option<PathBuf>,
    graph: Option<GraphSpec>,
    output: Option<PathBuf>,
}

fn cmd_graph(a: GraphArgs) -> Result<()> {
    let cfg: GraphConfig = load_config(a.config.as_deref())?;
    let mut spec = match (a.knn, a.epsilon, cfg.graph) {
        (Some(k), _, _) => GraphSpec::knn(k, false),
        (_, Some(e), _) => GraphSpec::epsilon(e, false),
        (None, None, Some(g)) => g,
        (None, None, None) => return Err(usage("no graph rule: pass --knn or --epsilon")),
    };
    if a.weighted {
        spec.weighted = true;
    }
    let input = a.input.or(cfg.input).ok_or_else(|| usage("no input: pass --input"))?;
    let out = a
        .out
        .or(cfg.output)
        .ok_or_else(|| usage("no output path: pass --out"))?;
    if spec.kind == GraphKind::External {
        return Err(usage("the graph command needs a k-nearest-neighbour or ε-ball rule"));
    }
    let cloud = io::read_pointcloud_csv(&input)?;
    let g = spec.build(&cloud)?;
    let rule = match spec.kind {
        GraphKind::Knn(k) => format!("{k}-nearest-neighbour"),
        GraphKind::Epsilon(e) => format!("{e}-ball"),
        GraphKind::External => unreachable!("rejected above"),
    };
    log::info!(
        "{rule} graph: {} nodes, {} edges, {} component(s)",
        g.n_nodes(),
        g.n_edges(),
        g.components()
    );
    io::write_edgelist(&out, &g)?;
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Estimator {
    Isomap,
    Contagion,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Edge list.
    #[arg(long, short)]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    estimator: Option<Estimator>,
    /// Contagion threshold T in [0, 1].
    #[arg(long)]
    threshold: Option<f64>,
    /// Shortest paths count hops even when the graph carries weights.
    #[arg(long)]
    hops: bool,
    /// Write the regular (unsymmetrized) activation matrix here as well.
    #[arg(long)]
    activation_out: Option<PathBuf>,
    /// Output the point-cloud distances between rows instead of the estimates.
    #[arg(long)]
    pointcloud: bool,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct EstimateConfig {
    input: Option<PathBuf>,
    estimator: Option<Estimator>,
    threshold: Option<f64>,
    hops: bool,
    pointcloud: bool,
    output: Option<PathBuf>,
    activation_output: Option<PathBuf>,
}

fn cmd_estimate(a: EstimateArgs) -> Result<()> {
    let cfg: EstimateConfig = load_config(a.config.as_deref())?;
    let estimator = a
        .estimator
        .or(cfg.estimator)
        .ok_or_else(|| usage("no estimator: pass --estimator isomap|contagion"))?;
    let input = a.input.or(cfg.input).ok_or_else(|| usage("no input: pass --input"))?;
    let out = a
        .out
        .or(cfg.output)
        .ok_or_else(|| usage("no output path: pass --out"))?;
    let graph = io::read_edgelist(&input)?;
    let d = match estimator {
        Estimator::Isomap => {
            let sp = if a.hops || cfg.hops || !graph.is_weighted() {
                ShortestPathConfig::hops()
            } else {
                ShortestPathConfig::weighted()
            };
            floyd_warshall(&graph, &sp)?
        }
        Estimator::Contagion => {
            let t = a
                .threshold
                .or(cfg.threshold)
                .ok_or_else(|| usage("contagion needs --threshold"))?;
            let c = ContagionConfig::new(t).map_err(|e| usage(e.to_string()))?;
            let x = contagion_matrix(&graph, &c)?;
            if let Some(p) = a.activation_out.or(cfg.activation_output) {
                io::write_matrix_csv(p, &x.to_matrix())?;
            }
            x.symmetrize()
        }
    };
    let d = if a.pointcloud || cfg.pointcloud { d.p_dist() } else { d };
    io::write_matrix_csv(&out, d.as_matrix())?;
    Ok(())
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dissimilarity matrix CSV.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Analyze distances between the rows of the matrix.
    #[arg(long)]
    pointcloud: bool,
    /// Residual-variance profile and approximate embedding dimension.
    #[arg(long)]
    mds: bool,
    #[arg(long)]
    p_max: Option<usize>,
    #[arg(long)]
    criterion: Option<f64>,
    #[arg(long)]
    cap: Option<usize>,
    /// Vietoris–Rips persistence.
    #[arg(long)]
    persistence: bool,
    #[arg(long)]
    max_dim: Option<usize>,
    /// Persistence on a maxmin subsample of this many points.
    #[arg(long)]
    subsample: Option<usize>,
    #[arg(long)]
    ratio: Option<f64>,
    /// Pearson correlation with the pairwise distances of this point CSV.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for residuals, embedding and barcode files.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct AnalyzeConfig {
    input: Option<PathBuf>,
    pointcloud: bool,
    mds_profile: Option<contagion_maps::pipeline::MdsAnalysis>,
    persistence: Option<contagion_maps::pipeline::PersistenceAnalysis>,
    reference: Option<PathBuf>,
    rng_seed: Option<u64>,
    output_dir: Option<PathBuf>,
}

fn cmd_analyze(a: AnalyzeArgs) -> Result<()> {
    let cfg: AnalyzeConfig = load_config(a.config.as_deref())?;
    let input = a.input.or(cfg.input).ok_or_else(|| usage("no input: pass --input"))?;
    let mut mds = cfg.mds_profile;
    if a.mds || a.p_max.is_some() || a.criterion.is_some() || a.cap.is_some() {
        let m = mds.get_or_insert_with(Default::default);
        m.p_max = a.p_max.unwrap_or(m.p_max);
        m.criterion = a.criterion.unwrap_or(m.criterion);
        m.cap = a.cap.unwrap_or(m.cap);
    }
    let mut ph = cfg.persistence;
    if a.persistence || a.max_dim.is_some() || a.subsample.is_some() || a.ratio.is_some() {
        let p = ph.get_or_insert_with(Default::default);
        p.vr.max_dim = a.max_dim.unwrap_or(p.vr.max_dim);
        p.ratio = a.ratio.unwrap_or(p.ratio);
        if let Some(count) = a.subsample {
            p.vr.subsample = Some(Subsample {
                count,
                strategy: SubsampleStrategy::MaxMin,
                seed: 0,
            });
        }
    }
    let reference = a.reference.or(cfg.reference);
    if mds.is_none() && ph.is_none() && reference.is_none() {
        return Err(usage("no analysis requested: pass --mds, --persistence or --reference"));
    }
    let seed = a.seed.or(cfg.rng_seed);
    if let Some(s) = ph.as_mut().and_then(|p| p.vr.subsample.as_mut()) {
        s.seed = seed.ok_or_else(|| usage("--seed is required for subsampling"))?;
    }
    let out_dir = a.out_dir.or(cfg.output_dir);
    if let Some(dir) = &out_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }

    let m = io::read_matrix_csv(&input)?;
    let d = DissimilarityMatrix::new(m)?;
    let pointcloud = a.pointcloud || cfg.pointcloud;
    let d = if pointcloud { d.p_dist() } else { d };
    let mut record = Record {
        estimator: "input".into(),
        threshold: None,
        variant: if pointcloud { "pointcloud" } else { "direct" }.into(),
        mds: None,
        persistence: None,
        pearson: None,
        errors: Vec::new(),
    };
    if let Some(m) = mds {
        let (profile, emb) = profile_with_embedding(&d, m.p_max, m.criterion, m.cap)?;
        if let Some(dir) = &out_dir {
            io::write_residual_csv(dir.join("residuals.csv"), &profile)?;
            io::write_embedding_csv(dir.join("embedding.csv"), &emb)?;
        }
        record.mds = Some(MdsSummary::from(&profile));
    }
    if let Some(p) = ph {
        let b = vr_persistence(&d, &p.vr)?;
        if let Some(dir) = &out_dir {
            io::write_barcode(dir.join("barcode.csv"), &b)?;
            io::write_text(dir.join("barcode.svg"), &io::barcode_svg(&b, "barcode"))?;
        }
        let points = p.vr.subsample.map_or(d.n(), |s| s.count.min(d.n()));
        record.persistence = Some(BarcodeSummary::new(&b, points, p.ratio));
    }
    if let Some(path) = reference {
        let r = pairwise_euclidean(&io::read_pointcloud_csv(&path)?);
        if r.n() != d.n() {
            bail!(contagion_maps::Error::InvalidInput(format!(
                "reference has {} points for a {}x{} matrix",
                r.n(),
                d.n(),
                d.n()
            )));
        }
        record.pearson = Some(pearson(&DistanceVectorPair::from_matrices(&d, &r)?)?);
    }
    let json = serde_json::to_string_pretty(&record)? + "\n";
    if let Some(dir) = &out_dir {
        io::write_text(dir.join("analysis.json"), &json)?;
    }
    print!("{json}");
    Ok(())
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Skip writing dissimilarity and activation matrices.
    #[arg(long)]
    no_matrices: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Direct,
    Pointcloud,
    Both,
}

fn cmd_pipeline(a: PipelineArgs) -> Result<bool> {
    let text = fs::read_to_string(&a.config).with_context(|| format!("reading {}", a.config.display()))?;
    let mut cfg = PipelineConfig::from_json(&text).map_err(|e| usage(format!("{}: {e}", a.config.display())))?;
    if let Some(o) = a.output_dir {
        cfg.output_dir = o;
    }
    if a.seed.is_some() {
        cfg.rng_seed = a.seed;
    }
    if let Some(v) = a.variant {
        cfg.variant = match v {
            VariantArg::Direct => Variant::Direct,
            VariantArg::Pointcloud => Variant::Pointcloud,
            VariantArg::Both => Variant::Both,
        };
    }
    if a.no_matrices {
        cfg.write_matrices = false;
    }
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let report = contagion_maps::run_pipeline(&cfg)?;
    print!("{}", report.to_text());
    log::info!("outputs in {}", cfg.output_dir.display());
    Ok(!report.has_errors())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<Usage>().is_some() {
        return 1;
    }
    match e.downcast_ref::<contagion_maps::Error>() {
        Some(err) if err.is_data_error() => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a).map(|_| true),
        Command::Graph(a) => cmd_graph(a).map(|_| true),
        Command::Estimate(a) => cmd_estimate(a).map(|_| true),
        Command::Analyze(a) => cmd_analyze(a).map(|_| true),
        Command::Pipeline(a) => cmd_pipeline(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: some analyses failed; see the report");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
