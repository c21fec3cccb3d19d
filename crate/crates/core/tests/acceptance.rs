mod common;

use std::fs;
use std::time::Instant;

use common::{
    bfs, dijkstra, distance_rows, naive_pearson, naive_vr, random_connected_graph, random_points, rng, sort_intervals,
    sphere_cloud,
};
use contagion_maps::persistence::{Subsample, SubsampleStrategy};
use contagion_maps::pipeline::{
    Analyses, EstimatorSpec, InputSpec, MdsAnalysis, PersistenceAnalysis, PipelineConfig, Variant,
};
use contagion_maps::{
    approximate_embedding_dimension, contagion_matrix, dominant_bars, floyd_warshall, knn_graph, pairwise_euclidean,
    pearson, residual_profile, run_pipeline, seed_set, swiss_roll, torus_network, torus_reference, vr_persistence,
    ActivationMatrix, ContagionConfig, DissimilarityMatrix, DistanceVectorPair, GraphSpec, ShortestPathConfig,
    SwissRollSpec, TorusNetSpec, VRConfig,
};
use rand::Rng;

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
const THRESHOLDS: [f64; 11] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
const TORUS_N: usize = 50;
const CRITERION: f64 = 0.05;
const CAP: usize = 100;
const RATIO: f64 = 3.0;
const SUBSAMPLE: usize = 600;

struct Outcome {
    name: String,
    pass: bool,
}

struct Harness {
    filter: Vec<String>,
    outcomes: Vec<Outcome>,
}

impl Harness {
    fn wants(&self, id: &str) -> bool {
        self.filter.is_empty() || self.filter.iter().any(|f| id.starts_with(f.as_str()))
    }

    fn check(&mut self, id: &str, what: &str, pass: bool, detail: String) {
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {id} {what}: {detail}");
        self.outcomes.push(Outcome {
            name: format!("{id} {what}"),
            pass,
        });
    }
}

fn at(t: f64) -> usize {
    THRESHOLDS.iter().position(|&x| x == t).unwrap()
}

fn argmax(v: &[f64]) -> usize {
    (0..v.len()).fold(0, |best, i| if v[i] > v[best] { i } else { best })
}

fn r(d: &DissimilarityMatrix, reference: &[f64]) -> f64 {
    pearson(&DistanceVectorPair::new(d.upper_triangle(), reference.to_vec()).unwrap()).unwrap()
}

fn h1_dominant(d: &DissimilarityMatrix, seed: u64) -> usize {
    let mut cfg = VRConfig::with_max_dim(1);
    cfg.subsample = Some(Subsample {
        count: SUBSAMPLE,
        strategy: SubsampleStrategy::MaxMin,
        seed,
    });
    dominant_bars(&vr_persistence(d, &cfg).unwrap(), 1, RATIO)
}

/// Everything the torus criteria read for one network.
#[derive(Default)]
struct TorusRun {
    p_pc: Vec<Option<usize>>,
    p_direct_02: Option<usize>,
    iso_p_pc: Option<usize>,
    iso_p_direct: Option<usize>,
    r_direct: Vec<f64>,
    r_pc: Vec<f64>,
    iso_r: (f64, f64),
    dom_02: Option<usize>,
    dom_03: Option<usize>,
    iso_dom: Option<usize>,
}

fn torus_run(d_ng: usize, seed: u64, dims: bool, topology: bool) -> TorusRun {
    let started = Instant::now();
    let g = torus_network(&TorusNetSpec::new(TORUS_N, d_ng, seed)).unwrap();
    let reference = pairwise_euclidean(&torus_reference(TORUS_N).unwrap()).upper_triangle();
    let mut run = TorusRun::default();

    let iso = floyd_warshall(&g, &ShortestPathConfig::hops()).unwrap();
    let iso_pc = iso.p_dist();
    run.iso_r = (r(&iso, &reference), r(&iso_pc, &reference));
    if dims {
        run.iso_p_direct = Some(approximate_embedding_dimension(&iso, CRITERION, CAP).unwrap());
        run.iso_p_pc = Some(approximate_embedding_dimension(&iso_pc, CRITERION, CAP).unwrap());
    }
    if topology {
        run.iso_dom = Some(h1_dominant(&iso_pc, seed));
    }
    drop((iso, iso_pc));

    // thresholds that give the same activation matrix share every result
    let mut previous: Option<(ActivationMatrix, f64, f64, Option<usize>)> = None;
    for &t in &THRESHOLDS {
        let x = contagion_matrix(&g, &ContagionConfig::new(t).unwrap()).unwrap();
        let d = x.symmetrize();
        let need_topology = topology && (t == 0.2 || t == 0.3);
        let (rd, rp, p) = match &previous {
            Some((px, rd, rp, p)) if *px == x && !need_topology && (!dims || p.is_some()) => (*rd, *rp, *p),
            _ => {
                let pc = d.p_dist();
                let p = dims.then(|| approximate_embedding_dimension(&pc, CRITERION, CAP).unwrap());
                if need_topology {
                    let dom = Some(h1_dominant(&pc, seed));
                    if t == 0.2 {
                        run.dom_02 = dom;
                    } else {
                        run.dom_03 = dom;
                    }
                }
                (r(&d, &reference), r(&pc, &reference), p)
            }
        };
        if dims && t == 0.2 {
            run.p_direct_02 = Some(approximate_embedding_dimension(&d, CRITERION, CAP).unwrap());
        }
        run.r_direct.push(rd);
        run.r_pc.push(rp);
        run.p_pc.push(p);
        previous = Some((x, rd, rp, p));
    }
    eprintln!("torus d_ng={d_ng} seed {seed} done in {:.0?}", started.elapsed());
    run
}

fn count(v: impl IntoIterator<Item = bool>) -> usize {
    v.into_iter().filter(|&b| b).count()
}

fn torus_criteria(h: &mut Harness) {
    let want_dims = h.wants("1") || h.wants("2");
    let want_geometry = h.wants("3");
    let want_topology = h.wants("4");
    if !(want_dims || want_geometry || want_topology) {
        return;
    }
    let two: Vec<TorusRun> = if want_dims || want_geometry {
        SEEDS.iter().map(|&s| torus_run(2, s, want_dims, false)).collect()
    } else {
        Vec::new()
    };
    let four: Vec<TorusRun> = if want_geometry || want_topology {
        SEEDS.iter().map(|&s| torus_run(4, s, false, want_topology)).collect()
    } else {
        Vec::new()
    };

    if want_dims {
        let minima: Vec<bool> = two
            .iter()
            .map(|run| {
                let p: Vec<usize> = run.p_pc.iter().map(|p| p.unwrap()).collect();
                p[at(0.2)] == *p.iter().min().unwrap()
            })
            .collect();
        let p02: Vec<usize> = two.iter().map(|run| run.p_pc[at(0.2)].unwrap()).collect();
        let profiles: Vec<Vec<usize>> = two
            .iter()
            .map(|run| run.p_pc.iter().map(|p| p.unwrap()).collect())
            .collect();
        h.check(
            "1a",
            "point-cloud P minimal at T=0.2 in >= 4/5 seeds",
            count(minima.iter().copied()) >= 4,
            format!("P over T per seed {profiles:?}"),
        );
        h.check(
            "1b",
            "point-cloud P at T=0.2 in {4,5,6}, majority 4",
            p02.iter().all(|p| (4..=6).contains(p)) && count(p02.iter().map(|&p| p == 4)) >= 3,
            format!("{p02:?}"),
        );
        let iso: Vec<usize> = two.iter().map(|run| run.iso_p_pc.unwrap()).collect();
        h.check(
            "1c",
            "Isomap point-cloud P >= 40",
            iso.iter().all(|&p| p >= 40),
            format!("{iso:?}"),
        );

        let direct: Vec<usize> = two.iter().map(|run| run.p_direct_02.unwrap()).collect();
        h.check(
            "2a",
            "direct P at T=0.2 in {6,7,8,9}",
            direct.iter().all(|p| (6..=9).contains(p)),
            format!("{direct:?}"),
        );
        let iso: Vec<usize> = two.iter().map(|run| run.iso_p_direct.unwrap()).collect();
        h.check(
            "2b",
            "Isomap direct P = cap",
            iso.iter().all(|&p| p == CAP),
            format!("{iso:?}"),
        );
    }

    if want_geometry {
        for (d_ng, runs, published) in [(2, &two, (0.1458, 0.2175)), (4, &four, (0.1311, 0.2013))] {
            for (variant, pick) in [("direct", 0usize), ("point-cloud", 1)] {
                let peaks: Vec<f64> = runs
                    .iter()
                    .map(|run| THRESHOLDS[argmax(if pick == 0 { &run.r_direct } else { &run.r_pc })])
                    .collect();
                h.check(
                    "3a",
                    &format!("Pearson peaks at T=0.2, d_ng={d_ng}, {variant}, all seeds"),
                    peaks.iter().all(|&t| t == 0.2),
                    format!("argmax T per seed {peaks:?}"),
                );
                let base: Vec<f64> = runs
                    .iter()
                    .map(|run| if pick == 0 { run.iso_r.0 } else { run.iso_r.1 })
                    .collect();
                let want = if pick == 0 { published.0 } else { published.1 };
                h.check(
                    "3b",
                    &format!("Isomap Pearson within 0.05 of {want}, d_ng={d_ng}, {variant}"),
                    base.iter().all(|v| (v - want).abs() <= 0.05),
                    format!("{:.4?}", base),
                );
            }
        }
    }

    if want_topology {
        let rows: Vec<(usize, usize, usize)> = four
            .iter()
            .map(|run| (run.dom_02.unwrap(), run.dom_03.unwrap(), run.iso_dom.unwrap()))
            .collect();
        h.check(
            "4a",
            "d_ng=4 point cloud: two dominant H1 bars at T=0.2 in >= 4/5 seeds",
            count(rows.iter().map(|r| r.0 == 2)) >= 4,
            format!("{:?}", rows.iter().map(|r| r.0).collect::<Vec<_>>()),
        );
        h.check(
            "4b",
            "d_ng=4 point cloud: two dominant H1 bars at T=0.3 in >= 4/5 seeds",
            count(rows.iter().map(|r| r.1 == 2)) >= 4,
            format!("{:?}", rows.iter().map(|r| r.1).collect::<Vec<_>>()),
        );
        h.check(
            "4c",
            "d_ng=4 Isomap point cloud: no dominant H1 bars in >= 4/5 seeds",
            count(rows.iter().map(|r| r.2 == 0)) >= 4,
            format!("{:?}", rows.iter().map(|r| r.2).collect::<Vec<_>>()),
        );
    }
}

fn swiss_roll_criterion(h: &mut Harness) {
    if !h.wants("5") {
        return;
    }
    let r2 = |d: &DissimilarityMatrix| residual_profile(d, 2, CRITERION, 2).unwrap().residuals[1];
    for snr in [5.0, 20.0] {
        let mut rows = Vec::new();
        for seed in SEEDS {
            let spec = SwissRollSpec {
                snr: Some(snr),
                rng_seed: seed,
                ..SwissRollSpec::default()
            }
            .with_points(2000);
            let cloud = swiss_roll(&spec).unwrap();
            let g = knn_graph(&cloud, 8, true).unwrap();
            let iso = r2(&floyd_warshall(&g, &ShortestPathConfig::weighted()).unwrap());
            let u = g.unweighted();
            let cont = |t: f64| {
                r2(&contagion_matrix(&u, &ContagionConfig::new(t).unwrap())
                    .unwrap()
                    .symmetrize())
            };
            rows.push((iso, cont(0.0), cont(0.2)));
        }
        let detail = format!(
            "R2 (Isomap, T=0, T=0.2) per seed {:.4?}",
            rows.iter().map(|r| [r.0, r.1, r.2]).collect::<Vec<_>>()
        );
        let majority = |f: &dyn Fn(&(f64, f64, f64)) -> bool| count(rows.iter().map(f)) >= 3;
        if snr == 5.0 {
            h.check(
                "5a",
                "S/N=5: contagion T=0.2 gives R2 < 0.05",
                majority(&|r| r.2 < 0.05),
                detail.clone(),
            );
            h.check(
                "5b",
                "S/N=5: Isomap and contagion T=0 give R2 > 0.05",
                majority(&|r| r.0 > 0.05 && r.1 > 0.05),
                detail,
            );
        } else {
            h.check(
                "5c",
                "S/N=20: all methods give R2 < 0.05",
                majority(&|r| r.0 < 0.05 && r.1 < 0.05 && r.2 < 0.05),
                detail,
            );
        }
    }
}

fn property_suite(h: &mut Harness) {
    if h.wants("6a") {
        let mut bad = 0;
        for seed in 0..200u64 {
            let n = 5 + (seed as usize * 7) % 60;
            let g = random_connected_graph(n, n / 2, false, 1000 + seed);
            let x = contagion_matrix(&g, &ContagionConfig::new(0.0).unwrap()).unwrap();
            for j in 0..n {
                let expect = bfs(&g, &seed_set(&g, j).unwrap());
                if x.realization(j).iter().zip(&expect).any(|(&t, e)| Some(t) != *e) {
                    bad += 1;
                }
            }
        }
        h.check(
            "6a",
            "T=0 activation times equal BFS distance to the seed set",
            bad == 0,
            format!("200 graphs, {bad} mismatching realizations"),
        );
    }
    if h.wants("6b") {
        let mut worst = 0.0f64;
        for seed in 0..50u64 {
            let n = 10 + seed as usize % 40;
            let g = random_connected_graph(n, n, true, 2000 + seed);
            let d = floyd_warshall(&g, &ShortestPathConfig::weighted()).unwrap();
            for s in 0..n {
                for (t, want) in dijkstra(&g, s).into_iter().enumerate() {
                    worst = worst.max((d.get(s, t) - want).abs() / want.max(1.0));
                }
            }
        }
        h.check(
            "6b",
            "Floyd-Warshall equals Dijkstra within 1e-12",
            worst <= 1e-12,
            format!("50 graphs, worst relative gap {worst:e}"),
        );
    }
    if h.wants("6c") {
        let mut worst = 0.0f64;
        for (i, q) in [1, 2, 3, 4, 5, 7].into_iter().enumerate() {
            let d = DissimilarityMatrix::from_rows(&distance_rows(&random_points(60, q, 3000 + i as u64))).unwrap();
            let p = residual_profile(&d, q, CRITERION, q).unwrap();
            worst = worst.max(p.residuals[q - 1]);
        }
        h.check(
            "6c",
            "classical MDS recovers exact Euclidean distances, R_q < 1e-9",
            worst < 1e-9,
            format!("worst R_q {worst:e}"),
        );
    }
    if h.wants("6d") {
        let mut bad = 0;
        for seed in 0..50u64 {
            let n = 3 + seed as usize % 7;
            let d = if seed % 2 == 0 {
                distance_rows(&random_points(n, 2 + seed as usize % 3, 4000 + seed))
            } else {
                let mut g = rng(4000 + seed);
                let mut d = vec![vec![0.0; n]; n];
                for i in 0..n {
                    for j in i + 1..n {
                        let v = g.gen_range(1..5) as f64;
                        d[i][j] = v;
                        d[j][i] = v;
                    }
                }
                d
            };
            let cfg = VRConfig {
                max_dim: 2,
                max_filtration: Some(f64::INFINITY),
                ..VRConfig::default()
            };
            let mut got = vr_persistence(&DissimilarityMatrix::from_rows(&d).unwrap(), &cfg)
                .unwrap()
                .intervals;
            sort_intervals(&mut got);
            if got != naive_vr(&d, 2) {
                bad += 1;
            }
        }
        h.check(
            "6d",
            "VR persistence equals naive reduction, exact multisets",
            bad == 0,
            format!("50 instances, {bad} mismatches"),
        );
    }
    if h.wants("6e") {
        let mut g = rng(5000);
        let mut worst_affine = 0.0f64;
        for _ in 0..20 {
            let a: Vec<f64> = (0..300).map(|_| g.gen_range(0.0..5.0)).collect();
            let b: Vec<f64> = a.iter().map(|x| x * x + g.gen_range(-2.0..2.0)).collect();
            let base = pearson(&DistanceVectorPair::new(a.clone(), b.clone()).unwrap()).unwrap();
            worst_affine = worst_affine.max((base - naive_pearson(&a, &b)).abs());
            let (s, c) = (g.gen_range(0.1..10.0), g.gen_range(-50.0..50.0));
            let moved: Vec<f64> = a.iter().map(|x| s * x + c).collect();
            let r = pearson(&DistanceVectorPair::new(moved, b).unwrap()).unwrap();
            worst_affine = worst_affine.max((r - base).abs());
        }
        h.check(
            "6e",
            "Pearson invariant under positive affine maps to 1e-12",
            worst_affine <= 1e-12,
            format!("worst gap {worst_affine:e}"),
        );

        let mut violation = 0.0f64;
        for seed in 0..10u64 {
            let gr = random_connected_graph(40, 30, false, 6000 + seed);
            let x = contagion_matrix(&gr, &ContagionConfig::new(0.1 * (seed % 4) as f64).unwrap()).unwrap();
            let d = x.symmetrize();
            let pc = d.p_dist();
            let n = d.n();
            for i in 0..n {
                violation = violation.max(d.get(i, i).abs()).max(pc.get(i, i).abs());
                for j in 0..n {
                    violation = violation
                        .max((d.get(i, j) - d.get(j, i)).abs())
                        .max((pc.get(i, j) - pc.get(j, i)).abs())
                        .max(-d.get(i, j))
                        .max(-pc.get(i, j))
                        .max((d.get(i, j) - f64::from(x.time(i, j) + x.time(j, i))).abs());
                    for k in 0..n {
                        violation = violation.max(pc.get(i, k) - pc.get(i, j) - pc.get(j, k));
                    }
                }
            }
        }
        h.check(
            "6e",
            "symmetrize and p_dist are symmetric, zero-diagonal, nonnegative; p_dist obeys the triangle inequality, to 1e-9",
            violation <= 1e-9,
            format!("worst violation {violation:e}"),
        );
    }
    if h.wants("6f") {
        let dir = tempfile::tempdir().unwrap();
        let json = |out: &str| {
            format!(
                r#"{{
                    "input": {{"generator": {{"torus": {{"n": 10, "d_ng": 2}}}}}},
                    "estimators": [{{"isomap": {{"use_weights": false}}}}, {{"contagion": {{"thresholds": [0.1, 0.2, 0.3]}}}}],
                    "analyses": {{
                        "mds_profile": {{"p_max": 5}},
                        "persistence": {{"max_dim": 1, "subsample": {{"count": 40, "strategy": "uniform"}}}},
                        "pearson": {{}}
                    }},
                    "variant": "both",
                    "output_dir": "{}",
                    "rng_seed": 23
                }}"#,
                dir.path().join(out).display()
            )
        };
        let cfg = PipelineConfig::from_json(&json("run")).unwrap();
        let first = run_pipeline(&cfg).unwrap();
        let bytes_a = fs::read(cfg.output_dir.join("report.json")).unwrap();
        let second = run_pipeline(&cfg).unwrap();
        let bytes_b = fs::read(cfg.output_dir.join("report.json")).unwrap();
        h.check(
            "6f",
            "identical seeded pipeline runs give byte-identical reports",
            !first.has_errors() && bytes_a == bytes_b && first.to_json() == second.to_json(),
            format!("{} bytes, {} records", bytes_a.len(), first.records.len()),
        );
    }
}

fn sphere_workflow(h: &mut Harness) {
    if !h.wants("7") {
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sphere.csv");
    let points = sphere_cloud(800, 24, 7000);
    let mut text = (0..24).map(|k| format!("x{k}")).collect::<Vec<_>>().join(",");
    text.push('\n');
    for p in &points {
        text.push_str(&p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","));
        text.push('\n');
    }
    fs::write(&csv, text).unwrap();

    let thresholds = vec![0.1, 0.2, 0.3, 0.4];
    let config = |max_dim: usize, out: &str| PipelineConfig {
        input: InputSpec::PointcloudCsv(csv.clone()),
        graph: Some(GraphSpec::knn(8, true)),
        estimators: vec![
            EstimatorSpec::Isomap(ShortestPathConfig::weighted()),
            EstimatorSpec::Contagion {
                thresholds: thresholds.clone(),
                regular: false,
            },
        ],
        analyses: Analyses {
            mds_profile: (max_dim == 1).then(MdsAnalysis::default),
            persistence: Some(PersistenceAnalysis {
                vr: VRConfig {
                    max_dim,
                    subsample: Some(Subsample {
                        count: if max_dim == 1 { 400 } else { 150 },
                        strategy: SubsampleStrategy::MaxMin,
                        seed: 0,
                    }),
                    ..VRConfig::default()
                },
                ratio: RATIO,
            }),
            pearson: None,
        },
        variant: Variant::Both,
        ambient_persistence: true,
        output_dir: dir.path().join(out),
        rng_seed: Some(7),
        write_matrices: false,
    };

    let mut variants: Vec<(&str, Option<f64>, &str)> = vec![
        ("ambient", None, "direct"),
        ("isomap", None, "direct"),
        ("isomap", None, "pointcloud"),
    ];
    for &t in &thresholds {
        variants.push(("contagion", Some(t), "direct"));
        variants.push(("contagion", Some(t), "pointcloud"));
    }
    let label = |(e, t, v): &(&str, Option<f64>, &str)| match t {
        Some(t) => format!("{e} T={t} {v}"),
        None => format!("{e} {v}"),
    };

    let h1 = run_pipeline(&config(1, "h1")).unwrap();
    let emitted = variants.iter().all(|(e, t, v)| {
        h1.find(e, *t, v)
            .is_some_and(|r| r.persistence.is_some() && (*e == "ambient" || r.mds.is_some()))
    });
    let out = dir.path().join("h1");
    let files = h1
        .records
        .iter()
        .all(|r| out.join(format!("{}_barcode.csv", r.label())).exists());
    h.check(
        "7a",
        "24-dimensional cloud runs graph, Isomap, contagion T=0.1..0.4, MDS profile and H1 persistence with all five barcode variants",
        emitted && files && h1.errors.is_empty(),
        format!("{} records, barcode files present: {files}", h1.records.len()),
    );
    let dominant: Vec<(String, Option<usize>)> = variants
        .iter()
        .map(|k| {
            (
                label(k),
                h1.find(k.0, k.1, k.2)
                    .and_then(|r| r.persistence.as_ref())
                    .and_then(|p| p.dominant(1)),
            )
        })
        .collect();
    h.check(
        "7b",
        "sphere: no dominant H1 bars in any barcode variant",
        dominant.iter().all(|(_, d)| *d == Some(0)),
        format!("{dominant:?}"),
    );

    let h2 = run_pipeline(&config(2, "h2")).unwrap();
    let dominant: Vec<(String, Option<usize>)> = variants
        .iter()
        .map(|k| {
            (
                label(k),
                h2.find(k.0, k.1, k.2)
                    .and_then(|r| r.persistence.as_ref())
                    .and_then(|p| p.dominant(2)),
            )
        })
        .collect();
    let ambient = dominant[0].1;
    h.check(
        "7c",
        "sphere: one dominant H2 bar in the subsampled ambient barcode",
        ambient == Some(1),
        format!("{dominant:?}"),
    );
}

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut h = Harness {
        filter,
        outcomes: Vec::new(),
    };
    let started = Instant::now();
    property_suite(&mut h);
    sphere_workflow(&mut h);
    swiss_roll_criterion(&mut h);
    torus_criteria(&mut h);
    let failed: Vec<&str> = h.outcomes.iter().filter(|o| !o.pass).map(|o| o.name.as_str()).collect();
    println!(
        "acceptance: {} passed, {} failed ({:.0?})",
        h.outcomes.len() - failed.len(),
        failed.len(),
        started.elapsed()
    );
    for name in &failed {
        println!("failed: {name}");
    }
}
