//! Synthetic benchmark data: Swiss-roll point clouds, torus-based small-world
//! networks and the regular reference torus.

use std::collections::HashSet;
use std::f64::consts::{FRAC_PI_2, PI};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::graph::NeighbourhoodGraph;
use crate::matrix::DissimilarityMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SwissRollSpec {
    /// Points per unit intrinsic area, measured on the scaled surface.
    pub density: f64,
    pub t_range: [f64; 2],
    pub height: f64,
    /// Uniform scale factor applied to the whole roll, so that the number of
    /// points at fixed density can be chosen independently of the shape.
    pub scale: f64,
    /// Signal-to-noise ratio in dB; `None` for a noise-free sample.
    pub snr: Option<f64>,
    pub rng_seed: u64,
}

impl Default for SwissRollSpec {
    fn default() -> Self {
        Self {
            density: 50.0,
            t_range: [3.0 * FRAC_PI_2, 9.0 * FRAC_PI_2],
            height: 21.0,
            scale: 1.0,
            snr: None,
            rng_seed: 0,
        }
    }
}

impl SwissRollSpec {
    /// Chooses `scale` so that the roll holds approximately `points` points.
    pub fn with_points(mut self, points: usize) -> Self {
        let area = (arc_length(self.t_range[1]) - arc_length(self.t_range[0])) * self.height;
        self.scale = (points as f64 / (self.density * area)).sqrt();
        self
    }

    fn validate(&self) -> Result<()> {
        let [t0, t1] = self.t_range;
        let ok = self.density > 0.0
            && self.density.is_finite()
            && t0 > 0.0
            && t1 > t0
            && t1.is_finite()
            && self.height > 0.0
            && self.height.is_finite()
            && self.scale > 0.0
            && self.scale.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid Swiss roll spec {self:?}")))
        }
    }
}

/// `∫₀ᵗ √(1+u²) du`.
pub fn arc_length(t: f64) -> f64 {
    0.5 * (t * (1.0 + t * t).sqrt() + t.asinh())
}

/// Inverse of [`arc_length`] by Newton iteration.
fn arc_length_inverse(s: f64, guess: f64) -> f64 {
    let mut t = guess;
    for _ in 0..100 {
        let step = (arc_length(t) - s) / (1.0 + t * t).sqrt();
        t -= step;
        if step.abs() <= 1e-15 * t.abs().max(1.0) {
            break;
        }
    }
    t
}

/// A Swiss roll sampled on a grid that is regular in the intrinsic (arc
/// length, height) coordinates, optionally with Gaussian noise.
pub fn swiss_roll(spec: &SwissRollSpec) -> Result<PointCloud> {
    let cloud = swiss_roll_regular(spec)?;
    match spec.snr {
        Some(snr) => add_gaussian_noise(&cloud, snr, spec.rng_seed),
        None => Ok(cloud),
    }
}

/// The noise-free regular sample; `spec.snr` is ignored.
pub fn swiss_roll_regular(spec: &SwissRollSpec) -> Result<PointCloud> {
    spec.validate()?;
    let c = spec.scale;
    let [t0, t1] = spec.t_range;
    let s0 = arc_length(t0);
    let length = c * (arc_length(t1) - s0);
    let height = c * spec.height;
    let delta = 1.0 / spec.density.sqrt();
    let ns = ((length / delta).floor() as usize).max(1);
    let nh = ((height / delta).floor() as usize).max(1);
    // centre the grid inside the rectangle
    let off_s = 0.5 * (length - (ns - 1) as f64 * delta);
    let off_h = 0.5 * (height - (nh - 1) as f64 * delta);

    let mut coords = Vec::with_capacity(3 * ns * nh);
    let mut intrinsic = Vec::with_capacity(2 * ns * nh);
    let mut t = t0;
    for a in 0..ns {
        let s = off_s + a as f64 * delta;
        t = arc_length_inverse(s0 + s / c, t);
        for b in 0..nh {
            let h = off_h + b as f64 * delta;
            coords.extend_from_slice(&[c * t * t.cos(), h, c * t * t.sin()]);
            intrinsic.extend_from_slice(&[s, h]);
        }
    }
    let mut cloud = PointCloud::from_flat(3, coords);
    cloud.set_intrinsic_flat(2, intrinsic);
    Ok(cloud)
}

/// Noise variance `10^(-snr/10)` for a signal-to-noise ratio in dB.
pub fn noise_variance(snr: f64) -> f64 {
    10f64.powf(-snr / 10.0)
}

/// Adds independent zero-mean Gaussian noise of variance `10^(-snr/10)` to
/// every coordinate. Intrinsic coordinates are kept.
pub fn add_gaussian_noise(cloud: &PointCloud, snr: f64, rng_seed: u64) -> Result<PointCloud> {
    if cloud.is_empty() {
        return Err(Error::InvalidInput("cannot add noise to an empty cloud".into()));
    }
    let sigma = noise_variance(snr).sqrt();
    let normal =
        Normal::new(0.0, sigma).map_err(|e| Error::InvalidInput(format!("signal-to-noise ratio {snr}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut out = cloud.clone();
    for p in out.points_mut() {
        for x in p {
            *x += normal.sample(&mut rng);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonGeometricModel {
    /// Every node receives exactly `d_ng` non-geometric edges.
    #[default]
    StubMatching,
    /// Every node draws `d_ng` partners; degrees average `2 d_ng`.
    PerNodeDraws,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusNetSpec {
    /// Grid side; the network has `n²` nodes.
    pub n: usize,
    /// Non-geometric edges per node.
    pub d_ng: usize,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default)]
    pub model: NonGeometricModel,
}

impl TorusNetSpec {
    pub fn new(n: usize, d_ng: usize, rng_seed: u64) -> Self {
        Self {
            n,
            d_ng,
            rng_seed,
            model: NonGeometricModel::StubMatching,
        }
    }
}

const MAX_RESTARTS: usize = 100;
const REPAIR_ATTEMPTS: usize = 1000;

/// Node index of grid position `(x, y)`.
#[inline]
pub fn torus_index(n: usize, x: usize, y: usize) -> usize {
    x * n + y
}

fn is_geometric(n: usize, a: usize, b: usize) -> bool {
    let near = |u: usize, v: usize| {
        let d = u.abs_diff(v);
        d.min(n - d) <= 1
    };
    a != b && near(a / n, b / n) && near(a % n, b % n)
}

/// An `n × n` periodic grid where each node is joined to its 8 Moore
/// neighbours, plus `d_ng` uniformly random non-geometric edges per node.
pub fn torus_network(spec: &TorusNetSpec) -> Result<NeighbourhoodGraph> {
    let n = spec.n;
    if n < 5 {
        return Err(Error::InvalidInput(format!(
            "torus grid side must be at least 5, got {n}"
        )));
    }
    let nodes = n * n;
    if spec.d_ng >= nodes - 9 {
        return Err(Error::InvalidInput(format!(
            "{} non-geometric edges per node impossible with {nodes} nodes",
            spec.d_ng
        )));
    }
    let mut edges = Vec::with_capacity(nodes * (8 + spec.d_ng) / 2);
    for x in 0..n {
        for y in 0..n {
            let a = torus_index(n, x, y);
            for (dx, dy) in [(0, 1), (1, n - 1), (1, 0), (1, 1)] {
                edges.push((a, torus_index(n, (x + dx) % n, (y + dy) % n)));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let extra = match spec.model {
        NonGeometricModel::StubMatching => stub_matching(n, spec.d_ng, &mut rng)?,
        NonGeometricModel::PerNodeDraws => per_node_draws(n, spec.d_ng, &mut rng),
    };
    edges.extend(extra);
    NeighbourhoodGraph::from_edges(nodes, edges)
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn stub_matching(n: usize, d_ng: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(usize, usize)>> {
    let nodes = n * n;
    if nodes * d_ng % 2 == 1 {
        return Err(Error::InvalidInput(format!(
            "stub matching needs an even number of stubs, got {nodes} x {d_ng}"
        )));
    }
    if d_ng == 0 {
        return Ok(Vec::new());
    }
    let valid = |(a, b): (usize, usize), set: &HashSet<(usize, usize)>| {
        a != b && !is_geometric(n, a, b) && !set.contains(&ordered(a, b))
    };
    'restart: for _ in 0..MAX_RESTARTS {
        let mut stubs: Vec<usize> = (0..nodes).flat_map(|v| std::iter::repeat_n(v, d_ng)).collect();
        stubs.shuffle(rng);
        let mut pairs: Vec<(usize, usize)> = stubs.chunks_exact(2).map(|c| (c[0], c[1])).collect();
        let mut set = HashSet::with_capacity(pairs.len());
        let mut ok = vec![false; pairs.len()];
        let mut bad = Vec::new();
        for (i, &p) in pairs.iter().enumerate() {
            if valid(p, &set) {
                set.insert(ordered(p.0, p.1));
                ok[i] = true;
            } else {
                bad.push(i);
            }
        }
        for i in bad {
            let mut repaired = false;
            for _ in 0..REPAIR_ATTEMPTS {
                let j = rng.gen_range(0..pairs.len());
                if !ok[j] {
                    continue;
                }
                let (a, b) = pairs[i];
                let (c, d) = pairs[j];
                let (p, q) = if rng.gen::<bool>() {
                    ((a, c), (b, d))
                } else {
                    ((a, d), (b, c))
                };
                set.remove(&ordered(c, d));
                if valid(p, &set) && valid(q, &set) && ordered(p.0, p.1) != ordered(q.0, q.1) {
                    set.insert(ordered(p.0, p.1));
                    set.insert(ordered(q.0, q.1));
                    pairs[i] = p;
                    pairs[j] = q;
                    ok[i] = true;
                    repaired = true;
                    break;
                }
                set.insert(ordered(c, d));
            }
            if !repaired {
                continue 'restart;
            }
        }
        return Ok(pairs);
    }
    Err(Error::MatchingFailure { restarts: MAX_RESTARTS })
}

fn per_node_draws(n: usize, d_ng: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let nodes = n * n;
    let mut set = HashSet::new();
    let mut out = Vec::new();
    for a in 0..nodes {
        let mut candidates: Vec<usize> = (0..nodes)
            .filter(|&b| b != a && !is_geometric(n, a, b) && !set.contains(&ordered(a, b)))
            .collect();
        let (chosen, _) = candidates.partial_shuffle(rng, d_ng);
        for &b in chosen.iter() {
            set.insert(ordered(a, b));
            out.push((a, b));
        }
    }
    out
}

/// The `n²` regularly spaced points `(1/2π)(cos 2πx/n, sin 2πx/n, cos 2πy/n,
/// sin 2πy/n)` in `R⁴`, indexed like [`torus_network`]. The grid positions
/// `(x, y)` are attached as intrinsic coordinates.
pub fn torus_reference(n: usize) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::InvalidInput("torus grid side must be positive".into()));
    }
    let r = 1.0 / (2.0 * PI);
    let mut coords = Vec::with_capacity(4 * n * n);
    let mut grid = Vec::with_capacity(2 * n * n);
    for x in 0..n {
        let a = 2.0 * PI * x as f64 / n as f64;
        for y in 0..n {
            let b = 2.0 * PI * y as f64 / n as f64;
            coords.extend_from_slice(&[r * a.cos(), r * a.sin(), r * b.cos(), r * b.sin()]);
            grid.extend_from_slice(&[x as f64, y as f64]);
        }
    }
    let mut cloud = PointCloud::from_flat(4, coords);
    cloud.set_intrinsic_flat(2, grid);
    Ok(cloud)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TorusMetric {
    /// Euclidean distance between the embedded points in `R⁴`.
    #[default]
    Ambient,
    /// Geodesic distance on the flat unit torus.
    Flat,
}

/// Pairwise distances between reference torus points.
pub fn torus_reference_distances(n: usize, metric: TorusMetric) -> Result<DissimilarityMatrix> {
    let cloud = torus_reference(n)?;
    Ok(match metric {
        TorusMetric::Ambient => crate::geometry::pairwise_euclidean(&cloud),
        TorusMetric::Flat => {
            let nodes = n * n;
            let mut m = crate::matrix::Matrix::zeros(nodes, nodes);
            let wrap = |u: usize, v: usize| {
                let d = u.abs_diff(v);
                d.min(n - d) as f64 / n as f64
            };
            for a in 0..nodes {
                for b in 0..nodes {
                    let dx = wrap(a / n, b / n);
                    let dy = wrap(a % n, b % n);
                    m.set(a, b, (dx * dx + dy * dy).sqrt());
                }
            }
            DissimilarityMatrix::new_unchecked(m)
        }
    })
}
