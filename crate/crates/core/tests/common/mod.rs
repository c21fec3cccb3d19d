//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use contagion_maps::{Interval, NeighbourhoodGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random connected graph: a random spanning tree plus extra random edges.
pub fn random_connected_graph(n: usize, extra: usize, weighted: bool, seed: u64) -> NeighbourhoodGraph {
    let mut r = rng(seed);
    let mut edges = Vec::new();
    for v in 1..n {
        let u = r.gen_range(0..v);
        edges.push((u, v));
    }
    for _ in 0..extra {
        let a = r.gen_range(0..n);
        let b = r.gen_range(0..n);
        if a != b {
            edges.push((a, b));
        }
    }
    let list: Vec<(usize, usize, Option<f64>)> = edges
        .into_iter()
        .map(|(a, b)| (a, b, weighted.then(|| r.gen_range(0.1..10.0))))
        .collect();
    NeighbourhoodGraph::from_edge_list(n, list).unwrap()
}

/// Hop distances from a set of sources; `None` when unreachable.
pub fn bfs(g: &NeighbourhoodGraph, sources: &[usize]) -> Vec<Option<u32>> {
    let n = g.n_nodes();
    let mut dist = vec![None; n];
    let mut queue = VecDeque::new();
    for &s in sources {
        dist[s] = Some(0);
        queue.push_back(s);
    }
    while let Some(v) = queue.pop_front() {
        let dv = dist[v].unwrap();
        for &w in g.neighbours(v) {
            if dist[w].is_none() {
                dist[w] = Some(dv + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

#[derive(PartialEq)]
struct State(f64, usize);
impl Eq for State {}
impl PartialOrd for State {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for State {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

/// Single-source weighted shortest paths.
pub fn dijkstra(g: &NeighbourhoodGraph, s: usize) -> Vec<f64> {
    let n = g.n_nodes();
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    heap.push(State(0.0, s));
    while let Some(State(d, v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &w in g.neighbours(v) {
            let nd = d + g.weight(v, w).unwrap();
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(State(nd, w));
            }
        }
    }
    dist
}

fn binom(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let mut r = 1u64;
    for i in 0..k {
        r = r * (n - i) as u64 / (i + 1) as u64;
    }
    r
}

struct Simplex {
    verts: Vec<usize>,
    diam: f64,
    colex: u64,
}

/// Persistence intervals of the full Vietoris–Rips filtration of `d` in
/// dimensions `0..=max_dim`, by the standard column reduction of the full
/// boundary matrix over Z/2. Simplices are ordered by (diameter, dimension,
/// colexicographic rank).
pub fn naive_vr(d: &[Vec<f64>], max_dim: usize) -> Vec<Interval> {
    let n = d.len();
    let mut simplices: Vec<Simplex> = Vec::new();
    fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            subsets(n, k, v + 1, cur, out);
            cur.pop();
        }
    }
    for k in 1..=max_dim + 2 {
        let mut all = Vec::new();
        subsets(n, k, 0, &mut Vec::new(), &mut all);
        for verts in all {
            let mut diam = 0.0f64;
            for a in 0..verts.len() {
                for b in a + 1..verts.len() {
                    diam = diam.max(d[verts[a]][verts[b]]);
                }
            }
            let colex = verts.iter().enumerate().map(|(i, &v)| binom(v, i + 1)).sum();
            simplices.push(Simplex { verts, diam, colex });
        }
    }
    simplices.sort_by(|a, b| {
        a.diam
            .total_cmp(&b.diam)
            .then(a.verts.len().cmp(&b.verts.len()))
            .then(a.colex.cmp(&b.colex))
    });
    let position: std::collections::HashMap<Vec<usize>, usize> = simplices
        .iter()
        .enumerate()
        .map(|(i, s)| (s.verts.clone(), i))
        .collect();
    let mut columns: Vec<Vec<usize>> = simplices
        .iter()
        .map(|s| {
            if s.verts.len() == 1 {
                return Vec::new();
            }
            let mut col: Vec<usize> = (0..s.verts.len())
                .map(|skip| {
                    let face: Vec<usize> = s
                        .verts
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    position[&face]
                })
                .collect();
            col.sort_unstable();
            col
        })
        .collect();
    let mut low_owner: std::collections::HashMap<usize, usize> = Default::default();
    let mut paired = vec![false; simplices.len()];
    let mut out = Vec::new();
    for j in 0..columns.len() {
        while let Some(&low) = columns[j].last() {
            match low_owner.get(&low) {
                Some(&k) => {
                    let other = columns[k].clone();
                    let mut merged = Vec::new();
                    let (mut a, mut b) = (0, 0);
                    let col = &columns[j];
                    while a < col.len() || b < other.len() {
                        if b == other.len() || (a < col.len() && col[a] < other[b]) {
                            merged.push(col[a]);
                            a += 1;
                        } else if a == col.len() || other[b] < col[a] {
                            merged.push(other[b]);
                            b += 1;
                        } else {
                            a += 1;
                            b += 1;
                        }
                    }
                    columns[j] = merged;
                }
                None => break,
            }
        }
        if let Some(&low) = columns[j].last() {
            low_owner.insert(low, j);
            paired[low] = true;
            paired[j] = true;
            let dim = simplices[low].verts.len() - 1;
            if dim <= max_dim {
                out.push(Interval {
                    dim,
                    birth: simplices[low].diam,
                    death: simplices[j].diam,
                });
            }
        }
    }
    for (i, s) in simplices.iter().enumerate() {
        let dim = s.verts.len() - 1;
        if !paired[i] && dim <= max_dim {
            out.push(Interval {
                dim,
                birth: s.diam,
                death: f64::INFINITY,
            });
        }
    }
    sort_intervals(&mut out);
    out
}

pub fn sort_intervals(v: &mut [Interval]) {
    v.sort_by(|a, b| {
        a.dim
            .cmp(&b.dim)
            .then(a.birth.total_cmp(&b.birth))
            .then(a.death.total_cmp(&b.death))
    });
}

/// Euclidean distance matrix of points given as rows.
pub fn distance_rows(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|p| {
            points
                .iter()
                .map(|q| p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
                .collect()
        })
        .collect()
}

pub fn random_points(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| (0..dim).map(|_| r.gen_range(-1.0..1.0)).collect())
        .collect()
}

/// Naive Pearson correlation, one pass over explicit sums.
pub fn naive_pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma) * (x - ma)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb) * (y - mb)).sum();
    cov / (va.sqrt() * vb.sqrt())
}

/// Uniform-ish sample of the unit 2-sphere (Fibonacci lattice), embedded in
/// `R^ambient` by a fixed random rotation.
pub fn sphere_cloud(n: usize, ambient: usize, seed: u64) -> Vec<Vec<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let base: Vec<[f64; 3]> = (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let th = golden * i as f64;
            [r * th.cos(), r * th.sin(), z]
        })
        .collect();
    // orthonormal 3-frame in R^ambient by Gram-Schmidt on random vectors
    let mut g = rng(seed);
    let mut frame: Vec<Vec<f64>> = Vec::new();
    while frame.len() < 3 {
        let mut v: Vec<f64> = (0..ambient).map(|_| g.gen_range(-1.0..1.0)).collect();
        for f in &frame {
            let dot: f64 = v.iter().zip(f).map(|(a, b)| a * b).sum();
            for (x, y) in v.iter_mut().zip(f) {
                *x -= dot * y;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            frame.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    base.iter()
        .map(|p| (0..ambient).map(|k| (0..3).map(|c| p[c] * frame[c][k]).sum()).collect())
        .collect()
}
