//! Vietoris–Rips persistent homology over the two-element field.
//!
//! A simplex enters the filtration at the largest dissimilarity between its
//! vertices. Simplices of equal value are ordered by dimension and then by
//! decreasing combinatorial index. The intervals, zero-length ones included,
//! do not depend on how ties are broken; this order makes most columns pair
//! without any reduction when many values are equal.
//!
//! Dimension 0 is handled by union-find with the elder rule. Higher
//! dimensions reduce the coboundary matrix column by column in reverse
//! filtration order, skipping simplices already paired one dimension lower
//! (clearing). Columns whose smallest coface is not yet a pivot are paired
//! without materializing the column.

mod simplex;

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DissimilarityMatrix;
use simplex::{diameter, Binomial};

/// Default bound on coface candidates examined per dimension.
pub const DEFAULT_BUDGET: u64 = 200_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsampleStrategy {
    /// Greedy farthest-point selection.
    MaxMin,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subsample {
    pub count: usize,
    pub strategy: SubsampleStrategy,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VRConfig {
    /// Highest homology dimension computed, at most 2.
    pub max_dim: usize,
    /// Largest filtration value included. `None` uses the enclosing radius
    /// `min_i max_j D_ij`, beyond which the complex is a cone and no class in
    /// positive dimension survives.
    #[serde(default)]
    pub max_filtration: Option<f64>,
    #[serde(default)]
    pub subsample: Option<Subsample>,
    #[serde(default = "default_budget")]
    pub budget: u64,
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

impl Default for VRConfig {
    fn default() -> Self {
        Self {
            max_dim: 1,
            max_filtration: None,
            subsample: None,
            budget: DEFAULT_BUDGET,
        }
    }
}

impl VRConfig {
    pub fn with_max_dim(max_dim: usize) -> Self {
        Self {
            max_dim,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub dim: usize,
    pub birth: f64,
    /// `f64::INFINITY` for classes alive at the end of the filtration.
    pub death: f64,
}

impl Interval {
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_infinite(&self) -> bool {
        self.death.is_infinite()
    }

    pub fn is_zero_length(&self) -> bool {
        self.death == self.birth
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Barcode {
    pub max_dim: usize,
    /// Sorted by dimension, birth, death.
    pub intervals: Vec<Interval>,
}

impl Barcode {
    pub fn new(max_dim: usize, mut intervals: Vec<Interval>) -> Self {
        intervals.sort_by(|a, b| {
            a.dim
                .cmp(&b.dim)
                .then(a.birth.total_cmp(&b.birth))
                .then(a.death.total_cmp(&b.death))
        });
        Self { max_dim, intervals }
    }

    pub fn in_dim(&self, dim: usize) -> impl Iterator<Item = &Interval> {
        self.intervals.iter().filter(move |i| i.dim == dim)
    }

    pub fn count(&self, dim: usize) -> usize {
        self.in_dim(dim).count()
    }

    pub fn infinite_count(&self, dim: usize) -> usize {
        self.in_dim(dim).filter(|i| i.is_infinite()).count()
    }

    pub fn zero_length_count(&self, dim: usize) -> usize {
        self.in_dim(dim).filter(|i| i.is_zero_length()).count()
    }
}

/// Number of dominant intervals of dimension `dim`.
///
/// Positive, finite persistences are sorted in decreasing order. Bars longer
/// than `ratio` times the median of all bars but the longest are outliers;
/// the outliers are scanned from the top for the first gap where a bar is at
/// least `ratio` times the next one (a missing next bar counts as zero), and
/// the bars above the gap are dominant. Without outliers or without such a
/// gap the result is 0. Zero-length and infinite intervals never count.
pub fn dominant_bars(b: &Barcode, dim: usize, ratio: f64) -> usize {
    assert!(ratio > 1.0, "dominance ratio must exceed 1");
    let mut pers: Vec<f64> = b
        .in_dim(dim)
        .filter(|i| !i.is_infinite())
        .map(Interval::persistence)
        .filter(|&p| p > 0.0)
        .collect();
    if pers.is_empty() {
        return 0;
    }
    pers.sort_by(|a, b| b.total_cmp(a));
    let floor = ratio * median(&pers[1..]);
    let outliers = pers.iter().take_while(|&&p| p > floor).count();
    (1..=outliers)
        .find(|&m| pers[m - 1] >= ratio * pers.get(m).copied().unwrap_or(0.0))
        .unwrap_or(0)
}

fn median(sorted_desc: &[f64]) -> f64 {
    let n = sorted_desc.len();
    match n {
        0 => 0.0,
        _ if n % 2 == 1 => sorted_desc[n / 2],
        _ => 0.5 * (sorted_desc[n / 2 - 1] + sorted_desc[n / 2]),
    }
}

/// `min_i max_j D_ij`.
pub fn enclosing_radius(d: &DissimilarityMatrix) -> f64 {
    (0..d.n())
        .map(|i| d.row(i).iter().copied().fold(0.0f64, f64::max))
        .fold(f64::INFINITY, f64::min)
}

/// Indices of the points kept by `s`, in selection order.
pub fn subsample_indices(d: &DissimilarityMatrix, s: &Subsample) -> Result<Vec<usize>> {
    let n = d.n();
    if s.count == 0 || s.count > n {
        return Err(Error::InvalidInput(format!(
            "subsample size {} must lie in 1..={n}",
            s.count
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    Ok(match s.strategy {
        SubsampleStrategy::Uniform => {
            let mut idx = sample(&mut rng, n, s.count).into_vec();
            idx.sort_unstable();
            idx
        }
        SubsampleStrategy::MaxMin => {
            let first = rng.gen_range(0..n);
            let mut chosen = vec![first];
            let mut dist: Vec<f64> = d.row(first).to_vec();
            while chosen.len() < s.count {
                let mut best = 0;
                let mut best_d = -1.0;
                for (i, &v) in dist.iter().enumerate() {
                    if v > best_d {
                        best_d = v;
                        best = i;
                    }
                }
                chosen.push(best);
                for (i, v) in dist.iter_mut().enumerate() {
                    *v = v.min(d.get(best, i));
                }
            }
            chosen
        }
    })
}

/// Persistent homology of the Vietoris–Rips filtration of `d` in dimensions
/// `0..=cfg.max_dim`.
pub fn vr_persistence(d: &DissimilarityMatrix, cfg: &VRConfig) -> Result<Barcode> {
    if cfg.max_dim > 2 {
        return Err(Error::InvalidInput(format!(
            "max_dim must be at most 2, got {}",
            cfg.max_dim
        )));
    }
    if !d.as_matrix().is_symmetric(0.0) {
        return Err(Error::InvalidInput(
            "Vietoris-Rips persistence needs a symmetric dissimilarity matrix".into(),
        ));
    }
    let owned;
    let d = match &cfg.subsample {
        Some(s) => {
            owned = d.submatrix(&subsample_indices(d, s)?);
            &owned
        }
        None => d,
    };
    let threshold = match cfg.max_filtration {
        Some(t) if t.is_nan() || t < 0.0 => return Err(Error::InvalidInput(format!("invalid max_filtration {t}"))),
        Some(t) => t,
        None => enclosing_radius(d),
    };
    Rips::new(d, threshold, cfg.max_dim, cfg.budget).compute()
}

type Entry = (f64, u64);

#[inline]
fn entry_lt(a: Entry, b: Entry) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 > b.1)
}

fn filtration_order(a: &Entry, b: &Entry) -> std::cmp::Ordering {
    a.0.total_cmp(&b.0).then(b.1.cmp(&a.1))
}

/// Heap key in filtration order; diameters are nonnegative so their bit
/// patterns sort like the values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Key(u64, Reverse<u64>);

impl Key {
    fn new(e: Entry) -> Self {
        Key(e.0.to_bits(), Reverse(e.1))
    }

    fn entry(self) -> Entry {
        (f64::from_bits(self.0), self.1 .0)
    }
}

struct Rips<'a> {
    d: &'a DissimilarityMatrix,
    n: usize,
    threshold: f64,
    max_dim: usize,
    budget: u64,
    binom: Binomial,
}

impl<'a> Rips<'a> {
    fn new(d: &'a DissimilarityMatrix, threshold: f64, max_dim: usize, budget: u64) -> Self {
        let n = d.n();
        Self {
            d,
            n,
            threshold,
            max_dim,
            budget,
            binom: Binomial::new(n, max_dim + 3),
        }
    }

    fn compute(&self) -> Result<Barcode> {
        let mut intervals = Vec::new();
        if self.n == 0 {
            return Ok(Barcode::new(self.max_dim, intervals));
        }
        let mut cleared = self.dimension_zero(&mut intervals);
        for dim in 1..=self.max_dim {
            cleared = self.reduce_dimension(dim, &cleared, &mut intervals)?;
        }
        Ok(Barcode::new(self.max_dim, intervals))
    }

    /// Union-find over edges in filtration order. Returns the indices of the
    /// edges that merged components.
    fn dimension_zero(&self, out: &mut Vec<Interval>) -> HashMap<u64, ()> {
        let mut edges: Vec<Entry> = Vec::new();
        for j in 1..self.n {
            for i in 0..j {
                let v = self.d.get(i, j);
                if v <= self.threshold {
                    edges.push((v, self.binom.index(&[i, j])));
                }
            }
        }
        edges.sort_by(filtration_order);
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut merged = HashMap::new();
        let mut verts = Vec::with_capacity(2);
        for &(v, idx) in &edges {
            self.binom.vertices(idx, 1, self.n, &mut verts);
            let (a, b) = (find(&mut parent, verts[0]), find(&mut parent, verts[1]));
            if a == b {
                continue;
            }
            // roots are the oldest (smallest) vertex of each component;
            // the younger component dies
            let (old, young) = (a.min(b), a.max(b));
            parent[young] = old;
            out.push(Interval {
                dim: 0,
                birth: 0.0,
                death: v,
            });
            merged.insert(idx, ());
        }
        for v in 0..self.n {
            if find(&mut parent, v) == v {
                out.push(Interval {
                    dim: 0,
                    birth: 0.0,
                    death: f64::INFINITY,
                });
            }
        }
        merged
    }

    /// All `dim`-simplices within the threshold, ascending vertex tuples.
    fn simplices(&self, dim: usize) -> Vec<Entry> {
        let mut out = Vec::new();
        let mut stack: Vec<usize> = Vec::with_capacity(dim + 1);
        self.extend(&mut stack, 0.0, dim + 1, &mut out);
        out
    }

    fn extend(&self, verts: &mut Vec<usize>, diam: f64, size: usize, out: &mut Vec<Entry>) {
        if verts.len() == size {
            out.push((diam, self.binom.index(verts)));
            return;
        }
        let start = verts.last().map_or(0, |&v| v + 1);
        for w in start..self.n {
            let mut dw = diam;
            let mut ok = true;
            for &v in verts.iter() {
                let x = self.d.get(v, w);
                if x > self.threshold {
                    ok = false;
                    break;
                }
                dw = dw.max(x);
            }
            if ok {
                verts.push(w);
                self.extend(verts, dw, size, out);
                verts.pop();
            }
        }
    }

    /// Calls `f` with every coface of the simplex within the threshold.
    #[inline]
    fn for_each_coface(&self, verts: &[usize], diam: f64, mut f: impl FnMut(Entry)) {
        let k = verts.len();
        let mut buf = [0usize; 5];
        'outer: for w in 0..self.n {
            let mut dw = diam;
            let mut pos = 0;
            for (p, &v) in verts.iter().enumerate() {
                if v == w {
                    continue 'outer;
                }
                if v < w {
                    pos = p + 1;
                }
                let x = self.d.get(v, w);
                if x > self.threshold {
                    continue 'outer;
                }
                dw = dw.max(x);
            }
            buf[..pos].copy_from_slice(&verts[..pos]);
            buf[pos] = w;
            buf[pos + 1..=k].copy_from_slice(&verts[pos..]);
            f((dw, self.binom.index(&buf[..=k])));
        }
    }

    fn reduce_dimension(
        &self,
        dim: usize,
        cleared: &HashMap<u64, ()>,
        out: &mut Vec<Interval>,
    ) -> Result<HashMap<u64, ()>> {
        let mut columns: Vec<Entry> = self
            .simplices(dim)
            .into_iter()
            .filter(|e| !cleared.contains_key(&e.1))
            .collect();
        let estimated = columns.len() as u64 * (self.n.saturating_sub(dim + 1)) as u64;
        if estimated > self.budget {
            return Err(Error::CapacityExceeded {
                estimated,
                budget: self.budget,
            });
        }
        // reverse filtration order
        columns.sort_by(|a, b| filtration_order(b, a));

        // pivot coface -> reduction column (the simplices summed into it)
        let mut pivots: HashMap<u64, Vec<u64>> = HashMap::new();
        let mut verts = Vec::with_capacity(dim + 1);
        let mut heap: BinaryHeap<Reverse<Key>> = BinaryHeap::new();

        for &(diam, idx) in &columns {
            self.binom.vertices(idx, dim, self.n, &mut verts);
            let mut smallest: Option<Entry> = None;
            self.for_each_coface(&verts, diam, |e| {
                if smallest.is_none_or(|s| entry_lt(e, s)) {
                    smallest = Some(e);
                }
            });
            let Some(first) = smallest else {
                out.push(Interval {
                    dim,
                    birth: diam,
                    death: f64::INFINITY,
                });
                continue;
            };
            if let std::collections::hash_map::Entry::Vacant(slot) = pivots.entry(first.1) {
                slot.insert(vec![idx]);
                out.push(Interval {
                    dim,
                    birth: diam,
                    death: first.0,
                });
                continue;
            }

            heap.clear();
            let mut reduction = vec![idx];
            self.push_coboundary(&mut heap, idx, dim, &mut verts);
            let mut pivot = pop_pivot(&mut heap);
            loop {
                match pivot {
                    None => {
                        out.push(Interval {
                            dim,
                            birth: diam,
                            death: f64::INFINITY,
                        });
                        break;
                    }
                    Some(p) => match pivots.get(&p.1) {
                        Some(other) => {
                            heap.push(Reverse(Key::new(p)));
                            for &s in other {
                                self.push_coboundary(&mut heap, s, dim, &mut verts);
                                toggle(&mut reduction, s);
                            }
                            pivot = pop_pivot(&mut heap);
                        }
                        None => {
                            pivots.insert(p.1, reduction);
                            out.push(Interval {
                                dim,
                                birth: diam,
                                death: p.0,
                            });
                            break;
                        }
                    },
                }
            }
        }
        Ok(pivots.into_keys().map(|k| (k, ())).collect())
    }

    fn push_coboundary(&self, heap: &mut BinaryHeap<Reverse<Key>>, idx: u64, dim: usize, verts: &mut Vec<usize>) {
        self.binom.vertices(idx, dim, self.n, verts);
        let diam = diameter(self.d, verts);
        self.for_each_coface(verts, diam, |e| heap.push(Reverse(Key::new(e))));
    }
}

fn toggle(set: &mut Vec<u64>, s: u64) {
    if let Some(p) = set.iter().position(|&x| x == s) {
        set.swap_remove(p);
    } else {
        set.push(s);
    }
}

/// Smallest entry with odd multiplicity, removed from the heap.
fn pop_pivot(heap: &mut BinaryHeap<Reverse<Key>>) -> Option<Entry> {
    while let Some(Reverse(top)) = heap.pop() {
        match heap.peek() {
            Some(Reverse(next)) if *next == top => {
                heap.pop();
            }
            _ => return Some(top.entry()),
        }
    }
    None
}
