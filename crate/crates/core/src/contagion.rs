//! Deterministic threshold contagions and contagion maps.
//!
//! An inactive node `i` becomes active at step `t + 1` iff the fraction of its
//! neighbours active at step `t` strictly exceeds the threshold `T`. Updates
//! are synchronous: all nodes read the state at `t` before any node moves to
//! `t + 1`. Active nodes stay active.
//!
//! Each realization is seeded with a node together with its immediate
//! neighbours. Running one realization per node gives the [`ActivationMatrix`];
//! nodes a realization never reaches get the sentinel `2N`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::NeighbourhoodGraph;
use crate::matrix::{ActivationMatrix, DissimilarityMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContagionConfig {
    /// Threshold `T` in `[0, 1]`.
    pub threshold: f64,
    /// Upper bound on update steps; `None` means `N`.
    #[serde(default)]
    pub max_steps: Option<usize>,
}

impl ContagionConfig {
    pub fn new(threshold: f64) -> Result<Self> {
        let cfg = Self {
            threshold,
            max_steps: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::InvalidInput(format!(
                "threshold must lie in [0, 1], got {}",
                self.threshold
            )));
        }
        if self.max_steps == Some(0) {
            return Err(Error::InvalidInput("max_steps must be positive".into()));
        }
        Ok(())
    }
}

/// `{j} ∪ {k : A_jk ≠ 0}`, sorted.
pub fn seed_set(graph: &NeighbourhoodGraph, j: usize) -> Result<Vec<usize>> {
    let n = graph.n_nodes();
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, n });
    }
    let mut s = graph.neighbours(j).to_vec();
    let pos = s.binary_search(&j).unwrap_err();
    s.insert(pos, j);
    Ok(s)
}

/// A single contagion realization that can be advanced one step at a time.
#[derive(Debug, Clone)]
pub struct ContagionProcess<'g> {
    graph: &'g NeighbourhoodGraph,
    threshold: f64,
    active: Vec<bool>,
    active_neighbours: Vec<u32>,
    times: Vec<u32>,
    frontier: Vec<usize>,
    step: usize,
    candidates: Vec<usize>,
    marked: Vec<bool>,
}

impl<'g> ContagionProcess<'g> {
    pub fn new(graph: &'g NeighbourhoodGraph, threshold: f64, seeds: &[usize]) -> Result<Self> {
        let n = graph.n_nodes();
        if seeds.is_empty() {
            return Err(Error::InvalidInput("seed set is empty".into()));
        }
        let sentinel = 2 * n as u32;
        let mut p = Self {
            graph,
            threshold,
            active: vec![false; n],
            active_neighbours: vec![0; n],
            times: vec![sentinel; n],
            frontier: Vec::with_capacity(seeds.len()),
            step: 0,
            candidates: Vec::new(),
            marked: vec![false; n],
        };
        for &s in seeds {
            if s >= n {
                return Err(Error::IndexOutOfRange { index: s, n });
            }
            if !p.active[s] {
                p.active[s] = true;
                p.times[s] = 0;
                p.frontier.push(s);
            }
        }
        Ok(p)
    }

    /// Current step `t`.
    pub fn step_count(&self) -> usize {
        self.step
    }

    /// Node states `η(t)`.
    pub fn state(&self) -> &[bool] {
        &self.active
    }

    /// Advance from `t` to `t + 1`. Returns the number of newly active nodes;
    /// zero means the process has reached its fixed point.
    pub fn step(&mut self) -> usize {
        // Fold the nodes activated at step t into the neighbour counts, so the
        // counts describe η(t) exactly, then evaluate every affected node.
        self.candidates.clear();
        for &v in &self.frontier {
            for &w in self.graph.neighbours(v) {
                self.active_neighbours[w] += 1;
                if !self.active[w] && !self.marked[w] {
                    self.marked[w] = true;
                    self.candidates.push(w);
                }
            }
        }
        self.candidates.sort_unstable();
        self.frontier.clear();
        let next = self.step as u32 + 1;
        for &c in &self.candidates {
            self.marked[c] = false;
            let degree = self.graph.degree(c);
            let fraction = f64::from(self.active_neighbours[c]) / degree as f64;
            if fraction > self.threshold {
                self.frontier.push(c);
            }
        }
        for &c in &self.frontier {
            self.active[c] = true;
            self.times[c] = next;
        }
        self.step += 1;
        self.frontier.len()
    }

    /// Run until no state changes or `max_steps` steps have executed.
    pub fn run(mut self, max_steps: usize) -> Vec<u32> {
        while self.step < max_steps {
            if self.step() == 0 {
                break;
            }
        }
        self.times
    }

    pub fn activation_times(&self) -> &[u32] {
        &self.times
    }
}

/// Activation times of one realization seeded at `seeds`.
pub fn run_realization(graph: &NeighbourhoodGraph, cfg: &ContagionConfig, seeds: &[usize]) -> Result<Vec<u32>> {
    cfg.validate()?;
    let max_steps = cfg.max_steps.unwrap_or(graph.n_nodes()).max(1);
    Ok(ContagionProcess::new(graph, cfg.threshold, seeds)?.run(max_steps))
}

/// One realization per node, seeded around that node. Row `j` of the result
/// is the realization seeded at `seed_set(graph, j)`.
pub fn contagion_matrix(graph: &NeighbourhoodGraph, cfg: &ContagionConfig) -> Result<ActivationMatrix> {
    cfg.validate()?;
    let n = graph.n_nodes();
    if n == 0 {
        return Err(Error::InvalidInput("graph has no nodes".into()));
    }
    let isolated = (0..n).filter(|&i| graph.degree(i) == 0).count();
    if isolated > 0 {
        log::warn!("{isolated} node(s) have degree 0 and only activate when seeded");
    }
    let rows: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let seeds = seed_set(graph, j)?;
            run_realization(graph, cfg, &seeds)
        })
        .collect::<Result<_>>()?;
    Ok(ActivationMatrix::from_flat(n, rows.concat()))
}

/// Dissimilarity of the symmetric contagion map: node `i` maps to
/// `[x_1^(i) + x_i^(1), …, x_N^(i) + x_i^(N)]`, i.e. row `i` of `D + Dᵀ`.
pub fn symmetric_contagion_map(x: &ActivationMatrix) -> DissimilarityMatrix {
    x.symmetrize()
}
