//! Sparse digraphs assembled from directed cycles.
//!
//! Regular and mixed graphs use a configuration-model slot shuffle: `d`
//! copies of every node id are shuffled and cut into `k`-tuples, then tuples
//! that repeat a node or share a directed edge with another tuple are
//! repaired by random swaps (at most `100 n` attempts per species), so every
//! node has exactly `d` distinct out- and in-neighbours per species. Poisson graphs draw each cycle's nodes
//! uniformly without replacement from a per-cycle stream.

use std::collections::{BTreeMap, HashMap};

use rand::seq::{index, SliceRandom};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::{CycleLayout, MixedCyclicSpec, PoissonCyclicSpec, RegularCyclicSpec};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::rng::{domain, stream, RandomSeed, StreamRng};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge<T> {
    pub source: usize,
    pub target: usize,
    pub weight: T,
}

/// Weighted directed edge list plus the cycles it was built from. A cycle
/// `[a0, a1, .., a_{k-1}]` contributes edges `a0 -> a1 -> .. -> a_{k-1} -> a0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseDigraph<T> {
    pub n: usize,
    /// Sorted by `(source, target)`; parallel cycle edges are merged.
    pub edges: Vec<Edge<T>>,
    pub cycles: Vec<Vec<usize>>,
    pub cycle_weights: Vec<T>,
}

impl<T: Scalar> SparseDigraph<T> {
    pub fn from_cycles(n: usize, cycles: Vec<Vec<usize>>, cycle_weights: Vec<T>) -> Result<Self> {
        if cycles.len() != cycle_weights.len() {
            return Err(Error::input("one weight per cycle required"));
        }
        let mut acc: BTreeMap<(usize, usize), T> = BTreeMap::new();
        for (cycle, &w) in cycles.iter().zip(&cycle_weights) {
            if cycle.len() < 2 {
                return Err(Error::input("cycles need at least two nodes"));
            }
            for (i, &u) in cycle.iter().enumerate() {
                if u >= n {
                    return Err(Error::input(format!("node id {u} out of range for n = {n}")));
                }
                if cycle[..i].contains(&u) {
                    return Err(Error::input(format!("cycle repeats node {u}")));
                }
                let v = cycle[(i + 1) % cycle.len()];
                let e = acc.entry((u, v)).or_insert_with(T::zero);
                *e = *e + w;
            }
        }
        let edges = acc
            .into_iter()
            .filter(|&(_, w)| w != T::zero())
            .map(|((source, target), weight)| Edge { source, target, weight })
            .collect();
        Ok(SparseDigraph { n, edges, cycles, cycle_weights })
    }

    /// Bare edge list without cycle records; parallel edges are merged.
    pub fn from_edges(n: usize, edges: Vec<Edge<T>>) -> Result<Self> {
        let mut acc: BTreeMap<(usize, usize), T> = BTreeMap::new();
        for e in edges {
            if e.source >= n || e.target >= n {
                return Err(Error::input(format!("edge {} -> {} out of range", e.source, e.target)));
            }
            let w = acc.entry((e.source, e.target)).or_insert_with(T::zero);
            *w = *w + e.weight;
        }
        let edges = acc
            .into_iter()
            .filter(|&(_, w)| w != T::zero())
            .map(|((source, target), weight)| Edge { source, target, weight })
            .collect();
        Ok(SparseDigraph { n, edges, cycles: Vec::new(), cycle_weights: Vec::new() })
    }

    /// Number of recorded cycles each node belongs to.
    pub fn membership_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n];
        for c in &self.cycles {
            for &u in c {
                counts[u] += 1;
            }
        }
        counts
    }

    /// In-degree counting parallel cycle edges separately (equals the
    /// membership count, since every cycle enters each member once).
    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for c in &self.cycles {
            for i in 0..c.len() {
                deg[c[(i + 1) % c.len()]] += 1;
            }
        }
        deg
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for c in &self.cycles {
            for &u in c {
                deg[u] += 1;
            }
        }
        deg
    }

    /// Sum of outgoing edge weights per node.
    pub fn row_sums(&self) -> Vec<T> {
        let mut sums = vec![T::zero(); self.n];
        for e in &self.edges {
            sums[e.source] = sums[e.source] + e.weight;
        }
        sums
    }

    pub fn cycle_lengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.cycles.iter().map(Vec::len)
    }
}

/// `M[u, v] = scale * (sum of weights of edges u -> v)`.
pub fn adjacency_matrix<T: Scalar>(g: &SparseDigraph<T>, scale: T) -> DenseMatrix<T> {
    let mut m = DenseMatrix::zeros(g.n);
    for e in &g.edges {
        m[(e.source, e.target)] = m[(e.source, e.target)] + scale * e.weight;
    }
    m
}

type EdgeCounts = HashMap<(usize, usize), u32>;

fn cycle_edges(c: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..c.len()).map(move |i| (c[i], c[(i + 1) % c.len()]))
}

fn add_edges(edges: &mut EdgeCounts, c: &[usize]) {
    for e in cycle_edges(c) {
        *edges.entry(e).or_default() += 1;
    }
}

fn remove_edges(edges: &mut EdgeCounts, c: &[usize]) {
    for e in cycle_edges(c) {
        if let Some(x) = edges.get_mut(&e) {
            *x -= 1;
            if *x == 0 {
                edges.remove(&e);
            }
        }
    }
}

/// Repeated nodes plus edges shared with another cycle.
fn violations(c: &[usize], edges: &EdgeCounts) -> usize {
    let repeats = (0..c.len()).filter(|&i| c[..i].contains(&c[i])).count();
    repeats + cycle_edges(c).filter(|e| edges.get(e).copied().unwrap_or(0) > 1).count()
}

/// Position in `c` touching its first violation.
fn offending_position(c: &[usize], edges: &EdgeCounts, rng: &mut StreamRng) -> usize {
    if let Some(i) = (0..c.len()).find(|&i| c[..i].contains(&c[i])) {
        return i;
    }
    let i = (0..c.len())
        .find(|&i| edges.get(&(c[i], c[(i + 1) % c.len()])).copied().unwrap_or(0) > 1)
        .unwrap_or(0);
    if rng.random_bool(0.5) {
        i
    } else {
        (i + 1) % c.len()
    }
}

/// Swap repair of cycles `first..` until no cycle repeats a node or shares a
/// directed edge. With `keep_position` swaps stay within one cycle position.
fn repair_cycles(
    cycles: &mut [Vec<usize>],
    first: usize,
    edges: &mut EdgeCounts,
    keep_position: bool,
    rng: &mut StreamRng,
    cap: usize,
) -> Result<()> {
    let total = cycles.len();
    let mut attempts = 0;
    loop {
        let bad: Vec<usize> = (first..total).filter(|&t| violations(&cycles[t], edges) > 0).collect();
        if bad.is_empty() {
            return Ok(());
        }
        if total - first < 2 {
            return Err(Error::GenerationFailure("a single cycle cannot be repaired".into()));
        }
        for t in bad {
            while violations(&cycles[t], edges) > 0 {
                attempts += 1;
                if attempts > cap {
                    return Err(Error::GenerationFailure(format!(
                        "could not place cycles without repeated nodes or edges after {cap} swap attempts"
                    )));
                }
                let i = offending_position(&cycles[t], edges, rng);
                let u = first + rng.random_range(0..total - first);
                if u == t {
                    continue;
                }
                let j = if keep_position { i } else { rng.random_range(0..cycles[u].len()) };
                let before = violations(&cycles[t], edges) + violations(&cycles[u], edges);
                remove_edges(edges, &cycles[t]);
                remove_edges(edges, &cycles[u]);
                let x = cycles[t][i];
                cycles[t][i] = cycles[u][j];
                cycles[u][j] = x;
                add_edges(edges, &cycles[t]);
                add_edges(edges, &cycles[u]);
                let after = violations(&cycles[t], edges) + violations(&cycles[u], edges);
                if after >= before {
                    remove_edges(edges, &cycles[t]);
                    remove_edges(edges, &cycles[u]);
                    cycles[u][j] = cycles[t][i];
                    cycles[t][i] = x;
                    add_edges(edges, &cycles[t]);
                    add_edges(edges, &cycles[u]);
                }
            }
        }
    }
}

/// Slot shuffle plus swap repair; `stream_index` separates species and
/// `edges` holds the edges of species placed earlier.
fn place_cycles(
    n: usize,
    d: usize,
    k: usize,
    seed: RandomSeed,
    stream_index: u64,
    edges: &mut EdgeCounts,
) -> Result<Vec<Vec<usize>>> {
    if d == 0 {
        return Ok(Vec::new());
    }
    let mut slots: Vec<usize> = (0..n).flat_map(|u| std::iter::repeat_n(u, d)).collect();
    slots.shuffle(&mut stream(seed, domain::SLOT_SHUFFLE, stream_index));
    let mut cycles: Vec<Vec<usize>> = slots.chunks(k).map(<[usize]>::to_vec).collect();
    for c in &cycles {
        add_edges(edges, c);
    }
    let mut rng = stream(seed, domain::SLOT_REPAIR, stream_index);
    repair_cycles(&mut cycles, 0, edges, false, &mut rng, 100 * n)?;
    Ok(cycles)
}

/// Per-class slot shuffles; needs `n % k == 0`. Position `p` of every cycle
/// holds a node of class `p`, so nodes within a cycle are always distinct.
fn place_periodic_cycles(n: usize, d: usize, k: usize, seed: RandomSeed) -> Result<Vec<Vec<usize>>> {
    let classes: Vec<Vec<usize>> = (0..k)
        .map(|c| {
            let mut slots: Vec<usize> = (c..n)
                .step_by(k)
                .flat_map(|u| std::iter::repeat_n(u, d))
                .collect();
            slots.shuffle(&mut stream(seed, domain::PERIODIC_SLOTS, c as u64));
            slots
        })
        .collect();
    let mut cycles: Vec<Vec<usize>> =
        (0..d * n / k).map(|j| classes.iter().map(|c| c[j]).collect()).collect();
    let mut edges = EdgeCounts::new();
    for c in &cycles {
        add_edges(&mut edges, c);
    }
    let mut rng = stream(seed, domain::SLOT_REPAIR, u64::MAX);
    repair_cycles(&mut cycles, 0, &mut edges, true, &mut rng, 100 * n)?;
    Ok(cycles)
}

/// Every node in exactly `d` directed `k`-cycles of weight `spec.weight`.
pub fn generate_regular_cyclic<T: Scalar>(
    spec: &RegularCyclicSpec<T>,
    seed: RandomSeed,
) -> Result<SparseDigraph<T>> {
    spec.validate()?;
    let cycles = match spec.layout {
        CycleLayout::Random => place_cycles(spec.n, spec.d, spec.k, seed, 0, &mut EdgeCounts::new())?,
        CycleLayout::Periodic => place_periodic_cycles(spec.n, spec.d, spec.k, seed)?,
    };
    let weights = vec![spec.weight; cycles.len()];
    SparseDigraph::from_cycles(spec.n, cycles, weights)
}

/// `round(mean_degree * n / k)` cycles, each on `k` distinct nodes drawn
/// uniformly; per-node membership is approximately Poisson.
pub fn generate_poisson_cyclic<T: Scalar>(
    spec: &PoissonCyclicSpec<T>,
    seed: RandomSeed,
) -> Result<SparseDigraph<T>> {
    spec.validate()?;
    let c = spec.cycle_count();
    let cycles: Vec<Vec<usize>> = (0..c)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, domain::POISSON_CYCLE, i as u64);
            index::sample(&mut rng, spec.n, spec.k).into_vec()
        })
        .collect();
    SparseDigraph::from_cycles(spec.n, cycles, vec![spec.weight; c])
}

/// Two cycle species; species `r` is placed exactly like a regular graph with
/// `(d_r, k_r)`, so a species with `d = 0` leaves the other one identical to
/// [`generate_regular_cyclic`] output.
pub fn generate_mixed_cyclic<T: Scalar>(
    spec: &MixedCyclicSpec<T>,
    seed: RandomSeed,
) -> Result<SparseDigraph<T>> {
    spec.validate()?;
    let mut cycles = Vec::new();
    let mut weights = Vec::new();
    let mut edges = EdgeCounts::new();
    for (r, s) in spec.species.iter().enumerate() {
        let placed = place_cycles(spec.n, s.d, s.k, seed, r as u64, &mut edges)?;
        weights.extend(std::iter::repeat_n(s.weight, placed.len()));
        cycles.extend(placed);
    }
    SparseDigraph::from_cycles(spec.n, cycles, weights)
}
