//! Heuristic quasi-random walks and their envelopes.
//!
//! A walk ranks the neighbours of the current node according to its
//! heuristic and then scans the ranking, accepting the entry at rank `i`
//! (1-based) with probability `1/(i+1)`. If nothing is accepted a uniformly
//! random neighbour is taken. Visited nodes rank low but stay selectable.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::taxonomy::{Taxonomy, TaxonomySource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Heuristic {
    /// Prefer unvisited nodes.
    H1,
    /// Prefer unvisited nodes behind heavier edges.
    H2,
    /// Prefer unvisited nodes taxonomically similar to the current one.
    H3,
    /// Prefer unvisited nodes taxonomically dissimilar to the current one.
    H4,
}

impl Heuristic {
    pub const ALL: [Heuristic; 4] = [Heuristic::H1, Heuristic::H2, Heuristic::H3, Heuristic::H4];
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl std::str::FromStr for Heuristic {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "H1" => Ok(Heuristic::H1),
            "H2" => Ok(Heuristic::H2),
            "H3" => Ok(Heuristic::H3),
            "H4" => Ok(Heuristic::H4),
            other => Err(format!("unknown heuristic {other:?} (expected H1..H4)")),
        }
    }
}

/// One cell of the experiment grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WalkConfig {
    pub heuristic: Heuristic,
    pub taxonomy: TaxonomySource,
    pub length: usize,
    pub radius: usize,
}

impl WalkConfig {
    /// Stable 64-bit FNV-1a hash of the configuration, used to derive
    /// per-walk seeds.
    pub fn stable_hash(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.to_string().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h
    }
}

impl fmt::Display for WalkConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}-l{}-r{}", self.heuristic, self.taxonomy, self.length, self.radius)
    }
}

/// Parameter lists whose cartesian product forms the experiment grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub lengths: Vec<usize>,
    pub radii: Vec<usize>,
    pub heuristics: Vec<Heuristic>,
    pub taxonomies: Vec<TaxonomySource>,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            lengths: vec![2, 10, 20],
            radii: vec![0, 1],
            heuristics: Heuristic::ALL.to_vec(),
            taxonomies: vec![TaxonomySource::Tw, TaxonomySource::Ts],
        }
    }
}

impl Grid {
    /// All configurations, grouped by heuristic, then taxonomy, length and
    /// radius.
    pub fn configs(&self) -> Vec<WalkConfig> {
        let mut out = Vec::new();
        for &heuristic in &self.heuristics {
            for &taxonomy in &self.taxonomies {
                for &length in &self.lengths {
                    for &radius in &self.radii {
                        out.push(WalkConfig { heuristic, taxonomy, length, radius });
                    }
                }
            }
        }
        out
    }
}

/// Node indices visited by a walk, `length + 1` of them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Walk {
    pub nodes: Vec<usize>,
}

/// Nodes within `radius` hops of a walk and the subgraph they induce.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    /// Sorted graph indices.
    pub nodes: Vec<usize>,
    /// Induced subgraph; its node labels are graph indices.
    pub subgraph: WeightedGraph<usize>,
}

/// Orders the neighbours of `current` by the heuristic's preference.
/// Unvisited neighbours always come before visited ones; remaining ties are
/// broken by `rng`.
pub fn rank_neighbors<N: Ord + fmt::Display, R: Rng>(
    g: &WeightedGraph<N>,
    current: usize,
    visited: &[usize],
    heuristic: Heuristic,
    tax: &Taxonomy<N>,
    rng: &mut R,
) -> Vec<usize> {
    type Group = Vec<(usize, f64)>;
    let (mut fresh, mut seen): (Group, Group) =
        g.neighbors(current).iter().partition(|(v, _)| !visited.contains(v));
    for group in [&mut fresh, &mut seen] {
        group.shuffle(rng);
        match heuristic {
            Heuristic::H1 => {}
            Heuristic::H2 => group.sort_by(|a, b| b.1.total_cmp(&a.1)),
            Heuristic::H3 | Heuristic::H4 => {
                let mut keyed: Vec<(usize, f64)> =
                    group.iter().map(|&(v, _)| (v, tax.sim_tax_by_index(current, v))).collect();
                if heuristic == Heuristic::H3 {
                    keyed.sort_by(|a, b| b.1.total_cmp(&a.1));
                } else {
                    keyed.sort_by(|a, b| a.1.total_cmp(&b.1));
                }
                *group = keyed;
            }
        }
    }
    fresh.into_iter().chain(seen).map(|(v, _)| v).collect()
}

/// Scans the ranking accepting rank `i` with probability `1/(i+1)`; falls
/// back to a uniform pick if the scan accepts nothing.
pub fn select_next<R: Rng>(ranked: &[usize], rng: &mut R) -> Result<usize> {
    if ranked.is_empty() {
        return Err(Error::EmptyNeighborhood);
    }
    for (i, &v) in ranked.iter().enumerate() {
        if rng.gen::<f64>() < 1.0 / (i as f64 + 2.0) {
            return Ok(v);
        }
    }
    Ok(*ranked.choose(rng).unwrap())
}

/// Nodes within `radius` hops of any walk node, with their induced subgraph.
pub fn envelope<N>(g: &WeightedGraph<N>, walk: &Walk, radius: usize) -> Envelope {
    let mut depth: HashMap<usize, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    for &v in &walk.nodes {
        if depth.insert(v, 0).is_none() {
            queue.push_back(v);
        }
    }
    while let Some(u) = queue.pop_front() {
        let d = depth[&u];
        if d == radius {
            continue;
        }
        for &(v, _) in g.neighbors(u) {
            if let std::collections::hash_map::Entry::Vacant(e) = depth.entry(v) {
                e.insert(d + 1);
                queue.push_back(v);
            }
        }
    }
    let mut nodes: Vec<usize> = depth.into_keys().collect();
    nodes.sort_unstable();
    let subgraph = g.induced_subgraph(&nodes);
    Envelope { nodes, subgraph }
}

/// Number of walks per configuration: `⌊|V| / (k·(l+1))⌋`, at least 1.
pub fn sample_count(num_nodes: usize, length: usize, k: usize) -> usize {
    assert!(k >= 1 && length >= 1);
    (num_nodes / (k * (length + 1))).max(1)
}

/// Configurations of a batch with the number of walks scheduled for each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchPlan {
    pub configs: Vec<WalkConfig>,
    pub counts: Vec<usize>,
    /// Average shortest path length (truncated) used for the counts.
    pub path_k: usize,
}

impl BatchPlan {
    pub fn new(grid: &Grid, num_nodes: usize, path_k: usize) -> Self {
        let path_k = path_k.max(1);
        let configs = grid.configs();
        let counts = configs.iter().map(|c| sample_count(num_nodes, c.length, path_k)).collect();
        BatchPlan { configs, counts, path_k }
    }

    pub fn total_walks(&self) -> usize {
        self.counts.iter().sum()
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed for one walk, independent of execution order.
pub fn walk_seed(master: u64, config: &WalkConfig, walk_index: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ config.stable_hash()) ^ walk_index as u64)
}

/// A walk together with its envelope and position in the batch.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub config: WalkConfig,
    pub walk_index: usize,
    pub walk: Walk,
    pub envelope: Envelope,
}

/// Runs walks over one graph with its two taxonomies. The taxonomies must
/// share the graph's node table.
pub struct Walker<'a, N> {
    graph: &'a WeightedGraph<N>,
    tw: &'a Taxonomy<N>,
    ts: &'a Taxonomy<N>,
    starts: Vec<usize>,
}

impl<'a, N: Ord + fmt::Display + Sync> Walker<'a, N> {
    pub fn new(graph: &'a WeightedGraph<N>, tw: &'a Taxonomy<N>, ts: &'a Taxonomy<N>) -> Self {
        assert_eq!(tw.nodes().len(), graph.node_count(), "Tw node table differs from the graph");
        assert_eq!(ts.nodes().len(), graph.node_count(), "Ts node table differs from the graph");
        let starts = (0..graph.node_count()).filter(|&v| !graph.is_isolated(v)).collect();
        Walker { graph, tw, ts, starts }
    }

    pub fn graph(&self) -> &WeightedGraph<N> {
        self.graph
    }

    pub fn taxonomy(&self, source: TaxonomySource) -> &Taxonomy<N> {
        match source {
            TaxonomySource::Tw => self.tw,
            TaxonomySource::Ts => self.ts,
        }
    }

    /// A walk of `config.length` steps from a uniformly drawn non-isolated
    /// node.
    pub fn run_walk<R: Rng>(&self, config: &WalkConfig, rng: &mut R) -> Result<Walk> {
        let start = *self.starts.choose(rng).ok_or(Error::NoEligibleStart)?;
        self.run_walk_from(start, config, rng)
    }

    pub fn run_walk_from<R: Rng>(&self, start: usize, config: &WalkConfig, rng: &mut R) -> Result<Walk> {
        let tax = self.taxonomy(config.taxonomy);
        let mut nodes = Vec::with_capacity(config.length + 1);
        nodes.push(start);
        let mut current = start;
        for _ in 0..config.length {
            let ranked = rank_neighbors(self.graph, current, &nodes, config.heuristic, tax, rng);
            current = select_next(&ranked, rng)?;
            nodes.push(current);
        }
        Ok(Walk { nodes })
    }

    /// Runs every scheduled walk and maps each sample through `f`. Results
    /// are ordered by configuration and walk index regardless of how the
    /// work was scheduled across threads.
    pub fn map_batch<T, F>(&self, plan: &BatchPlan, master_seed: u64, f: F) -> Result<Vec<Vec<T>>>
    where
        T: Send,
        F: Fn(&Sample) -> T + Sync,
    {
        plan.configs
            .iter()
            .zip(&plan.counts)
            .map(|(config, &count)| {
                (0..count)
                    .into_par_iter()
                    .map(|walk_index| {
                        let mut rng = ChaCha8Rng::seed_from_u64(walk_seed(master_seed, config, walk_index));
                        let walk = self.run_walk(config, &mut rng)?;
                        let envelope = envelope(self.graph, &walk, config.radius);
                        Ok(f(&Sample { config: *config, walk_index, walk, envelope }))
                    })
                    .collect::<Result<Vec<T>>>()
            })
            .collect()
    }

    pub fn run_batch(&self, plan: &BatchPlan, master_seed: u64) -> Result<Vec<Sample>> {
        Ok(self.map_batch(plan, master_seed, Sample::clone)?.into_iter().flatten().collect())
    }
}
