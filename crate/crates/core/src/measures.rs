//! Global graph statistics and the per-walk measures.
//!
//! Per-walk measures come in three families:
//!
//! | id  | family     | value                                                     |
//! |-----|------------|-----------------------------------------------------------|
//! | A   | complexity | envelope size in nodes                                    |
//! | B   | complexity | number of biconnected components of the envelope          |
//! | C   | complexity | mean node count of those components                       |
//! | D   | complexity | mean local clustering coefficient of walk nodes           |
//! | E   | coherence  | `sim_tax` of start and end node                           |
//! | F   | coherence  | product of `sim_tax` over consecutive nodes               |
//! | G   | coherence  | mean of `sim_tax` over consecutive nodes                  |
//! | H–J | coherence  | as E–G with cosine similarity on the reduced matrix       |
//! | K   | entropy    | walk nodes, top clusters                                  |
//! | L   | entropy    | walk nodes, specific clusters                             |
//! | M   | entropy    | envelope nodes, top clusters                              |
//! | N   | entropy    | envelope nodes, specific clusters                         |

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::{WeightedGraph, UNREACHABLE};
use crate::representations::DistMatrix;
use crate::taxonomy::{Scope, Taxonomy};
use crate::walker::{Envelope, Walk, WalkConfig};

/// Graphs up to this size get exact path statistics by default.
pub const EXACT_PATH_LIMIT: usize = 5000;
/// Number of BFS sources used when path statistics are estimated.
pub const SAMPLED_SOURCES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum PathMode {
    /// BFS from every node of the largest component.
    Exact,
    /// BFS from `sources` random nodes plus a double sweep for the diameter.
    Estimate { sources: usize, seed: u64 },
}

impl PathMode {
    pub fn auto(num_nodes: usize, seed: u64) -> Self {
        if num_nodes <= EXACT_PATH_LIMIT {
            PathMode::Exact
        } else {
            PathMode::Estimate { sources: SAMPLED_SOURCES, seed }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalStats {
    pub num_nodes: usize,
    pub num_edges: usize,
    pub edge_node_ratio: f64,
    pub density: f64,
    /// Diameter of the largest connected component.
    pub diameter: u32,
    /// Mean shortest path length within the largest connected component.
    pub avg_shortest_path: f64,
    pub num_components: usize,
    pub exact_paths: bool,
}

impl GlobalStats {
    /// Average shortest path truncated to an integer, at least 1.
    pub fn path_k(&self) -> usize {
        (self.avg_shortest_path as usize).max(1)
    }
}

/// `2|E| / (|V|(|V|-1))`; zero below two nodes.
pub fn density(num_nodes: usize, num_edges: usize) -> f64 {
    if num_nodes < 2 {
        return 0.0;
    }
    2.0 * num_edges as f64 / (num_nodes as f64 * (num_nodes as f64 - 1.0))
}

pub fn global_stats<N: Sync>(g: &WeightedGraph<N>, mode: PathMode) -> GlobalStats {
    let num_nodes = g.node_count();
    let num_edges = g.edge_count();
    let (_, num_components) = g.connected_components();
    let lcc = g.largest_component();
    let (diameter, avg_shortest_path, exact_paths) = match mode {
        PathMode::Exact => {
            let (d, l) = path_stats(g, &lcc, &lcc);
            (d, l, true)
        }
        PathMode::Estimate { sources, seed } => {
            if sources >= lcc.len() {
                let (d, l) = path_stats(g, &lcc, &lcc);
                (d, l, true)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut picked: Vec<usize> = sample(&mut rng, lcc.len(), sources).into_iter().map(|i| lcc[i]).collect();
                picked.sort_unstable();
                let (d, l) = path_stats(g, &lcc, &picked);
                (d.max(double_sweep(g, picked[0])), l, false)
            }
        }
    };
    GlobalStats {
        num_nodes,
        num_edges,
        edge_node_ratio: if num_nodes == 0 { 0.0 } else { num_edges as f64 / num_nodes as f64 },
        density: density(num_nodes, num_edges),
        diameter,
        avg_shortest_path,
        num_components,
        exact_paths,
    }
}

/// Maximum eccentricity and mean distance from `sources` to the other nodes
/// of `component`.
fn path_stats<N: Sync>(g: &WeightedGraph<N>, component: &[usize], sources: &[usize]) -> (u32, f64) {
    if component.len() < 2 {
        return (0, 0.0);
    }
    let (ecc, sum) = sources
        .par_iter()
        .map(|&s| {
            let dist = g.bfs_distances(s);
            let mut ecc = 0u32;
            let mut sum = 0u64;
            for &v in component {
                let d = dist[v];
                debug_assert!(d != UNREACHABLE);
                ecc = ecc.max(d);
                sum += d as u64;
            }
            (ecc, sum)
        })
        .reduce(|| (0, 0), |a, b| (a.0.max(b.0), a.1 + b.1));
    let pairs = sources.len() as f64 * (component.len() - 1) as f64;
    (ecc, sum as f64 / pairs)
}

/// Lower bound on the diameter: BFS from `start`, then from the farthest
/// node found.
pub fn double_sweep<N>(g: &WeightedGraph<N>, start: usize) -> u32 {
    let farthest = |s: usize| {
        let dist = g.bfs_distances(s);
        dist.iter()
            .enumerate()
            .filter(|&(_, &d)| d != UNREACHABLE)
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(v, &d)| (v, d))
            .unwrap()
    };
    let (u, _) = farthest(start);
    farthest(u).1
}

/// Biconnected components as sorted node sets. Isolated nodes and
/// self-loops do not form components.
pub fn biconnected_components<N>(g: &WeightedGraph<N>) -> Vec<Vec<usize>> {
    dfs_blocks(g).0
}

/// Cut vertices in ascending order.
pub fn articulation_points<N>(g: &WeightedGraph<N>) -> Vec<usize> {
    dfs_blocks(g).1
}

/// Iterative Hopcroft–Tarjan with an explicit edge stack.
fn dfs_blocks<N>(g: &WeightedGraph<N>) -> (Vec<Vec<usize>>, Vec<usize>) {
    let n = g.node_count();
    let mut disc = vec![0u32; n]; // 0 = unvisited
    let mut low = vec![0u32; n];
    let mut is_cut = vec![false; n];
    let mut time = 0u32;
    let mut blocks = Vec::new();
    let mut edge_stack: Vec<(usize, usize)> = Vec::new();
    // (node, parent, next neighbour position)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();

    for root in 0..n {
        if disc[root] != 0 {
            continue;
        }
        time += 1;
        disc[root] = time;
        low[root] = time;
        stack.push((root, usize::MAX, 0));
        let mut root_children = 0;
        while let Some(frame) = stack.last_mut() {
            let (u, parent, pos) = *frame;
            let nbrs = g.neighbors(u);
            if pos < nbrs.len() {
                frame.2 += 1;
                let v = nbrs[pos].0;
                if v == u || v == parent {
                    continue;
                }
                if disc[v] == 0 {
                    time += 1;
                    disc[v] = time;
                    low[v] = time;
                    edge_stack.push((u, v));
                    if u == root {
                        root_children += 1;
                    }
                    stack.push((v, u, 0));
                } else if disc[v] < disc[u] {
                    edge_stack.push((u, v));
                    low[u] = low[u].min(disc[v]);
                }
                continue;
            }
            stack.pop();
            if parent == usize::MAX {
                continue;
            }
            low[parent] = low[parent].min(low[u]);
            if low[u] >= disc[parent] {
                if parent != root {
                    is_cut[parent] = true;
                }
                let mut block = Vec::new();
                while let Some((a, b)) = edge_stack.pop() {
                    block.push(a);
                    block.push(b);
                    if (a, b) == (parent, u) {
                        break;
                    }
                }
                block.sort_unstable();
                block.dedup();
                blocks.push(block);
            }
        }
        if root_children > 1 {
            is_cut[root] = true;
        }
    }
    blocks.sort();
    let cuts = (0..n).filter(|&v| is_cut[v]).collect();
    (blocks, cuts)
}

/// Per-node visit counts over a set of walks, most visited first (ties by
/// node index).
pub fn visit_counts<'a>(walks: impl IntoIterator<Item = &'a Walk>) -> Vec<(usize, u64)> {
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for w in walks {
        for &v in &w.nodes {
            *counts.entry(v).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(usize, u64)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked
}

/// Ranked visit frequencies, run-length encoded as `(frequency, nodes)`
/// pairs in descending frequency.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisitDistribution {
    pub config: WalkConfig,
    pub total_visits: u64,
    pub distinct_nodes: usize,
    pub runs: Vec<(u64, usize)>,
}

impl VisitDistribution {
    pub fn new<'a>(config: WalkConfig, walks: impl IntoIterator<Item = &'a Walk>) -> Self {
        let counts = visit_counts(walks);
        let mut runs: Vec<(u64, usize)> = Vec::new();
        for &(_, f) in &counts {
            match runs.last_mut() {
                Some(last) if last.0 == f => last.1 += 1,
                _ => runs.push((f, 1)),
            }
        }
        VisitDistribution {
            config,
            total_visits: counts.iter().map(|c| c.1).sum(),
            distinct_nodes: counts.len(),
            runs,
        }
    }

    /// `(rank, frequency)` with 1-based ranks.
    pub fn ranked(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.runs
            .iter()
            .flat_map(|&(f, n)| std::iter::repeat_n(f, n))
            .enumerate()
            .map(|(i, f)| (i + 1, f))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MeasureId {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    J,
    K,
    L,
    M,
    N,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Complexity,
    Coherence,
    Entropy,
}

impl MeasureId {
    pub const ALL: [MeasureId; 14] = [
        MeasureId::A,
        MeasureId::B,
        MeasureId::C,
        MeasureId::D,
        MeasureId::E,
        MeasureId::F,
        MeasureId::G,
        MeasureId::H,
        MeasureId::I,
        MeasureId::J,
        MeasureId::K,
        MeasureId::L,
        MeasureId::M,
        MeasureId::N,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn family(self) -> Family {
        match self.index() {
            0..=3 => Family::Complexity,
            4..=9 => Family::Coherence,
            _ => Family::Entropy,
        }
    }
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// The fourteen values of one sample, indexed by [`MeasureId`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(into = "BTreeMap<MeasureId, f64>", try_from = "BTreeMap<MeasureId, f64>")]
pub struct MeasureValues(pub [f64; 14]);

impl MeasureValues {
    pub fn get(&self, id: MeasureId) -> f64 {
        self.0[id.index()]
    }
}

impl From<MeasureValues> for BTreeMap<MeasureId, f64> {
    fn from(v: MeasureValues) -> Self {
        MeasureId::ALL.iter().map(|&id| (id, v.get(id))).collect()
    }
}

impl TryFrom<BTreeMap<MeasureId, f64>> for MeasureValues {
    type Error = String;

    fn try_from(map: BTreeMap<MeasureId, f64>) -> Result<Self, String> {
        let mut out = [0.0; 14];
        for id in MeasureId::ALL {
            out[id.index()] = *map.get(&id).ok_or_else(|| format!("measure {id} missing"))?;
        }
        Ok(MeasureValues(out))
    }
}

/// One line of the per-sample record stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureRecord {
    pub config: WalkConfig,
    pub config_hash: u64,
    pub walk_index: usize,
    pub values: MeasureValues,
}

fn distinct(nodes: &[usize]) -> Vec<usize> {
    let mut v = nodes.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// A–D. The clustering coefficient of each distinct walk node is taken
/// within the envelope subgraph.
pub fn complexity_measures(env: &Envelope, walk: &Walk) -> [f64; 4] {
    let blocks = biconnected_components(&env.subgraph);
    let mean_block = if blocks.is_empty() {
        0.0
    } else {
        blocks.iter().map(|b| b.len()).sum::<usize>() as f64 / blocks.len() as f64
    };
    let walk_nodes = distinct(&walk.nodes);
    let clustering: f64 = walk_nodes
        .iter()
        .map(|v| {
            let local = env.subgraph.index_of(v).expect("walk node inside its envelope");
            env.subgraph.local_clustering(local)
        })
        .sum();
    [
        env.nodes.len() as f64,
        blocks.len() as f64,
        mean_block,
        clustering / walk_nodes.len() as f64,
    ]
}

fn chain_scores(walk: &Walk, sim: impl Fn(usize, usize) -> f64) -> [f64; 3] {
    let nodes = &walk.nodes;
    let ends = sim(nodes[0], nodes[nodes.len() - 1]);
    if nodes.len() < 2 {
        return [ends, ends, ends];
    }
    let steps: Vec<f64> = nodes.windows(2).map(|w| sim(w[0], w[1])).collect();
    let product = steps.iter().product();
    let mean = steps.iter().sum::<f64>() / steps.len() as f64;
    [ends, product, mean]
}

/// E–J. `m` must share its row table with the walked graph.
pub fn coherence_measures<N: Ord + fmt::Display>(walk: &Walk, tax: &Taxonomy<N>, m: &DistMatrix) -> [f64; 6] {
    let [e, f, g] = chain_scores(walk, |x, y| tax.sim_tax_by_index(x, y));
    let [h, i, j] = chain_scores(walk, |x, y| m.cosine_by_index(x, y));
    [e, f, g, h, i, j]
}

/// Shannon entropy (bits) of the cluster-size distribution of `z` at the
/// given scope. Nodes are graph indices; duplicates are ignored.
pub fn entropy<N: Ord + fmt::Display>(z: &[usize], tax: &Taxonomy<N>, scope: Scope) -> f64 {
    let z = distinct(z);
    let mut sizes: Vec<(&_, usize)> = tax.cluster_sizes(&z, scope).into_iter().collect();
    sizes.sort_unstable();
    let total: usize = sizes.iter().map(|s| s.1).sum();
    if total == 0 {
        return 0.0;
    }
    let h: f64 = sizes
        .iter()
        .map(|&(_, cs)| {
            let p = cs as f64 / total as f64;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

/// K–N.
pub fn entropy_measures<N: Ord + fmt::Display>(env: &Envelope, walk: &Walk, tax: &Taxonomy<N>) -> [f64; 4] {
    [
        entropy(&walk.nodes, tax, Scope::Top),
        entropy(&walk.nodes, tax, Scope::Specific),
        entropy(&env.nodes, tax, Scope::Top),
        entropy(&env.nodes, tax, Scope::Specific),
    ]
}

/// All fourteen measures of one sample.
pub fn measure_sample<N: Ord + fmt::Display>(
    env: &Envelope,
    walk: &Walk,
    tax: &Taxonomy<N>,
    reduced: &DistMatrix,
) -> MeasureValues {
    let mut out = [0.0; 14];
    out[0..4].copy_from_slice(&complexity_measures(env, walk));
    out[4..10].copy_from_slice(&coherence_measures(walk, tax, reduced));
    out[10..14].copy_from_slice(&entropy_measures(env, walk, tax));
    MeasureValues(out)
}
