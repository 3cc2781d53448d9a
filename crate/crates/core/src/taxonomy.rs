//! Nonparametric hierarchical clustering of a weighted graph.
//!
//! Leaf clusters are grown greedily: nodes are ranked by clustering
//! coefficient and the best remaining node seeds a cluster holding every node
//! reachable through a path whose weight product exceeds a threshold. Higher
//! levels repeat the procedure on a graph whose nodes are the clusters of the
//! level below, linked when they share members. Each node ends up with one or
//! more tree codes (root-to-leaf cluster paths), which give a Wu-Palmer style
//! similarity.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

pub const DEFAULT_MAX_LEVELS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TaxonomySource {
    /// Built over the χ²-weighted graph.
    Tw,
    /// Built over the similarity graph.
    Ts,
}

impl fmt::Display for TaxonomySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TaxonomySource::Tw => "Tw",
            TaxonomySource::Ts => "Ts",
        })
    }
}

/// Running cluster identifier. Indices start at 1 and keep increasing
/// across levels, so an index alone is unique within a taxonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClusterId {
    pub level: u32,
    pub index: u32,
}

impl fmt::Display for ClusterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.index)
    }
}

/// Cluster path from the most general cluster to the most specific one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeCode {
    pub path: Vec<ClusterId>,
}

impl TreeCode {
    pub fn depth(&self) -> usize {
        self.path.len()
    }

    fn common_prefix(&self, other: &TreeCode) -> usize {
        self.path.iter().zip(&other.path).take_while(|(a, b)| a == b).count()
    }
}

impl fmt::Display for TreeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, id) in self.path.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{id}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    /// Top-level clusters only.
    Top,
    /// Full tree codes.
    Specific,
}

/// How the expansion threshold is derived from the edge weights of the graph
/// being clustered at each level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum EpsilonPolicy {
    /// Linearly interpolated percentile (0–100) of the edge weights.
    Percentile(f64),
    /// The largest value strictly below the minimum edge weight, so any
    /// single edge passes but longer paths usually do not.
    BelowMinimum,
    Fixed(f64),
}

impl Default for EpsilonPolicy {
    fn default() -> Self {
        EpsilonPolicy::Percentile(75.0)
    }
}

impl EpsilonPolicy {
    pub fn threshold(&self, weights: &[f64]) -> f64 {
        match *self {
            EpsilonPolicy::Fixed(eps) => eps,
            _ if weights.is_empty() => 0.0,
            EpsilonPolicy::BelowMinimum => {
                let min = weights.iter().copied().fold(f64::INFINITY, f64::min);
                min.next_down().max(0.0)
            }
            EpsilonPolicy::Percentile(p) => percentile(weights, p),
        }
    }
}

fn percentile(weights: &[f64], p: f64) -> f64 {
    let mut sorted = weights.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = (p.clamp(0.0, 100.0) / 100.0) * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (rank - lo as f64)
}

/// Local clustering coefficient of `node`.
pub fn clustering_coefficient<N: Ord + fmt::Display>(g: &WeightedGraph<N>, node: &N) -> Result<f64> {
    let v = g.index_of(node).ok_or_else(|| Error::UnknownNode(node.to_string()))?;
    Ok(g.local_clustering(v))
}

#[derive(PartialEq)]
struct Frontier(f64, usize);

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    // Max-heap on the label, smaller index first among equal labels.
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(other.1.cmp(&self.1))
    }
}

/// Reusable buffers for repeated expansions over the same graph.
struct Expansion {
    best: Vec<f64>,
    done: Vec<bool>,
    touched: Vec<usize>,
}

impl Expansion {
    fn new(n: usize) -> Self {
        Expansion { best: vec![f64::NEG_INFINITY; n], done: vec![false; n], touched: Vec::new() }
    }

    /// Nodes whose best path product from `seed` exceeds `eps`, plus the
    /// seed itself. The first edge out of the seed counts with its raw
    /// weight; later edges heavier than 1 leave the product unchanged, so
    /// products never grow along a path and best-first order is exact.
    fn run<N>(&mut self, g: &WeightedGraph<N>, seed: usize, eps: f64) -> Vec<usize> {
        let mut heap = BinaryHeap::new();
        let mut members = vec![seed];
        self.done[seed] = true;
        self.touched.push(seed);
        for &(v, w) in g.neighbors(seed) {
            if v != seed && w > eps && w > self.best[v] {
                if self.best[v] == f64::NEG_INFINITY {
                    self.touched.push(v);
                }
                self.best[v] = w;
                heap.push(Frontier(w, v));
            }
        }
        while let Some(Frontier(label, v)) = heap.pop() {
            if self.done[v] || label < self.best[v] {
                continue;
            }
            self.done[v] = true;
            members.push(v);
            for &(u, w) in g.neighbors(v) {
                if self.done[u] {
                    continue;
                }
                let cand = label * w.min(1.0);
                if cand > eps && cand > self.best[u] {
                    if self.best[u] == f64::NEG_INFINITY {
                        self.touched.push(u);
                    }
                    self.best[u] = cand;
                    heap.push(Frontier(cand, u));
                }
            }
        }
        for &t in &self.touched {
            self.best[t] = f64::NEG_INFINITY;
            self.done[t] = false;
        }
        self.touched.clear();
        members.sort_unstable();
        members
    }
}

/// Members of the cluster seeded at `seed` under threshold `eps` (see
/// [`leaf_clusters`]), as sorted node indices.
pub fn cluster_membership<N>(g: &WeightedGraph<N>, seed: usize, eps: f64) -> Vec<usize> {
    Expansion::new(g.node_count()).run(g, seed, eps)
}

/// One level of clustering: node-index member lists in seeding order.
///
/// Nodes are ranked by clustering coefficient (descending, ties to the lower
/// index). The best node not yet clustered seeds the next cluster. Nodes
/// already in a cluster can join later clusters but never seed one.
pub fn leaf_clusters<N: Sync>(g: &WeightedGraph<N>, eps: f64) -> Vec<Vec<usize>> {
    let cc = g.clustering_coefficients();
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_by(|&a, &b| cc[b].total_cmp(&cc[a]).then(a.cmp(&b)));
    let mut pending = vec![true; g.node_count()];
    let mut expansion = Expansion::new(g.node_count());
    let mut clusters = Vec::new();
    for seed in order {
        if !pending[seed] {
            continue;
        }
        let members = expansion.run(g, seed, eps);
        for &m in &members {
            pending[m] = false;
        }
        clusters.push(members);
    }
    clusters
}

/// Graph over the clusters of one level. Two clusters are linked when they
/// share nodes; the weight is `(2·Σ full + Σ partial) / 3` over base edges
/// with both (full) or exactly one (partial) endpoint in the shared set.
pub fn cluster_graph<N: Sync>(
    members: &[Vec<usize>],
    ids: &[ClusterId],
    base: &WeightedGraph<N>,
) -> WeightedGraph<ClusterId> {
    assert_eq!(members.len(), ids.len());
    let mut containing: Vec<Vec<u32>> = vec![Vec::new(); base.node_count()];
    for (c, list) in members.iter().enumerate() {
        for &v in list {
            containing[v].push(c as u32);
        }
    }
    let mut shared: Vec<(u32, u32, usize)> = Vec::new();
    for (v, clusters) in containing.iter().enumerate() {
        for (i, &a) in clusters.iter().enumerate() {
            for &b in &clusters[i + 1..] {
                shared.push((a, b, v));
            }
        }
    }
    shared.par_sort_unstable();

    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    while start < shared.len() {
        let mut end = start;
        while end < shared.len() && shared[end].0 == shared[start].0 && shared[end].1 == shared[start].1 {
            end += 1;
        }
        groups.push((start, end));
        start = end;
    }
    let edges: Vec<(usize, usize, f64)> = groups
        .par_iter()
        .map(|&(s, e)| {
            let inter: Vec<usize> = shared[s..e].iter().map(|t| t.2).collect();
            let (mut full, mut partial) = (0.0, 0.0);
            for &x in &inter {
                for &(y, w) in base.neighbors(x) {
                    if inter.binary_search(&y).is_ok() {
                        if x <= y {
                            full += w;
                        }
                    } else {
                        partial += w;
                    }
                }
            }
            (shared[s].0 as usize, shared[s].1 as usize, (2.0 * full + partial) / 3.0)
        })
        .collect();
    // `ids` are sorted because clusters are numbered in creation order.
    WeightedGraph::from_edges(ids.to_vec(), edges)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub id: ClusterId,
    /// Sorted indices of the base-graph nodes in the cluster.
    pub members: Vec<usize>,
    /// Clusters of the level below that were merged into this one.
    pub children: Vec<ClusterId>,
}

/// Cluster hierarchy plus per-node tree codes.
#[derive(Debug, Clone)]
pub struct Taxonomy<N> {
    source: TaxonomySource,
    nodes: Vec<N>,
    levels: Vec<Vec<Cluster>>,
    codes: Vec<Vec<TreeCode>>,
    tops: Vec<Vec<TreeCode>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaxonomyParams {
    pub epsilon: EpsilonPolicy,
    pub max_levels: usize,
}

impl Default for TaxonomyParams {
    fn default() -> Self {
        TaxonomyParams { epsilon: EpsilonPolicy::default(), max_levels: DEFAULT_MAX_LEVELS }
    }
}

/// Builds the full hierarchy over `g`.
///
/// Stops once a level has a single cluster, when a level would not reduce the
/// cluster count (that level is discarded), or after `max_levels` levels.
pub fn build_taxonomy<N: Ord + Clone + Sync>(
    g: &WeightedGraph<N>,
    params: TaxonomyParams,
    source: TaxonomySource,
) -> Result<Taxonomy<N>> {
    if g.is_empty() {
        return Err(Error::DegenerateGraph);
    }
    let max_levels = params.max_levels.max(1);
    let mut next_index = 1u32;
    let mut fresh = |level: u32| {
        let id = ClusterId { level, index: next_index };
        next_index += 1;
        id
    };

    let eps = params.epsilon.threshold(&g.edge_weights());
    let leaves: Vec<Cluster> = leaf_clusters(g, eps)
        .into_iter()
        .map(|members| Cluster { id: fresh(0), members, children: Vec::new() })
        .collect();
    let mut levels = vec![leaves];

    while levels.len() < max_levels {
        let prev = levels.last().unwrap();
        if prev.len() <= 1 {
            break;
        }
        let members: Vec<Vec<usize>> = prev.iter().map(|c| c.members.clone()).collect();
        let ids: Vec<ClusterId> = prev.iter().map(|c| c.id).collect();
        let gc = cluster_graph(&members, &ids, g);
        let eps = params.epsilon.threshold(&gc.edge_weights());
        let groups = leaf_clusters(&gc, eps);
        if groups.len() >= prev.len() {
            break;
        }
        let level = levels.len() as u32;
        let next: Vec<Cluster> = groups
            .into_iter()
            .map(|group| {
                let mut union: Vec<usize> = group.iter().flat_map(|&c| members[c].iter().copied()).collect();
                union.sort_unstable();
                union.dedup();
                Cluster { id: fresh(level), members: union, children: group.iter().map(|&c| ids[c]).collect() }
            })
            .collect();
        let done = next.len() == 1;
        levels.push(next);
        if done {
            break;
        }
    }

    let codes = unroll_codes(g.node_count(), &levels);
    let tops = codes
        .iter()
        .map(|list| {
            let mut roots: Vec<TreeCode> = list.iter().map(|c| TreeCode { path: vec![c.path[0]] }).collect();
            roots.dedup();
            roots
        })
        .collect();
    Ok(Taxonomy { source, nodes: g.nodes().to_vec(), levels, codes, tops })
}

fn unroll_codes(n: usize, levels: &[Vec<Cluster>]) -> Vec<Vec<TreeCode>> {
    let offsets: Vec<u32> = levels.iter().map(|l| l[0].id.index).collect();
    let lookup = |id: ClusterId| &levels[id.level as usize][(id.index - offsets[id.level as usize]) as usize];
    let mut codes: Vec<Vec<TreeCode>> = vec![Vec::new(); n];
    let mut stack: Vec<Vec<ClusterId>> = levels.last().unwrap().iter().map(|c| vec![c.id]).collect();
    while let Some(path) = stack.pop() {
        let cluster = lookup(*path.last().unwrap());
        if cluster.children.is_empty() {
            for &v in &cluster.members {
                codes[v].push(TreeCode { path: path.clone() });
            }
        } else {
            for &child in &cluster.children {
                let mut longer = path.clone();
                longer.push(child);
                stack.push(longer);
            }
        }
    }
    for list in &mut codes {
        list.sort_unstable();
        list.dedup();
    }
    codes
}

impl<N: Ord + fmt::Display> Taxonomy<N> {
    pub fn source(&self) -> TaxonomySource {
        self.source
    }

    pub fn nodes(&self) -> &[N] {
        &self.nodes
    }

    pub fn levels(&self) -> &[Vec<Cluster>] {
        &self.levels
    }

    pub fn index_of(&self, node: &N) -> Result<usize> {
        self.nodes.binary_search(node).map_err(|_| Error::UnknownNode(node.to_string()))
    }

    /// Tree codes of the node at index `i`.
    pub fn codes(&self, i: usize) -> &[TreeCode] {
        &self.codes[i]
    }

    /// Scope-level cluster set of node `i`: root-only codes for
    /// [`Scope::Top`], full codes for [`Scope::Specific`].
    pub fn scope_codes(&self, i: usize, scope: Scope) -> &[TreeCode] {
        match scope {
            Scope::Top => &self.tops[i],
            Scope::Specific => &self.codes[i],
        }
    }

    pub fn node_codes(&self, node: &N) -> Result<&[TreeCode]> {
        Ok(self.codes(self.index_of(node)?))
    }

    fn indices(&self, z: &[N]) -> Result<Vec<usize>> {
        let mut idx = z.iter().map(|x| self.index_of(x)).collect::<Result<Vec<_>>>()?;
        idx.sort_unstable();
        idx.dedup();
        Ok(idx)
    }

    /// Number of distinct scope clusters over the nodes of `z`.
    pub fn cn(&self, z: &[N], scope: Scope) -> Result<usize> {
        Ok(self.cluster_sizes(&self.indices(z)?, scope).len())
    }

    /// Number of nodes of `z` whose scope clusters include `code`.
    pub fn cs(&self, z: &[N], code: &TreeCode, scope: Scope) -> Result<usize> {
        let idx = self.indices(z)?;
        Ok(idx.iter().filter(|&&i| self.scope_codes(i, scope).contains(code)).count())
    }

    /// `cs` for every cluster mentioned by the (deduplicated) node indices.
    pub fn cluster_sizes(&self, z: &[usize], scope: Scope) -> HashMap<&TreeCode, usize> {
        let mut sizes = HashMap::new();
        for &i in z {
            for code in self.scope_codes(i, scope) {
                *sizes.entry(code).or_insert(0) += 1;
            }
        }
        sizes
    }

    pub fn sim_tax(&self, x: &N, y: &N) -> Result<f64> {
        Ok(self.sim_tax_by_index(self.index_of(x)?, self.index_of(y)?))
    }

    /// Best Wu-Palmer score `2·|lcp| / (|u| + |v|)` over pairs of tree codes.
    pub fn sim_tax_by_index(&self, x: usize, y: usize) -> f64 {
        let mut best: f64 = 0.0;
        for u in &self.codes[x] {
            for v in &self.codes[y] {
                let score = 2.0 * u.common_prefix(v) as f64 / (u.depth() + v.depth()) as f64;
                if score > best {
                    best = score;
                    if best >= 1.0 {
                        return best;
                    }
                }
            }
        }
        best
    }

    /// Text export: `node<TAB>code1,code2,...` per node.
    pub fn write_code_table<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (node, codes) in self.nodes.iter().zip(&self.codes) {
            let rendered: Vec<String> = codes.iter().map(|c| c.to_string()).collect();
            writeln!(out, "{node}\t{}", rendered.join(","))?;
        }
        out.flush()
    }

    /// Nested dendrogram, roots first; leaves list their member nodes.
    pub fn dendrogram(&self) -> Dendrogram {
        let offsets: Vec<u32> = self.levels.iter().map(|l| l[0].id.index).collect();
        let build = |id: ClusterId| -> DendrogramNode {
            fn rec<N: fmt::Display>(
                tax: &Taxonomy<N>,
                offsets: &[u32],
                id: ClusterId,
            ) -> DendrogramNode {
                let c = &tax.levels[id.level as usize][(id.index - offsets[id.level as usize]) as usize];
                DendrogramNode {
                    id: id.to_string(),
                    level: id.level,
                    size: c.members.len(),
                    children: c.children.iter().map(|&ch| rec(tax, offsets, ch)).collect(),
                    members: if c.children.is_empty() {
                        c.members.iter().map(|&m| tax.nodes[m].to_string()).collect()
                    } else {
                        Vec::new()
                    },
                }
            }
            rec(self, &offsets, id)
        };
        Dendrogram {
            source: self.source,
            levels: self.levels.len(),
            roots: self.levels.last().unwrap().iter().map(|c| build(c.id)).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dendrogram {
    pub source: TaxonomySource,
    pub levels: usize,
    pub roots: Vec<DendrogramNode>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DendrogramNode {
    pub id: String,
    pub level: u32,
    pub size: usize,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub children: Vec<DendrogramNode>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub members: Vec<String>,
}
