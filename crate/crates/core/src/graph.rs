//! Undirected weighted graph over a sorted node table.
//!
//! Nodes are addressed by their position in the table. Because the table is
//! sorted, index order is also the lexical order of node identities, which the
//! clustering and walk code rely on for deterministic tie-breaking.

use std::collections::VecDeque;

use rayon::prelude::*;

pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph<N> {
    nodes: Vec<N>,
    adjacency: Vec<Vec<(usize, f64)>>,
    edge_count: usize,
}

impl<N: Ord> WeightedGraph<N> {
    /// Builds a graph from a sorted, duplicate-free node table and index
    /// pairs. Repeated pairs collapse into one edge carrying the maximum
    /// weight; a pair `(u, u)` is a self-loop.
    pub fn from_edges(nodes: Vec<N>, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        assert!(nodes.windows(2).all(|w| w[0] < w[1]), "node table must be sorted and unique");
        let n = nodes.len();
        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (u, v, w) in edges {
            assert!(u < n && v < n, "edge endpoint out of range");
            adjacency[u].push((v, w));
            if u != v {
                adjacency[v].push((u, w));
            }
        }
        let mut edge_count = 0;
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.total_cmp(&a.1)));
            // After sorting, the first entry of each run carries the maximum weight.
            list.dedup_by(|next, first| next.0 == first.0);
            edge_count += list.iter().filter(|&&(v, _)| v >= u).count();
        }
        WeightedGraph { nodes, adjacency, edge_count }
    }

    pub fn index_of(&self, node: &N) -> Option<usize> {
        self.nodes.binary_search(node).ok()
    }
}

impl<N> WeightedGraph<N> {
    pub fn empty() -> Self {
        WeightedGraph { nodes: Vec::new(), adjacency: Vec::new(), edge_count: 0 }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of undirected edges, self-loops included.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[N] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &N {
        &self.nodes[i]
    }

    /// Neighbours of `i` sorted by index, with edge weights. A self-loop
    /// shows up as `i` itself.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn is_isolated(&self, i: usize) -> bool {
        self.adjacency[i].is_empty()
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        let list = &self.adjacency[u];
        list.binary_search_by(|e| e.0.cmp(&v)).ok().map(|k| list[k].1)
    }

    /// Each undirected edge once, as `(u, v, w)` with `u <= v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |e| e.0 >= u).map(move |&(v, w)| (u, v, w)))
    }

    pub fn edge_weights(&self) -> Vec<f64> {
        self.edges().map(|e| e.2).collect()
    }

    /// Subgraph induced by `members` (sorted, unique indices of `self`).
    /// Nodes of the result are labelled with their index in `self`.
    pub fn induced_subgraph(&self, members: &[usize]) -> WeightedGraph<usize> {
        let mut edges = Vec::new();
        for (local_u, &u) in members.iter().enumerate() {
            for &(v, w) in &self.adjacency[u] {
                if v < u {
                    continue;
                }
                if let Ok(local_v) = members.binary_search(&v) {
                    edges.push((local_u, local_v, w));
                }
            }
        }
        WeightedGraph::from_edges(members.to_vec(), edges)
    }

    /// Local clustering coefficient `2T / (k(k-1))`, where `T` counts
    /// triangles through `v` and `k` counts neighbours other than `v`.
    pub fn local_clustering(&self, v: usize) -> f64 {
        let nv: Vec<usize> = self.adjacency[v].iter().map(|e| e.0).filter(|&u| u != v).collect();
        let k = nv.len();
        if k <= 1 {
            return 0.0;
        }
        let mut twice_triangles = 0usize;
        for &u in &nv {
            twice_triangles += sorted_intersection_excluding(&nv, &self.adjacency[u], u, v);
        }
        // Each triangle {v,a,b} was counted from a and from b.
        twice_triangles as f64 / (k * (k - 1)) as f64
    }

    pub fn clustering_coefficients(&self) -> Vec<f64>
    where
        N: Sync,
    {
        (0..self.node_count()).into_par_iter().map(|v| self.local_clustering(v)).collect()
    }

    /// Hop distances from `source`; unreachable nodes get [`UNREACHABLE`].
    pub fn bfs_distances(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![UNREACHABLE; self.node_count()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let d = dist[u] + 1;
            for &(v, _) in &self.adjacency[u] {
                if dist[v] == UNREACHABLE {
                    dist[v] = d;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Component id per node (ids numbered by smallest member) and the count.
    pub fn connected_components(&self) -> (Vec<usize>, usize) {
        let n = self.node_count();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &(v, _) in &self.adjacency[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = count;
                        stack.push(v);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    /// Members of the largest connected component (ties go to the component
    /// holding the smallest index), sorted.
    pub fn largest_component(&self) -> Vec<usize> {
        let (comp, count) = self.connected_components();
        if count == 0 {
            return Vec::new();
        }
        let mut sizes = vec![0usize; count];
        for &c in &comp {
            sizes[c] += 1;
        }
        let best = (0..count).max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a))).unwrap();
        (0..self.node_count()).filter(|&v| comp[v] == best).collect()
    }
}

/// `|a ∩ b \ {skip1, skip2}|` for sorted `a` and sorted adjacency `b`.
fn sorted_intersection_excluding(a: &[usize], b: &[(usize, f64)], skip1: usize, skip2: usize) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                if a[i] != skip1 && a[i] != skip2 {
                    count += 1;
                }
                i += 1;
                j += 1;
            }
        }
    }
    count
}
