//! Brute-force reference implementations used to cross-check the fast
//! algorithms on small inputs.

#![allow(dead_code)]

use std::collections::BTreeSet;

use cocoe::WeightedGraph;
use rand::Rng;

/// G(n, p) with optional self-loops. Weights are multiples of 1/8 in
/// (0, 2] so that ties and weights above 1 both occur.
pub fn random_graph<R: Rng>(n: usize, p: f64, loops: bool, rng: &mut R) -> WeightedGraph<usize> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u..n {
            if (u != v || loops) && rng.gen_bool(p) {
                edges.push((u, v, rng.gen_range(1..=16) as f64 / 8.0));
            }
        }
    }
    WeightedGraph::from_edges((0..n).collect(), edges)
}

fn components_without(g: &WeightedGraph<usize>, removed: Option<usize>) -> Vec<usize> {
    let n = g.node_count();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if Some(s) == removed || comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &(v, _) in g.neighbors(u) {
                if Some(v) != removed && comp[v] == usize::MAX {
                    comp[v] = next;
                    stack.push(v);
                }
            }
        }
        next += 1;
    }
    comp
}

fn count_components(comp: &[usize], removed: Option<usize>) -> usize {
    comp.iter()
        .enumerate()
        .filter(|&(v, _)| Some(v) != removed)
        .map(|(_, &c)| c)
        .collect::<BTreeSet<_>>()
        .len()
}

/// Nodes whose removal increases the number of components among the
/// remaining nodes.
pub fn brute_articulation(g: &WeightedGraph<usize>) -> Vec<usize> {
    let base = components_without(g, None);
    (0..g.node_count())
        .filter(|&v| {
            let before = count_components(&base, Some(v));
            let after = count_components(&components_without(g, Some(v)), Some(v));
            after > before
        })
        .collect()
}

/// Blocks from the edge relation "no single node separates these edges":
/// two edges share a block iff they are connected and, for every node `x`,
/// their endpoints other than `x` stay connected in `G - x`.
pub fn brute_blocks(g: &WeightedGraph<usize>) -> Vec<Vec<usize>> {
    let edges: Vec<(usize, usize)> = g.edges().filter(|e| e.0 != e.1).map(|e| (e.0, e.1)).collect();
    let m = edges.len();
    let base = components_without(g, None);
    let cuts: Vec<Vec<usize>> = (0..g.node_count()).map(|x| components_without(g, Some(x))).collect();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..m {
        for j in i + 1..m {
            let (a, b) = (edges[i], edges[j]);
            if base[a.0] != base[b.0] {
                continue;
            }
            let together = (0..g.node_count()).all(|x| {
                let ea = if a.0 != x { a.0 } else { a.1 };
                let eb = if b.0 != x { b.0 } else { b.1 };
                cuts[x][ea] == cuts[x][eb]
            });
            if together {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let mut blocks: std::collections::BTreeMap<usize, BTreeSet<usize>> = Default::default();
    for (i, &(u, v)) in edges.iter().enumerate() {
        let r = find(&mut parent, i);
        let set = blocks.entry(r).or_default();
        set.insert(u);
        set.insert(v);
    }
    let mut out: Vec<Vec<usize>> = blocks.into_values().map(|s| s.into_iter().collect()).collect();
    out.sort();
    out
}

/// Members of the seed's cluster by exhaustive enumeration of simple paths
/// out of `seed`: a node joins if some path reaches it with
/// `w1 · Π min(w_i, 1) > eps`. Paths whose product has dropped to `eps` or
/// below are abandoned, since later factors never exceed 1.
pub fn brute_membership(g: &WeightedGraph<usize>, seed: usize, eps: f64) -> Vec<usize> {
    fn dfs(g: &WeightedGraph<usize>, v: usize, product: f64, eps: f64, on_path: &mut Vec<bool>, reached: &mut BTreeSet<usize>) {
        for &(u, w) in g.neighbors(v) {
            if on_path[u] {
                continue;
            }
            let next = product * w.min(1.0);
            if next > eps {
                reached.insert(u);
                on_path[u] = true;
                dfs(g, u, next, eps, on_path, reached);
                on_path[u] = false;
            }
        }
    }
    let mut reached = BTreeSet::from([seed]);
    let mut on_path = vec![false; g.node_count()];
    on_path[seed] = true;
    for &(u, w) in g.neighbors(seed) {
        if u != seed && w > eps {
            reached.insert(u);
            on_path[u] = true;
            dfs(g, u, w, eps, &mut on_path, &mut reached);
            on_path[u] = false;
        }
    }
    reached.into_iter().collect()
}

/// Diameter and mean distance of the largest component via Floyd–Warshall.
/// Ties between equally large components go to the one holding the
/// smallest node.
pub fn floyd_path_stats(g: &WeightedGraph<usize>) -> (u32, f64) {
    let n = g.node_count();
    const INF: u32 = u32::MAX / 2;
    let mut d = vec![vec![INF; n]; n];
    for (u, row) in d.iter_mut().enumerate() {
        row[u] = 0;
        for &(v, _) in g.neighbors(u) {
            if v != u {
                row[v] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    let mut best: Vec<usize> = Vec::new();
    for row in &d {
        let comp: Vec<usize> = (0..n).filter(|&t| row[t] < INF).collect();
        if comp.len() > best.len() {
            best = comp;
        }
    }
    if best.len() < 2 {
        return (0, 0.0);
    }
    let mut diameter = 0;
    let mut sum = 0u64;
    for &i in &best {
        for &j in &best {
            diameter = diameter.max(d[i][j]);
            sum += d[i][j] as u64;
        }
    }
    (diameter, sum as f64 / (best.len() * (best.len() - 1)) as f64)
}
