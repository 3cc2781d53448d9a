//! Graph and matrix views of a triple set.
//!
//! * [`DirectGraph`]: one labelled, directed edge per triple.
//! * [`DistMatrix`]: binary entity-by-context matrix. A context is either an
//!   outgoing `(predicate, object)` or an incoming `(subject, predicate)` pair.
//! * Column χ² scores, used both to drop insignificant contexts and to weight
//!   the undirected graph built by [`build_weighted_graph`].
//! * [`build_similarity_graph`]: entities linked when their context vectors
//!   have cosine similarity above a threshold.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::ingest::{Term, TripleSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DirectedEdge {
    pub from: usize,
    pub to: usize,
    pub predicate: usize,
}

/// Directed labelled multigraph. Predicates live in their own table and are
/// only nodes if they also occur as a subject or object.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectGraph {
    nodes: Vec<Term>,
    predicates: Vec<Term>,
    edges: Vec<DirectedEdge>,
}

impl DirectGraph {
    pub fn nodes(&self) -> &[Term] {
        &self.nodes
    }

    pub fn predicates(&self) -> &[Term] {
        &self.predicates
    }

    pub fn edges(&self) -> &[DirectedEdge] {
        &self.edges
    }

    pub fn node_index(&self, term: &Term) -> Option<usize> {
        self.nodes.binary_search(term).ok()
    }

    /// Edges as `(from, predicate, to)` terms.
    pub fn labelled_edges(&self) -> impl Iterator<Item = (&Term, &Term, &Term)> {
        self.edges
            .iter()
            .map(|e| (&self.nodes[e.from], &self.predicates[e.predicate], &self.nodes[e.to]))
    }
}

pub fn build_direct_graph(triples: &TripleSet) -> DirectGraph {
    let mut nodes: Vec<Term> = triples
        .iter()
        .flat_map(|t| [t.subject.clone(), t.object.clone()])
        .collect();
    nodes.sort_unstable();
    nodes.dedup();
    let mut predicates: Vec<Term> = triples.iter().map(|t| t.predicate.clone()).collect();
    predicates.sort_unstable();
    predicates.dedup();

    let idx = |table: &[Term], t: &Term| table.binary_search(t).expect("term collected above");
    let mut edges: Vec<DirectedEdge> = triples
        .iter()
        .map(|t| DirectedEdge {
            from: idx(&nodes, &t.subject),
            to: idx(&nodes, &t.object),
            predicate: idx(&predicates, &t.predicate),
        })
        .collect();
    edges.sort_unstable();
    DirectGraph { nodes, predicates, edges }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContextKind {
    /// `(predicate, object)`: the row entity is the subject.
    Outgoing,
    /// `(subject, predicate)`: the row entity is the object.
    Incoming,
}

/// A matrix column with its terms spelled out.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ContextColumn {
    pub kind: ContextKind,
    pub first: Term,
    pub second: Term,
}

impl ContextColumn {
    pub fn outgoing(predicate: Term, object: Term) -> Self {
        ContextColumn { kind: ContextKind::Outgoing, first: predicate, second: object }
    }

    pub fn incoming(subject: Term, predicate: Term) -> Self {
        ContextColumn { kind: ContextKind::Incoming, first: subject, second: predicate }
    }
}

impl fmt::Display for ContextColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.first, self.second)
    }
}

/// Column key over the node and predicate tables. Outgoing keys store
/// `(predicate, node)`, incoming keys `(node, predicate)`; since both tables
/// are sorted, the derived order is the lexical order of [`ContextColumn`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColumnKey {
    pub kind: ContextKind,
    pub first: u32,
    pub second: u32,
}

/// Sparse binary entity-by-context matrix in CSR layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DistMatrix {
    pub(crate) rows: Vec<Term>,
    pub(crate) predicates: Vec<Term>,
    pub(crate) columns: Vec<ColumnKey>,
    pub(crate) row_ptr: Vec<usize>,
    pub(crate) row_cols: Vec<u32>,
    pub(crate) col_sums: Vec<u64>,
    pub(crate) col_scores: Vec<f64>,
}

impl DistMatrix {
    pub fn rows(&self) -> &[Term] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn column_keys(&self) -> &[ColumnKey] {
        &self.columns
    }

    pub fn column(&self, c: usize) -> ContextColumn {
        let key = self.columns[c];
        match key.kind {
            ContextKind::Outgoing => ContextColumn::outgoing(
                self.predicates[key.first as usize].clone(),
                self.rows[key.second as usize].clone(),
            ),
            ContextKind::Incoming => ContextColumn::incoming(
                self.rows[key.first as usize].clone(),
                self.predicates[key.second as usize].clone(),
            ),
        }
    }

    pub fn columns(&self) -> Vec<ContextColumn> {
        (0..self.column_count()).map(|c| self.column(c)).collect()
    }

    pub fn row_index(&self, term: &Term) -> Option<usize> {
        self.rows.binary_search(term).ok()
    }

    pub fn column_index(&self, column: &ContextColumn) -> Option<usize> {
        let pred = |t: &Term| self.predicates.binary_search(t).ok().map(|i| i as u32);
        let node = |t: &Term| self.rows.binary_search(t).ok().map(|i| i as u32);
        let key = match column.kind {
            ContextKind::Outgoing => ColumnKey {
                kind: ContextKind::Outgoing,
                first: pred(&column.first)?,
                second: node(&column.second)?,
            },
            ContextKind::Incoming => ColumnKey {
                kind: ContextKind::Incoming,
                first: node(&column.first)?,
                second: pred(&column.second)?,
            },
        };
        self.columns.binary_search(&key).ok()
    }

    /// Sorted column indices of the nonzero cells of row `r`.
    pub fn row(&self, r: usize) -> &[u32] {
        &self.row_cols[self.row_ptr[r]..self.row_ptr[r + 1]]
    }

    pub fn cell(&self, r: usize, c: usize) -> bool {
        self.row(r).binary_search(&(c as u32)).is_ok()
    }

    /// Number of nonzero cells.
    pub fn total(&self) -> u64 {
        self.row_cols.len() as u64
    }

    /// Observed frequency of each column.
    pub fn column_sums(&self) -> &[u64] {
        &self.col_sums
    }

    /// χ² score per column, computed on the matrix the columns came from
    /// (reduction keeps the original scores).
    pub fn column_scores(&self) -> &[f64] {
        &self.col_scores
    }

    pub fn score(&self, column: &ContextColumn) -> Option<f64> {
        self.column_index(column).map(|c| self.col_scores[c])
    }

    /// Dense 0/1 rendering, for small matrices and tests.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        (0..self.row_count())
            .map(|r| {
                let mut dense = vec![0u8; self.column_count()];
                for &c in self.row(r) {
                    dense[c as usize] = 1;
                }
                dense
            })
            .collect()
    }

    pub fn cosine_by_index(&self, x: usize, y: usize) -> f64 {
        let (a, b) = (self.row(x), self.row(y));
        if a.is_empty() || b.is_empty() {
            return 0.0;
        }
        let dot = sorted_overlap(a, b);
        dot as f64 / ((a.len() * b.len()) as f64).sqrt()
    }
}

fn sorted_overlap(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Builds the full matrix and scores every column.
pub fn build_dist_matrix(g: &DirectGraph) -> DistMatrix {
    let mut cells: Vec<(usize, ColumnKey)> = Vec::with_capacity(2 * g.edges.len());
    for e in &g.edges {
        cells.push((
            e.from,
            ColumnKey { kind: ContextKind::Outgoing, first: e.predicate as u32, second: e.to as u32 },
        ));
        cells.push((
            e.to,
            ColumnKey { kind: ContextKind::Incoming, first: e.from as u32, second: e.predicate as u32 },
        ));
    }
    let mut columns: Vec<ColumnKey> = cells.iter().map(|c| c.1).collect();
    columns.par_sort_unstable();
    columns.dedup();

    let mut indexed: Vec<(usize, u32)> = cells
        .par_iter()
        .map(|(r, key)| (*r, columns.binary_search(key).expect("column collected above") as u32))
        .collect();
    indexed.par_sort_unstable();
    indexed.dedup();

    let mut m = DistMatrix {
        rows: g.nodes.clone(),
        predicates: g.predicates.clone(),
        columns,
        row_ptr: Vec::new(),
        row_cols: Vec::new(),
        col_sums: Vec::new(),
        col_scores: Vec::new(),
    };
    fill_csr(&mut m, &indexed);
    m.col_scores = chi_squared(&m).unwrap_or_default();
    m
}

fn fill_csr(m: &mut DistMatrix, sorted_cells: &[(usize, u32)]) {
    let mut row_ptr = vec![0usize; m.rows.len() + 1];
    for &(r, _) in sorted_cells {
        row_ptr[r + 1] += 1;
    }
    for r in 0..m.rows.len() {
        row_ptr[r + 1] += row_ptr[r];
    }
    let mut col_sums = vec![0u64; m.columns.len()];
    for &(_, c) in sorted_cells {
        col_sums[c as usize] += 1;
    }
    m.row_ptr = row_ptr;
    m.row_cols = sorted_cells.iter().map(|c| c.1).collect();
    m.col_sums = col_sums;
}

/// χ² score of every column: `(O - E)^2 / E` with `O` the column sum and
/// `E` the mean column sum.
pub fn chi_squared(m: &DistMatrix) -> Result<Vec<f64>> {
    let n_cols = m.column_count() as i128;
    if n_cols == 0 {
        return Err(Error::EmptyMatrix);
    }
    let total = m.total() as i128;
    if total == 0 {
        return Ok(vec![0.0; m.column_count()]);
    }
    // (O - T/C)^2 / (T/C) = (O*C - T)^2 / (C*T); kept integral until the
    // final division so small cases come out correctly rounded.
    Ok(m
        .col_sums
        .iter()
        .map(|&o| {
            let diff = o as i128 * n_cols - total;
            (diff * diff) as f64 / (n_cols * total) as f64
        })
        .collect())
}

/// Keeps the `k` highest-scoring columns. Ties at the cutoff go to the
/// lexically smaller column. Rows are kept even if they end up empty.
pub fn reduce_dimensions(m: &DistMatrix, k: usize) -> DistMatrix {
    assert!(k >= 1, "reduction size must be positive");
    if m.column_count() <= k {
        return m.clone();
    }
    let mut order: Vec<usize> = (0..m.column_count()).collect();
    order.sort_by(|&a, &b| m.col_scores[b].total_cmp(&m.col_scores[a]).then(a.cmp(&b)));
    let mut kept: Vec<usize> = order[..k].to_vec();
    kept.sort_unstable();

    let mut remap = vec![u32::MAX; m.column_count()];
    for (new, &old) in kept.iter().enumerate() {
        remap[old] = new as u32;
    }
    let mut cells = Vec::new();
    for r in 0..m.row_count() {
        for &c in m.row(r) {
            let nc = remap[c as usize];
            if nc != u32::MAX {
                cells.push((r, nc));
            }
        }
    }
    let mut reduced = DistMatrix {
        rows: m.rows.clone(),
        predicates: m.predicates.clone(),
        columns: kept.iter().map(|&c| m.columns[c]).collect(),
        row_ptr: Vec::new(),
        row_cols: Vec::new(),
        col_sums: Vec::new(),
        col_scores: kept.iter().map(|&c| m.col_scores[c]).collect(),
    };
    fill_csr(&mut reduced, &cells);
    reduced
}

/// Cosine similarity of two entity rows; 0 when either row is all-zero.
pub fn cosine(m: &DistMatrix, x: &Term, y: &Term) -> Result<f64> {
    let xi = m.row_index(x).ok_or_else(|| Error::UnknownEntity(x.to_string()))?;
    let yi = m.row_index(y).ok_or_else(|| Error::UnknownEntity(y.to_string()))?;
    Ok(m.cosine_by_index(xi, yi))
}

/// Undirected projection of `g`. Each edge `{u, v}` is weighted by the
/// largest χ² score among the contexts contributed by the triples linking
/// `u` and `v` in either direction. `scores` must be the unreduced matrix.
pub fn build_weighted_graph(g: &DirectGraph, scores: &DistMatrix) -> Result<WeightedGraph<Term>> {
    let lookup = |key: ColumnKey| -> Result<f64> {
        scores
            .columns
            .binary_search(&key)
            .map(|c| scores.col_scores[c])
            .map_err(|_| {
                let col = match key.kind {
                    ContextKind::Outgoing => ContextColumn::outgoing(
                        g.predicates[key.first as usize].clone(),
                        g.nodes[key.second as usize].clone(),
                    ),
                    ContextKind::Incoming => ContextColumn::incoming(
                        g.nodes[key.first as usize].clone(),
                        g.predicates[key.second as usize].clone(),
                    ),
                };
                Error::MissingColumn(col.to_string())
            })
    };
    if scores.rows != g.nodes || scores.predicates != g.predicates {
        return Err(Error::MissingColumn("score matrix was built from a different graph".into()));
    }
    let mut edges = Vec::with_capacity(g.edges.len());
    for e in &g.edges {
        let out = lookup(ColumnKey {
            kind: ContextKind::Outgoing,
            first: e.predicate as u32,
            second: e.to as u32,
        })?;
        let inc = lookup(ColumnKey {
            kind: ContextKind::Incoming,
            first: e.from as u32,
            second: e.predicate as u32,
        })?;
        edges.push((e.from, e.to, out.max(inc)));
    }
    Ok(WeightedGraph::from_edges(g.nodes.clone(), edges))
}

/// Links every pair of rows whose cosine similarity exceeds `epsilon`.
///
/// Candidate pairs come from an inverted index over columns, so only rows
/// sharing at least one nonzero column are scored.
pub fn build_similarity_graph(m: &DistMatrix, epsilon: f64) -> WeightedGraph<Term> {
    let mut postings: Vec<Vec<u32>> = vec![Vec::new(); m.column_count()];
    for r in 0..m.row_count() {
        for &c in m.row(r) {
            postings[c as usize].push(r as u32);
        }
    }
    let edges: Vec<(usize, usize, f64)> = (0..m.row_count())
        .into_par_iter()
        .flat_map_iter(|r| {
            let mut candidates: Vec<u32> = Vec::new();
            for &c in m.row(r) {
                let list = &postings[c as usize];
                let start = list.partition_point(|&other| other as usize <= r);
                candidates.extend_from_slice(&list[start..]);
            }
            candidates.sort_unstable();
            let nr = m.row(r).len();
            let mut out = Vec::new();
            let mut i = 0;
            while i < candidates.len() {
                let other = candidates[i];
                let mut j = i;
                while j < candidates.len() && candidates[j] == other {
                    j += 1;
                }
                let dot = j - i;
                let no = m.row(other as usize).len();
                let sim = dot as f64 / ((nr * no) as f64).sqrt();
                if sim > epsilon {
                    out.push((r, other as usize, sim));
                }
                i = j;
            }
            out
        })
        .collect();
    WeightedGraph::from_edges(m.rows.clone(), edges)
}
