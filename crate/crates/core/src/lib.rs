//! Empirical profiling of RDF datasets.
//!
//! The pipeline turns a set of triples into several graph and matrix views
//! ([`representations`]), derives cluster taxonomies from them
//! ([`taxonomy`]), samples the data with heuristic quasi-random walks
//! ([`walker`]), scores each walk for complexity, coherence and entropy
//! ([`measures`]) and aggregates the scores into comparable dataset profiles
//! ([`profiler`]).

pub mod cache;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod ingest;
pub mod measures;
pub mod pipeline;
pub mod profiler;
pub mod representations;
pub mod taxonomy;
pub mod walker;

pub use error::{Error, Result};
pub use graph::WeightedGraph;
pub use ingest::{Term, TermKind, Triple, TripleSet};
pub use measures::{GlobalStats, MeasureId, MeasureRecord, MeasureValues};
pub use pipeline::{AnalysisParams, RunManifest};
pub use profiler::{Classification, DatasetProfile, Report, Trend};
pub use representations::{DirectGraph, DistMatrix};
pub use taxonomy::{Taxonomy, TaxonomySource, TreeCode};
pub use walker::{Grid, Heuristic, Walk, WalkConfig};
