//! Benchmark workloads.

use cocoe::fixtures::small_world;
use cocoe::ingest::TripleSet;
use cocoe::pipeline::{build_representations, build_taxonomies, Representations, Taxonomies, DEFAULT_DIMS, DEFAULT_SIM_EPS};
use cocoe::taxonomy::TaxonomyParams;
use cocoe::AnalysisParams;

/// Small-world dataset with `nodes` nodes and three triples per node.
pub fn dataset(nodes: usize) -> TripleSet {
    small_world(nodes, 3, 0.1, 20, 42)
}

/// Everything the walk stage needs, built once per benchmark group.
pub struct Prepared {
    pub triples: TripleSet,
    pub reps: Representations,
    pub taxonomies: Taxonomies,
}

pub fn cluster_params() -> TaxonomyParams {
    AnalysisParams::default().cluster
}

pub fn prepare(nodes: usize) -> Prepared {
    let triples = dataset(nodes);
    let reps = build_representations(&triples, DEFAULT_DIMS, DEFAULT_SIM_EPS, None).expect("representations");
    let taxonomies = build_taxonomies(&reps, cluster_params()).expect("taxonomies");
    Prepared { triples, reps, taxonomies }
}
