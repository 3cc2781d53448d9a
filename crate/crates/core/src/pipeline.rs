//! End-to-end analysis of one dataset and the run manifest that drives it.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cache::{load_or_build, MatrixCache};
use crate::error::Result;
use crate::graph::WeightedGraph;
use crate::ingest::{Term, TripleSet};
use crate::measures::{global_stats, measure_sample, MeasureRecord, PathMode, VisitDistribution};
use crate::profiler::{aggregate, DatasetProfile, DEFAULT_MARGIN};
use crate::representations::{
    build_direct_graph, build_dist_matrix, build_similarity_graph, build_weighted_graph, reduce_dimensions,
    DirectGraph, DistMatrix,
};
use crate::taxonomy::{build_taxonomy, EpsilonPolicy, Taxonomy, TaxonomyParams, TaxonomySource, DEFAULT_MAX_LEVELS};
use crate::walker::{BatchPlan, Grid, Walker};

pub const DEFAULT_DIMS: usize = 250;
pub const DEFAULT_SIM_EPS: f64 = 0.5;
pub const DEFAULT_CLUSTER_PERCENTILE: f64 = 75.0;

/// Parameters shared by every dataset of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisParams {
    pub grid: Grid,
    /// Number of columns kept by the χ² reduction.
    pub dims: usize,
    /// Cosine threshold for the similarity graph.
    pub sim_eps: f64,
    pub cluster: TaxonomyParams,
    pub seed: u64,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        AnalysisParams {
            grid: Grid::default(),
            dims: DEFAULT_DIMS,
            sim_eps: DEFAULT_SIM_EPS,
            cluster: TaxonomyParams {
                epsilon: EpsilonPolicy::Percentile(DEFAULT_CLUSTER_PERCENTILE),
                max_levels: DEFAULT_MAX_LEVELS,
            },
            seed: 0,
        }
    }
}

/// Complete description of a run. Replaying a manifest over the same inputs
/// reproduces the output files byte for byte; the output directory and
/// thread count are supplied separately because they do not affect results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub inputs: Vec<PathBuf>,
    /// When set, the union of all inputs is profiled as an extra dataset
    /// under this label.
    #[serde(default)]
    pub union_label: Option<String>,
    pub params: AnalysisParams,
    pub margin: f64,
    pub strict: bool,
}

impl RunManifest {
    pub fn new(inputs: Vec<PathBuf>) -> Self {
        RunManifest { inputs, union_label: None, params: AnalysisParams::default(), margin: DEFAULT_MARGIN, strict: false }
    }
}

/// Dataset label derived from a file name: the name up to its first dot.
pub fn label_for(path: &Path) -> String {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let stem = name.split('.').next().unwrap_or_default();
    if stem.is_empty() {
        name
    } else {
        stem.to_string()
    }
}

pub struct Representations {
    pub direct: DirectGraph,
    pub full: DistMatrix,
    pub reduced: DistMatrix,
    pub gw: WeightedGraph<Term>,
    pub gs: WeightedGraph<Term>,
}

pub fn build_representations(
    triples: &TripleSet,
    dims: usize,
    sim_eps: f64,
    cache: Option<&MatrixCache>,
) -> Result<Representations> {
    let direct = build_direct_graph(triples);
    let full = load_or_build(cache, triples, || build_dist_matrix(&direct));
    let gw = build_weighted_graph(&direct, &full)?;
    let reduced = reduce_dimensions(&full, dims);
    let gs = build_similarity_graph(&reduced, sim_eps);
    Ok(Representations { direct, full, reduced, gw, gs })
}

pub struct Taxonomies {
    pub tw: Taxonomy<Term>,
    pub ts: Taxonomy<Term>,
}

pub fn build_taxonomies(reps: &Representations, params: TaxonomyParams) -> Result<Taxonomies> {
    let (tw, ts) = rayon::join(
        || build_taxonomy(&reps.gw, params, TaxonomySource::Tw),
        || build_taxonomy(&reps.gs, params, TaxonomySource::Ts),
    );
    Ok(Taxonomies { tw: tw?, ts: ts? })
}

pub struct DatasetAnalysis {
    pub profile: DatasetProfile,
    pub records: Vec<MeasureRecord>,
}

/// Seed for the sampled path statistics, kept apart from the walk seeds.
fn path_seed(master: u64) -> u64 {
    master ^ 0x7061_7468_5f73_6565
}

pub fn analyze_dataset(
    label: &str,
    triples: &TripleSet,
    params: &AnalysisParams,
    cache: Option<&MatrixCache>,
) -> Result<DatasetAnalysis> {
    let clock = Instant::now();
    let reps = build_representations(triples, params.dims, params.sim_eps, cache)?;
    log::info!(
        "{label}: {} nodes, {} G_w edges, {} G_s edges, {} contexts ({:.2?})",
        reps.gw.node_count(),
        reps.gw.edge_count(),
        reps.gs.edge_count(),
        reps.full.column_count(),
        clock.elapsed()
    );
    let taxonomies = build_taxonomies(&reps, params.cluster)?;
    log::info!(
        "{label}: taxonomy depths Tw={} Ts={} ({:.2?})",
        taxonomies.tw.levels().len(),
        taxonomies.ts.levels().len(),
        clock.elapsed()
    );
    let stats = global_stats(&reps.gw, PathMode::auto(reps.gw.node_count(), path_seed(params.seed)));
    let plan = BatchPlan::new(&params.grid, reps.gw.node_count(), stats.path_k());
    log::info!("{label}: {} walks over {} configurations ({:.2?})", plan.total_walks(), plan.configs.len(), clock.elapsed());

    let walker = Walker::new(&reps.gw, &taxonomies.tw, &taxonomies.ts);
    let batches = walker.map_batch(&plan, params.seed, |s| {
        let tax = walker.taxonomy(s.config.taxonomy);
        let values = measure_sample(&s.envelope, &s.walk, tax, &reps.reduced);
        (s.walk_index, values, s.walk.clone())
    })?;

    let mut records = Vec::with_capacity(plan.total_walks());
    let mut visits = Vec::with_capacity(plan.configs.len());
    for (config, batch) in plan.configs.iter().zip(batches) {
        visits.push(VisitDistribution::new(*config, batch.iter().map(|b| &b.2)));
        let config_hash = config.stable_hash();
        records.extend(
            batch.into_iter().map(|(walk_index, values, _)| MeasureRecord { config: *config, config_hash, walk_index, values }),
        );
    }
    let profile = aggregate(label, stats, &plan.configs, &records, visits)?;
    log::info!("{label}: done ({:.2?})", clock.elapsed());
    Ok(DatasetAnalysis { profile, records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::walker::Heuristic;

    #[test]
    fn worked_example_end_to_end() {
        let params = AnalysisParams {
            grid: Grid { lengths: vec![2], radii: vec![0, 1], heuristics: vec![Heuristic::H1], taxonomies: vec![TaxonomySource::Tw, TaxonomySource::Ts] },
            seed: 7,
            ..AnalysisParams::default()
        };
        let a = analyze_dataset("ex", &fixtures::worked_example(), &params, None).unwrap();
        assert_eq!(a.profile.summaries.len(), 4);
        assert_eq!(a.profile.stats.num_nodes, 4);
        assert_eq!(a.profile.stats.num_edges, 3);
        // Four nodes, paths of length 2 with k = 1: one walk each.
        assert!(a.profile.summaries.iter().all(|s| s.samples == 1));
        let again = analyze_dataset("ex", &fixtures::worked_example(), &params, None).unwrap();
        assert_eq!(a.profile, again.profile);
        assert_eq!(a.records, again.records);
    }

    #[test]
    fn visit_totals_are_conserved() {
        let ts = fixtures::small_world(300, 2, 0.1, 4, 9);
        let params = AnalysisParams {
            grid: Grid { lengths: vec![2, 5], radii: vec![1], heuristics: Heuristic::ALL.to_vec(), taxonomies: vec![TaxonomySource::Tw] },
            seed: 3,
            ..AnalysisParams::default()
        };
        let a = analyze_dataset("sw", &ts, &params, None).unwrap();
        for (s, v) in a.profile.summaries.iter().zip(&a.profile.visits) {
            assert_eq!(v.total_visits as usize, s.samples * (s.config.length + 1));
        }
        for r in &a.records {
            for id in crate::measures::MeasureId::ALL {
                let x = r.values.get(id);
                assert!(x.is_finite() && x >= 0.0, "{id} = {x}");
            }
            for k in 4..10 {
                assert!(r.values.0[k] <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn labels_from_paths() {
        assert_eq!(label_for(Path::new("/data/sider.nt.gz")), "sider");
        assert_eq!(label_for(Path::new("drugbank.nt")), "drugbank");
        assert_eq!(label_for(Path::new(".hidden")), ".hidden");
    }

    #[test]
    fn manifest_round_trip() {
        let mut m = RunManifest::new(vec!["a.nt".into(), "b.nt".into()]);
        m.union_label = Some("all".into());
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<RunManifest>(&json).unwrap(), m);
    }
}
