use std::hint::black_box;

use cocoe::ingest::{parse_ntriples_str, write_ntriples};
use cocoe::measures::{biconnected_components, global_stats, PathMode};
use cocoe::pipeline::{analyze_dataset, DEFAULT_DIMS, DEFAULT_SIM_EPS};
use cocoe::representations::{build_direct_graph, build_dist_matrix, build_similarity_graph, reduce_dimensions};
use cocoe::taxonomy::build_taxonomy;
use cocoe::walker::{BatchPlan, Grid, Walker};
use cocoe::{AnalysisParams, TaxonomySource};
use cocoe_bench::{cluster_params, dataset, prepare};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

const SIZES: [usize; 2] = [2_000, 20_000];

fn ingest(c: &mut Criterion) {
    let mut group = c.benchmark_group("ingest");
    for n in SIZES {
        let mut text = Vec::new();
        write_ntriples(&dataset(n), &mut text).unwrap();
        let text = String::from_utf8(text).unwrap();
        group.throughput(Throughput::Bytes(text.len() as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &text, |b, text| {
            b.iter(|| parse_ntriples_str(black_box(text), "bench", Default::default()).unwrap())
        });
    }
    group.finish();
}

fn representations(c: &mut Criterion) {
    let mut group = c.benchmark_group("representations");
    group.sample_size(10);
    for n in SIZES {
        let triples = dataset(n);
        let direct = build_direct_graph(&triples);
        group.bench_with_input(BenchmarkId::new("dist_matrix", n), &direct, |b, g| b.iter(|| build_dist_matrix(g)));
        let reduced = reduce_dimensions(&build_dist_matrix(&direct), DEFAULT_DIMS);
        group.bench_with_input(BenchmarkId::new("similarity_graph", n), &reduced, |b, m| {
            b.iter(|| build_similarity_graph(m, DEFAULT_SIM_EPS))
        });
    }
    group.finish();
}

fn taxonomy(c: &mut Criterion) {
    let mut group = c.benchmark_group("taxonomy");
    group.sample_size(10);
    for n in SIZES {
        let p = prepare(n);
        group.bench_with_input(BenchmarkId::new("tw", n), &p.reps.gw, |b, g| {
            b.iter(|| build_taxonomy(g, cluster_params(), TaxonomySource::Tw).unwrap())
        });
    }
    group.finish();
}

fn graph_measures(c: &mut Criterion) {
    let mut group = c.benchmark_group("graph");
    group.sample_size(10);
    for n in SIZES {
        let p = prepare(n);
        group.bench_with_input(BenchmarkId::new("biconnected", n), &p.reps.gw, |b, g| b.iter(|| biconnected_components(g)));
        group.bench_with_input(BenchmarkId::new("path_estimate", n), &p.reps.gw, |b, g| {
            b.iter(|| global_stats(g, PathMode::Estimate { sources: 100, seed: 1 }))
        });
    }
    group.finish();
}

fn walks(c: &mut Criterion) {
    let mut group = c.benchmark_group("walks");
    group.sample_size(10);
    for n in SIZES {
        let p = prepare(n);
        let walker = Walker::new(&p.reps.gw, &p.taxonomies.tw, &p.taxonomies.ts);
        let plan = BatchPlan::new(&Grid::default(), n, 1);
        group.throughput(Throughput::Elements(plan.total_walks() as u64));
        group.bench_function(BenchmarkId::new("default_grid", n), |b| b.iter(|| walker.run_batch(&plan, 0).unwrap()));
    }
    group.finish();
}

fn end_to_end(c: &mut Criterion) {
    let mut group = c.benchmark_group("analyze");
    group.sample_size(10);
    let triples = dataset(SIZES[0]);
    let params = AnalysisParams::default();
    group.bench_function(BenchmarkId::from_parameter(SIZES[0]), |b| {
        b.iter(|| analyze_dataset("bench", &triples, &params, None).unwrap())
    });
    group.finish();
}

criterion_group!(benches, ingest, representations, taxonomy, graph_measures, walks, end_to_end);
criterion_main!(benches);
