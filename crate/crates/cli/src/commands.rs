use std::collections::BTreeSet;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use cocoe::cache::MatrixCache;
use cocoe::ingest::{merge_datasets, read_ntriples_file, ParseOptions, TripleSet};
use cocoe::measures::{global_stats, PathMode};
use cocoe::pipeline::{analyze_dataset, build_representations, build_taxonomies, label_for};
use cocoe::profiler::{classification_table, classify, emit_report, write_classification, Report};
use cocoe::representations::{build_direct_graph, build_dist_matrix, build_weighted_graph};
use cocoe::taxonomy::build_taxonomy;
use cocoe::walker::{envelope, walk_seed, Walker};
use cocoe::{AnalysisParams, RunManifest, TaxonomySource, WalkConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::Usage;

fn load(path: &Path, label: &str, strict: bool) -> Result<TripleSet> {
    let clock = Instant::now();
    let (set, stats) = read_ntriples_file(path, label, ParseOptions { strict })?;
    if stats.skipped > 0 {
        log::warn!("{}: skipped {} malformed lines", path.display(), stats.skipped);
    }
    log::info!("{}: {} triples ({:.2?})", path.display(), set.len(), clock.elapsed());
    Ok(set)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn analyze(manifest: &RunManifest, out: &Path, records: bool) -> Result<()> {
    let clock = Instant::now();
    let mut labels: Vec<String> = manifest.inputs.iter().map(|p| label_for(p)).collect();
    labels.extend(manifest.union_label.clone());
    let unique: BTreeSet<&String> = labels.iter().collect();
    if unique.len() != labels.len() {
        return Err(Usage(format!("dataset labels must be unique, got {labels:?}")).into());
    }

    let cache = MatrixCache::from_env();
    let mut sets = Vec::with_capacity(manifest.inputs.len());
    for (path, label) in manifest.inputs.iter().zip(&labels) {
        sets.push(load(path, label, manifest.strict)?);
    }
    if let Some(label) = &manifest.union_label {
        let union = merge_datasets(&sets, label);
        sets.push(union);
    }

    let mut profiles = Vec::with_capacity(sets.len());
    let mut streams = Vec::new();
    for set in &sets {
        let analysis = analyze_dataset(&set.label, set, &manifest.params, cache.as_ref())
            .with_context(|| format!("analysing {}", set.label))?;
        profiles.push(analysis.profile);
        if records {
            streams.push((set.label.clone(), analysis.records));
        }
    }

    let classification = if profiles.len() >= 3 { Some(classify(&profiles, manifest.margin)?) } else { None };
    let report = Report::new(profiles, classification);
    emit_report(out, &report)?;
    write_json(&out.join("manifest.json"), manifest)?;
    if records {
        let dir = out.join("records");
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        for (label, stream) in streams {
            let path = dir.join(format!("{label}.jsonl"));
            let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            for r in &stream {
                serde_json::to_writer(&mut w, r)?;
                w.write_all(b"\n")?;
            }
            w.flush().with_context(|| format!("writing {}", path.display()))?;
        }
    }
    if let Some(classification) = &report.classification {
        print!("{}", classification_table(classification));
    }
    log::info!("wrote {} ({:.2?})", out.display(), clock.elapsed());
    Ok(())
}

pub fn compare(paths: &[PathBuf], margin: f64, out: &Path) -> Result<()> {
    let mut profiles = Vec::new();
    for path in paths {
        let report = Report::load(path)?;
        profiles.extend(report.profiles);
    }
    if profiles.len() < 3 {
        return Err(Usage(format!("compare needs at least 3 datasets, got {}", profiles.len())).into());
    }
    let classification = classify(&profiles, margin)?;
    print!("{}", classification_table(&classification));
    write_classification(out, &classification)?;
    Ok(())
}

pub fn stats(input: &Path, strict: bool) -> Result<()> {
    let set = load(input, &label_for(input), strict)?;
    let direct = build_direct_graph(&set);
    let gw = build_weighted_graph(&direct, &build_dist_matrix(&direct))?;
    let s = global_stats(&gw, PathMode::auto(gw.node_count(), 0));
    let stdout = io::stdout();
    let mut w = stdout.lock();
    writeln!(w, "|V|\t{}", s.num_nodes)?;
    writeln!(w, "|E|\t{}", s.num_edges)?;
    writeln!(w, "|E|/|V|\t{:.3}", s.edge_node_ratio)?;
    writeln!(w, "D\t{:.6}", s.density)?;
    writeln!(w, "d\t{}", s.diameter)?;
    writeln!(w, "l_G\t{:.3}", s.avg_shortest_path)?;
    writeln!(w, "|C|\t{}", s.num_components)?;
    if !s.exact_paths {
        writeln!(w, "# d and l_G estimated from sampled sources")?;
    }
    Ok(())
}

pub fn cluster_dump(input: &Path, strict: bool, params: &AnalysisParams, source: TaxonomySource, json: bool) -> Result<()> {
    let set = load(input, &label_for(input), strict)?;
    if set.is_empty() {
        bail!("{}: no triples to cluster", input.display());
    }
    let reps = build_representations(&set, params.dims, params.sim_eps, MatrixCache::from_env().as_ref())?;
    let graph = match source {
        TaxonomySource::Tw => &reps.gw,
        TaxonomySource::Ts => &reps.gs,
    };
    let tax = build_taxonomy(graph, params.cluster, source)?;
    let stdout = io::stdout();
    let mut w = BufWriter::new(stdout.lock());
    if json {
        serde_json::to_writer_pretty(&mut w, &tax.dendrogram())?;
        writeln!(w)?;
    } else {
        tax.write_code_table(&mut w)?;
    }
    w.flush()?;
    Ok(())
}

pub fn walk_dump(
    input: &Path,
    strict: bool,
    params: &AnalysisParams,
    config: WalkConfig,
    count: usize,
    seed: u64,
) -> Result<()> {
    let set = load(input, &label_for(input), strict)?;
    if set.is_empty() {
        bail!("{}: no triples to walk", input.display());
    }
    let reps = build_representations(&set, params.dims, params.sim_eps, MatrixCache::from_env().as_ref())?;
    let taxonomies = build_taxonomies(&reps, params.cluster)?;
    let walker = Walker::new(&reps.gw, &taxonomies.tw, &taxonomies.ts);
    let stdout = io::stdout();
    let mut w = BufWriter::new(stdout.lock());
    for i in 0..count {
        let mut rng = ChaCha8Rng::seed_from_u64(walk_seed(seed, &config, i));
        let walk = walker.run_walk(&config, &mut rng)?;
        let env = envelope(&reps.gw, &walk, config.radius);
        let nodes: Vec<String> = walk.nodes.iter().map(|&v| reps.gw.node(v).to_string()).collect();
        let line = serde_json::json!({
            "config": config.to_string(),
            "walk_index": i,
            "nodes": nodes,
            "envelope_size": env.nodes.len(),
        });
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}
