//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Every criterion is made of named checks. The process fails when any check
//! fails, except the checks listed in [`KNOWN_UNATTAINABLE`]: those are
//! still evaluated and reported as FAIL, but do not fail the run.

#[path = "../../core/tests/support/oracles.rs"]
mod oracles;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use cocoe::fixtures::{self, small_world};
use cocoe::graph::WeightedGraph;
use cocoe::ingest::{write_ntriples, Term};
use cocoe::measures::{
    articulation_points, biconnected_components, density, entropy, global_stats, GlobalStats, MeasureId, PathMode,
    VisitDistribution,
};
use cocoe::profiler::{classify, ConfigSummary, DatasetProfile, MeasureStat, Report};
use cocoe::representations::{
    build_direct_graph, build_dist_matrix, build_weighted_graph, cosine, reduce_dimensions, ContextColumn,
};
use cocoe::taxonomy::{build_taxonomy, cluster_membership, leaf_clusters, EpsilonPolicy, Scope, TaxonomyParams, TaxonomySource};
use cocoe::walker::{envelope, select_next, BatchPlan, Grid, Walker};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Checks that cannot pass as stated; see the project notes for the
/// analysis of each.
const KNOWN_UNATTAINABLE: &[&str] = &[
    // The edge weight formula yields max(chi2((r,B)), chi2((B,s))) = 9/14
    // for {B,D}, because D -r-> B contributes the (r,B) column. 1/56 would
    // also make the expected leaf cluster {A,B,D} unreachable.
    "G_w {B,D} = 1/56",
    // The golden densities carry only two significant digits.
    "SIDER D within 1e-3",
    "Diseasome D within 1e-3",
    "All D within 1e-3",
];

struct Criterion {
    id: u32,
    title: &'static str,
    checks: Vec<(String, bool, String)>,
}

impl Criterion {
    fn new(id: u32, title: &'static str) -> Self {
        Criterion { id, title, checks: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.checks.push((name.into(), ok, detail.into()));
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.1)
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn urn(s: &str) -> Term {
    Term::uri(format!("urn:{s}"))
}

fn worked_example() -> Criterion {
    let mut c = Criterion::new(1, "worked example golden values");
    let clock = Instant::now();
    let (set, _) = cocoe::ingest::parse_ntriples_str(fixtures::WORKED_EXAMPLE_NT, "ex", Default::default()).unwrap();
    let direct = build_direct_graph(&set);
    let m = build_dist_matrix(&direct);

    let expected = [
        [1, 0, 0, 0, 0, 0, 0],
        [0, 1, 1, 1, 0, 0, 1],
        [0, 0, 0, 0, 0, 1, 0],
        [1, 0, 0, 0, 1, 0, 0],
    ];
    let cols: Vec<String> = m.columns().iter().map(|c| c.to_string()).collect();
    let col_names = ["(r,B)", "(s,D)", "(t,C)", "(A,r)", "(B,s)", "(B,t)", "(D,r)"]
        .map(|s| s.replace('A', "<urn:A>").replace('B', "<urn:B>").replace('C', "<urn:C>").replace('D', "<urn:D>"))
        .map(|s| s.replace("(r,", "(<urn:r>,").replace("(s,", "(<urn:s>,").replace("(t,", "(<urn:t>,"))
        .map(|s| s.replace(",r)", ",<urn:r>)").replace(",s)", ",<urn:s>)").replace(",t)", ",<urn:t>)"));
    let rows: Vec<String> = m.rows().iter().map(|t| t.to_string()).collect();
    let dense = m.to_dense();
    let dense_ok = dense.len() == 4 && dense.iter().zip(&expected).all(|(a, b)| a.iter().map(|&x| x as i32).eq(b.iter().copied()));
    c.check(
        "4x7 matrix",
        rows == ["<urn:A>", "<urn:B>", "<urn:C>", "<urn:D>"] && cols == col_names && dense_ok,
        format!("{dense:?}"),
    );

    let e = m.total() as f64 / m.column_count() as f64;
    c.check("E(M) = 8/7", close(e, 8.0 / 7.0, 1e-12), format!("{e}"));
    let scores = m.column_scores();
    c.check("chi2((r,B)) = 9/14", close(scores[0], 9.0 / 14.0, 1e-12), format!("{}", scores[0]));
    c.check(
        "chi2(other) = 1/56",
        scores[1..].iter().all(|&s| close(s, 1.0 / 56.0, 1e-12)),
        format!("{:?}", &scores[1..]),
    );

    let full_cos = cosine(&m, &urn("A"), &urn("D")).unwrap();
    c.check("cos(A,D) full = sqrt2/2", close(full_cos, 2f64.sqrt() / 2.0, 1e-12), format!("{full_cos}"));
    let reduced = reduce_dimensions(&m, 1);
    let red_cos = cosine(&reduced, &urn("A"), &urn("D")).unwrap();
    c.check("cos(A,D) reduced = 1", close(red_cos, 1.0, 1e-12), format!("{red_cos}"));
    c.check(
        "reduced column is (r,B)",
        reduced.columns() == vec![ContextColumn::outgoing(urn("r"), urn("B"))],
        "",
    );

    let gw = build_weighted_graph(&direct, &m).unwrap();
    let w = |a: &str, b: &str| gw.weight(gw.index_of(&urn(a)).unwrap(), gw.index_of(&urn(b)).unwrap()).unwrap_or(f64::NAN);
    c.check("G_w {A,B} = 9/14", close(w("A", "B"), 9.0 / 14.0, 1e-12), format!("{}", w("A", "B")));
    c.check("G_w {B,C} = 1/56", close(w("B", "C"), 1.0 / 56.0, 1e-12), format!("{}", w("B", "C")));
    c.check("G_w {B,D} = 1/56", close(w("B", "D"), 1.0 / 56.0, 1e-12), format!("got {}", w("B", "D")));

    let params = TaxonomyParams { epsilon: EpsilonPolicy::BelowMinimum, max_levels: 16 };
    let eps = params.epsilon.threshold(&gw.edge_weights());
    let leaves: Vec<Vec<String>> = leaf_clusters(&gw, eps)
        .into_iter()
        .map(|l| l.into_iter().map(|i| gw.node(i).to_string()).collect())
        .collect();
    c.check(
        "leaf clusters {A,B,D},{B,C}",
        leaves == [vec!["<urn:A>", "<urn:B>", "<urn:D>"], vec!["<urn:B>", "<urn:C>"]],
        format!("{leaves:?}"),
    );
    let tax = build_taxonomy(&gw, params, TaxonomySource::Tw).unwrap();
    let codes = |x: &str| -> Vec<String> { tax.node_codes(&urn(x)).unwrap().iter().map(|c| c.to_string()).collect() };
    c.check(
        "tree codes",
        codes("A") == ["C3.C1"] && codes("D") == ["C3.C1"] && codes("C") == ["C3.C2"] && codes("B") == ["C3.C1", "C3.C2"],
        format!("A {:?} B {:?} C {:?} D {:?}", codes("A"), codes("B"), codes("C"), codes("D")),
    );
    let sim = |a: &str, b: &str| tax.sim_tax(&urn(a), &urn(b)).unwrap();
    c.check("sim_tax(A,C) = 0.5", sim("A", "C") == 0.5, format!("{}", sim("A", "C")));
    c.check(
        "sim_tax(A,D) = sim_tax(B,C) = 1",
        sim("A", "D") == 1.0 && sim("B", "C") == 1.0,
        format!("{} {}", sim("A", "D"), sim("B", "C")),
    );
    let elapsed = clock.elapsed();
    c.check("runtime < 1 s", elapsed < Duration::from_secs(1), format!("{elapsed:.2?}"));
    c
}

fn table_formulas() -> Criterion {
    let mut c = Criterion::new(2, "global statistics formulas vs golden rows");
    // label, |V|, |E|, printed |E|/|V|, printed D
    let rows = [
        ("SIDER", 27924usize, 96427usize, 3.453, 0.000247),
        ("Diseasome", 28102, 64172, 2.284, 0.000163),
        ("DrugBank", 219513, 361389, 1.646, 0.000015),
        ("All", 265548, 513326, 1.933, 0.000015),
    ];
    for (label, v, e, ratio, d) in rows {
        let r = e as f64 / v as f64;
        let rel = (r - ratio).abs() / ratio;
        c.check(format!("{label} |E|/|V| within 1e-3"), rel <= 1e-3, format!("{r:.6} vs {ratio} (rel {rel:.1e})"));
        let dd = density(v, e);
        let rel = (dd - d).abs() / d;
        c.check(format!("{label} D within 1e-3"), rel <= 1e-3, format!("{dd:.4e} vs {d} (rel {rel:.1e})"));
    }
    c
}

fn entropy_suite() -> Criterion {
    let mut c = Criterion::new(3, "entropy suite");
    let direct = build_direct_graph(&fixtures::worked_example());
    let gw = build_weighted_graph(&direct, &build_dist_matrix(&direct)).unwrap();
    let params = TaxonomyParams { epsilon: EpsilonPolicy::BelowMinimum, max_levels: 16 };
    let tax = build_taxonomy(&gw, params, TaxonomySource::Tw).unwrap();
    let all = [0, 1, 2, 3];
    let top = entropy(&all, &tax, Scope::Top);
    c.check("single cluster H = 0", top == 0.0, format!("{top}"));
    let spec = entropy(&all, &tax, Scope::Specific);
    c.check("specific-cluster case 0.9710", close(spec, 0.9710, 1e-4), format!("{spec:.6}"));

    let mut uniform_ok = true;
    for n in 1..=16usize {
        let g = WeightedGraph::from_edges((0..n).collect(), []);
        let t = build_taxonomy(&g, TaxonomyParams::default(), TaxonomySource::Tw).unwrap();
        let z: Vec<usize> = (0..n).collect();
        let h = entropy(&z, &t, Scope::Specific);
        uniform_ok &= close(h, (n as f64).log2(), 1e-12);
    }
    c.check("n singletons H = log2 n", uniform_ok, "n = 1..16");

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut violations = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=30);
        let p = rng.gen_range(0.0..0.4);
        let g = oracles::random_graph(n, p, false, &mut rng);
        let pct = rng.gen_range(0.0..100.0);
        let t = build_taxonomy(&g, TaxonomyParams { epsilon: EpsilonPolicy::Percentile(pct), max_levels: 16 }, TaxonomySource::Tw)
            .unwrap();
        let z: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        if z.is_empty() {
            continue;
        }
        for scope in [Scope::Top, Scope::Specific] {
            let h = entropy(&z, &t, scope);
            let cn = t.cluster_sizes(&z, scope).len();
            if !(h >= 0.0 && h <= (cn as f64).log2() + 1e-12) {
                violations += 1;
            }
        }
    }
    c.check("0 <= H <= log2 cn on 1000 taxonomies", violations == 0, format!("{violations} violations"));
    c
}

fn oracle_equivalence() -> Criterion {
    let mut c = Criterion::new(4, "oracle equivalence");
    let mut rng = ChaCha8Rng::seed_from_u64(4);

    let mut mismatches = 0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=20);
        let p = rng.gen_range(0.05..0.5);
        let g = oracles::random_graph(n, p, true, &mut rng);
        if biconnected_components(&g) != oracles::brute_blocks(&g) || articulation_points(&g) != oracles::brute_articulation(&g) {
            mismatches += 1;
        }
    }
    c.check("biconnected components, 200 graphs", mismatches == 0, format!("{mismatches} mismatches"));

    let mut mismatches = 0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=10);
        let p = rng.gen_range(0.1..0.8);
        let g = oracles::random_graph(n, p, true, &mut rng);
        let weights = g.edge_weights();
        let eps = match rng.gen_range(0..3) {
            0 => EpsilonPolicy::Percentile(rng.gen_range(0.0..100.0)).threshold(&weights),
            1 => EpsilonPolicy::BelowMinimum.threshold(&weights),
            _ => rng.gen_range(0..16) as f64 / 16.0,
        };
        for s in 0..n {
            if cluster_membership(&g, s, eps) != oracles::brute_membership(&g, s, eps) {
                mismatches += 1;
            }
        }
    }
    c.check("cluster expansion, 200 graphs", mismatches == 0, format!("{mismatches} mismatches"));

    let mut mismatches = 0;
    for i in 0..60 {
        let n = rng.gen_range(2..=200);
        let p = rng.gen_range(0.5..4.0) / n as f64;
        let g = oracles::random_graph(n, p.min(1.0), false, &mut rng);
        let exact = global_stats(&g, PathMode::Exact);
        let estimate = global_stats(&g, PathMode::Estimate { sources: n, seed: i });
        let (d, l) = oracles::floyd_path_stats(&g);
        if exact != estimate || exact.diameter != d || !close(exact.avg_shortest_path, l, 1e-12) {
            mismatches += 1;
        }
    }
    c.check("path statistics, 60 graphs <= 200 nodes", mismatches == 0, format!("{mismatches} mismatches"));
    c
}

fn cocoe_bin() -> &'static str {
    env!("CARGO_BIN_EXE_cocoe")
}

fn run_cli(args: &[&str]) -> (bool, Option<i32>, String) {
    let out = Command::new(cocoe_bin()).args(args).env("RUST_LOG", "warn").output().expect("cocoe runs");
    (out.status.success(), out.status.code(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn read_tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn write_dataset(path: &Path, nodes: usize, half_degree: usize, seed: u64) {
    let set = small_world(nodes, half_degree, 0.1, 20, seed);
    let file = std::io::BufWriter::new(fs::File::create(path).unwrap());
    write_ntriples(&set, file).unwrap();
}

fn walk_properties() -> Criterion {
    let mut c = Criterion::new(5, "walk properties and determinism");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut walks, mut bad_adjacency, mut bad_length, mut bad_envelope, mut bad_visits) = (0, 0, 0, 0, 0);
    for graph_index in 0..20u64 {
        let n = rng.gen_range(20..200);
        let g = oracles::random_graph(n, rng.gen_range(1.5..6.0) / n as f64, false, &mut rng);
        let tw = build_taxonomy(&g, TaxonomyParams::default(), TaxonomySource::Tw).unwrap();
        let ts = build_taxonomy(&g, TaxonomyParams { epsilon: EpsilonPolicy::Percentile(40.0), max_levels: 16 }, TaxonomySource::Ts)
            .unwrap();
        let walker = Walker::new(&g, &tw, &ts);
        let grid = Grid::default();
        let configs = grid.configs();
        let plan = BatchPlan { counts: vec![11; configs.len()], configs, path_k: 1 };
        let samples = walker.map_batch(&plan, graph_index, |s| s.clone()).unwrap();
        for (config, batch) in plan.configs.iter().zip(&samples) {
            let visits = VisitDistribution::new(*config, batch.iter().map(|s| &s.walk));
            if visits.total_visits as usize != batch.len() * (config.length + 1) || batch.len() != 11 {
                bad_visits += 1;
            }
            for s in batch {
                walks += 1;
                if s.walk.nodes.len() != config.length + 1 {
                    bad_length += 1;
                }
                if s.walk.nodes.windows(2).any(|w| g.weight(w[0], w[1]).is_none()) {
                    bad_adjacency += 1;
                }
                let wider = envelope(&g, &s.walk, config.radius + 1);
                let walk_inside = s.walk.nodes.iter().all(|v| s.envelope.nodes.binary_search(v).is_ok());
                let nested = s.envelope.nodes.iter().all(|v| wider.nodes.binary_search(v).is_ok());
                if !walk_inside || !nested {
                    bad_envelope += 1;
                }
            }
        }
    }
    c.check("at least 10^4 walks", walks >= 10_000, format!("{walks} walks"));
    c.check("adjacency", bad_adjacency == 0, format!("{bad_adjacency} bad walks"));
    c.check("length l+1", bad_length == 0, format!("{bad_length} bad walks"));
    c.check("envelope r-monotonicity", bad_envelope == 0, format!("{bad_envelope} bad envelopes"));
    c.check("visit-count conservation", bad_visits == 0, format!("{bad_visits} bad configurations"));

    let mut draw_rng = ChaCha8Rng::seed_from_u64(55);
    let draws = 100_000;
    let first = (0..draws).filter(|_| select_next(&[0, 1], &mut draw_rng).unwrap() == 0).count();
    let p = first as f64 / draws as f64;
    c.check("rank-1 probability 0.667 +- 0.01", close(p, 2.0 / 3.0, 0.01), format!("{p:.4}"));

    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("sw.nt");
    write_dataset(&input, 3000, 3, 8);
    let input_s = input.to_str().unwrap();
    let out = |name: &str| dir.path().join(name);
    let base = ["analyze", "--input", input_s, "--seed", "11", "--records"];
    let (ok1, _, err1) = run_cli(&[&base[..], &["--threads", "1", "--out", out("t1").to_str().unwrap()]].concat());
    let (ok8, _, err8) = run_cli(&[&base[..], &["--threads", "8", "--out", out("t8").to_str().unwrap()]].concat());
    let manifest = out("t1").join("manifest.json");
    let (ok_replay, _, err_replay) = run_cli(&[
        "analyze",
        "--manifest",
        manifest.to_str().unwrap(),
        "--records",
        "--threads",
        "3",
        "--out",
        out("replay").to_str().unwrap(),
    ]);
    c.check("CLI runs succeed", ok1 && ok8 && ok_replay, format!("{err1}{err8}{err_replay}"));
    if ok1 && ok8 && ok_replay {
        let t1 = read_tree(&out("t1"));
        c.check(
            "threads 1 vs 8 byte-identical",
            t1 == read_tree(&out("t8")),
            format!("{} files", t1.len()),
        );
        c.check("manifest replay byte-identical", t1 == read_tree(&out("replay")), "");
    }
    c
}

fn stats_stub() -> GlobalStats {
    GlobalStats {
        num_nodes: 10,
        num_edges: 20,
        edge_node_ratio: 2.0,
        density: 0.44,
        diameter: 3,
        avg_shortest_path: 1.8,
        num_components: 1,
        exact_paths: true,
    }
}

fn synthetic(label: &str, mean: impl Fn(MeasureId) -> f64) -> DatasetProfile {
    let summaries = Grid::default()
        .configs()
        .into_iter()
        .map(|config| ConfigSummary {
            config,
            samples: 10,
            measures: MeasureId::ALL.iter().map(|&id| (id, MeasureStat { mean: mean(id), sd: 0.1 })).collect(),
        })
        .collect();
    DatasetProfile { label: label.into(), stats: stats_stub(), summaries, visits: Vec::new() }
}

fn classification_behaviour() -> Criterion {
    use cocoe::measures::Family;
    let mut c = Criterion::new(6, "classification behaviour");
    let base = |id: MeasureId| 0.3 + id.index() as f64 / 20.0;
    let dominant = synthetic("dominant", |id| if id.family() == Family::Entropy { 2.0 * base(id) } else { base(id) });
    let others = [synthetic("x", base), synthetic("y", base)];
    let profiles = vec![dominant, others[0].clone(), others[1].clone()];
    let result = classify(&profiles, 0.05).unwrap();
    let symbols: Vec<String> = result.iter().map(|r| r.classification.to_string()).collect();
    c.check("2x entropy dominance gives ↑, equal gives −", symbols == ["−−↑", "−−−", "−−−"], format!("{symbols:?}"));

    let identical = vec![synthetic("a", base), synthetic("b", base), synthetic("c", base)];
    let symbols: Vec<String> = classify(&identical, 0.05).unwrap().iter().map(|r| r.classification.to_string()).collect();
    c.check("identical datasets all −", symbols.iter().all(|s| s == "−−−"), format!("{symbols:?}"));

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut changed = 0;
    for _ in 0..200 {
        let raw: Vec<Vec<f64>> = (0..4).map(|_| (0..14).map(|_| rng.gen_range(0.01..5.0)).collect()).collect();
        let scale = 10f64.powf(rng.gen_range(-3.0..3.0));
        let build = |k: f64| -> Vec<DatasetProfile> {
            raw.iter().enumerate().map(|(d, v)| synthetic(&format!("d{d}"), |id| k * v[id.index()])).collect()
        };
        if classify(&build(1.0), 0.05).unwrap() != classify(&build(scale), 0.05).unwrap() {
            changed += 1;
        }
    }
    c.check("invariant under positive rescaling", changed == 0, format!("{changed} of 200 changed"));

    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for p in &profiles {
        let path = dir.path().join(format!("{}.json", p.label));
        fs::write(&path, serde_json::to_string(&Report::new(vec![p.clone()], None)).unwrap()).unwrap();
        files.push(path.to_str().unwrap().to_string());
    }
    let out = dir.path().join("cmp");
    let mut args = vec!["compare", "--out", out.to_str().unwrap()];
    args.extend(files.iter().map(|s| s.as_str()));
    let (ok, _, err) = run_cli(&args);
    let written = fs::read_to_string(out.join("classification.json")).unwrap_or_default();
    c.check("compare writes classification.json", ok && written.contains('↑'), err);
    let (_, code, _) = run_cli(&["compare", &files[0], &files[1]]);
    c.check("compare with 2 profiles exits 2", code == Some(2), format!("{code:?}"));
    c
}

fn peak_child_rss_bytes() -> u64 {
    // SAFETY: getrusage only writes into the struct we pass.
    let usage = unsafe {
        let mut u: libc::rusage = std::mem::zeroed();
        libc::getrusage(libc::RUSAGE_CHILDREN, &mut u);
        u
    };
    // Linux reports kilobytes.
    usage.ru_maxrss as u64 * 1024
}

fn scale_smoke() -> Criterion {
    let mut c = Criterion::new(7, "scale smoke test");
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("sw100k.nt");
    write_dataset(&input, 100_000, 3, 77);
    let out = dir.path().join("out");
    let clock = Instant::now();
    let (ok, _, err) = run_cli(&["analyze", "--input", input.to_str().unwrap(), "--threads", "4", "--out", out.to_str().unwrap()]);
    let elapsed = clock.elapsed();
    let rss = peak_child_rss_bytes();
    c.check("pipeline succeeds", ok, err);
    let report = Report::load(&out.join("profile.json"));
    let detail = match &report {
        Ok(r) => format!(
            "{} nodes, {} edges, {} configs",
            r.profiles[0].stats.num_nodes,
            r.profiles[0].stats.num_edges,
            r.profiles[0].summaries.len()
        ),
        Err(e) => e.to_string(),
    };
    let size_ok = report
        .map(|r| r.profiles[0].stats.num_nodes == 100_000 && r.profiles[0].stats.num_edges >= 299_000 && r.profiles[0].summaries.len() == 48)
        .unwrap_or(false);
    c.check("10^5 nodes, 3*10^5 edges, 48 configs", size_ok, detail);
    c.check("under 30 minutes", elapsed < Duration::from_secs(30 * 60), format!("{elapsed:.1?}"));
    c.check("peak memory under 4 GB", rss < 4 << 30, format!("{:.0} MiB", rss as f64 / (1 << 20) as f64));
    c
}

fn main() {
    let criteria: Vec<fn() -> Criterion> = vec![
        worked_example,
        table_formulas,
        entropy_suite,
        oracle_equivalence,
        walk_properties,
        classification_behaviour,
        scale_smoke,
    ];
    let mut unexpected = 0;
    for run in criteria {
        let c = run();
        println!("AC{} {}: {}", c.id, if c.passed() { "PASS" } else { "FAIL" }, c.title);
        for (name, ok, detail) in &c.checks {
            let known = KNOWN_UNATTAINABLE.contains(&name.as_str());
            if !ok {
                if !known {
                    unexpected += 1;
                }
                let tag = if known { "FAIL (known)" } else { "FAIL" };
                println!("    {tag}: {name}: {detail}");
            } else if known {
                println!("    note: {name} now passes: {detail}");
            } else {
                println!("    ok: {name}{}", if detail.is_empty() { String::new() } else { format!(": {detail}") });
            }
        }
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected failing check(s)");
        std::process::exit(1);
    }
}
