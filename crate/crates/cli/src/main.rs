use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cocoe::taxonomy::{EpsilonPolicy, TaxonomyParams, DEFAULT_MAX_LEVELS};
use cocoe::walker::{Grid, Heuristic};
use cocoe::{RunManifest, TaxonomySource};

mod commands;

#[derive(Parser)]
#[command(name = "cocoe", version, about = "Profile RDF datasets by complexity, coherence and entropy")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write profile files.
    Analyze(AnalyzeArgs),
    /// Classify datasets from three or more profile files.
    Compare(CompareArgs),
    /// Print global graph statistics of a dataset.
    Stats(InputArgs),
    /// Print the cluster taxonomy of a dataset.
    ClusterDump(ClusterDumpArgs),
    /// Print sample walks over a dataset.
    WalkDump(WalkDumpArgs),
}

#[derive(Args, Clone)]
struct InputArgs {
    /// N-Triples file, optionally gzip-compressed.
    #[arg(long)]
    input: PathBuf,

    /// Abort on the first malformed line instead of skipping it.
    #[arg(long)]
    strict: bool,
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Number of χ²-ranked context columns kept for cosine similarity.
    #[arg(long, default_value_t = cocoe::pipeline::DEFAULT_DIMS)]
    dims: usize,

    /// Cosine threshold for similarity-graph edges.
    #[arg(long, default_value_t = cocoe::pipeline::DEFAULT_SIM_EPS)]
    sim_eps: f64,

    /// Percentile of edge weights used as the clustering threshold.
    #[arg(long, default_value_t = cocoe::pipeline::DEFAULT_CLUSTER_PERCENTILE)]
    cluster_eps_percentile: f64,
}

impl ModelArgs {
    fn validate(&self) -> Result<(), Usage> {
        if self.dims == 0 {
            return Err(Usage("--dims must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.sim_eps) {
            return Err(Usage("--sim-eps must lie in [0, 1]".into()));
        }
        if !(0.0..=100.0).contains(&self.cluster_eps_percentile) {
            return Err(Usage("--cluster-eps-percentile must lie in [0, 100]".into()));
        }
        Ok(())
    }

    fn taxonomy_params(&self) -> TaxonomyParams {
        TaxonomyParams { epsilon: EpsilonPolicy::Percentile(self.cluster_eps_percentile), max_levels: DEFAULT_MAX_LEVELS }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input datasets; each file is profiled separately.
    #[arg(long, num_args = 1.., required_unless_present = "manifest", conflicts_with = "manifest")]
    input: Vec<PathBuf>,

    /// Replay a manifest written by an earlier run.
    #[arg(long)]
    manifest: Option<PathBuf>,

    /// Walk lengths.
    #[arg(long, value_delimiter = ',', default_values_t = [2, 10, 20])]
    lengths: Vec<usize>,

    /// Envelope radii.
    #[arg(long, value_delimiter = ',', default_values_t = [0, 1])]
    radii: Vec<usize>,

    /// Walk heuristics.
    #[arg(long, value_delimiter = ',', default_values = ["H1", "H2", "H3", "H4"])]
    heuristics: Vec<Heuristic>,

    #[command(flatten)]
    model: ModelArgs,

    /// Master seed for all randomness.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output directory.
    #[arg(long, default_value = "cocoe-out")]
    out: PathBuf,

    /// Relative margin for "distinctly higher" in the classification.
    #[arg(long, default_value_t = cocoe::profiler::DEFAULT_MARGIN)]
    margin: f64,

    /// Also profile the union of all inputs under this label.
    #[arg(long)]
    union: Option<String>,

    /// Write per-walk measure records to records/<dataset>.jsonl.
    #[arg(long)]
    records: bool,

    /// Abort on the first malformed line instead of skipping it.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// profile.json files; all datasets they contain are compared.
    #[arg(required = true)]
    profiles: Vec<PathBuf>,

    #[arg(long, default_value_t = cocoe::profiler::DEFAULT_MARGIN)]
    margin: f64,

    /// Directory for classification.json.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum TaxonomyArg {
    Tw,
    Ts,
}

impl From<TaxonomyArg> for TaxonomySource {
    fn from(t: TaxonomyArg) -> Self {
        match t {
            TaxonomyArg::Tw => TaxonomySource::Tw,
            TaxonomyArg::Ts => TaxonomySource::Ts,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DumpFormat {
    /// `node<TAB>codes` lines.
    Codes,
    /// Nested dendrogram as JSON.
    Json,
}

#[derive(Args)]
struct ClusterDumpArgs {
    #[command(flatten)]
    input: InputArgs,

    #[command(flatten)]
    model: ModelArgs,

    #[arg(long, value_enum, default_value = "tw")]
    taxonomy: TaxonomyArg,

    #[arg(long, value_enum, default_value = "codes")]
    format: DumpFormat,
}

#[derive(Args)]
struct WalkDumpArgs {
    #[command(flatten)]
    input: InputArgs,

    #[command(flatten)]
    model: ModelArgs,

    #[arg(long, default_value = "H1")]
    heuristic: Heuristic,

    #[arg(long, value_enum, default_value = "tw")]
    taxonomy: TaxonomyArg,

    #[arg(long, default_value_t = 10)]
    length: usize,

    #[arg(long, default_value_t = 0)]
    radius: usize,

    /// Number of walks.
    #[arg(long, default_value_t = 5)]
    count: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Invalid arguments; reported with exit status 2.
#[derive(Debug)]
pub(crate) struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn manifest_from(args: &AnalyzeArgs) -> Result<RunManifest> {
    if let Some(path) = &args.manifest {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading manifest {}", path.display()))?;
        return serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()));
    }
    if args.lengths.is_empty() || args.lengths.contains(&0) {
        return Err(Usage("--lengths must be positive integers".into()).into());
    }
    if args.radii.is_empty() || args.heuristics.is_empty() {
        return Err(Usage("--radii and --heuristics must not be empty".into()).into());
    }
    if args.margin < 0.0 {
        return Err(Usage("--margin must be non-negative".into()).into());
    }
    args.model.validate()?;
    let mut manifest = RunManifest::new(args.input.clone());
    manifest.union_label = args.union.clone();
    manifest.params.grid = Grid {
        lengths: args.lengths.clone(),
        radii: args.radii.clone(),
        heuristics: args.heuristics.clone(),
        taxonomies: vec![TaxonomySource::Tw, TaxonomySource::Ts],
    };
    manifest.params.dims = args.model.dims;
    manifest.params.sim_eps = args.model.sim_eps;
    manifest.params.cluster = args.model.taxonomy_params();
    manifest.params.seed = args.seed;
    manifest.margin = args.margin;
    manifest.strict = args.strict;
    Ok(manifest)
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Usage("--threads must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match cli.command {
        Command::Analyze(args) => {
            let manifest = manifest_from(&args)?;
            commands::analyze(&manifest, &args.out, args.records)
        }
        Command::Compare(args) => commands::compare(&args.profiles, args.margin, &args.out),
        Command::Stats(args) => commands::stats(&args.input, args.strict),
        Command::ClusterDump(args) => {
            args.model.validate()?;
            commands::cluster_dump(
                &args.input.input,
                args.input.strict,
                &dump_params(&args.model),
                args.taxonomy.into(),
                matches!(args.format, DumpFormat::Json),
            )
        }
        Command::WalkDump(args) => {
            args.model.validate()?;
            if args.length == 0 {
                return Err(Usage("--length must be positive".into()).into());
            }
            let config = cocoe::WalkConfig {
                heuristic: args.heuristic,
                taxonomy: args.taxonomy.into(),
                length: args.length,
                radius: args.radius,
            };
            commands::walk_dump(&args.input.input, args.input.strict, &dump_params(&args.model), config, args.count, args.seed)
        }
    }
}

fn dump_params(model: &ModelArgs) -> cocoe::AnalysisParams {
    cocoe::AnalysisParams {
        dims: model.dims,
        sim_eps: model.sim_eps,
        cluster: model.taxonomy_params(),
        ..Default::default()
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
