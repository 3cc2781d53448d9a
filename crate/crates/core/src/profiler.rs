//! Per-configuration summaries, dataset comparison and report files.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{Family, GlobalStats, MeasureId, MeasureRecord, VisitDistribution};
use crate::walker::WalkConfig;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeasureStat {
    pub mean: f64,
    /// Sample standard deviation; zero for a single sample.
    pub sd: f64,
}

impl MeasureStat {
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return MeasureStat::default();
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        if n == 1 {
            return MeasureStat { mean, sd: 0.0 };
        }
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        MeasureStat { mean, sd: (ss / (n - 1) as f64).sqrt() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigSummary {
    pub config: WalkConfig,
    pub samples: usize,
    pub measures: BTreeMap<MeasureId, MeasureStat>,
}

impl ConfigSummary {
    pub fn mean(&self, id: MeasureId) -> f64 {
        self.measures[&id].mean
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetProfile {
    pub label: String,
    pub stats: GlobalStats,
    /// One entry per grid configuration, in grid order.
    pub summaries: Vec<ConfigSummary>,
    pub visits: Vec<VisitDistribution>,
}

impl DatasetProfile {
    pub fn configs(&self) -> Vec<WalkConfig> {
        self.summaries.iter().map(|s| s.config).collect()
    }
}

/// Averages the sample stream per configuration. Summaries follow the order
/// of `grid`; within a configuration samples are taken in walk order.
pub fn aggregate(
    label: impl Into<String>,
    stats: GlobalStats,
    grid: &[WalkConfig],
    records: &[MeasureRecord],
    visits: Vec<VisitDistribution>,
) -> Result<DatasetProfile> {
    let mut grouped: BTreeMap<WalkConfig, Vec<&MeasureRecord>> = BTreeMap::new();
    for r in records {
        grouped.entry(r.config).or_default().push(r);
    }
    let mut summaries = Vec::with_capacity(grid.len());
    for config in grid {
        let mut group = grouped.remove(config).ok_or_else(|| Error::IncompleteGrid(config.to_string()))?;
        group.sort_by_key(|r| r.walk_index);
        let measures = MeasureId::ALL
            .iter()
            .map(|&id| {
                let values: Vec<f64> = group.iter().map(|r| r.values.get(id)).collect();
                (id, MeasureStat::from_values(&values))
            })
            .collect();
        summaries.push(ConfigSummary { config: *config, samples: group.len(), measures });
    }
    Ok(DatasetProfile { label: label.into(), stats, summaries, visits })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Trend {
    #[serde(rename = "↑")]
    Up,
    #[serde(rename = "↓")]
    Down,
    #[serde(rename = "−")]
    Flat,
}

impl fmt::Display for Trend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trend::Up => "↑",
            Trend::Down => "↓",
            Trend::Flat => "−",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub complexity: Trend,
    pub coherence: Trend,
    pub entropy: Trend,
}

impl Classification {
    pub fn get(&self, family: Family) -> Trend {
        match family {
            Family::Complexity => self.complexity,
            Family::Coherence => self.coherence,
            Family::Entropy => self.entropy,
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.complexity, self.coherence, self.entropy)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetClassification {
    pub label: String,
    pub classification: Classification,
}

/// `a` is distinctly higher than `b`: it exceeds `b` by more than
/// `margin · |b|`.
pub fn distinctly_higher(a: f64, b: f64, margin: f64) -> bool {
    a - b > margin * b.abs()
}

/// Compares every dataset against the others over all `(config, measure)`
/// settings of each family. A dataset gets ↑ for a family when it is
/// distinctly higher than at least two other datasets in more than half of
/// the family's settings, ↓ when it is distinctly lower in more than half,
/// and − otherwise (including when both hold).
pub fn classify(profiles: &[DatasetProfile], margin: f64) -> Result<Vec<DatasetClassification>> {
    if profiles.len() < 3 {
        return Err(Error::TooFewDatasets(profiles.len()));
    }
    let grid = profiles[0].configs();
    for p in &profiles[1..] {
        if p.configs() != grid {
            return Err(Error::GridMismatch(format!("{} vs {}", profiles[0].label, p.label)));
        }
    }
    let trend = |x: usize, family: Family| -> Trend {
        let mut settings = 0usize;
        let mut higher = 0usize;
        let mut lower = 0usize;
        for c in 0..grid.len() {
            for id in MeasureId::ALL.iter().filter(|m| m.family() == family) {
                settings += 1;
                let mine = profiles[x].summaries[c].mean(*id);
                let others = profiles.iter().enumerate().filter(|&(y, _)| y != x).map(|(_, p)| p.summaries[c].mean(*id));
                let (mut above, mut below) = (0, 0);
                for theirs in others {
                    above += distinctly_higher(mine, theirs, margin) as usize;
                    below += distinctly_higher(theirs, mine, margin) as usize;
                }
                higher += (above >= 2) as usize;
                lower += (below >= 2) as usize;
            }
        }
        let up = 2 * higher > settings;
        let down = 2 * lower > settings;
        match (up, down) {
            (true, false) => Trend::Up,
            (false, true) => Trend::Down,
            _ => Trend::Flat,
        }
    };
    Ok((0..profiles.len())
        .map(|x| DatasetClassification {
            label: profiles[x].label.clone(),
            classification: Classification {
                complexity: trend(x, Family::Complexity),
                coherence: trend(x, Family::Coherence),
                entropy: trend(x, Family::Entropy),
            },
        })
        .collect())
}

/// Everything written to `profile.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub profiles: Vec<DatasetProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<Vec<DatasetClassification>>,
}

impl Report {
    pub fn new(profiles: Vec<DatasetProfile>, classification: Option<Vec<DatasetClassification>>) -> Self {
        Report { schema_version: SCHEMA_VERSION, profiles, classification }
    }

    pub fn load(path: &Path) -> Result<Report> {
        let text = fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::file(path, e))
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// `dataset,config,heuristic,taxonomy,length,radius,samples` followed by
/// the mean and standard deviation of every measure.
pub fn measures_csv(profiles: &[DatasetProfile]) -> String {
    let mut out = String::from("dataset,config,heuristic,taxonomy,length,radius,samples");
    for id in MeasureId::ALL {
        write!(out, ",{id}_mean,{id}_sd").unwrap();
    }
    out.push('\n');
    for p in profiles {
        for s in &p.summaries {
            let c = s.config;
            write!(
                out,
                "{},{},{},{},{},{},{}",
                csv_field(&p.label),
                c,
                c.heuristic,
                c.taxonomy,
                c.length,
                c.radius,
                s.samples
            )
            .unwrap();
            for stat in s.measures.values() {
                write!(out, ",{},{}", stat.mean, stat.sd).unwrap();
            }
            out.push('\n');
        }
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Plot data for one measure: a block per dataset and taxonomy, separated
/// by two blank lines. Columns are `x mean sd config` where `x` is the
/// configuration's position in the grid, which lists configurations grouped
/// by heuristic.
pub fn plot_data(profiles: &[DatasetProfile], id: MeasureId) -> String {
    let mut out = format!("# measure {id}\n# x mean sd config\n");
    for p in profiles {
        let mut sources: Vec<_> = p.summaries.iter().map(|s| s.config.taxonomy).collect();
        sources.sort_unstable();
        sources.dedup();
        for source in sources {
            write!(out, "\n\n# {} {}\n", p.label, source).unwrap();
            for (x, s) in p.summaries.iter().enumerate().filter(|(_, s)| s.config.taxonomy == source) {
                let stat = s.measures[&id];
                writeln!(out, "{x} {} {} {}", stat.mean, stat.sd, s.config).unwrap();
            }
        }
    }
    out
}

/// Writes `profile.json`, `measures.csv`, `plots/<measure>.dat` and, when
/// present, `classification.json` under `dir`.
pub fn emit_report(dir: &Path, report: &Report) -> Result<()> {
    let plots = dir.join("plots");
    fs::create_dir_all(&plots).map_err(|e| Error::file(&plots, e))?;
    write_file(&dir.join("profile.json"), &to_json(report)?)?;
    write_file(&dir.join("measures.csv"), &measures_csv(&report.profiles))?;
    for id in MeasureId::ALL {
        write_file(&plots.join(format!("{id}.dat")), &plot_data(&report.profiles, id))?;
    }
    if let Some(classification) = &report.classification {
        write_classification(dir, classification)?;
    }
    Ok(())
}

pub fn write_classification(dir: &Path, classification: &[DatasetClassification]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
    write_file(&dir.join("classification.json"), &to_json(&classification)?)
}

/// Fixed-width text table of classifications.
pub fn classification_table(classification: &[DatasetClassification]) -> String {
    let width = classification.iter().map(|c| c.label.chars().count()).max().unwrap_or(0).max(7);
    let mut out = format!("{:width$}  complexity  coherence  entropy\n", "dataset");
    for c in classification {
        let k = c.classification;
        writeln!(out, "{:width$}  {:^10}  {:^9}  {:^7}", c.label, k.complexity, k.coherence, k.entropy).unwrap();
    }
    out
}
