//! Config-driven sweeps over budgets, seeds and metric choices.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use commvuln_core::attack::{
    community_greedy_attack, exhaustive_attack_multi, network_greedy_attack, resolve_budget, Algorithm, AttackResult,
    AttackSpec, Budget, DEFAULT_ENUMERATION_CAP,
};
use commvuln_core::task::{run_task, DiffusionConfig, LinkPredConfig, Scorer, TaskConfig};
use commvuln_core::{CommunityMetricId, DetectorConfig, Graph, NodeMetricId, ValueFunctionId};

use crate::fixtures::{fixture, FixtureError};
use crate::io::{load_edge_list_path, EdgeListOptions, IoError};
use crate::report::six;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Fixture(#[from] FixtureError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Core(#[from] commvuln_core::Error),
}

fn config_err(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::Config(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(format!("unknown format {s:?} (csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Fixture(String),
    Path(PathBuf, EdgeListOptions),
}

impl Dataset {
    pub fn name(&self) -> String {
        match self {
            Self::Fixture(n) => n.clone(),
            Self::Path(p, _) => p
                .file_stem()
                .map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into()),
        }
    }

    pub fn load(&self) -> Result<Graph, ExperimentError> {
        Ok(match self {
            Self::Fixture(n) => fixture(n)?.graph,
            Self::Path(p, opts) => load_edge_list_path(p, opts)?.0,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: Dataset,
    pub algorithm: Algorithm,
    pub value_functions: Vec<ValueFunctionId>,
    /// Empty means all ten (greedy algorithms only).
    pub node_metrics: Vec<NodeMetricId>,
    /// Empty means all three (community greedy only).
    pub community_metrics: Vec<CommunityMetricId>,
    pub budgets: Vec<Budget>,
    pub seeds: Vec<u64>,
    pub batch_size: usize,
    pub iterative: bool,
    pub invert_node_metric: bool,
    pub enumeration_cap: u128,
    pub task: Option<TaskConfig>,
    /// Task seed; `None` reuses each cell's seed.
    pub task_seed: Option<u64>,
    pub timing: bool,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl ExperimentConfig {
    pub fn new(dataset: Dataset, algorithm: Algorithm) -> Self {
        ExperimentConfig {
            dataset,
            algorithm,
            value_functions: vec![ValueFunctionId::ModularityDiff],
            node_metrics: Vec::new(),
            community_metrics: Vec::new(),
            budgets: vec![Budget::Absolute(5)],
            seeds: vec![0],
            batch_size: 1,
            iterative: false,
            invert_node_metric: false,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            task: None,
            task_seed: None,
            timing: false,
            output: None,
            format: Format::Csv,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.budgets.is_empty() {
            return Err(config_err("at least one budget is required"));
        }
        if self.seeds.is_empty() {
            return Err(config_err("at least one seed is required"));
        }
        if self.value_functions.is_empty() {
            return Err(config_err("at least one value function is required"));
        }
        if self.batch_size == 0 {
            return Err(config_err("batch_size must be at least 1"));
        }
        if let Dataset::Fixture(name) = &self.dataset {
            fixture(name)?;
        }
        Ok(())
    }

    fn node_metric_list(&self) -> Vec<Option<NodeMetricId>> {
        match self.algorithm {
            Algorithm::Exhaustive => vec![None],
            _ if self.node_metrics.is_empty() => NodeMetricId::ALL.into_iter().map(Some).collect(),
            _ => self.node_metrics.iter().copied().map(Some).collect(),
        }
    }

    fn community_metric_list(&self) -> Vec<Option<CommunityMetricId>> {
        match self.algorithm {
            Algorithm::CommunityGreedy if self.community_metrics.is_empty() => {
                CommunityMetricId::ALL.into_iter().map(Some).collect()
            }
            Algorithm::CommunityGreedy => self.community_metrics.iter().copied().map(Some).collect(),
            _ => vec![None],
        }
    }
}

/// One output row per (config, budget, seed) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub dataset: String,
    pub algorithm: String,
    pub value_function: String,
    pub node_metric: Option<String>,
    pub community_metric: Option<String>,
    pub budget: usize,
    pub seed: u64,
    #[serde(serialize_with = "six")]
    pub raw: f64,
    #[serde(serialize_with = "six")]
    pub damage: f64,
    pub wall_time_ms: u64,
}

pub const RESULT_HEADER: [&str; 10] = [
    "dataset",
    "algorithm",
    "value_function",
    "node_metric",
    "community_metric",
    "budget",
    "seed",
    "raw",
    "damage",
    "wall_time_ms",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRow {
    pub dataset: String,
    pub algorithm: String,
    pub value_function: String,
    pub node_metric: Option<String>,
    pub community_metric: Option<String>,
    pub budget: usize,
    pub seed: u64,
    pub task: String,
    #[serde(serialize_with = "six")]
    pub metric_original: f64,
    #[serde(serialize_with = "six")]
    pub metric_perturbed: f64,
    #[serde(serialize_with = "six")]
    pub delta: f64,
}

pub const TASK_HEADER: [&str; 11] = [
    "dataset",
    "algorithm",
    "value_function",
    "node_metric",
    "community_metric",
    "budget",
    "seed",
    "task",
    "metric_original",
    "metric_perturbed",
    "delta",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    pub tasks: Vec<TaskRow>,
}

type SortKey = (
    usize,
    u64,
    ValueFunctionId,
    Option<NodeMetricId>,
    Option<CommunityMetricId>,
);

struct Cell {
    key: SortKey,
    result: AttackResult,
    wall_time_ms: u64,
    task: Option<(String, f64, f64, f64)>,
}

fn row(dataset: &str, c: &Cell) -> ResultRow {
    let r = &c.result;
    ResultRow {
        dataset: dataset.to_owned(),
        algorithm: r.algorithm.name().into(),
        value_function: r.value_function.name().into(),
        node_metric: r.node_metric.map(|m| m.name().into()),
        community_metric: r.community_metric.map(|m| m.name().into()),
        budget: r.k,
        seed: r.seed,
        raw: r.score.raw,
        damage: r.score.damage,
        wall_time_ms: c.wall_time_ms,
    }
}

fn with_task_seed(task: &TaskConfig, seed: u64) -> TaskConfig {
    match *task {
        TaskConfig::LinkPrediction(c) => TaskConfig::LinkPrediction(LinkPredConfig { rng_seed: seed, ..c }),
        TaskConfig::Diffusion(c) => TaskConfig::Diffusion(DiffusionConfig { rng_seed: seed, ..c }),
    }
}

/// `(k, seed, value functions, node metric, community metric)`.
type Job = (
    usize,
    u64,
    Vec<ValueFunctionId>,
    Option<NodeMetricId>,
    Option<CommunityMetricId>,
);

/// Runs the full cross-product. Cells run in parallel; rows come back
/// sorted by budget, seed, then metric ids.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, ExperimentError> {
    cfg.validate()?;
    let g = cfg.dataset.load()?;
    let dataset = cfg.dataset.name();
    let mut ks = Vec::with_capacity(cfg.budgets.len());
    for &b in &cfg.budgets {
        ks.push(resolve_budget(&g, b)?);
    }

    let mut jobs: Vec<Job> = Vec::new();
    for &k in &ks {
        for &seed in &cfg.seeds {
            if cfg.algorithm == Algorithm::Exhaustive {
                jobs.push((k, seed, cfg.value_functions.clone(), None, None));
                continue;
            }
            for &vf in &cfg.value_functions {
                for nm in cfg.node_metric_list() {
                    for cm in cfg.community_metric_list() {
                        jobs.push((k, seed, vec![vf], nm, cm));
                    }
                }
            }
        }
    }

    let run = |(k, seed, vfs, nm, cm): &(
        usize,
        u64,
        Vec<ValueFunctionId>,
        Option<NodeMetricId>,
        Option<CommunityMetricId>,
    )|
     -> Result<Vec<Cell>, ExperimentError> {
        let spec = AttackSpec {
            budget: Budget::Absolute(*k),
            value_function: vfs[0],
            detector: DetectorConfig::default().with_seed(*seed),
            node_metric: *nm,
            community_metric: *cm,
            batch_size: cfg.batch_size,
            invert_node_metric: cfg.invert_node_metric,
            iterative: cfg.iterative,
            enumeration_cap: cfg.enumeration_cap,
        };
        let start = Instant::now();
        let results = match cfg.algorithm {
            Algorithm::Exhaustive => exhaustive_attack_multi(&g, &spec, vfs)?,
            Algorithm::NetworkGreedy => vec![network_greedy_attack(&g, &spec)?],
            Algorithm::CommunityGreedy => vec![community_greedy_attack(&g, &spec)?],
        };
        let wall_time_ms = if cfg.timing {
            start.elapsed().as_millis() as u64 / results.len() as u64
        } else {
            0
        };
        let mut cells = Vec::with_capacity(results.len());
        for result in results {
            let task = match &cfg.task {
                None => None,
                Some(t) => {
                    let t = with_task_seed(t, cfg.task_seed.unwrap_or(*seed));
                    let rep = run_task(&g, &result, &t, &spec.detector)?;
                    Some((
                        t.name().to_owned(),
                        rep.metric_original,
                        rep.metric_perturbed,
                        rep.delta,
                    ))
                }
            };
            cells.push(Cell {
                key: (*k, *seed, result.value_function, *nm, *cm),
                result,
                wall_time_ms,
                task,
            });
        }
        Ok(cells)
    };
    let nested: Vec<Result<Vec<Cell>, ExperimentError>> = jobs.par_iter().map(run).collect();
    let mut cells = Vec::new();
    for part in nested {
        cells.extend(part?);
    }
    cells.sort_by_key(|c| c.key);

    let mut out = ExperimentOutput::default();
    for c in &cells {
        let base = row(&dataset, c);
        if let Some((task, orig, pert, delta)) = &c.task {
            out.tasks.push(TaskRow {
                dataset: base.dataset.clone(),
                algorithm: base.algorithm.clone(),
                value_function: base.value_function.clone(),
                node_metric: base.node_metric.clone(),
                community_metric: base.community_metric.clone(),
                budget: base.budget,
                seed: base.seed,
                task: task.clone(),
                metric_original: *orig,
                metric_perturbed: *pert,
                delta: *delta,
            });
        }
        out.rows.push(base);
    }
    Ok(out)
}

fn opt(s: &Option<String>) -> &str {
    s.as_deref().unwrap_or("")
}

fn write_csv<W: Write>(w: W, header: &[&str], records: impl Iterator<Item = Vec<String>>) -> Result<(), IoError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header).map_err(crate::io::csv_err)?;
    for r in records {
        out.write_record(&r).map_err(crate::io::csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_rows<W: Write>(mut w: W, rows: &[ResultRow], format: Format) -> Result<(), IoError> {
    match format {
        Format::Csv => write_csv(
            w,
            &RESULT_HEADER,
            rows.iter().map(|r| {
                vec![
                    r.dataset.clone(),
                    r.algorithm.clone(),
                    r.value_function.clone(),
                    opt(&r.node_metric).into(),
                    opt(&r.community_metric).into(),
                    r.budget.to_string(),
                    r.seed.to_string(),
                    format!("{:.6}", r.raw),
                    format!("{:.6}", r.damage),
                    r.wall_time_ms.to_string(),
                ]
            }),
        ),
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, rows).map_err(io::Error::from)?;
            writeln!(w)?;
            Ok(())
        }
    }
}

pub fn write_task_rows<W: Write>(mut w: W, rows: &[TaskRow], format: Format) -> Result<(), IoError> {
    match format {
        Format::Csv => write_csv(
            w,
            &TASK_HEADER,
            rows.iter().map(|r| {
                vec![
                    r.dataset.clone(),
                    r.algorithm.clone(),
                    r.value_function.clone(),
                    opt(&r.node_metric).into(),
                    opt(&r.community_metric).into(),
                    r.budget.to_string(),
                    r.seed.to_string(),
                    r.task.clone(),
                    format!("{:.6}", r.metric_original),
                    format!("{:.6}", r.metric_perturbed),
                    format!("{:.6}", r.delta),
                ]
            }),
        ),
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, rows).map_err(io::Error::from)?;
            writeln!(w)?;
            Ok(())
        }
    }
}

fn create(path: &Path) -> Result<fs::File, IoError> {
    fs::File::create(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

/// Writes rows to `path`.
pub fn emit(rows: &[ResultRow], format: Format, path: &Path) -> Result<(), IoError> {
    let mut f = io::BufWriter::new(create(path)?);
    write_rows(&mut f, rows, format)?;
    f.flush()?;
    Ok(())
}

pub fn emit_tasks(rows: &[TaskRow], format: Format, path: &Path) -> Result<(), IoError> {
    let mut f = io::BufWriter::new(create(path)?);
    write_task_rows(&mut f, rows, format)?;
    f.flush()?;
    Ok(())
}

/// TOML form of [`ExperimentConfig`].
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    pub fixture: Option<String>,
    pub graph: Option<PathBuf>,
    pub algorithm: String,
    #[serde(default)]
    pub value_functions: Vec<String>,
    #[serde(default)]
    pub node_metrics: Vec<String>,
    #[serde(default)]
    pub community_metrics: Vec<String>,
    #[serde(default)]
    pub budgets: Vec<usize>,
    #[serde(default)]
    pub percents: Vec<f64>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    pub batch_size: Option<usize>,
    #[serde(default)]
    pub iterative: bool,
    #[serde(default)]
    pub invert_node_metric: bool,
    pub enumeration_cap: Option<u64>,
    #[serde(default)]
    pub timing: bool,
    pub output: Option<PathBuf>,
    pub format: Option<String>,
    pub task: Option<TaskFile>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskFile {
    pub kind: String,
    pub seed: Option<u64>,
    pub scorer: Option<String>,
    pub test_fraction: Option<f64>,
    pub negative_ratio: Option<f64>,
    pub p_in: Option<f64>,
    pub p_out: Option<f64>,
    pub seed_fraction: Option<f64>,
    pub runs: Option<usize>,
}

fn parse_all<T: std::str::FromStr<Err = commvuln_core::Error>>(names: &[String]) -> Result<Vec<T>, ExperimentError> {
    names
        .iter()
        .map(|n| n.parse::<T>().map_err(|e| config_err(e.to_string())))
        .collect()
}

impl TaskFile {
    pub fn into_config(self) -> Result<TaskConfig, ExperimentError> {
        let task = match self.kind.as_str() {
            "linkpred" => {
                let d = LinkPredConfig::default();
                let scorer = match &self.scorer {
                    Some(s) => s.parse::<Scorer>().map_err(|e| config_err(e.to_string()))?,
                    None => d.scorer,
                };
                let c = LinkPredConfig {
                    scorer,
                    test_fraction: self.test_fraction.unwrap_or(d.test_fraction),
                    negative_ratio: self.negative_ratio.unwrap_or(d.negative_ratio),
                    rng_seed: self.seed.unwrap_or(0),
                };
                c.validate()?;
                TaskConfig::LinkPrediction(c)
            }
            "diffusion" => {
                let d = DiffusionConfig::default();
                let c = DiffusionConfig {
                    p_in: self.p_in.unwrap_or(d.p_in),
                    p_out: self.p_out.unwrap_or(d.p_out),
                    seed_fraction: self.seed_fraction.unwrap_or(d.seed_fraction),
                    runs: self.runs.unwrap_or(d.runs),
                    rng_seed: self.seed.unwrap_or(0),
                };
                c.validate()?;
                TaskConfig::Diffusion(c)
            }
            other => return Err(config_err(format!("unknown task {other:?} (linkpred or diffusion)"))),
        };
        Ok(task)
    }
}

impl ExperimentFile {
    pub fn parse(text: &str) -> Result<Self, ExperimentError> {
        toml::from_str(text).map_err(|e| config_err(e.to_string()))
    }

    pub fn into_config(self) -> Result<ExperimentConfig, ExperimentError> {
        let dataset = match (self.fixture, self.graph) {
            (Some(f), None) => Dataset::Fixture(f),
            (None, Some(p)) => Dataset::Path(p, EdgeListOptions::default()),
            _ => return Err(config_err("set exactly one of `fixture` and `graph`")),
        };
        let algorithm: Algorithm = self
            .algorithm
            .parse()
            .map_err(|e: commvuln_core::Error| config_err(e.to_string()))?;
        let mut cfg = ExperimentConfig::new(dataset, algorithm);
        if !self.value_functions.is_empty() {
            cfg.value_functions = parse_all(&self.value_functions)?;
        }
        cfg.node_metrics = parse_all(&self.node_metrics)?;
        cfg.community_metrics = parse_all(&self.community_metrics)?;
        let mut budgets: Vec<Budget> = self.budgets.into_iter().map(Budget::Absolute).collect();
        budgets.extend(self.percents.into_iter().map(|p| Budget::Fraction(p / 100.0)));
        if !budgets.is_empty() {
            cfg.budgets = budgets;
        }
        if !self.seeds.is_empty() {
            cfg.seeds = self.seeds;
        }
        cfg.batch_size = self.batch_size.unwrap_or(1);
        cfg.iterative = self.iterative;
        cfg.invert_node_metric = self.invert_node_metric;
        if let Some(cap) = self.enumeration_cap {
            cfg.enumeration_cap = cap as u128;
        }
        cfg.timing = self.timing;
        cfg.output = self.output;
        if let Some(f) = self.format {
            cfg.format = f.parse().map_err(config_err)?;
        }
        if let Some(t) = self.task {
            cfg.task_seed = t.seed;
            cfg.task = Some(t.into_config()?);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn karate(algo: Algorithm) -> ExperimentConfig {
        ExperimentConfig::new(Dataset::Fixture("karate".into()), algo)
    }

    #[test]
    fn netgreedy_cross_product() {
        let mut cfg = karate(Algorithm::NetworkGreedy);
        cfg.budgets = (1..=5).map(Budget::Absolute).collect();
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.rows.len(), 50);
        assert!(out.rows.windows(2).all(|w| w[0].budget <= w[1].budget));
        assert!(out.tasks.is_empty());
    }

    #[test]
    fn rows_match_direct_calls() {
        let mut cfg = karate(Algorithm::CommunityGreedy);
        cfg.node_metrics = vec![NodeMetricId::Degree];
        cfg.community_metrics = vec![CommunityMetricId::Conductance];
        cfg.seeds = vec![3, 1];
        cfg.value_functions = vec![ValueFunctionId::Ari];
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.rows.iter().map(|r| r.seed).collect::<Vec<_>>(), [1, 3]);
        let g = fixture("karate").unwrap().graph;
        for r in &out.rows {
            let spec = AttackSpec::new(Budget::Absolute(5), ValueFunctionId::Ari)
                .with_seed(r.seed)
                .with_node_metric(NodeMetricId::Degree)
                .with_community_metric(CommunityMetricId::Conductance);
            let direct = community_greedy_attack(&g, &spec).unwrap();
            assert_eq!((r.raw, r.damage), (direct.score.raw, direct.score.damage));
        }
    }

    #[test]
    fn empty_rows_give_header_only() {
        let mut buf = Vec::new();
        write_rows(&mut buf, &[], Format::Csv).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), RESULT_HEADER.join(",") + "\n");
    }

    #[test]
    fn one_row_csv_and_json() {
        let r = ResultRow {
            dataset: "karate".into(),
            algorithm: "netgreedy".into(),
            value_function: "nmi".into(),
            node_metric: Some("degree".into()),
            community_metric: None,
            budget: 5,
            seed: 0,
            raw: 0.5,
            damage: -0.5,
            wall_time_ms: 0,
        };
        let mut buf = Vec::new();
        write_rows(&mut buf, std::slice::from_ref(&r), Format::Csv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "karate,netgreedy,nmi,degree,,5,0,0.500000,-0.500000,0"
        );
        let mut buf = Vec::new();
        write_rows(&mut buf, std::slice::from_ref(&r), Format::Json).unwrap();
        let back: Vec<ResultRow> = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back, [r]);
    }

    #[test]
    fn toml_config() {
        let text = r#"
            fixture = "two_triangles"
            algorithm = "commgreedy"
            value_functions = ["nmi", "ari"]
            node_metrics = ["degree"]
            community_metrics = ["link_density"]
            budgets = [1, 2]
            seeds = [0]
            [task]
            kind = "diffusion"
            runs = 10
        "#;
        let cfg = ExperimentFile::parse(text).unwrap().into_config().unwrap();
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.rows.len(), 4);
        assert_eq!(out.tasks.len(), 4);
        for t in &out.tasks {
            assert_eq!(t.delta, t.metric_original - t.metric_perturbed);
        }
        assert!(ExperimentFile::parse("algorithm = 3").is_err());
        let bad = ExperimentFile::parse("fixture = \"nope\"\nalgorithm = \"netgreedy\"").unwrap();
        assert!(matches!(bad.into_config(), Err(ExperimentError::Fixture(_))));
    }

    #[test]
    fn exhaustive_shares_enumeration() {
        let mut cfg = ExperimentConfig::new(Dataset::Fixture("two_triangles".into()), Algorithm::Exhaustive);
        cfg.value_functions = ValueFunctionId::ALL.to_vec();
        cfg.budgets = vec![Budget::Absolute(2)];
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.rows.len(), 3);
        cfg.enumeration_cap = 3;
        assert!(matches!(
            run_experiment(&cfg),
            Err(ExperimentError::Core(commvuln_core::Error::EnumerationCap { .. }))
        ));
    }
}
