use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commvuln::experiment::{
    emit, emit_tasks, run_experiment, write_rows, write_task_rows, Dataset, ExperimentError, ExperimentFile, Format,
    ResultRow, TaskRow,
};
use commvuln::fixtures::fixture;
use commvuln::io::{load_edge_list_path, write_metric_csv, write_partition, EdgeListOptions, IdMode};
use commvuln::report::{AttackReport, TaskJson};
use commvuln_core::attack::{run_attack, Algorithm, AttackResult, AttackSpec, Budget};
use commvuln_core::metrics::community_metric;
use commvuln_core::task::{run_task, DiffusionConfig, LinkPredConfig, Scorer, TaskConfig};
use commvuln_core::{
    detect_communities, node_metric, CommunityMetricId, DetectorConfig, Graph, NodeMetricId, NodeSet, ValueFunctionId,
};

#[derive(Parser)]
#[command(
    name = "commvuln",
    version,
    about = "Find the nodes whose removal most disturbs a graph's communities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a damaging node set.
    Attack(AttackArgs),
    /// Run an attack, then compare a downstream task before and after.
    Task(TaskArgs),
    /// Score nodes (or communities) by a structural metric.
    Metrics(MetricsArgs),
    /// Detect communities and write `node community` lines.
    Communities(CommunitiesArgs),
    /// Run a sweep described by a TOML file.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Ids {
    FirstSeen,
    Integer,
}

#[derive(Args)]
struct GraphArgs {
    /// Edge-list file.
    #[arg(long, conflicts_with = "fixture", required_unless_present = "fixture")]
    graph: Option<PathBuf>,
    /// Bundled graph: karate, football, railway, two_triangles.
    #[arg(long)]
    fixture: Option<String>,
    /// How edge-list tokens map to node ids.
    #[arg(long, value_enum, default_value = "first-seen")]
    ids: Ids,
    /// Field separator (default: whitespace).
    #[arg(long)]
    separator: Option<char>,
}

impl GraphArgs {
    fn dataset(&self) -> Dataset {
        match (&self.graph, &self.fixture) {
            (Some(p), _) => Dataset::Path(
                p.clone(),
                EdgeListOptions {
                    separator: self.separator,
                    ids: match self.ids {
                        Ids::FirstSeen => IdMode::FirstSeen,
                        Ids::Integer => IdMode::Integer,
                    },
                    ..Default::default()
                },
            ),
            (None, Some(f)) => Dataset::Fixture(f.clone()),
            (None, None) => unreachable!("clap requires one source"),
        }
    }

    fn load(&self) -> Result<Graph, Failure> {
        match self.dataset() {
            Dataset::Path(p, opts) => {
                let (g, report) = load_edge_list_path(&p, &opts).map_err(Failure::config)?;
                if report.duplicates + report.self_loops > 0 {
                    eprintln!(
                        "warning: dropped {} duplicate edges and {} self loops",
                        report.duplicates, report.self_loops
                    );
                }
                Ok(g)
            }
            Dataset::Fixture(name) => Ok(fixture(&name).map_err(Failure::config)?.graph),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Exhaustive,
    Netgreedy,
    Commgreedy,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Args)]
struct AttackArgs {
    #[command(flatten)]
    source: GraphArgs,
    #[arg(long, value_enum)]
    algo: AlgoArg,
    /// modularity, nmi or ari.
    #[arg(long = "value-fn", default_value = "modularity")]
    value_fn: String,
    /// Number of nodes to remove.
    #[arg(long, conflicts_with = "percent", required_unless_present = "percent")]
    k: Option<usize>,
    /// Percentage of nodes to remove, rounded up.
    #[arg(long)]
    percent: Option<f64>,
    #[arg(long = "node-metric")]
    node_metric: Option<String>,
    #[arg(long = "community-metric")]
    community_metric: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Nodes removed between community refreshes (commgreedy).
    #[arg(long, default_value_t = 1)]
    batch: usize,
    /// Re-rank after every removal (netgreedy).
    #[arg(long)]
    iterative: bool,
    /// Rank low metric values first.
    #[arg(long)]
    invert: bool,
    /// Maximum subsets the exhaustive search may visit.
    #[arg(long)]
    cap: Option<u128>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Record wall time (output is then no longer byte-stable).
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum TaskKind {
    Linkpred,
    Diffusion,
}

#[derive(Args)]
struct TaskArgs {
    #[command(flatten)]
    attack: AttackArgs,
    #[arg(long, value_enum)]
    task: TaskKind,
    /// wic, mcn or mra.
    #[arg(long, default_value = "wic")]
    scorer: String,
    #[arg(long = "test-fraction", default_value_t = 0.2)]
    test_fraction: f64,
    #[arg(long = "negative-ratio", default_value_t = 1.0)]
    negative_ratio: f64,
    #[arg(long = "p-in", default_value_t = 0.7)]
    p_in: f64,
    #[arg(long = "p-out", default_value_t = 0.3)]
    p_out: f64,
    #[arg(long = "seed-fraction", default_value_t = 0.01)]
    seed_fraction: f64,
    #[arg(long, default_value_t = 200)]
    runs: usize,
    /// Task seed (default: the attack seed).
    #[arg(long = "task-seed")]
    task_seed: Option<u64>,
}

#[derive(Args)]
struct MetricsArgs {
    #[command(flatten)]
    source: GraphArgs,
    /// Node metric name.
    #[arg(long, required_unless_present = "community_metric")]
    metric: Option<String>,
    /// Score detected communities instead of nodes.
    #[arg(long = "community-metric", conflicts_with = "metric")]
    community_metric: Option<String>,
    /// Detector seed for --community-metric.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CommunitiesArgs {
    #[command(flatten)]
    source: GraphArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// TOML experiment description.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `output` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long)]
    timing: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(e: impl std::fmt::Display) -> Self {
        Failure {
            code: 2,
            message: e.to_string(),
        }
    }

    fn io(e: impl std::fmt::Display) -> Self {
        Failure {
            code: 1,
            message: e.to_string(),
        }
    }
}

impl From<commvuln_core::Error> for Failure {
    fn from(e: commvuln_core::Error) -> Self {
        match e {
            commvuln_core::Error::EnumerationCap { .. } => Failure {
                code: 3,
                message: format!("{e} (--algo netgreedy or commgreedy)"),
            },
            other => Failure::config(other),
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Core(c) => c.into(),
            other => Failure::config(other),
        }
    }
}

fn parse<T: std::str::FromStr<Err = commvuln_core::Error>>(s: &str) -> Result<T, Failure> {
    s.parse().map_err(Failure::config)
}

fn write_out(out: &Option<PathBuf>, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| Failure::io(format!("{}: {e}", p.display()))),
        None => io::stdout().write_all(bytes).map_err(Failure::io),
    }
}

fn spec_from(a: &AttackArgs) -> Result<(Algorithm, AttackSpec), Failure> {
    let algo = match a.algo {
        AlgoArg::Exhaustive => Algorithm::Exhaustive,
        AlgoArg::Netgreedy => Algorithm::NetworkGreedy,
        AlgoArg::Commgreedy => Algorithm::CommunityGreedy,
    };
    let budget = match (a.k, a.percent) {
        (Some(k), _) => Budget::Absolute(k),
        (None, Some(p)) => Budget::Fraction(p / 100.0),
        (None, None) => unreachable!("clap requires a budget"),
    };
    let mut spec = AttackSpec::new(budget, parse::<ValueFunctionId>(&a.value_fn)?).with_seed(a.seed);
    spec.node_metric = a.node_metric.as_deref().map(parse::<NodeMetricId>).transpose()?;
    spec.community_metric = a
        .community_metric
        .as_deref()
        .map(parse::<CommunityMetricId>)
        .transpose()?;
    spec.batch_size = a.batch;
    spec.iterative = a.iterative;
    spec.invert_node_metric = a.invert;
    if let Some(cap) = a.cap {
        spec.enumeration_cap = cap;
    }
    Ok((algo, spec))
}

fn attack(a: &AttackArgs) -> Result<(Graph, AttackResult, u64), Failure> {
    let g = a.source.load()?;
    let (algo, spec) = spec_from(a)?;
    let start = Instant::now();
    let result = run_attack(&g, algo, &spec)?;
    let ms = if a.timing {
        start.elapsed().as_millis() as u64
    } else {
        0
    };
    Ok((g, result, ms))
}

fn result_row(dataset: &str, r: &AttackResult, ms: u64) -> ResultRow {
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
        wall_time_ms: ms,
    }
}

fn json_bytes<T: serde::Serialize>(v: &T) -> Result<Vec<u8>, Failure> {
    let mut buf = serde_json::to_vec_pretty(v).map_err(Failure::io)?;
    buf.push(b'\n');
    Ok(buf)
}

fn cmd_attack(a: &AttackArgs) -> Result<(), Failure> {
    let (g, result, ms) = attack(a)?;
    let bytes = match a.format {
        FormatArg::Json => json_bytes(&AttackReport::new(&g, &result, ms))?,
        FormatArg::Csv => {
            let mut buf = Vec::new();
            let row = result_row(&a.source.dataset().name(), &result, ms);
            write_rows(&mut buf, &[row], Format::Csv).map_err(Failure::io)?;
            buf
        }
    };
    write_out(&a.out, &bytes)
}

fn cmd_task(t: &TaskArgs) -> Result<(), Failure> {
    let (g, result, _) = attack(&t.attack)?;
    let seed = t.task_seed.unwrap_or(t.attack.seed);
    let task = match t.task {
        TaskKind::Linkpred => {
            let c = LinkPredConfig {
                scorer: t.scorer.parse::<Scorer>().map_err(Failure::config)?,
                test_fraction: t.test_fraction,
                negative_ratio: t.negative_ratio,
                rng_seed: seed,
            };
            c.validate()?;
            TaskConfig::LinkPrediction(c)
        }
        TaskKind::Diffusion => {
            let c = DiffusionConfig {
                p_in: t.p_in,
                p_out: t.p_out,
                seed_fraction: t.seed_fraction,
                runs: t.runs,
                rng_seed: seed,
            };
            c.validate()?;
            TaskConfig::Diffusion(c)
        }
    };
    let report = run_task(&g, &result, &task, &DetectorConfig::default().with_seed(t.attack.seed))?;
    let bytes = match t.attack.format {
        FormatArg::Json => json_bytes(&TaskJson::new(&g, &result.selected, &report))?,
        FormatArg::Csv => {
            let base = result_row(&t.attack.source.dataset().name(), &result, 0);
            let row = TaskRow {
                dataset: base.dataset,
                algorithm: base.algorithm,
                value_function: base.value_function,
                node_metric: base.node_metric,
                community_metric: base.community_metric,
                budget: base.budget,
                seed: base.seed,
                task: task.name().into(),
                metric_original: report.metric_original,
                metric_perturbed: report.metric_perturbed,
                delta: report.delta,
            };
            let mut buf = Vec::new();
            write_task_rows(&mut buf, &[row], Format::Csv).map_err(Failure::io)?;
            buf
        }
    };
    write_out(&t.attack.out, &bytes)
}

fn cmd_metrics(m: &MetricsArgs) -> Result<(), Failure> {
    let g = m.source.load()?;
    let mut buf = Vec::new();
    if let Some(name) = &m.metric {
        let mv = node_metric(&g, parse::<NodeMetricId>(name)?);
        if mv.approximate {
            eprintln!("warning: betweenness estimated from sampled sources");
        }
        write_metric_csv(&mut buf, &g, &mv).map_err(Failure::io)?;
    } else if let Some(name) = &m.community_metric {
        let id = parse::<CommunityMetricId>(name)?;
        let p = detect_communities(&g, &DetectorConfig::default().with_seed(m.seed));
        writeln!(buf, "community,size,score").map_err(Failure::io)?;
        for (c, members) in p.communities().into_iter().enumerate() {
            let size = members.len();
            let sub = g.induced_subgraph(&NodeSet::new(members))?;
            writeln!(buf, "{c},{size},{:.6}", community_metric(&sub, &g, id)?).map_err(Failure::io)?;
        }
    }
    write_out(&m.out, &buf)
}

fn cmd_communities(c: &CommunitiesArgs) -> Result<(), Failure> {
    let g = c.source.load()?;
    let p = detect_communities(&g, &DetectorConfig::default().with_seed(c.seed));
    let mut buf = Vec::new();
    write_partition(&mut buf, &g, &p).map_err(Failure::io)?;
    write_out(&c.out, &buf)
}

fn cmd_experiment(e: &ExperimentArgs) -> Result<(), Failure> {
    let text =
        fs::read_to_string(&e.config).map_err(|err| Failure::config(format!("{}: {err}", e.config.display())))?;
    let mut cfg = ExperimentFile::parse(&text)?.into_config()?;
    if let Some(out) = &e.out {
        cfg.output = Some(out.clone());
    }
    if let Some(f) = e.format {
        cfg.format = f.into();
    }
    cfg.timing |= e.timing;
    let out = run_experiment(&cfg)?;
    match &cfg.output {
        Some(path) => {
            emit(&out.rows, cfg.format, path).map_err(Failure::io)?;
            if !out.tasks.is_empty() {
                let ext = match cfg.format {
                    Format::Csv => "tasks.csv",
                    Format::Json => "tasks.json",
                };
                emit_tasks(&out.tasks, cfg.format, &path.with_extension(ext)).map_err(Failure::io)?;
            }
        }
        None => {
            let mut stdout = io::stdout().lock();
            write_rows(&mut stdout, &out.rows, cfg.format).map_err(Failure::io)?;
            if !out.tasks.is_empty() {
                write_task_rows(&mut stdout, &out.tasks, cfg.format).map_err(Failure::io)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = commvuln::init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let result = match &cli.command {
        Command::Attack(a) => cmd_attack(a),
        Command::Task(t) => cmd_task(t),
        Command::Metrics(m) => cmd_metrics(m),
        Command::Communities(c) => cmd_communities(c),
        Command::Experiment(e) => cmd_experiment(e),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
