//! JSON views of attack and task results. Floats are written with six
//! decimals so identical runs produce identical bytes.

use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use commvuln_core::attack::{AttackResult, TraceStep};
use commvuln_core::task::{TaskConfig, TaskReport};
use commvuln_core::Graph;

pub(crate) fn six<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return s.serialize_none();
    }
    let raw = RawValue::from_string(format!("{x:.6}")).map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

pub(crate) fn six_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(x) => six(x, s),
        None => s.serialize_none(),
    }
}

fn six_vec<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct Six(f64);
    impl Serialize for Six {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            six(&self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for &x in xs {
        seq.serialize_element(&Six(x))?;
    }
    seq.end()
}

fn label(g: &Graph, v: usize) -> String {
    g.label(v).map_or_else(|| v.to_string(), str::to_owned)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: usize,
    pub node: usize,
    pub label: String,
    #[serde(serialize_with = "six_opt")]
    pub node_score: Option<f64>,
    pub community: Option<usize>,
    #[serde(serialize_with = "six_opt")]
    pub community_score: Option<f64>,
    pub community_size: Option<usize>,
    pub communities: Option<usize>,
    pub early_refresh: bool,
}

impl TraceRecord {
    fn new(g: &Graph, t: &TraceStep) -> Self {
        TraceRecord {
            step: t.step,
            node: t.node,
            label: label(g, t.node),
            node_score: t.node_score,
            community: t.community,
            community_score: t.community_score,
            community_size: t.community_size,
            communities: t.communities,
            early_refresh: t.early_refresh,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub algorithm: String,
    pub value_function: String,
    pub node_metric: Option<String>,
    pub community_metric: Option<String>,
    pub k: usize,
    pub selected: Vec<usize>,
    pub selected_labels: Vec<String>,
    #[serde(serialize_with = "six")]
    pub raw: f64,
    #[serde(serialize_with = "six")]
    pub damage: f64,
    pub trace: Vec<TraceRecord>,
    pub seed: u64,
    pub batch_size: usize,
    pub wall_time_ms: u64,
}

impl AttackReport {
    pub fn new(g: &Graph, r: &AttackResult, wall_time_ms: u64) -> Self {
        AttackReport {
            algorithm: r.algorithm.name().into(),
            value_function: r.value_function.name().into(),
            node_metric: r.node_metric.map(|m| m.name().into()),
            community_metric: r.community_metric.map(|m| m.name().into()),
            k: r.k,
            selected: r.selected.clone(),
            selected_labels: r.selected.iter().map(|&v| label(g, v)).collect(),
            raw: r.score.raw,
            damage: r.score.damage,
            trace: r.trace.iter().map(|t| TraceRecord::new(g, t)).collect(),
            seed: r.seed,
            batch_size: r.batch_size,
            wall_time_ms,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Seeds {
    pub task: u64,
    pub detector: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskJson {
    pub task: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scorer: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "six_opt")]
    pub p_in: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "six_opt")]
    pub p_out: Option<f64>,
    pub runs: usize,
    #[serde(serialize_with = "six")]
    pub metric_original: f64,
    #[serde(serialize_with = "six")]
    pub metric_perturbed: f64,
    #[serde(serialize_with = "six")]
    pub delta: f64,
    pub seeds: Seeds,
    pub removed: Vec<String>,
    pub test_edges_original: usize,
    pub test_edges_perturbed: usize,
    #[serde(serialize_with = "six_vec")]
    pub runs_original: Vec<f64>,
    #[serde(serialize_with = "six_vec")]
    pub runs_perturbed: Vec<f64>,
}

impl TaskJson {
    pub fn new(g: &Graph, removed: &[usize], r: &TaskReport) -> Self {
        let (scorer, p_in, p_out, runs, task_seed) = match r.task {
            TaskConfig::LinkPrediction(c) => (Some(c.scorer.name()), None, None, 1, c.rng_seed),
            TaskConfig::Diffusion(c) => (None, Some(c.p_in), Some(c.p_out), c.runs, c.rng_seed),
        };
        TaskJson {
            task: r.task.name(),
            scorer,
            p_in,
            p_out,
            runs,
            metric_original: r.metric_original,
            metric_perturbed: r.metric_perturbed,
            delta: r.delta,
            seeds: Seeds {
                task: task_seed,
                detector: r.detector_seed,
            },
            removed: removed.iter().map(|&v| label(g, v)).collect(),
            test_edges_original: r.test_edges_original,
            test_edges_perturbed: r.test_edges_perturbed,
            runs_original: r.runs_original.clone(),
            runs_perturbed: r.runs_perturbed.clone(),
        }
    }
}
