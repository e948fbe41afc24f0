//! Downstream tasks used to judge an attack: community-aware link prediction
//! and independent-cascade diffusion, each run on the original graph with
//! its partition and on the perturbed graph with its own.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::attack::AttackResult;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};
use crate::louvain::{CommunityDetector, DetectorConfig, Louvain, Partition};
use crate::rng::stream_rng;

/// Smoothing term in the within/inter-cluster denominator.
pub const WIC_EPSILON: f64 = 0.001;

const SPLIT_STREAM: u64 = 0;
const NEGATIVE_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Scorer {
    WithinInterCluster,
    ModifiedCommonNeighbors,
    ModifiedResourceAllocation,
}

impl Scorer {
    pub const ALL: [Scorer; 3] = [
        Self::WithinInterCluster,
        Self::ModifiedCommonNeighbors,
        Self::ModifiedResourceAllocation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::WithinInterCluster => "wic",
            Self::ModifiedCommonNeighbors => "mcn",
            Self::ModifiedResourceAllocation => "mra",
        }
    }
}

impl fmt::Display for Scorer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scorer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wic" | "within_inter_cluster" => Ok(Self::WithinInterCluster),
            "mcn" | "modified_common_neighbors" => Ok(Self::ModifiedCommonNeighbors),
            "mra" | "modified_resource_allocation" => Ok(Self::ModifiedResourceAllocation),
            _ => Err(Error::UnknownName {
                kind: "scorer",
                name: s.into(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinkPredConfig {
    pub scorer: Scorer,
    pub test_fraction: f64,
    /// Sampled non-edges per held-out edge.
    pub negative_ratio: f64,
    pub rng_seed: u64,
}

impl Default for LinkPredConfig {
    fn default() -> Self {
        LinkPredConfig {
            scorer: Scorer::WithinInterCluster,
            test_fraction: 0.2,
            negative_ratio: 1.0,
            rng_seed: 0,
        }
    }
}

impl LinkPredConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::InvalidConfig("test_fraction must lie in (0, 1)"));
        }
        if !(self.negative_ratio > 0.0 && self.negative_ratio.is_finite()) {
            return Err(Error::InvalidConfig("negative_ratio must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiffusionConfig {
    /// Activation probability along an edge inside a community.
    pub p_in: f64,
    /// Activation probability along an edge between communities.
    pub p_out: f64,
    pub seed_fraction: f64,
    pub runs: usize,
    pub rng_seed: u64,
}

impl Default for DiffusionConfig {
    fn default() -> Self {
        DiffusionConfig {
            p_in: 0.7,
            p_out: 0.3,
            seed_fraction: 0.01,
            runs: 200,
            rng_seed: 0,
        }
    }
}

impl DiffusionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.p_out && self.p_out <= self.p_in && self.p_in <= 1.0) {
            return Err(Error::InvalidConfig("need 0 <= p_out <= p_in <= 1"));
        }
        if !(self.seed_fraction > 0.0 && self.seed_fraction <= 1.0) {
            return Err(Error::InvalidConfig("seed_fraction must lie in (0, 1]"));
        }
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be at least 1"));
        }
        Ok(())
    }

    pub fn seed_count(&self, n: usize) -> usize {
        (libm::round(self.seed_fraction * n as f64) as usize).clamp(1, n.max(1))
    }
}

fn ordered(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Edges held out for testing plus the graph of the remaining ones.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSplit {
    pub train: Graph,
    /// Held-out edges, `u < v`, ascending.
    pub test: Vec<(usize, usize)>,
}

/// Holds out `round(test_fraction * m)` edges, at least one and leaving at
/// least one. The train graph keeps every node of `g`.
pub fn split_edges(g: &Graph, cfg: &LinkPredConfig) -> Result<EdgeSplit> {
    cfg.validate()?;
    let m = g.edge_count();
    if m < 2 {
        return Err(Error::EmptyTrainSet);
    }
    let held = (libm::round(cfg.test_fraction * m as f64) as usize).clamp(1, m - 1);
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let mut rng = stream_rng(cfg.rng_seed, SPLIT_STREAM);
    let mut picked = index::sample(&mut rng, m, held).into_vec();
    picked.sort_unstable();
    let mut is_test = vec![false; m];
    for &i in &picked {
        is_test[i] = true;
    }
    let test: Vec<(usize, usize)> = picked.iter().map(|&i| edges[i]).collect();
    let train = g.restricted_edges(|i| !is_test[i]);
    Ok(EdgeSplit { train, test })
}

/// `count` distinct non-edges of `g` between present nodes, ascending.
pub fn sample_non_edges(g: &Graph, count: usize, seed: u64) -> Vec<(usize, usize)> {
    let nodes: Vec<usize> = g.nodes().collect();
    let n = nodes.len();
    let available = n * n.saturating_sub(1) / 2 - g.edge_count();
    let count = count.min(available);
    let mut rng = stream_rng(seed, NEGATIVE_STREAM);
    let mut out = BTreeSet::new();
    if count * 4 >= available {
        let mut all: Vec<(usize, usize)> = Vec::with_capacity(available);
        for (i, &u) in nodes.iter().enumerate() {
            for &v in &nodes[i + 1..] {
                if !g.has_edge(u, v) {
                    all.push((u, v));
                }
            }
        }
        all.shuffle(&mut rng);
        out.extend(all.into_iter().take(count));
    } else {
        while out.len() < count {
            let u = nodes[rng.random_range(0..n)];
            let v = nodes[rng.random_range(0..n)];
            if u != v && !g.has_edge(u, v) {
                out.insert(ordered(u, v));
            }
        }
    }
    out.into_iter().collect()
}

/// Community-aware similarity of a non-adjacent pair on `train`.
pub fn score_pair(train: &Graph, partition: &Partition, u: usize, v: usize, scorer: Scorer) -> f64 {
    let cu = partition.label(u);
    let same = cu.is_some() && cu == partition.label(v);
    let (nu, nv) = (train.neighbors(u), train.neighbors(v));
    let (mut i, mut j) = (0, 0);
    let (mut within, mut inter) = (0usize, 0usize);
    let (mut ra_all, mut ra_within) = (0.0, 0.0);
    while i < nu.len() && j < nv.len() {
        match nu[i].cmp(&nv[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                let z = nu[i];
                let inv = 1.0 / train.degree(z) as f64;
                ra_all += inv;
                if same && partition.label(z) == cu {
                    within += 1;
                    ra_within += inv;
                } else {
                    inter += 1;
                }
                i += 1;
                j += 1;
            }
        }
    }
    match scorer {
        Scorer::WithinInterCluster => {
            if within == 0 {
                0.0
            } else {
                within as f64 / (inter as f64 + WIC_EPSILON)
            }
        }
        Scorer::ModifiedCommonNeighbors => (within + inter + within) as f64,
        Scorer::ModifiedResourceAllocation => ra_all + ra_within,
    }
}

/// Scores every candidate, predicts the top `|positives|` as edges (ties go
/// to the smaller pair) and returns F1, which equals precision and recall.
/// Returns 0 when there are no positives.
pub fn f1_from_candidates(
    train: &Graph,
    partition: &Partition,
    positives: &[(usize, usize)],
    negatives: &[(usize, usize)],
    scorer: Scorer,
) -> f64 {
    if positives.is_empty() {
        return 0.0;
    }
    let mut scored: Vec<(f64, (usize, usize), bool)> = positives
        .iter()
        .map(|&e| (e, true))
        .chain(negatives.iter().map(|&e| (e, false)))
        .map(|((u, v), pos)| (score_pair(train, partition, u, v, scorer), (u, v), pos))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let hits = scored.iter().take(positives.len()).filter(|c| c.2).count();
    hits as f64 / positives.len() as f64
}

/// Split, sample negatives from the non-edges of `g`, score with the given
/// partition and return F1.
pub fn link_prediction_f1(g: &Graph, partition: &Partition, cfg: &LinkPredConfig) -> Result<f64> {
    partition.check_covers(g)?;
    let split = split_edges(g, cfg)?;
    let negatives = negatives_for(g, split.test.len(), cfg);
    Ok(f1_from_candidates(
        &split.train,
        partition,
        &split.test,
        &negatives,
        cfg.scorer,
    ))
}

fn negatives_for(g: &Graph, positives: usize, cfg: &LinkPredConfig) -> Vec<(usize, usize)> {
    let count = libm::round(cfg.negative_ratio * positives as f64) as usize;
    sample_non_edges(g, count.max(1), cfg.rng_seed)
}

/// One cascade: seeds, then every activation in order with its parent.
#[derive(Debug, Clone, PartialEq)]
pub struct Cascade {
    pub seeds: Vec<usize>,
    /// `(node, parent)` in activation order; seeds have no parent.
    pub activations: Vec<(usize, Option<usize>)>,
}

impl Cascade {
    pub fn active_count(&self) -> usize {
        self.activations.len()
    }
}

/// Runs a single cascade from `seed_count` random present nodes.
pub fn cascade_once<R: Rng + ?Sized>(
    g: &Graph,
    partition: &Partition,
    p_in: f64,
    p_out: f64,
    seed_count: usize,
    rng: &mut R,
) -> Cascade {
    let nodes: Vec<usize> = g.nodes().collect();
    let mut seeds: Vec<usize> = index::sample(rng, nodes.len(), seed_count.min(nodes.len()))
        .into_iter()
        .map(|i| nodes[i])
        .collect();
    seeds.sort_unstable();
    let mut active = vec![false; g.universe_size()];
    let mut activations = Vec::new();
    let mut frontier = VecDeque::new();
    for &s in &seeds {
        active[s] = true;
        activations.push((s, None));
        frontier.push_back(s);
    }
    while let Some(u) = frontier.pop_front() {
        let cu = partition.label(u);
        for &w in g.neighbors(u) {
            if active[w] {
                continue;
            }
            let p = if partition.label(w) == cu { p_in } else { p_out };
            if rng.random::<f64>() < p {
                active[w] = true;
                activations.push((w, Some(u)));
                frontier.push_back(w);
            }
        }
    }
    Cascade { seeds, activations }
}

/// Final active fraction of each run; run `r` draws from its own stream.
pub fn cascade_fractions(g: &Graph, partition: &Partition, cfg: &DiffusionConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    partition.check_covers(g)?;
    let n = g.node_count();
    let seeds = cfg.seed_count(n);
    let run = |r: usize| {
        let mut rng = stream_rng(cfg.rng_seed, r as u64);
        cascade_once(g, partition, cfg.p_in, cfg.p_out, seeds, &mut rng).active_count() as f64 / n as f64
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok((0..cfg.runs).into_par_iter().map(run).collect())
    }
    #[cfg(not(feature = "parallel"))]
    Ok((0..cfg.runs).map(run).collect())
}

/// Mean final active fraction over `cfg.runs` cascades.
pub fn independent_cascade(g: &Graph, partition: &Partition, cfg: &DiffusionConfig) -> Result<f64> {
    let fractions = cascade_fractions(g, partition, cfg)?;
    Ok(fractions.iter().sum::<f64>() / fractions.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TaskConfig {
    LinkPrediction(LinkPredConfig),
    Diffusion(DiffusionConfig),
}

impl TaskConfig {
    pub fn name(&self) -> &'static str {
        match self {
            Self::LinkPrediction(_) => "linkpred",
            Self::Diffusion(_) => "diffusion",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TaskReport {
    pub task: TaskConfig,
    pub metric_original: f64,
    pub metric_perturbed: f64,
    /// `metric_original - metric_perturbed`.
    pub delta: f64,
    /// Per-run active fractions for diffusion, empty for link prediction.
    pub runs_original: Vec<f64>,
    pub runs_perturbed: Vec<f64>,
    pub test_edges_original: usize,
    pub test_edges_perturbed: usize,
    pub detector_seed: u64,
}

/// Runs `task` on `(g, A(g))` and on `(g \ s, A(g \ s))`.
///
/// Link prediction is paired: the perturbed side scores the held-out edges
/// and negatives of the original split that survive the removal, on the
/// original train graph minus `s`. Diffusion uses the same run streams on
/// both sides.
pub fn run_task_with<D: CommunityDetector>(
    g: &Graph,
    s: &NodeSet,
    task: &TaskConfig,
    detector: &D,
    detector_seed: u64,
) -> Result<TaskReport> {
    let g_pert = g.remove_nodes(s)?;
    let x = detector.detect(g, detector_seed);
    let y = detector.detect(&g_pert, detector_seed);
    let mut report = TaskReport {
        task: *task,
        metric_original: 0.0,
        metric_perturbed: 0.0,
        delta: 0.0,
        runs_original: Vec::new(),
        runs_perturbed: Vec::new(),
        test_edges_original: 0,
        test_edges_perturbed: 0,
        detector_seed,
    };
    match task {
        TaskConfig::LinkPrediction(cfg) => {
            let split = split_edges(g, cfg)?;
            let negatives = negatives_for(g, split.test.len(), cfg);
            let survives = |&(u, v): &(usize, usize)| g_pert.contains(u) && g_pert.contains(v);
            let test_p: Vec<_> = split.test.iter().copied().filter(survives).collect();
            let neg_p: Vec<_> = negatives.iter().copied().filter(survives).collect();
            let train_p = split.train.remove_nodes(s)?;
            report.metric_original = f1_from_candidates(&split.train, &x, &split.test, &negatives, cfg.scorer);
            report.metric_perturbed = f1_from_candidates(&train_p, &y, &test_p, &neg_p, cfg.scorer);
            report.test_edges_original = split.test.len();
            report.test_edges_perturbed = test_p.len();
        }
        TaskConfig::Diffusion(cfg) => {
            report.runs_original = cascade_fractions(g, &x, cfg)?;
            report.runs_perturbed = cascade_fractions(&g_pert, &y, cfg)?;
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            report.metric_original = mean(&report.runs_original);
            report.metric_perturbed = mean(&report.runs_perturbed);
        }
    }
    report.delta = report.metric_original - report.metric_perturbed;
    Ok(report)
}

/// [`run_task_with`] on an attack's selection with the Louvain detector.
pub fn run_task(g: &Graph, attack: &AttackResult, task: &TaskConfig, detector: &DetectorConfig) -> Result<TaskReport> {
    let s = attack.selected_set();
    s.check_within(g)?;
    run_task_with(g, &s, task, &Louvain::new(*detector), detector.rng_seed)
}
