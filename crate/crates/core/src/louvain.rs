//! Louvain modularity optimization and the partition type it produces.
//!
//! Each level runs greedy local moves until no node wants to change
//! community, then collapses every community into a meta-node and repeats on
//! the coarser graph. Node visiting order is a seeded shuffle (or ascending
//! id when shuffling is off), so results are reproducible for a fixed seed.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::rng_from_seed;

const UNASSIGNED: usize = usize::MAX;

/// Moves must beat staying put by more than this (in edge-weight units).
const MOVE_EPS: f64 = 1e-12;

/// Hard stop on local-move sweeps within one level.
const MAX_SWEEPS: usize = 1_000;

/// Per-community aggregates on the graph a partition was built for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityAggregates {
    pub internal_edges: Vec<usize>,
    pub total_degree: Vec<usize>,
}

/// Disjoint assignment of the present nodes of a graph to communities
/// `0..c`. Community ids are canonical: they are numbered in order of each
/// community's smallest member, so equal groupings compare equal.
#[derive(Debug, Clone)]
pub struct Partition {
    labels: Vec<usize>,
    sizes: Vec<usize>,
    node_count: usize,
    aggregates: Option<CommunityAggregates>,
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}

impl Partition {
    /// Builds a partition from a per-id assignment (`None` = node not covered).
    /// Arbitrary label values are renumbered canonically.
    pub fn from_assignment(assignment: &[Option<usize>]) -> Self {
        let mut labels = vec![UNASSIGNED; assignment.len()];
        let mut sizes = Vec::new();
        let mut remap: alloc::collections::BTreeMap<usize, usize> = Default::default();
        let mut node_count = 0;
        for (v, a) in assignment.iter().enumerate() {
            if let Some(raw) = *a {
                let next = remap.len();
                let id = *remap.entry(raw).or_insert(next);
                if id == sizes.len() {
                    sizes.push(0);
                }
                sizes[id] += 1;
                labels[v] = id;
                node_count += 1;
            }
        }
        Partition {
            labels,
            sizes,
            node_count,
            aggregates: None,
        }
    }

    /// Builds a partition from explicit groups over `universe` ids.
    pub fn from_communities(universe: usize, groups: &[Vec<usize>]) -> Result<Self> {
        let mut assignment = vec![None; universe];
        for (c, group) in groups.iter().enumerate() {
            for &v in group {
                if v >= universe {
                    return Err(Error::NodeOutOfRange { node: v, universe });
                }
                if assignment[v].is_some() {
                    return Err(Error::InvalidConfig("communities overlap"));
                }
                assignment[v] = Some(c);
            }
        }
        Ok(Self::from_assignment(&assignment))
    }

    /// Like [`Partition::from_assignment`], but checks that exactly the
    /// present nodes of `g` are covered and caches community aggregates.
    pub fn for_graph(g: &Graph, assignment: &[Option<usize>]) -> Result<Self> {
        let p = Self::from_assignment(assignment);
        p.check_covers(g)?;
        Ok(p.with_aggregates(g))
    }

    pub fn singletons(g: &Graph) -> Self {
        let assignment: Vec<_> = (0..g.universe_size())
            .map(|v| if g.contains(v) { Some(v) } else { None })
            .collect();
        Self::from_assignment(&assignment).with_aggregates(g)
    }

    pub fn single_community(g: &Graph) -> Self {
        let assignment: Vec<_> = (0..g.universe_size())
            .map(|v| if g.contains(v) { Some(0) } else { None })
            .collect();
        Self::from_assignment(&assignment).with_aggregates(g)
    }

    fn with_aggregates(mut self, g: &Graph) -> Self {
        let c = self.community_count();
        let mut internal_edges = vec![0; c];
        let mut total_degree = vec![0; c];
        for v in g.nodes() {
            let cv = self.labels[v];
            total_degree[cv] += g.degree(v);
            for &w in g.neighbors(v) {
                if w > v && self.labels[w] == cv {
                    internal_edges[cv] += 1;
                }
            }
        }
        self.aggregates = Some(CommunityAggregates {
            internal_edges,
            total_degree,
        });
        self
    }

    /// Errors unless the covered nodes are exactly the present nodes of `g`.
    pub fn check_covers(&self, g: &Graph) -> Result<()> {
        if self.universe_size() != g.universe_size() {
            return Err(Error::UniverseMismatch);
        }
        for v in 0..g.universe_size() {
            match (g.contains(v), self.labels[v] != UNASSIGNED) {
                (true, false) => return Err(Error::UncoveredNode(v)),
                (false, true) => return Err(Error::UniverseMismatch),
                _ => {}
            }
        }
        Ok(())
    }

    pub fn universe_size(&self) -> usize {
        self.labels.len()
    }

    /// Number of covered nodes.
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn community_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn label(&self, v: usize) -> Option<usize> {
        match self.labels.get(v) {
            Some(&c) if c != UNASSIGNED => Some(c),
            _ => None,
        }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn aggregates(&self) -> Option<&CommunityAggregates> {
        self.aggregates.as_ref()
    }

    /// Covered node ids in ascending order.
    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(v, &c)| if c != UNASSIGNED { Some(v) } else { None })
    }

    /// Members of every community, each list ascending.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
        for v in self.nodes() {
            out[self.labels[v]].push(v);
        }
        out
    }

    /// Per-id assignment, `None` for uncovered ids.
    pub fn assignment(&self) -> Vec<Option<usize>> {
        (0..self.universe_size()).map(|v| self.label(v)).collect()
    }
}

/// Louvain settings.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DetectorConfig {
    pub rng_seed: u64,
    pub max_passes: usize,
    pub min_modularity_gain: f64,
    /// Visit nodes in a seeded random order instead of ascending id.
    pub shuffle: bool,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            rng_seed: 0,
            max_passes: 100,
            min_modularity_gain: 1e-7,
            shuffle: true,
        }
    }
}

impl DetectorConfig {
    pub fn with_seed(self, rng_seed: u64) -> Self {
        DetectorConfig { rng_seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_passes == 0 {
            return Err(Error::InvalidConfig("max_passes must be at least 1"));
        }
        if self.min_modularity_gain.is_nan() || self.min_modularity_gain < 0.0 {
            return Err(Error::InvalidConfig("min_modularity_gain must be non-negative"));
        }
        Ok(())
    }
}

/// Anything that turns a graph into a partition of its present nodes.
///
/// The seed is passed per call so search loops can derive fresh streams.
pub trait CommunityDetector: Sync {
    fn detect(&self, g: &Graph, seed: u64) -> Partition;
}

/// The shipped detector.
#[derive(Debug, Clone, Copy, Default)]
pub struct Louvain {
    pub config: DetectorConfig,
}

impl Louvain {
    pub fn new(config: DetectorConfig) -> Self {
        Louvain { config }
    }
}

impl CommunityDetector for Louvain {
    fn detect(&self, g: &Graph, seed: u64) -> Partition {
        detect_communities(g, &self.config.with_seed(seed))
    }
}

/// Graph with per-node self weight, as produced by coarsening. Self weight
/// counts internal edge weight once; a node's strength is
/// `2 * self_weight + sum of incident edge weights`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    self_weights: Vec<f64>,
    strengths: Vec<f64>,
    total_weight: f64,
}

impl WeightedGraph {
    /// Dense copy of the present nodes of `g` with unit edge weights.
    /// Returns the graph and the universe id of every dense index.
    pub fn from_graph(g: &Graph) -> (Self, Vec<usize>) {
        let ids: Vec<usize> = g.nodes().collect();
        let mut dense = vec![UNASSIGNED; g.universe_size()];
        for (i, &v) in ids.iter().enumerate() {
            dense[v] = i;
        }
        let mut offsets = Vec::with_capacity(ids.len() + 1);
        offsets.push(0);
        let mut targets = Vec::with_capacity(2 * g.edge_count());
        for &v in &ids {
            targets.extend(g.neighbors(v).iter().map(|&w| dense[w]));
            offsets.push(targets.len());
        }
        let weights = vec![1.0; targets.len()];
        let wg = Self::assemble(offsets, targets, weights, vec![0.0; ids.len()]);
        (wg, ids)
    }

    fn assemble(offsets: Vec<usize>, targets: Vec<usize>, weights: Vec<f64>, self_weights: Vec<f64>) -> Self {
        let n = self_weights.len();
        let strengths: Vec<f64> = (0..n)
            .map(|i| 2.0 * self_weights[i] + weights[offsets[i]..offsets[i + 1]].iter().sum::<f64>())
            .collect();
        let total_weight = strengths.iter().sum::<f64>() / 2.0;
        WeightedGraph {
            offsets,
            targets,
            weights,
            self_weights,
            strengths,
            total_weight,
        }
    }

    pub fn node_count(&self) -> usize {
        self.self_weights.len()
    }

    /// Total edge weight `m`, self weights included.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn self_weight(&self, i: usize) -> f64 {
        self.self_weights[i]
    }

    pub fn strength(&self, i: usize) -> f64 {
        self.strengths[i]
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.offsets[i]..self.offsets[i + 1]).map(move |e| (self.targets[e], self.weights[e]))
    }

    pub fn edge_weight(&self, i: usize, j: usize) -> f64 {
        self.neighbors(i).filter(|&(t, _)| t == j).map(|(_, w)| w).sum()
    }

    /// Weighted modularity of `labels` (any integer labels).
    pub fn modularity(&self, labels: &[usize]) -> f64 {
        let m = self.total_weight;
        if m == 0.0 {
            return 0.0;
        }
        let c = labels.iter().copied().max().map_or(0, |x| x + 1);
        let mut internal = vec![0.0; c];
        let mut total = vec![0.0; c];
        for i in 0..self.node_count() {
            let ci = labels[i];
            total[ci] += self.strengths[i];
            internal[ci] += self.self_weights[i];
            for (j, w) in self.neighbors(i) {
                if j > i && labels[j] == ci {
                    internal[ci] += w;
                }
            }
        }
        internal
            .iter()
            .zip(&total)
            .map(|(&e, &d)| e / m - (d / (2.0 * m)) * (d / (2.0 * m)))
            .sum()
    }
}

/// Outcome of one local-move phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalMove {
    /// Modularity after minus modularity before.
    pub gain: f64,
    /// Number of individual node moves made.
    pub moves: usize,
}

/// Greedy local moves: every node in `order` joins the neighboring community
/// with the largest modularity gain, repeated until a full sweep moves
/// nothing. Ties go to the smallest community id; staying put wins ties.
pub fn local_move_pass(g: &WeightedGraph, labels: &mut [usize], order: &[usize]) -> LocalMove {
    let n = g.node_count();
    let m2 = 2.0 * g.total_weight();
    let before = g.modularity(labels);
    if m2 == 0.0 {
        return LocalMove { gain: 0.0, moves: 0 };
    }
    let slots = labels.iter().copied().max().map_or(0, |x| x + 1).max(n);
    let mut community_total = vec![0.0; slots];
    for i in 0..n {
        community_total[labels[i]] += g.strength(i);
    }
    let mut link = vec![0.0; slots];
    let mut touched: Vec<usize> = Vec::new();
    let mut moves = 0;

    for _ in 0..MAX_SWEEPS {
        let mut moved_this_sweep = 0;
        for &i in order {
            let ki = g.strength(i);
            if ki == 0.0 {
                continue;
            }
            let own = labels[i];
            for (j, w) in g.neighbors(i) {
                let cj = labels[j];
                if link[cj] == 0.0 {
                    touched.push(cj);
                }
                link[cj] += w;
            }
            community_total[own] -= ki;
            let gain_of = |c: usize, link: &[f64], total: &[f64]| link[c] - total[c] * ki / m2;
            let mut best = own;
            let mut best_gain = gain_of(own, &link, &community_total);
            touched.sort_unstable();
            for &c in &touched {
                if c == own {
                    continue;
                }
                let gain = gain_of(c, &link, &community_total);
                if gain > best_gain + MOVE_EPS {
                    best = c;
                    best_gain = gain;
                }
            }
            community_total[best] += ki;
            if best != own {
                labels[i] = best;
                moved_this_sweep += 1;
            }
            for &c in &touched {
                link[c] = 0.0;
            }
            touched.clear();
        }
        moves += moved_this_sweep;
        if moved_this_sweep == 0 {
            break;
        }
    }
    LocalMove {
        gain: g.modularity(labels) - before,
        moves,
    }
}

/// Collapses each community of `labels` into one meta-node. Returns the
/// coarse graph and the dense meta-node index of every fine node; meta-nodes
/// are numbered by their smallest fine member.
pub fn aggregate_graph(g: &WeightedGraph, labels: &[usize]) -> (WeightedGraph, Vec<usize>) {
    let n = g.node_count();
    let slots = labels.iter().copied().max().map_or(0, |x| x + 1);
    let mut remap = vec![UNASSIGNED; slots];
    let mut dense = vec![0; n];
    let mut count = 0;
    for i in 0..n {
        let c = labels[i];
        if remap[c] == UNASSIGNED {
            remap[c] = count;
            count += 1;
        }
        dense[i] = remap[c];
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
    for i in 0..n {
        members[dense[i]].push(i);
    }

    let mut offsets = Vec::with_capacity(count + 1);
    offsets.push(0);
    let mut targets = Vec::new();
    let mut weights = Vec::new();
    let mut self_weights = vec![0.0; count];
    let mut acc = vec![0.0; count];
    let mut touched = Vec::new();
    for c in 0..count {
        for &i in &members[c] {
            self_weights[c] += g.self_weight(i);
            for (j, w) in g.neighbors(i) {
                let cj = dense[j];
                if cj == c {
                    // each internal edge is seen from both ends
                    self_weights[c] += w / 2.0;
                } else {
                    if acc[cj] == 0.0 {
                        touched.push(cj);
                    }
                    acc[cj] += w;
                }
            }
        }
        touched.sort_unstable();
        for &cj in &touched {
            targets.push(cj);
            weights.push(acc[cj]);
            acc[cj] = 0.0;
        }
        touched.clear();
        offsets.push(targets.len());
    }
    (WeightedGraph::assemble(offsets, targets, weights, self_weights), dense)
}

/// Runs Louvain on the present nodes of `g`.
pub fn detect_communities(g: &Graph, cfg: &DetectorConfig) -> Partition {
    let (mut wg, ids) = WeightedGraph::from_graph(g);
    let mut membership: Vec<usize> = (0..ids.len()).collect();
    let mut rng = rng_from_seed(cfg.rng_seed);
    for _ in 0..cfg.max_passes.max(1) {
        let n = wg.node_count();
        let mut labels: Vec<usize> = (0..n).collect();
        let mut order: Vec<usize> = (0..n).collect();
        if cfg.shuffle {
            order.shuffle(&mut rng);
        }
        let outcome = local_move_pass(&wg, &mut labels, &order);
        if outcome.moves == 0 {
            break;
        }
        let (coarse, dense) = aggregate_graph(&wg, &labels);
        for c in membership.iter_mut() {
            *c = dense[*c];
        }
        wg = coarse;
        if outcome.gain < cfg.min_modularity_gain {
            break;
        }
    }
    let mut assignment = vec![None; g.universe_size()];
    for (i, &v) in ids.iter().enumerate() {
        assignment[v] = Some(membership[i]);
    }
    Partition::from_assignment(&assignment).with_aggregates(g)
}
