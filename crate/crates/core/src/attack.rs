//! Searches for the node set whose removal maximizes a damage score.
//!
//! * [`exhaustive_attack`] enumerates every k-subset.
//! * [`network_greedy_attack`] removes the top-k nodes of one structural
//!   ranking of the whole graph.
//! * [`community_greedy_attack`] repeatedly picks the most exposed community
//!   by a community metric, then its top node by a node metric, refreshing
//!   the detected communities between removals.
//!
//! All three report the final score as `evaluate(A(G), A(G \ S))` with the
//! detector run under the master seed, so a result is reproduced exactly by
//! [`score_removal`] on its selected set.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::compare::{base_modularity, evaluate_with_base, restrict, DamageScore, ValueFunctionId};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};
use crate::louvain::{CommunityDetector, DetectorConfig, Louvain, Partition};
use crate::metrics::{community_metric, node_metric, rank_nodes, CommunityMetricId, MetricVector, NodeMetricId};
use crate::rng::derive_seed;

/// How many nodes to remove.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Budget {
    Absolute(usize),
    /// Fraction of the present nodes, rounded up.
    Fraction(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Algorithm {
    Exhaustive,
    NetworkGreedy,
    CommunityGreedy,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Self::Exhaustive, Self::NetworkGreedy, Self::CommunityGreedy];

    pub fn name(self) -> &'static str {
        match self {
            Self::Exhaustive => "exhaustive",
            Self::NetworkGreedy => "netgreedy",
            Self::CommunityGreedy => "commgreedy",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(Self::Exhaustive),
            "netgreedy" | "network_greedy" => Ok(Self::NetworkGreedy),
            "commgreedy" | "community_greedy" => Ok(Self::CommunityGreedy),
            _ => Err(Error::UnknownName {
                kind: "algorithm",
                name: s.into(),
            }),
        }
    }
}

/// Default cap on the number of subsets the exhaustive search may visit.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackSpec {
    pub budget: Budget,
    pub value_function: ValueFunctionId,
    /// `rng_seed` is the master seed of the whole attack.
    pub detector: DetectorConfig,
    pub node_metric: Option<NodeMetricId>,
    pub community_metric: Option<CommunityMetricId>,
    /// Nodes removed between detector refreshes in the community greedy loop.
    pub batch_size: usize,
    /// Rank low node-metric values first.
    pub invert_node_metric: bool,
    /// Network greedy only: re-rank after every removal.
    pub iterative: bool,
    pub enumeration_cap: u128,
}

impl AttackSpec {
    pub fn new(budget: Budget, value_function: ValueFunctionId) -> Self {
        AttackSpec {
            budget,
            value_function,
            detector: DetectorConfig::default(),
            node_metric: None,
            community_metric: None,
            batch_size: 1,
            invert_node_metric: false,
            iterative: false,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.detector.rng_seed = seed;
        self
    }

    pub fn with_node_metric(mut self, m: NodeMetricId) -> Self {
        self.node_metric = Some(m);
        self
    }

    pub fn with_community_metric(mut self, m: CommunityMetricId) -> Self {
        self.community_metric = Some(m);
        self
    }

    pub fn with_batch_size(mut self, batch: usize) -> Self {
        self.batch_size = batch;
        self
    }

    pub fn seed(&self) -> u64 {
        self.detector.rng_seed
    }
}

/// One removal decision.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceStep {
    pub step: usize,
    pub node: usize,
    /// Node-metric value that ranked `node` (absent for exhaustive search).
    pub node_score: Option<f64>,
    /// Community of the refreshed partition the node was taken from.
    pub community: Option<usize>,
    pub community_score: Option<f64>,
    pub community_size: Option<usize>,
    /// Communities in the partition the decision was made on.
    pub communities: Option<usize>,
    /// The chosen community ran out before the batch was filled.
    pub early_refresh: bool,
}

impl TraceStep {
    fn ranked(step: usize, node: usize, score: f64) -> Self {
        TraceStep {
            step,
            node,
            node_score: Some(score),
            community: None,
            community_score: None,
            community_size: None,
            communities: None,
            early_refresh: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackResult {
    pub algorithm: Algorithm,
    pub value_function: ValueFunctionId,
    pub node_metric: Option<NodeMetricId>,
    pub community_metric: Option<CommunityMetricId>,
    pub k: usize,
    /// Removed nodes in the order they were chosen (ascending for exhaustive).
    pub selected: Vec<usize>,
    pub score: DamageScore,
    pub trace: Vec<TraceStep>,
    pub seed: u64,
    pub batch_size: usize,
}

impl AttackResult {
    pub fn selected_set(&self) -> NodeSet {
        NodeSet::new(self.selected.iter().copied())
    }
}

/// Absolute budgets pass through; fractions become `ceil(f * n)` clamped to
/// `[1, n - 1]`. Fails unless `1 <= k < n`.
pub fn resolve_budget(g: &Graph, budget: Budget) -> Result<usize> {
    let n = g.node_count();
    let k = match budget {
        Budget::Absolute(k) => k,
        Budget::Fraction(f) => {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::InvalidConfig("budget fraction must lie in (0, 1)"));
            }
            let k = libm::ceil(f * n as f64) as usize;
            k.clamp(1, n.saturating_sub(1).max(1))
        }
    };
    if k == 0 || k >= n {
        return Err(Error::InvalidBudget { k, n });
    }
    Ok(k)
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(x) => x / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Scores removing `s` from `g`: the detector runs under `seed` on both the
/// original and the perturbed graph.
pub fn score_removal<D: CommunityDetector>(
    g: &Graph,
    s: &NodeSet,
    vf: ValueFunctionId,
    detector: &D,
    seed: u64,
) -> Result<DamageScore> {
    let x = detector.detect(g, seed);
    let g_pert = g.remove_nodes(s)?;
    let y = detector.detect(&g_pert, seed);
    evaluate_with_base(vf, base_modularity(g, &x)?, &x, &g_pert, &y)
}

/// Damage for several value functions on one detected perturbation.
struct Scorer<'a> {
    x: &'a Partition,
    base_q: f64,
    vfs: &'a [ValueFunctionId],
}

impl Scorer<'_> {
    fn score(&self, g_pert: &Graph, y: &Partition, out: &mut Vec<DamageScore>) -> Result<()> {
        out.clear();
        let needs_restrict = self.vfs.iter().any(|&vf| vf != ValueFunctionId::ModularityDiff);
        let before = if needs_restrict {
            Some(restrict(self.x, &g_pert.node_set())?)
        } else {
            None
        };
        for &vf in self.vfs {
            let raw = match vf {
                ValueFunctionId::ModularityDiff => evaluate_with_base(vf, self.base_q, self.x, g_pert, y)?.raw,
                ValueFunctionId::Nmi => crate::compare::nmi(before.as_ref().unwrap(), y)?,
                ValueFunctionId::Ari => crate::compare::ari(before.as_ref().unwrap(), y)?,
            };
            out.push(DamageScore::new(vf, raw));
        }
        Ok(())
    }
}

#[derive(Clone)]
struct Best {
    damage: Vec<Option<(DamageScore, Vec<usize>)>>,
}

impl Best {
    fn new(len: usize) -> Self {
        Best {
            damage: alloc::vec![None; len],
        }
    }

    /// Keeps the incumbent on ties, so visiting subsets in lexicographic
    /// order retains the smallest one.
    fn offer(&mut self, scores: &[DamageScore], subset: &[usize]) {
        for (slot, s) in self.damage.iter_mut().zip(scores) {
            let better = match slot {
                None => true,
                Some((cur, _)) => s.damage > cur.damage,
            };
            if better {
                *slot = Some((*s, subset.to_vec()));
            }
        }
    }

    fn merge(mut self, later: Best) -> Best {
        for (slot, other) in self.damage.iter_mut().zip(later.damage) {
            if let Some((s, subset)) = other {
                let better = match slot {
                    None => true,
                    Some((cur, _)) => s.damage > cur.damage,
                };
                if better {
                    *slot = Some((s, subset));
                }
            }
        }
        self
    }
}

/// Visits, in lexicographic order, every k-subset of `nodes` whose first
/// element is `nodes[first]`.
fn search_from_first<D: CommunityDetector>(
    g: &Graph,
    nodes: &[usize],
    first: usize,
    k: usize,
    detector: &D,
    seed: u64,
    scorer: &Scorer<'_>,
) -> Result<Best> {
    let mut best = Best::new(scorer.vfs.len());
    let n = nodes.len();
    if n - first < k {
        return Ok(best);
    }
    let mut idx: Vec<usize> = (first..first + k).collect();
    let mut subset = alloc::vec![0usize; k];
    let mut scores = Vec::with_capacity(scorer.vfs.len());
    loop {
        for (s, &i) in subset.iter_mut().zip(&idx) {
            *s = nodes[i];
        }
        let g_pert = g.remove_nodes(&NodeSet::new(subset.iter().copied()))?;
        let y = detector.detect(&g_pert, seed);
        scorer.score(&g_pert, &y, &mut scores)?;
        best.offer(&scores, &subset);

        // advance positions 1..k; position 0 stays at `first`
        let mut pos = k;
        loop {
            if pos <= 1 {
                return Ok(best);
            }
            pos -= 1;
            if idx[pos] < n - (k - pos) {
                break;
            }
        }
        idx[pos] += 1;
        for j in pos + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Exhaustive search for several value functions at once; each subset is
/// detected once and scored under every function. Results come back in the
/// order of `vfs`. Ties go to the lexicographically smallest subset.
pub fn exhaustive_attack_multi_with<D: CommunityDetector>(
    g: &Graph,
    spec: &AttackSpec,
    vfs: &[ValueFunctionId],
    detector: &D,
) -> Result<Vec<AttackResult>> {
    let k = resolve_budget(g, spec.budget)?;
    let total = binomial(g.node_count(), k);
    if total > spec.enumeration_cap {
        return Err(Error::EnumerationCap {
            combinations: total,
            cap: spec.enumeration_cap,
        });
    }
    let seed = spec.seed();
    let x = detector.detect(g, seed);
    let scorer = Scorer {
        x: &x,
        base_q: base_modularity(g, &x)?,
        vfs,
    };
    let nodes: Vec<usize> = g.nodes().collect();
    let firsts: Vec<usize> = (0..=nodes.len() - k).collect();

    #[cfg(feature = "parallel")]
    let parts: Vec<Result<Best>> = {
        use rayon::prelude::*;
        firsts
            .par_iter()
            .map(|&f| search_from_first(g, &nodes, f, k, detector, seed, &scorer))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Result<Best>> = firsts
        .iter()
        .map(|&f| search_from_first(g, &nodes, f, k, detector, seed, &scorer))
        .collect();

    let mut best = Best::new(vfs.len());
    for part in parts {
        best = best.merge(part?);
    }
    Ok(vfs
        .iter()
        .zip(best.damage)
        .map(|(&vf, slot)| {
            let (score, selected) = slot.expect("at least one subset is visited");
            AttackResult {
                algorithm: Algorithm::Exhaustive,
                value_function: vf,
                node_metric: None,
                community_metric: None,
                k,
                selected,
                score,
                trace: Vec::new(),
                seed,
                batch_size: spec.batch_size,
            }
        })
        .collect())
}

pub fn exhaustive_attack_multi(g: &Graph, spec: &AttackSpec, vfs: &[ValueFunctionId]) -> Result<Vec<AttackResult>> {
    exhaustive_attack_multi_with(g, spec, vfs, &Louvain::new(spec.detector))
}

pub fn exhaustive_attack_with<D: CommunityDetector>(
    g: &Graph,
    spec: &AttackSpec,
    detector: &D,
) -> Result<AttackResult> {
    let mut out = exhaustive_attack_multi_with(g, spec, &[spec.value_function], detector)?;
    Ok(out.remove(0))
}

pub fn exhaustive_attack(g: &Graph, spec: &AttackSpec) -> Result<AttackResult> {
    exhaustive_attack_with(g, spec, &Louvain::new(spec.detector))
}

fn metric_for(g: &Graph, id: NodeMetricId, invert: bool) -> MetricVector {
    let mv = node_metric(g, id);
    if invert {
        mv.inverted()
    } else {
        mv
    }
}

pub fn network_greedy_attack_with<D: CommunityDetector>(
    g: &Graph,
    spec: &AttackSpec,
    detector: &D,
) -> Result<AttackResult> {
    let nm = spec.node_metric.ok_or(Error::MissingNodeMetric)?;
    let k = resolve_budget(g, spec.budget)?;
    let mut trace = Vec::with_capacity(k);
    let selected: Vec<usize> = if spec.iterative {
        let mut cur = g.clone();
        let mut picked = Vec::with_capacity(k);
        for step in 0..k {
            let mv = metric_for(&cur, nm, spec.invert_node_metric);
            let v = rank_nodes(&mv, 1)[0];
            trace.push(TraceStep::ranked(step, v, mv.get(v).unwrap_or(0.0)));
            cur = cur.remove_nodes(&NodeSet::new([v]))?;
            picked.push(v);
        }
        picked
    } else {
        let mv = metric_for(g, nm, spec.invert_node_metric);
        let top = rank_nodes(&mv, k);
        for (step, &v) in top.iter().enumerate() {
            trace.push(TraceStep::ranked(step, v, mv.get(v).unwrap_or(0.0)));
        }
        top
    };
    let score = score_removal(
        g,
        &NodeSet::new(selected.iter().copied()),
        spec.value_function,
        detector,
        spec.seed(),
    )?;
    Ok(AttackResult {
        algorithm: Algorithm::NetworkGreedy,
        value_function: spec.value_function,
        node_metric: Some(nm),
        community_metric: None,
        k,
        selected,
        score,
        trace,
        seed: spec.seed(),
        batch_size: spec.batch_size,
    })
}

pub fn network_greedy_attack(g: &Graph, spec: &AttackSpec) -> Result<AttackResult> {
    network_greedy_attack_with(g, spec, &Louvain::new(spec.detector))
}

/// Picks the community whose induced subgraph scores highest under `cm`;
/// ties go to the smaller community id.
fn best_community(cur: &Graph, y: &Partition, cm: CommunityMetricId) -> Result<(usize, f64, Graph)> {
    let mut best: Option<(usize, f64, Graph)> = None;
    for (c, members) in y.communities().into_iter().enumerate() {
        let sub = cur.induced_subgraph(&NodeSet::new(members))?;
        let score = community_metric(&sub, cur, cm)?;
        if best.as_ref().map_or(true, |b| score > b.1) {
            best = Some((c, score, sub));
        }
    }
    best.ok_or(Error::EmptyGraph)
}

pub fn community_greedy_attack_with<D: CommunityDetector>(
    g: &Graph,
    spec: &AttackSpec,
    detector: &D,
) -> Result<AttackResult> {
    let nm = spec.node_metric.ok_or(Error::MissingNodeMetric)?;
    let cm = spec.community_metric.ok_or(Error::MissingCommunityMetric)?;
    if spec.batch_size == 0 {
        return Err(Error::InvalidConfig("batch_size must be at least 1"));
    }
    let k = resolve_budget(g, spec.budget)?;
    let seed = spec.seed();

    let mut cur = g.clone();
    // the reference partition doubles as the first working partition
    let mut y = detector.detect(g, seed);
    let mut selected: Vec<usize> = Vec::with_capacity(k);
    let mut trace = Vec::with_capacity(k);
    let mut refreshes = 0u64;
    while selected.len() < k {
        let (c, c_score, sub) = best_community(&cur, &y, cm)?;
        let want = spec.batch_size.min(k - selected.len());
        let mv = metric_for(&sub, nm, spec.invert_node_metric);
        let batch = rank_nodes(&mv, want);
        let early = batch.len() < want;
        for (i, &v) in batch.iter().enumerate() {
            trace.push(TraceStep {
                step: selected.len() + i,
                node: v,
                node_score: mv.get(v),
                community: Some(c),
                community_score: Some(c_score),
                community_size: Some(sub.node_count()),
                communities: Some(y.community_count()),
                early_refresh: early && i + 1 == batch.len(),
            });
        }
        cur = cur.remove_nodes(&NodeSet::new(batch.iter().copied()))?;
        selected.extend(batch);
        if selected.len() < k {
            refreshes += 1;
            y = detector.detect(&cur, derive_seed(seed, refreshes));
        }
    }
    let score = score_removal(
        g,
        &NodeSet::new(selected.iter().copied()),
        spec.value_function,
        detector,
        seed,
    )?;
    Ok(AttackResult {
        algorithm: Algorithm::CommunityGreedy,
        value_function: spec.value_function,
        node_metric: Some(nm),
        community_metric: Some(cm),
        k,
        selected,
        score,
        trace,
        seed,
        batch_size: spec.batch_size,
    })
}

pub fn community_greedy_attack(g: &Graph, spec: &AttackSpec) -> Result<AttackResult> {
    community_greedy_attack_with(g, spec, &Louvain::new(spec.detector))
}

/// Dispatches on `algo`.
pub fn run_attack(g: &Graph, algo: Algorithm, spec: &AttackSpec) -> Result<AttackResult> {
    match algo {
        Algorithm::Exhaustive => exhaustive_attack(g, spec),
        Algorithm::NetworkGreedy => network_greedy_attack(g, spec),
        Algorithm::CommunityGreedy => community_greedy_attack(g, spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compare::evaluate;
    use crate::graph::tests::{star, two_triangles};
    use crate::louvain::detect_communities;

    #[test]
    fn budgets() {
        let g34 = Graph::from_edges(34, []).unwrap().0;
        assert_eq!(resolve_budget(&g34, Budget::Fraction(0.05)).unwrap(), 2);
        let g301 = Graph::from_edges(301, []).unwrap().0;
        assert_eq!(resolve_budget(&g301, Budget::Absolute(5)).unwrap(), 5);
        let big = Graph::from_edges(103_667, []).unwrap().0;
        // ceil(0.05 * 103667) = ceil(5183.35)
        assert_eq!(resolve_budget(&big, Budget::Fraction(0.05)).unwrap(), 5184);
        assert!(resolve_budget(&g34, Budget::Absolute(34)).is_err());
        assert_eq!(resolve_budget(&g34, Budget::Absolute(33)).unwrap(), 33);
        assert!(resolve_budget(&g34, Budget::Absolute(0)).is_err());
        assert!(resolve_budget(&g34, Budget::Fraction(1.5)).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(34, 5), 278_256);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(301, 5), 19_913_628_735);
    }

    #[test]
    fn exhaustive_k1_matches_loop() {
        let g = two_triangles();
        let spec = AttackSpec::new(Budget::Absolute(1), ValueFunctionId::ModularityDiff);
        let result = exhaustive_attack(&g, &spec).unwrap();
        let cfg = spec.detector;
        let x = detect_communities(&g, &cfg);
        let mut best: Option<(f64, usize)> = None;
        for v in 0..6 {
            let gp = g.remove_nodes(&NodeSet::new([v])).unwrap();
            let y = detect_communities(&gp, &cfg);
            let d = evaluate(ValueFunctionId::ModularityDiff, &g, &x, &gp, &y)
                .unwrap()
                .damage;
            if best.map_or(true, |(bd, _)| d > bd) {
                best = Some((d, v));
            }
        }
        let (d, v) = best.unwrap();
        assert_eq!(result.selected, [v]);
        assert_eq!(result.score.damage, d);
    }

    #[test]
    fn exhaustive_cap() {
        let g = two_triangles();
        let mut spec = AttackSpec::new(Budget::Absolute(2), ValueFunctionId::Nmi);
        spec.enumeration_cap = 10;
        assert!(matches!(
            exhaustive_attack(&g, &spec),
            Err(Error::EnumerationCap {
                combinations: 15,
                cap: 10
            })
        ));
    }

    #[test]
    fn multi_agrees_with_single() {
        let g = two_triangles();
        let spec = AttackSpec::new(Budget::Absolute(2), ValueFunctionId::Ari);
        let multi = exhaustive_attack_multi(&g, &spec, &ValueFunctionId::ALL).unwrap();
        for (r, vf) in multi.iter().zip(ValueFunctionId::ALL) {
            let single = exhaustive_attack(
                &g,
                &AttackSpec {
                    value_function: vf,
                    ..spec
                },
            )
            .unwrap();
            assert_eq!(*r, single);
        }
    }

    #[test]
    fn network_greedy_star() {
        let g = star(4);
        let spec = AttackSpec::new(Budget::Absolute(1), ValueFunctionId::ModularityDiff)
            .with_node_metric(NodeMetricId::Degree);
        let r = network_greedy_attack(&g, &spec).unwrap();
        assert_eq!(r.selected, [0]);
        assert_eq!(r.trace[0].node_score, Some(4.0));
        let too_big = AttackSpec {
            budget: Budget::Absolute(5),
            ..spec
        };
        assert!(matches!(
            network_greedy_attack(&g, &too_big),
            Err(Error::InvalidBudget { .. })
        ));
        let none = AttackSpec::new(Budget::Absolute(1), ValueFunctionId::Nmi);
        assert_eq!(network_greedy_attack(&g, &none).unwrap_err(), Error::MissingNodeMetric);
    }

    #[test]
    fn iterative_greedy_rescores() {
        let g = star(4);
        let mut spec = AttackSpec::new(Budget::Absolute(2), ValueFunctionId::ModularityDiff)
            .with_node_metric(NodeMetricId::Degree);
        spec.iterative = true;
        let r = network_greedy_attack(&g, &spec).unwrap();
        assert_eq!(r.selected, [0, 1]);
        assert_eq!(r.trace[1].node_score, Some(0.0));
    }

    #[test]
    fn community_greedy_two_triangles() {
        let g = two_triangles();
        let spec = AttackSpec::new(Budget::Absolute(1), ValueFunctionId::ModularityDiff)
            .with_node_metric(NodeMetricId::Degree)
            .with_community_metric(CommunityMetricId::LinkDensity);
        let r = community_greedy_attack(&g, &spec).unwrap();
        // both triangles have density 1; inside the induced triangle every
        // degree is 2, so the smallest id wins
        assert_eq!(r.selected, [0]);
        assert_eq!(r.trace.len(), 1);
        assert_eq!(r.trace[0].community, Some(0));
        assert_eq!(r.trace[0].community_score, Some(1.0));
        assert_eq!(r.trace[0].node_score, Some(2.0));
        let by_host = AttackSpec {
            community_metric: Some(CommunityMetricId::Conductance),
            ..spec
        };
        // conductance ties too, at 1/7
        assert_eq!(
            community_greedy_attack(&g, &by_host).unwrap().trace[0].community_score,
            Some(1.0 / 7.0)
        );
    }

    #[test]
    fn community_greedy_requires_metrics() {
        let g = two_triangles();
        let spec = AttackSpec::new(Budget::Absolute(1), ValueFunctionId::Nmi).with_node_metric(NodeMetricId::Degree);
        assert_eq!(
            community_greedy_attack(&g, &spec).unwrap_err(),
            Error::MissingCommunityMetric
        );
    }

    #[test]
    fn batches_refresh_early_when_community_runs_out() {
        let g = two_triangles();
        let spec = AttackSpec::new(Budget::Absolute(4), ValueFunctionId::Ari)
            .with_node_metric(NodeMetricId::Degree)
            .with_community_metric(CommunityMetricId::LinkDensity)
            .with_batch_size(4);
        let r = community_greedy_attack(&g, &spec).unwrap();
        assert_eq!(r.selected.len(), 4);
        assert!(r.trace.iter().any(|t| t.early_refresh));
        let distinct = NodeSet::new(r.selected.iter().copied());
        assert_eq!(distinct.len(), 4);
    }

    #[test]
    fn scores_reproduce() {
        let g = two_triangles();
        let spec = AttackSpec::new(Budget::Absolute(2), ValueFunctionId::Nmi)
            .with_node_metric(NodeMetricId::Betweenness)
            .with_community_metric(CommunityMetricId::Conductance)
            .with_seed(3);
        for algo in Algorithm::ALL {
            let r = run_attack(&g, algo, &spec).unwrap();
            let again = score_removal(
                &g,
                &r.selected_set(),
                spec.value_function,
                &Louvain::new(spec.detector),
                3,
            )
            .unwrap();
            assert_eq!(r.score, again, "{algo}");
            assert_eq!(r, run_attack(&g, algo, &spec).unwrap());
        }
    }

    #[test]
    fn algorithm_names() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
    }
}
