//! Undirected simple graphs over a fixed node universe.
//!
//! A [`Graph`] never renumbers its nodes. Removing nodes marks them absent
//! and drops their edges, so a partition computed before a perturbation and
//! one computed after it still talk about the same ids.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Counts of input edges dropped while canonicalizing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BuildReport {
    pub duplicates: usize,
    pub self_loops: usize,
}

/// Sorted, deduplicated set of node ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NodeSet(Vec<usize>);

impl NodeSet {
    pub fn new<I: IntoIterator<Item = usize>>(ids: I) -> Self {
        let mut v: Vec<usize> = ids.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        NodeSet(v)
    }

    pub fn empty() -> Self {
        NodeSet(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    /// Checks that every id is a present node of `g`.
    pub fn check_within(&self, g: &Graph) -> Result<()> {
        for v in self.iter() {
            if v >= g.universe_size() {
                return Err(Error::NodeOutOfRange {
                    node: v,
                    universe: g.universe_size(),
                });
            }
            if !g.contains(v) {
                return Err(Error::NodeAbsent(v));
            }
        }
        Ok(())
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        NodeSet::new(iter)
    }
}

/// Immutable undirected graph in compressed adjacency form.
///
/// Invariants: neighbor lists are sorted and symmetric, there are no self
/// loops or parallel edges, and absent nodes have empty neighbor lists.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Option<Vec<f64>>,
    present: Vec<bool>,
    node_count: usize,
    edge_count: usize,
    labels: Option<Arc<[String]>>,
}

impl Graph {
    /// Builds a graph on `universe` nodes, all present, from unweighted edges.
    pub fn from_edges<I>(universe: usize, edges: I) -> Result<(Self, BuildReport)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::build(universe, edges.into_iter().map(|(u, v)| (u, v, 1.0)), false)
    }

    /// Like [`Graph::from_edges`] but keeps per-edge weights. The first
    /// occurrence of a duplicated edge wins.
    pub fn from_weighted_edges<I>(universe: usize, edges: I) -> Result<(Self, BuildReport)>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        Self::build(universe, edges, true)
    }

    fn build<I>(universe: usize, edges: I, weighted: bool) -> Result<(Self, BuildReport)>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if universe == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut report = BuildReport::default();
        let mut list: Vec<(usize, usize, f64, usize)> = Vec::new();
        for (i, (u, v, w)) in edges.into_iter().enumerate() {
            for x in [u, v] {
                if x >= universe {
                    return Err(Error::NodeOutOfRange { node: x, universe });
                }
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidConfig("edge weights must be positive and finite"));
            }
            if u == v {
                report.self_loops += 1;
                continue;
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            list.push((a, b, w, i));
        }
        // stable on input order so the first occurrence keeps its weight
        list.sort_by_key(|x| (x.0, x.1, x.3));
        let before = list.len();
        list.dedup_by(|next, prev| next.0 == prev.0 && next.1 == prev.1);
        report.duplicates = before - list.len();

        let mut degree = vec![0usize; universe];
        for &(a, b, _, _) in &list {
            degree[a] += 1;
            degree[b] += 1;
        }
        let mut offsets = Vec::with_capacity(universe + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..universe].to_vec();
        let mut targets = vec![0usize; 2 * list.len()];
        let mut weights = if weighted {
            Some(vec![0.0; 2 * list.len()])
        } else {
            None
        };
        for &(a, b, w, _) in &list {
            for (x, y) in [(a, b), (b, a)] {
                targets[cursor[x]] = y;
                if let Some(ws) = weights.as_mut() {
                    ws[cursor[x]] = w;
                }
                cursor[x] += 1;
            }
        }
        // rows come out unsorted on the high-id side
        for v in 0..universe {
            let (lo, hi) = (offsets[v], offsets[v + 1]);
            match weights.as_mut() {
                None => targets[lo..hi].sort_unstable(),
                Some(ws) => {
                    let mut row: Vec<(usize, f64)> = targets[lo..hi]
                        .iter()
                        .copied()
                        .zip(ws[lo..hi].iter().copied())
                        .collect();
                    row.sort_unstable_by_key(|p| p.0);
                    for (i, (t, w)) in row.into_iter().enumerate() {
                        targets[lo + i] = t;
                        ws[lo + i] = w;
                    }
                }
            }
        }
        let g = Graph {
            offsets,
            targets,
            weights,
            present: vec![true; universe],
            node_count: universe,
            edge_count: list.len(),
            labels: None,
        };
        Ok((g, report))
    }

    /// Attaches external labels, one per universe id.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.universe_size() {
            return Err(Error::InvalidConfig("label count must equal the universe size"));
        }
        self.labels = Some(labels.into());
        Ok(self)
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels.as_ref().and_then(|l| l.get(v)).map(|s| s.as_str())
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Number of ids, present or not.
    pub fn universe_size(&self) -> usize {
        self.present.len()
    }

    /// Number of present nodes.
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.present.get(v).copied().unwrap_or(false)
    }

    /// Present node ids in ascending order.
    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.present
            .iter()
            .enumerate()
            .filter_map(|(v, &p)| if p { Some(v) } else { None })
    }

    pub fn node_set(&self) -> NodeSet {
        NodeSet(self.nodes().collect())
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Neighbors paired with edge weights (1.0 on unweighted graphs).
    pub fn weighted_neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[v]..self.offsets[v + 1];
        let ws = self.weights.as_deref();
        range.map(move |i| (self.targets[i], ws.map_or(1.0, |w| w[i])))
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.universe_size() && v < self.universe_size() && self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Every edge once, as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.universe_size()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Induced subgraph on `V \ s`, keeping ids.
    pub fn remove_nodes(&self, s: &NodeSet) -> Result<Graph> {
        s.check_within(self)?;
        if s.len() == self.node_count {
            return Err(Error::RemovesAllNodes);
        }
        let mut keep = self.present.clone();
        for v in s.iter() {
            keep[v] = false;
        }
        Ok(self.restricted(keep))
    }

    /// Induced subgraph on `keep`, keeping ids.
    pub fn induced_subgraph(&self, keep: &NodeSet) -> Result<Graph> {
        if keep.is_empty() {
            return Err(Error::EmptyNodeSet);
        }
        keep.check_within(self)?;
        let mut mask = vec![false; self.universe_size()];
        for v in keep.iter() {
            mask[v] = true;
        }
        Ok(self.restricted(mask))
    }

    /// Same nodes, keeping only the edges whose index in [`Graph::edges`]
    /// order satisfies `keep`.
    pub fn restricted_edges<F: Fn(usize) -> bool>(&self, keep: F) -> Graph {
        let edges: Vec<(usize, usize)> = self.edges().collect();
        let kept: Vec<bool> = (0..edges.len()).map(keep).collect();
        let n = self.universe_size();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        let mut weights = self.weights.as_ref().map(|_| Vec::new());
        for v in 0..n {
            for i in self.offsets[v]..self.offsets[v + 1] {
                let t = self.targets[i];
                let key = if v < t { (v, t) } else { (t, v) };
                let idx = edges.binary_search(&key).expect("edge listed");
                if kept[idx] {
                    targets.push(t);
                    if let (Some(out), Some(src)) = (weights.as_mut(), self.weights.as_ref()) {
                        out.push(src[i]);
                    }
                }
            }
            offsets.push(targets.len());
        }
        Graph {
            edge_count: targets.len() / 2,
            offsets,
            targets,
            weights,
            present: self.present.clone(),
            node_count: self.node_count,
            labels: self.labels.clone(),
        }
    }

    fn restricted(&self, keep: Vec<bool>) -> Graph {
        let n = self.universe_size();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        let mut weights = self.weights.as_ref().map(|_| Vec::new());
        for v in 0..n {
            if keep[v] {
                for i in self.offsets[v]..self.offsets[v + 1] {
                    let t = self.targets[i];
                    if keep[t] {
                        targets.push(t);
                        if let (Some(out), Some(src)) = (weights.as_mut(), self.weights.as_ref()) {
                            out.push(src[i]);
                        }
                    }
                }
            }
            offsets.push(targets.len());
        }
        let node_count = keep.iter().filter(|&&k| k).count();
        Graph {
            edge_count: targets.len() / 2,
            offsets,
            targets,
            weights,
            present: keep,
            node_count,
            labels: self.labels.clone(),
        }
    }
}

/// Sentinel in distance buffers for unreachable nodes.
pub const UNREACHABLE: usize = usize::MAX;

/// Reusable BFS buffers. Distances are indexed by universe id.
#[derive(Debug, Clone)]
pub struct Bfs {
    pub dist: Vec<usize>,
    pub order: Vec<usize>,
    queue: VecDeque<usize>,
}

impl Bfs {
    pub fn new(universe: usize) -> Self {
        Bfs {
            dist: vec![UNREACHABLE; universe],
            order: Vec::new(),
            queue: VecDeque::new(),
        }
    }

    /// Runs BFS from `source`, optionally treating `blocked` as deleted.
    /// Afterwards `order` lists visited nodes in discovery order.
    pub fn run(&mut self, g: &Graph, source: usize, blocked: Option<usize>) {
        for &v in &self.order {
            self.dist[v] = UNREACHABLE;
        }
        self.order.clear();
        self.queue.clear();
        self.dist[source] = 0;
        self.order.push(source);
        self.queue.push_back(source);
        while let Some(u) = self.queue.pop_front() {
            let du = self.dist[u] + 1;
            for &w in g.neighbors(u) {
                if self.dist[w] == UNREACHABLE && Some(w) != blocked {
                    self.dist[w] = du;
                    self.order.push(w);
                    self.queue.push_back(w);
                }
            }
        }
    }
}

/// Hop distances from `source`; unreachable nodes are absent.
pub fn shortest_path_lengths(g: &Graph, source: usize) -> Result<BTreeMap<usize, usize>> {
    if !g.contains(source) {
        return Err(Error::NodeAbsent(source));
    }
    let mut bfs = Bfs::new(g.universe_size());
    bfs.run(g, source, None);
    Ok(bfs.order.iter().map(|&v| (v, bfs.dist[v])).collect())
}

/// Connected components of the present nodes, ordered by smallest member.
pub fn connected_components(g: &Graph) -> Vec<NodeSet> {
    let mut seen = vec![false; g.universe_size()];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for s in g.nodes() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        stack.push(s);
        let mut members = Vec::new();
        while let Some(u) = stack.pop() {
            members.push(u);
            for &w in g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        out.push(NodeSet::new(members));
    }
    out
}

/// Number of triangles through each node (indexed by universe id).
pub fn triangles_per_node(g: &Graph) -> Vec<usize> {
    let mut counts = vec![0usize; g.universe_size()];
    let mut mark = vec![false; g.universe_size()];
    for u in g.nodes() {
        for &v in g.neighbors(u) {
            mark[v] = true;
        }
        for &v in g.neighbors(u).iter().filter(|&&v| v > u) {
            for &w in g.neighbors(v).iter().filter(|&&w| w > v) {
                if mark[w] {
                    counts[u] += 1;
                    counts[v] += 1;
                    counts[w] += 1;
                }
            }
        }
        for &v in g.neighbors(u) {
            mark[v] = false;
        }
    }
    counts
}
