//! Structural scores used to pick which nodes to remove.
//!
//! Node metrics rank individual nodes; community metrics rank the induced
//! subgraph of a whole community. Every score is NaN-free: degenerate cases
//! (isolated nodes, degree one, empty sums) map to 0.

mod centrality;
mod community;

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

pub use centrality::{
    betweenness, betweenness_sampled, closeness, closeness_vitality, clustering_coefficient, constraint, coreness,
    degree, diversity, eccentricity, eigenvector, wiener_index,
};
pub use community::{community_metric, compactness, conductance, link_density};

use crate::error::Error;
use crate::graph::{Graph, NodeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum NodeMetricId {
    ClusteringCoefficient,
    Degree,
    Betweenness,
    Eigenvector,
    Closeness,
    Coreness,
    Diversity,
    Eccentricity,
    Constraint,
    ClosenessVitality,
}

impl NodeMetricId {
    pub const ALL: [NodeMetricId; 10] = [
        Self::ClusteringCoefficient,
        Self::Degree,
        Self::Betweenness,
        Self::Eigenvector,
        Self::Closeness,
        Self::Coreness,
        Self::Diversity,
        Self::Eccentricity,
        Self::Constraint,
        Self::ClosenessVitality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::ClusteringCoefficient => "clustering_coefficient",
            Self::Degree => "degree",
            Self::Betweenness => "betweenness",
            Self::Eigenvector => "eigenvector",
            Self::Closeness => "closeness",
            Self::Coreness => "coreness",
            Self::Diversity => "diversity",
            Self::Eccentricity => "eccentricity",
            Self::Constraint => "constraint",
            Self::ClosenessVitality => "closeness_vitality",
        }
    }
}

impl fmt::Display for NodeMetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NodeMetricId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownName {
                kind: "node metric",
                name: s.into(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CommunityMetricId {
    LinkDensity,
    Conductance,
    Compactness,
}

impl CommunityMetricId {
    pub const ALL: [CommunityMetricId; 3] = [Self::LinkDensity, Self::Conductance, Self::Compactness];

    pub fn name(self) -> &'static str {
        match self {
            Self::LinkDensity => "link_density",
            Self::Conductance => "conductance",
            Self::Compactness => "compactness",
        }
    }
}

impl fmt::Display for CommunityMetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CommunityMetricId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownName {
                kind: "community metric",
                name: s.into(),
            })
    }
}

/// Scores for the present nodes of a graph, in ascending node order.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricVector {
    pub metric: NodeMetricId,
    pub nodes: Vec<usize>,
    pub scores: Vec<f64>,
    /// Rank high scores first when set.
    pub higher_is_more_vulnerable: bool,
    /// Set when betweenness fell back to source sampling.
    pub approximate: bool,
}

impl MetricVector {
    pub fn get(&self, v: usize) -> Option<f64> {
        self.nodes.binary_search(&v).ok().map(|i| self.scores[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.nodes.iter().copied().zip(self.scores.iter().copied())
    }

    /// Flips the ranking direction.
    pub fn inverted(mut self) -> Self {
        self.higher_is_more_vulnerable = !self.higher_is_more_vulnerable;
        self
    }
}

/// Knobs for [`node_metric_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricOptions {
    /// Above this many present nodes, betweenness samples sources.
    pub betweenness_sampling_threshold: usize,
    pub betweenness_samples: usize,
    pub sampling_seed: u64,
}

impl Default for MetricOptions {
    fn default() -> Self {
        MetricOptions {
            betweenness_sampling_threshold: 100_000,
            betweenness_samples: 1_000,
            sampling_seed: 0,
        }
    }
}

/// Computes one node metric with default options.
pub fn node_metric(g: &Graph, id: NodeMetricId) -> MetricVector {
    node_metric_with(g, id, &MetricOptions::default())
}

pub fn node_metric_with(g: &Graph, id: NodeMetricId, opts: &MetricOptions) -> MetricVector {
    let mut approximate = false;
    let per_id: Vec<f64> = match id {
        NodeMetricId::ClusteringCoefficient => clustering_coefficient(g),
        NodeMetricId::Degree => degree(g),
        NodeMetricId::Betweenness => {
            if g.node_count() > opts.betweenness_sampling_threshold {
                approximate = true;
                betweenness_sampled(g, opts.betweenness_samples, opts.sampling_seed)
            } else {
                betweenness(g)
            }
        }
        NodeMetricId::Eigenvector => eigenvector(g),
        NodeMetricId::Closeness => closeness(g),
        NodeMetricId::Coreness => coreness(g).into_iter().map(|c| c as f64).collect(),
        NodeMetricId::Diversity => diversity(g),
        NodeMetricId::Eccentricity => eccentricity(g).into_iter().map(|e| e as f64).collect(),
        NodeMetricId::Constraint => constraint(g),
        NodeMetricId::ClosenessVitality => closeness_vitality(g),
    };
    let nodes: Vec<usize> = g.nodes().collect();
    let scores = nodes.iter().map(|&v| per_id[v]).collect();
    MetricVector {
        metric: id,
        nodes,
        scores,
        higher_is_more_vulnerable: true,
        approximate,
    }
}

/// Top `k` nodes in vulnerability order; ties go to the smaller id.
pub fn rank_nodes(mv: &MetricVector, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..mv.nodes.len()).collect();
    idx.sort_by(|&a, &b| {
        let (sa, sb) = (mv.scores[a], mv.scores[b]);
        let ord = if mv.higher_is_more_vulnerable {
            sb.total_cmp(&sa)
        } else {
            sa.total_cmp(&sb)
        };
        ord.then(mv.nodes[a].cmp(&mv.nodes[b]))
    });
    idx.into_iter().take(k).map(|i| mv.nodes[i]).collect()
}

/// [`rank_nodes`] as a set.
pub fn top_nodes(mv: &MetricVector, k: usize) -> NodeSet {
    NodeSet::new(rank_nodes(mv, k))
}
