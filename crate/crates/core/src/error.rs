use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("graph has no edges")]
    NoEdges,
    #[error("node set is empty")]
    EmptyNodeSet,
    #[error("node {node} is outside the universe of {universe} nodes")]
    NodeOutOfRange { node: usize, universe: usize },
    #[error("node {0} is not present in the graph")]
    NodeAbsent(usize),
    #[error("removing every node would leave an empty graph")]
    RemovesAllNodes,
    #[error("partitions are defined over different node sets")]
    UniverseMismatch,
    #[error("partition does not cover node {0}")]
    UncoveredNode(usize),
    #[error("graph is not an induced subgraph of the host")]
    NotSubgraph,
    #[error("budget k={k} is infeasible for a graph with {n} nodes (need 1 <= k < n)")]
    InvalidBudget { k: usize, n: usize },
    #[error("this algorithm needs a node metric")]
    MissingNodeMetric,
    #[error("this algorithm needs a community metric")]
    MissingCommunityMetric,
    #[error("C(n, k) = {combinations} subsets exceeds the enumeration cap of {cap}; use a greedy algorithm")]
    EnumerationCap { combinations: u128, cap: u128 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("edge split leaves no training edges")]
    EmptyTrainSet,
    #[error("unknown {kind} name `{name}`")]
    UnknownName {
        kind: &'static str,
        name: alloc::string::String,
    },
}
