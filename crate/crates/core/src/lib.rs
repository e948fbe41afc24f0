//! Finding the nodes whose removal does the most damage to a network's
//! community structure.
//!
//! The crate is `no_std` (it needs `alloc`). The default `std` and
//! `parallel` features add rayon-backed parallel loops for the exhaustive
//! search, betweenness, closeness vitality and cascade simulation.
//!
//! Layout:
//!
//! * [`graph`] holds the immutable, identity-preserving [`Graph`] and
//!   traversal primitives.
//! * [`louvain`] is the modularity optimizer behind the
//!   [`CommunityDetector`] trait.
//! * [`metrics`] covers the node-centric and community-centric scores used to
//!   rank candidates.
//! * [`compare`] has modularity, NMI, ARI and the damage objective.
//! * [`attack`] runs the exhaustive, network-greedy and community-greedy
//!   searches.
//! * [`task`] scores link prediction and independent cascade diffusion on the
//!   original and the perturbed network.
#![no_std]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod attack;
pub mod compare;
pub mod error;
pub mod generate;
pub mod graph;
pub mod louvain;
pub mod metrics;
pub mod rng;
pub mod task;

pub use attack::{
    community_greedy_attack, exhaustive_attack, exhaustive_attack_multi, network_greedy_attack, resolve_budget,
    run_attack, score_removal, Algorithm, AttackResult, AttackSpec, Budget, TraceStep,
};
pub use compare::{ari, evaluate, modularity, nmi, restrict, DamageScore, ValueFunctionId};
pub use error::{Error, Result};
pub use graph::{Graph, NodeSet};
pub use louvain::{detect_communities, CommunityDetector, DetectorConfig, Louvain, Partition};
pub use metrics::{community_metric, node_metric, rank_nodes, CommunityMetricId, MetricVector, NodeMetricId};
pub use task::{
    independent_cascade, link_prediction_f1, run_task, score_pair, split_edges, DiffusionConfig, LinkPredConfig,
    Scorer, TaskConfig, TaskReport,
};
