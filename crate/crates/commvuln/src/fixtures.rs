//! Small graphs bundled with the crate.
//!
//! `karate` is Zachary's club with its two factions. `football` and
//! `railway` are synthetic planted-partition stand-ins with the node, edge
//! and community counts of the published networks; load the real files with
//! `--graph` when you have them.

use commvuln_core::{Graph, Partition};

use crate::io::{load_edge_list, read_partition, EdgeListOptions, IdMode, IoError};

pub const NAMES: [&str; 4] = ["karate", "football", "railway", "two_triangles"];

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub graph: Graph,
    pub ground_truth: Option<Partition>,
    /// True for generated graphs standing in for unavailable datasets.
    pub synthetic: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("unknown fixture {0:?} (known: karate, football, railway, two_triangles)")]
    Unknown(String),
    #[error("bundled fixture is corrupt: {0}")]
    Corrupt(#[from] IoError),
}

fn bundled(name: &'static str, edges: &str, communities: &str, synthetic: bool) -> Result<Fixture, FixtureError> {
    let opts = EdgeListOptions {
        ids: IdMode::Integer,
        ..Default::default()
    };
    let (graph, _) = load_edge_list(edges.as_bytes(), &opts)?;
    let ground_truth = Some(read_partition(communities.as_bytes(), &graph)?);
    Ok(Fixture {
        name,
        graph,
        ground_truth,
        synthetic,
    })
}

pub fn fixture(name: &str) -> Result<Fixture, FixtureError> {
    match name {
        "karate" => bundled(
            "karate",
            include_str!("../data/karate.edges"),
            include_str!("../data/karate.communities"),
            false,
        ),
        "football" => bundled(
            "football",
            include_str!("../data/football.edges"),
            include_str!("../data/football.communities"),
            true,
        ),
        "railway" => bundled(
            "railway",
            include_str!("../data/railway.edges"),
            include_str!("../data/railway.communities"),
            true,
        ),
        "two_triangles" => bundled(
            "two_triangles",
            "0 1\n1 2\n2 0\n3 4\n4 5\n5 3\n2 3\n",
            "0 0\n1 0\n2 0\n3 1\n4 1\n5 1\n",
            false,
        ),
        other => Err(FixtureError::Unknown(other.to_owned())),
    }
}
