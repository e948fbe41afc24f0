//! Regenerates the synthetic football and railway stand-ins in `data/`.
//!
//! cargo run -p commvuln --example make_fixtures -- crates/commvuln/data

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use commvuln_core::generate::{pareto_propensity, random_sizes, PlantedPartition};

fn write(dir: &Path, name: &str, what: &str, pp: &PlantedPartition, seed: u64) -> std::io::Result<()> {
    let (g, p) = pp.generate(seed).expect("feasible parameters");
    let mut edges = fs::File::create(dir.join(format!("{name}.edges")))?;
    writeln!(
        edges,
        "# synthetic {what} stand-in: {} nodes, {} edges, {} planted communities",
        g.node_count(),
        g.edge_count(),
        p.community_count()
    )?;
    writeln!(edges, "# planted partition, generator seed {seed}")?;
    for (u, v) in g.edges() {
        writeln!(edges, "{u} {v}")?;
    }
    let mut comms = fs::File::create(dir.join(format!("{name}.communities")))?;
    writeln!(comms, "# node community")?;
    for v in p.nodes() {
        writeln!(comms, "{v} {}", p.label(v).unwrap())?;
    }
    Ok(())
}

fn main() -> std::io::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("crates/commvuln/data"));
    let football = PlantedPartition {
        sizes: vec![9, 8, 11, 12, 10, 5, 13, 8, 10, 12, 7, 10],
        intra_edges: 405,
        inter_edges: 208,
        propensity: None,
    };
    write(&dir, "football", "college football", &football, 2000)?;
    let railway = PlantedPartition {
        sizes: random_sizes(301, 21, 5, 30, 21).expect("feasible sizes"),
        intra_edges: 857,
        inter_edges: 367,
        propensity: Some(pareto_propensity(301, 2.5, 15.0, 301)),
    };
    write(&dir, "railway", "railway", &railway, 1224)
}
