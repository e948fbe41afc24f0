//! Scores for a whole community, given its induced subgraph and the host
//! graph it was cut from.

use crate::error::{Error, Result};
use crate::graph::{Bfs, Graph};

use super::CommunityMetricId;

/// `2E / (V (V - 1))`, 0 for a single node.
pub fn link_density(sub: &Graph) -> f64 {
    let v = sub.node_count();
    if v < 2 {
        return 0.0;
    }
    2.0 * sub.edge_count() as f64 / (v * (v - 1)) as f64
}

/// Boundary edges over the host-degree sum of the community's nodes.
pub fn conductance(sub: &Graph, host: &Graph) -> f64 {
    let mut boundary = 0usize;
    let mut volume = 0usize;
    for v in sub.nodes() {
        volume += host.degree(v);
        boundary += host.degree(v) - sub.degree(v);
    }
    if volume == 0 {
        0.0
    } else {
        boundary as f64 / volume as f64
    }
}

/// Mean hop distance over ordered reachable pairs, 0 without any.
pub fn compactness(sub: &Graph) -> f64 {
    let mut bfs = Bfs::new(sub.universe_size());
    let mut total = 0u64;
    let mut pairs = 0u64;
    for v in sub.nodes() {
        bfs.run(sub, v, None);
        total += bfs.order.iter().map(|&w| bfs.dist[w] as u64).sum::<u64>();
        pairs += bfs.order.len() as u64 - 1;
    }
    if pairs == 0 {
        0.0
    } else {
        total as f64 / pairs as f64
    }
}

fn check_induced(sub: &Graph, host: &Graph) -> Result<()> {
    if sub.universe_size() != host.universe_size() || sub.node_count() == 0 {
        return Err(Error::NotSubgraph);
    }
    for v in sub.nodes() {
        if !host.contains(v) {
            return Err(Error::NotSubgraph);
        }
        let inside = host.neighbors(v).iter().copied().filter(|&w| sub.contains(w));
        if !inside.eq(sub.neighbors(v).iter().copied()) {
            return Err(Error::NotSubgraph);
        }
    }
    Ok(())
}

/// Evaluates `id` on `sub`, which must be an induced subgraph of `host`.
pub fn community_metric(sub: &Graph, host: &Graph, id: CommunityMetricId) -> Result<f64> {
    check_induced(sub, host)?;
    Ok(match id {
        CommunityMetricId::LinkDensity => link_density(sub),
        CommunityMetricId::Conductance => conductance(sub, host),
        CommunityMetricId::Compactness => compactness(sub),
    })
}
