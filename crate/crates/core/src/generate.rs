//! Seeded random graphs with exact edge counts and planted communities.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::louvain::Partition;
use crate::rng::rng_from_seed;

fn ordered(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// `G(n, m)`: `m` distinct edges drawn uniformly.
pub fn erdos_renyi(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if m > n * n.saturating_sub(1) / 2 {
        return Err(Error::InvalidConfig("more edges than node pairs"));
    }
    let mut rng = rng_from_seed(seed);
    let mut edges = BTreeSet::new();
    while edges.len() < m {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v {
            edges.insert(ordered(u, v));
        }
    }
    Ok(Graph::from_edges(n, edges)?.0)
}

/// Planted partition with exact intra and inter edge counts.
///
/// Each community first gets a random spanning tree and the communities are
/// joined by a tree of inter edges, so the result is connected. Remaining
/// edges pick endpoints with probability proportional to `propensity`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedPartition {
    pub sizes: Vec<usize>,
    pub intra_edges: usize,
    pub inter_edges: usize,
    /// Per-node endpoint weights; uniform when `None`.
    pub propensity: Option<Vec<f64>>,
}

impl PlantedPartition {
    pub fn node_count(&self) -> usize {
        self.sizes.iter().sum()
    }

    fn validate(&self) -> Result<()> {
        let n = self.node_count();
        let c = self.sizes.len();
        if c == 0 || self.sizes.contains(&0) {
            return Err(Error::InvalidConfig("communities must be non-empty"));
        }
        let intra_cap: usize = self.sizes.iter().map(|s| s * (s - 1) / 2).sum();
        let inter_cap = n * (n - 1) / 2 - intra_cap;
        if self.intra_edges < n - c || self.intra_edges > intra_cap {
            return Err(Error::InvalidConfig("intra edge count out of range"));
        }
        if self.inter_edges < c - 1 || self.inter_edges > inter_cap {
            return Err(Error::InvalidConfig("inter edge count out of range"));
        }
        if let Some(p) = &self.propensity {
            if p.len() != n || p.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
                return Err(Error::InvalidConfig("propensity must be positive, one per node"));
            }
        }
        Ok(())
    }

    pub fn generate(&self, seed: u64) -> Result<(Graph, Partition)> {
        self.validate()?;
        let mut rng = rng_from_seed(seed);
        let n = self.node_count();
        let weights = self.propensity.clone().unwrap_or_else(|| vec![1.0; n]);

        let mut members: Vec<Vec<usize>> = Vec::with_capacity(self.sizes.len());
        let mut label = vec![0usize; n];
        let mut next = 0;
        for (c, &s) in self.sizes.iter().enumerate() {
            members.push((next..next + s).collect());
            label[next..next + s].fill(c);
            next += s;
        }

        let mut edges = BTreeSet::new();
        let mut intra = 0usize;
        for group in &members {
            let mut order = group.clone();
            order.shuffle(&mut rng);
            for i in 1..order.len() {
                let j = rng.random_range(0..i);
                edges.insert(ordered(order[i], order[j]));
                intra += 1;
            }
        }
        let mut comm_order: Vec<usize> = (0..members.len()).collect();
        comm_order.shuffle(&mut rng);
        let mut inter = 0usize;
        for i in 1..comm_order.len() {
            let a = &members[comm_order[i]];
            let b = &members[comm_order[rng.random_range(0..i)]];
            let u = a[rng.random_range(0..a.len())];
            let v = b[rng.random_range(0..b.len())];
            edges.insert(ordered(u, v));
            inter += 1;
        }

        let global = WeightedIndex::new(&weights).map_err(|_| Error::InvalidConfig("bad propensity"))?;
        let per_comm: Vec<WeightedIndex<f64>> = members
            .iter()
            .map(|g| WeightedIndex::new(g.iter().map(|&v| weights[v])).expect("validated weights"))
            .collect();
        // pick a community in proportion to its spare pair capacity
        let comm_pick = WeightedIndex::new(members.iter().map(|g| (g.len() * (g.len() - 1) / 2) as f64 + 1e-12))
            .expect("non-empty communities");

        while intra < self.intra_edges {
            let c = comm_pick.sample(&mut rng);
            if members[c].len() < 2 {
                continue;
            }
            let u = members[c][per_comm[c].sample(&mut rng)];
            let v = members[c][per_comm[c].sample(&mut rng)];
            if u != v && edges.insert(ordered(u, v)) {
                intra += 1;
            }
        }
        while inter < self.inter_edges {
            let u = global.sample(&mut rng);
            let v = global.sample(&mut rng);
            if label[u] != label[v] && edges.insert(ordered(u, v)) {
                inter += 1;
            }
        }

        let g = Graph::from_edges(n, edges)?.0;
        let p = Partition::from_communities(n, &members)?;
        Ok((g, p))
    }
}

/// Heavy-tailed propensities `u^(-1 / (alpha - 1))` with `u` uniform on
/// `(0, 1]`, capped at `cap`.
pub fn pareto_propensity(n: usize, alpha: f64, cap: f64, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    (0..n)
        .map(|_| {
            let u: f64 = 1.0 - rng.random::<f64>();
            libm::pow(u, -1.0 / (alpha - 1.0)).min(cap)
        })
        .collect()
}

/// Random sizes in `[min, max]` summing to `total`.
pub fn random_sizes(total: usize, parts: usize, min: usize, max: usize, seed: u64) -> Result<Vec<usize>> {
    if parts == 0 || min * parts > total || max * parts < total || min > max {
        return Err(Error::InvalidConfig("sizes cannot sum to total"));
    }
    let mut rng = rng_from_seed(seed);
    let mut sizes = vec![min; parts];
    let mut left = total - min * parts;
    while left > 0 {
        let i = rng.random_range(0..parts);
        if sizes[i] < max {
            sizes[i] += 1;
            left -= 1;
        }
    }
    Ok(sizes)
}

/// Uniform random labels in `0..communities` for every present node.
pub fn random_partition(g: &Graph, communities: usize, seed: u64) -> Partition {
    let mut rng = rng_from_seed(seed);
    let assignment: Vec<Option<usize>> = (0..g.universe_size())
        .map(|v| g.contains(v).then(|| rng.random_range(0..communities.max(1))))
        .collect();
    Partition::from_assignment(&assignment)
}
