//! Node-level structural metrics. Every function returns one value per
//! universe id; absent nodes get 0.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index::sample;

use crate::graph::{connected_components, triangles_per_node, Bfs, Graph};
use crate::rng::rng_from_seed;

const EIGEN_MAX_ITER: usize = 1_000;
const EIGEN_TOL: f64 = 1e-10;

/// Local clustering: closed triangles through `v` over neighbor pairs.
pub fn clustering_coefficient(g: &Graph) -> Vec<f64> {
    let tri = triangles_per_node(g);
    (0..g.universe_size())
        .map(|v| {
            let d = g.degree(v);
            if d < 2 {
                0.0
            } else {
                tri[v] as f64 / (d * (d - 1) / 2) as f64
            }
        })
        .collect()
}

pub fn degree(g: &Graph) -> Vec<f64> {
    (0..g.universe_size()).map(|v| g.degree(v) as f64).collect()
}

/// Splits `0..len` into a fixed number of contiguous chunks. The chunking
/// depends only on `len`, so reductions over chunks in index order give the
/// same floating point result however many threads run them.
fn fixed_chunks(len: usize) -> Vec<(usize, usize)> {
    const CHUNKS: usize = 64;
    let size = len.div_ceil(CHUNKS).max(1);
    (0..len).step_by(size).map(|lo| (lo, (lo + size).min(len))).collect()
}

#[cfg(feature = "parallel")]
fn map_chunks<T, F>(chunks: &[(usize, usize)], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, usize) -> T + Sync,
{
    use rayon::prelude::*;
    chunks.par_iter().map(|&(lo, hi)| f(lo, hi)).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_chunks<T, F>(chunks: &[(usize, usize)], f: F) -> Vec<T>
where
    F: Fn(usize, usize) -> T,
{
    chunks.iter().map(|&(lo, hi)| f(lo, hi)).collect()
}

/// Adds the Brandes dependencies of `source` into `acc`.
fn accumulate_dependencies(
    g: &Graph,
    source: usize,
    bfs: &mut Bfs,
    sigma: &mut [f64],
    delta: &mut [f64],
    acc: &mut [f64],
) {
    bfs.run(g, source, None);
    for &v in &bfs.order {
        sigma[v] = 0.0;
        delta[v] = 0.0;
    }
    sigma[source] = 1.0;
    for &v in &bfs.order {
        let dv = bfs.dist[v];
        for &w in g.neighbors(v) {
            if bfs.dist[w] == dv + 1 {
                sigma[w] += sigma[v];
            }
        }
    }
    for &w in bfs.order.iter().rev() {
        let dw = bfs.dist[w];
        if dw == 0 {
            continue;
        }
        let coeff = (1.0 + delta[w]) / sigma[w];
        for &v in g.neighbors(w) {
            if bfs.dist[v] + 1 == dw {
                delta[v] += sigma[v] * coeff;
            }
        }
        acc[w] += delta[w];
    }
}

fn betweenness_from_sources(g: &Graph, sources: &[usize]) -> Vec<f64> {
    let n = g.universe_size();
    let chunks = fixed_chunks(sources.len());
    let partials = map_chunks(&chunks, |lo, hi| {
        let mut bfs = Bfs::new(n);
        let mut sigma = vec![0.0; n];
        let mut delta = vec![0.0; n];
        let mut acc = vec![0.0; n];
        for &s in &sources[lo..hi] {
            accumulate_dependencies(g, s, &mut bfs, &mut sigma, &mut delta, &mut acc);
        }
        acc
    });
    let mut total = vec![0.0; n];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    total
}

/// Exact unnormalized betweenness, each unordered pair counted once.
pub fn betweenness(g: &Graph) -> Vec<f64> {
    let sources: Vec<usize> = g.nodes().collect();
    let mut b = betweenness_from_sources(g, &sources);
    for x in b.iter_mut() {
        *x /= 2.0;
    }
    b
}

/// Betweenness estimated from `samples` seeded random sources, scaled up to
/// the full source count.
pub fn betweenness_sampled(g: &Graph, samples: usize, seed: u64) -> Vec<f64> {
    let nodes: Vec<usize> = g.nodes().collect();
    let s = samples.clamp(1, nodes.len().max(1));
    if s >= nodes.len() {
        return betweenness(g);
    }
    let mut rng = rng_from_seed(seed);
    let mut picked: Vec<usize> = sample(&mut rng, nodes.len(), s).into_iter().map(|i| nodes[i]).collect();
    picked.sort_unstable();
    let scale = nodes.len() as f64 / s as f64 / 2.0;
    let mut b = betweenness_from_sources(g, &picked);
    for x in b.iter_mut() {
        *x *= scale;
    }
    b
}

/// Principal eigenvector of the adjacency matrix by power iteration on
/// `A + I`. Each connected component is solved on its own and weighted by
/// its spectral radius relative to the largest one; the result has unit L2
/// norm.
pub fn eigenvector(g: &Graph) -> Vec<f64> {
    let n = g.universe_size();
    let mut out = vec![0.0; n];
    let mut radii = Vec::new();
    let comps = connected_components(g);
    for comp in &comps {
        if comp.len() < 2 {
            radii.push(0.0);
            continue;
        }
        let members = comp.as_slice();
        let norm0 = libm::sqrt(members.len() as f64);
        for &v in members {
            out[v] = 1.0 / norm0;
        }
        let mut next = vec![0.0; n];
        for _ in 0..EIGEN_MAX_ITER {
            for &v in members {
                next[v] = out[v] + g.neighbors(v).iter().map(|&w| out[w]).sum::<f64>();
            }
            let norm = libm::sqrt(members.iter().map(|&v| next[v] * next[v]).sum::<f64>());
            let mut diff = 0.0;
            for &v in members {
                let x = next[v] / norm;
                diff += (x - out[v]) * (x - out[v]);
                out[v] = x;
            }
            if libm::sqrt(diff) < EIGEN_TOL {
                break;
            }
        }
        // Rayleigh quotient of A on the unit vector
        let lambda: f64 = members
            .iter()
            .map(|&v| out[v] * g.neighbors(v).iter().map(|&w| out[w]).sum::<f64>())
            .sum();
        radii.push(lambda);
    }
    let top = radii.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return vec![0.0; n];
    }
    for (comp, &lambda) in comps.iter().zip(&radii) {
        let w = lambda / top;
        for v in comp.iter() {
            out[v] *= w;
        }
    }
    let norm = libm::sqrt(out.iter().map(|x| x * x).sum::<f64>());
    for x in out.iter_mut() {
        *x /= norm;
    }
    out
}

/// `(r - 1) / sum of distances`, with `r` the size of the node's component.
pub fn closeness(g: &Graph) -> Vec<f64> {
    let mut out = vec![0.0; g.universe_size()];
    let mut bfs = Bfs::new(g.universe_size());
    for v in g.nodes() {
        bfs.run(g, v, None);
        let total: usize = bfs.order.iter().map(|&w| bfs.dist[w]).sum();
        if total > 0 {
            out[v] = (bfs.order.len() - 1) as f64 / total as f64;
        }
    }
    out
}

/// k-core index by bucket peeling.
pub fn coreness(g: &Graph) -> Vec<usize> {
    let n = g.universe_size();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let max_deg = deg.iter().copied().max().unwrap_or(0);
    let mut bin = vec![0usize; max_deg + 1];
    for &d in &deg {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut vert = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[deg[v]];
        vert[pos[v]] = v;
        bin[deg[v]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;
    for i in 0..n {
        let v = vert[i];
        for &u in g.neighbors(v) {
            if deg[u] > deg[v] {
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = vert[pw];
                if u != w {
                    pos[u] = pw;
                    vert[pu] = w;
                    pos[w] = pu;
                    vert[pw] = u;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    deg
}

/// Shannon entropy of incident edge weights divided by `ln(degree)`.
pub fn diversity(g: &Graph) -> Vec<f64> {
    (0..g.universe_size())
        .map(|v| {
            let d = g.degree(v);
            if d < 2 {
                return 0.0;
            }
            // H = ln T - sum(w ln w) / T, exact for uniform unit weights
            let total: f64 = g.weighted_neighbors(v).map(|(_, w)| w).sum();
            let wlogw: f64 = g.weighted_neighbors(v).map(|(_, w)| w * libm::log(w)).sum();
            let h = libm::log(total) - wlogw / total;
            h / libm::log(d as f64)
        })
        .collect()
}

/// Largest hop distance to any node in the same component.
pub fn eccentricity(g: &Graph) -> Vec<usize> {
    let mut out = vec![0; g.universe_size()];
    let mut bfs = Bfs::new(g.universe_size());
    for v in g.nodes() {
        bfs.run(g, v, None);
        out[v] = bfs.order.last().map_or(0, |&w| bfs.dist[w]);
    }
    out
}

/// Burt's constraint with unit tie strengths, `p_uv = 1 / deg(u)`.
pub fn constraint(g: &Graph) -> Vec<f64> {
    (0..g.universe_size())
        .map(|u| {
            let nu = g.neighbors(u);
            if nu.is_empty() {
                return 0.0;
            }
            let p_u = 1.0 / nu.len() as f64;
            nu.iter()
                .map(|&j| {
                    let indirect: f64 = nu
                        .iter()
                        .filter(|&&q| q != j && g.has_edge(q, j))
                        .map(|&q| p_u / g.degree(q) as f64)
                        .sum();
                    let c = p_u + indirect;
                    c * c
                })
                .sum()
        })
        .collect()
}

fn wiener_with_block(g: &Graph, blocked: Option<usize>, bfs: &mut Bfs) -> u64 {
    let mut total: u64 = 0;
    for s in g.nodes() {
        if Some(s) == blocked {
            continue;
        }
        bfs.run(g, s, blocked);
        total += bfs.order.iter().map(|&w| bfs.dist[w] as u64).sum::<u64>();
    }
    total / 2
}

/// Sum of hop distances over unordered pairs in the same component.
pub fn wiener_index(g: &Graph) -> u64 {
    let mut bfs = Bfs::new(g.universe_size());
    wiener_with_block(g, None, &mut bfs)
}

/// `W(g) - W(g \ v)` for every node.
pub fn closeness_vitality(g: &Graph) -> Vec<f64> {
    let n = g.universe_size();
    let whole = wiener_index(g) as f64;
    let nodes: Vec<usize> = g.nodes().collect();
    let chunks = fixed_chunks(nodes.len());
    let parts = map_chunks(&chunks, |lo, hi| {
        let mut bfs = Bfs::new(n);
        nodes[lo..hi]
            .iter()
            .map(|&v| whole - wiener_with_block(g, Some(v), &mut bfs) as f64)
            .collect::<Vec<f64>>()
    });
    let mut out = vec![0.0; n];
    for (&v, x) in nodes.iter().zip(parts.into_iter().flatten()) {
        out[v] = x;
    }
    out
}
