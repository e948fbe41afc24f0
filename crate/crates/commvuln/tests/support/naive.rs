//! Slow, direct reference evaluators built on dense matrices. They share no
//! code with the library beyond reading adjacency.

#![allow(dead_code)]

use std::collections::HashMap;

use commvuln::core::{Graph, Partition};

pub const INF: usize = usize::MAX / 4;

pub fn adjacency(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.universe_size();
    let mut a = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

/// All-pairs hop distances by Floyd-Warshall over present nodes.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.universe_size();
    let a = adjacency(g);
    let mut d = vec![vec![INF; n]; n];
    for v in g.nodes() {
        d[v][v] = 0;
        for w in g.nodes() {
            if a[v][w] {
                d[v][w] = 1;
            }
        }
    }
    let nodes: Vec<usize> = g.nodes().collect();
    for &k in &nodes {
        for &i in &nodes {
            for &j in &nodes {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Double sum over ordered node pairs.
pub fn modularity(g: &Graph, p: &Partition) -> f64 {
    let a = adjacency(g);
    let m2 = 2.0 * g.edge_count() as f64;
    let deg: Vec<f64> = (0..g.universe_size())
        .map(|v| a[v].iter().filter(|&&x| x).count() as f64)
        .collect();
    let mut q = 0.0;
    for v in g.nodes() {
        for w in g.nodes() {
            if p.label(v) == p.label(w) {
                q += f64::from(u8::from(a[v][w])) - deg[v] * deg[w] / m2;
            }
        }
    }
    q / m2
}

fn labels(p: &Partition) -> Vec<(usize, usize)> {
    p.nodes().map(|v| (v, p.label(v).unwrap())).collect()
}

/// ARI from the four pair-agreement counts, in exact integers.
pub fn ari_pairs(x: &Partition, y: &Partition) -> f64 {
    let lx = labels(x);
    let ly: HashMap<usize, usize> = labels(y).into_iter().collect();
    let (mut n11, mut n10, mut n01, mut n00) = (0i128, 0i128, 0i128, 0i128);
    for i in 0..lx.len() {
        for j in i + 1..lx.len() {
            let (vi, ci) = lx[i];
            let (vj, cj) = lx[j];
            let same_x = ci == cj;
            let same_y = ly[&vi] == ly[&vj];
            match (same_x, same_y) {
                (true, true) => n11 += 1,
                (true, false) => n10 += 1,
                (false, true) => n01 += 1,
                (false, false) => n00 += 1,
            }
        }
    }
    let num = 2 * (n00 * n11 - n01 * n10);
    let den = (n00 + n01) * (n01 + n11) + (n00 + n10) * (n10 + n11);
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

/// Arithmetic-mean NMI from label histograms.
pub fn nmi_counts(x: &Partition, y: &Partition) -> f64 {
    let lx = labels(x);
    let ly: HashMap<usize, usize> = labels(y).into_iter().collect();
    let n = lx.len() as f64;
    let mut joint: HashMap<(usize, usize), f64> = HashMap::new();
    let mut px: HashMap<usize, f64> = HashMap::new();
    let mut py: HashMap<usize, f64> = HashMap::new();
    for &(v, c) in &lx {
        *joint.entry((c, ly[&v])).or_default() += 1.0;
        *px.entry(c).or_default() += 1.0;
        *py.entry(ly[&v]).or_default() += 1.0;
    }
    let h = |m: &HashMap<usize, f64>| -> f64 { m.values().map(|&c| -(c / n) * (c / n).ln()).sum() };
    let (hx, hy) = (h(&px), h(&py));
    let mi: f64 = joint
        .iter()
        .map(|(&(a, b), &c)| (c / n) * ((c / n) / ((px[&a] / n) * (py[&b] / n))).ln())
        .sum();
    if hx + hy == 0.0 {
        1.0
    } else {
        2.0 * mi / (hx + hy)
    }
}

pub fn clustering(g: &Graph) -> Vec<f64> {
    let a = adjacency(g);
    (0..g.universe_size())
        .map(|v| {
            let nb: Vec<usize> = (0..a.len()).filter(|&w| a[v][w]).collect();
            let d = nb.len();
            if d < 2 {
                return 0.0;
            }
            let mut links = 0;
            for i in 0..d {
                for j in i + 1..d {
                    if a[nb[i]][nb[j]] {
                        links += 1;
                    }
                }
            }
            links as f64 / (d * (d - 1) / 2) as f64
        })
        .collect()
}

/// Betweenness over unordered pairs from shortest-path counts derived from
/// the distance matrix.
pub fn betweenness(g: &Graph) -> Vec<f64> {
    let n = g.universe_size();
    let a = adjacency(g);
    let d = floyd_warshall(g);
    let nodes: Vec<usize> = g.nodes().collect();
    let mut sigma = vec![vec![0f64; n]; n];
    for &s in &nodes {
        let mut by_dist: Vec<usize> = nodes.iter().copied().filter(|&t| d[s][t] < INF).collect();
        by_dist.sort_by_key(|&t| d[s][t]);
        for &t in &by_dist {
            sigma[s][t] = if t == s {
                1.0
            } else {
                nodes
                    .iter()
                    .filter(|&&w| a[w][t] && d[s][w] + 1 == d[s][t])
                    .map(|&w| sigma[s][w])
                    .sum()
            };
        }
    }
    let mut b = vec![0.0; n];
    for &v in &nodes {
        for (i, &s) in nodes.iter().enumerate() {
            for &t in &nodes[i + 1..] {
                if s == v || t == v || d[s][t] >= INF {
                    continue;
                }
                if d[s][v] + d[v][t] == d[s][t] {
                    b[v] += sigma[s][v] * sigma[v][t] / sigma[s][t];
                }
            }
        }
    }
    b
}

pub fn closeness(g: &Graph) -> Vec<f64> {
    let d = floyd_warshall(g);
    (0..g.universe_size())
        .map(|v| {
            if !g.contains(v) {
                return 0.0;
            }
            let reach: Vec<usize> = g.nodes().filter(|&w| d[v][w] < INF).map(|w| d[v][w]).collect();
            let total: usize = reach.iter().sum();
            if total == 0 {
                0.0
            } else {
                (reach.len() - 1) as f64 / total as f64
            }
        })
        .collect()
}

pub fn eccentricity(g: &Graph) -> Vec<f64> {
    let d = floyd_warshall(g);
    (0..g.universe_size())
        .map(|v| g.nodes().filter(|&w| d[v][w] < INF).map(|w| d[v][w]).max().unwrap_or(0) as f64)
        .collect()
}

/// Core number by repeatedly deleting every node of degree below `k`.
pub fn coreness(g: &Graph) -> Vec<f64> {
    let n = g.universe_size();
    let a = adjacency(g);
    let mut core = vec![0.0; n];
    let mut k = 1;
    loop {
        let mut alive: Vec<bool> = (0..n).map(|v| g.contains(v)).collect();
        loop {
            let drop: Vec<usize> = (0..n)
                .filter(|&v| alive[v] && (0..n).filter(|&w| alive[w] && a[v][w]).count() < k)
                .collect();
            if drop.is_empty() {
                break;
            }
            for v in drop {
                alive[v] = false;
            }
        }
        if !alive.iter().any(|&x| x) {
            return core;
        }
        for v in 0..n {
            if alive[v] {
                core[v] = k as f64;
            }
        }
        k += 1;
    }
}

/// Burt's constraint with `p_ij = a_ij / deg(i)`.
pub fn constraint(g: &Graph) -> Vec<f64> {
    let n = g.universe_size();
    let a = adjacency(g);
    let deg: Vec<f64> = (0..n).map(|v| a[v].iter().filter(|&&x| x).count() as f64).collect();
    let p = |i: usize, j: usize| if a[i][j] { 1.0 / deg[i] } else { 0.0 };
    (0..n)
        .map(|i| {
            let mut c = 0.0;
            for j in 0..n {
                if !a[i][j] {
                    continue;
                }
                let mut s = p(i, j);
                for q in 0..n {
                    if q != i && q != j {
                        s += p(i, q) * p(q, j);
                    }
                }
                c += s * s;
            }
            c
        })
        .collect()
}

/// Entropy of incident weights over `ln(degree)`; unit weights here.
pub fn diversity(g: &Graph) -> Vec<f64> {
    (0..g.universe_size())
        .map(|v| {
            let ws: Vec<f64> = g.weighted_neighbors(v).map(|(_, w)| w).collect();
            if ws.len() < 2 {
                return 0.0;
            }
            let total: f64 = ws.iter().sum();
            let h: f64 = ws.iter().map(|w| -(w / total) * (w / total).ln()).sum();
            h / (ws.len() as f64).ln()
        })
        .collect()
}

fn wiener(g: &Graph) -> f64 {
    let d = floyd_warshall(g);
    let nodes: Vec<usize> = g.nodes().collect();
    let mut w = 0usize;
    for (i, &u) in nodes.iter().enumerate() {
        for &v in &nodes[i + 1..] {
            if d[u][v] < INF {
                w += d[u][v];
            }
        }
    }
    w as f64
}

/// Wiener index drop from deleting each node, recomputed from scratch.
pub fn closeness_vitality(g: &Graph) -> Vec<f64> {
    let whole = wiener(g);
    (0..g.universe_size())
        .map(|v| {
            if !g.contains(v) || g.node_count() == 1 {
                return 0.0;
            }
            let rest = g.remove_nodes(&commvuln::core::NodeSet::new([v])).unwrap();
            whole - wiener(&rest)
        })
        .collect()
}

/// Principal eigenvector of a connected graph from a dense symmetric
/// eigendecomposition, sign-fixed and unit-normalized.
pub fn eigenvector(g: &Graph) -> Vec<f64> {
    let n = g.universe_size();
    let a = adjacency(g);
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| f64::from(u8::from(a[i][j])));
    let eig = nalgebra::SymmetricEigen::new(m);
    let top = (0..n)
        .max_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]))
        .unwrap();
    let col = eig.eigenvectors.column(top);
    let norm = col.norm();
    col.iter().map(|x| x.abs() / norm).collect()
}

pub fn degree(g: &Graph) -> Vec<f64> {
    let a = adjacency(g);
    a.iter().map(|row| row.iter().filter(|&&x| x).count() as f64).collect()
}

/// Ranking high to low after rounding scores to `decimals` places; equal
/// rounded scores go by id.
pub fn rank(scores: &[f64], nodes: &[usize], decimals: i32) -> Vec<usize> {
    let scale = 10f64.powi(decimals);
    let mut idx = nodes.to_vec();
    idx.sort_by_key(|&v| (std::cmp::Reverse((scores[v] * scale).round() as i64), v));
    idx
}
