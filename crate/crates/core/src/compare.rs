//! Value functions: how far apart are the community structures before and
//! after a perturbation.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};
use crate::louvain::Partition;

/// Modularity `Q = sum_c [e_c / m - (d_c / 2m)^2]` where `e_c` counts
/// internal edges and `d_c` sums degrees of community `c`.
pub fn modularity(g: &Graph, p: &Partition) -> Result<f64> {
    p.check_covers(g)?;
    let m = g.edge_count();
    if m == 0 {
        return Err(Error::NoEdges);
    }
    let c = p.community_count();
    let mut internal = vec![0usize; c];
    let mut degree = vec![0usize; c];
    for v in g.nodes() {
        let cv = p.label(v).ok_or(Error::UncoveredNode(v))?;
        degree[cv] += g.degree(v);
        internal[cv] += g
            .neighbors(v)
            .iter()
            .filter(|&&w| w > v && p.label(w) == Some(cv))
            .count();
    }
    let m = m as f64;
    Ok(internal
        .iter()
        .zip(&degree)
        .map(|(&e, &d)| {
            let frac = d as f64 / (2.0 * m);
            e as f64 / m - frac * frac
        })
        .sum())
}

/// Sparse contingency table between two partitions over the same nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    /// Non-zero cells `(row, column, count)`, sorted by `(row, column)`.
    pub cells: Vec<(usize, usize, u64)>,
    pub row_sums: Vec<u64>,
    pub col_sums: Vec<u64>,
    pub total: u64,
}

impl ContingencyTable {
    pub fn new(x: &Partition, y: &Partition) -> Result<Self> {
        if x.universe_size() != y.universe_size() || x.node_count() != y.node_count() {
            return Err(Error::UniverseMismatch);
        }
        let mut pairs = Vec::with_capacity(x.node_count());
        for v in x.nodes() {
            let (i, j) = (x.label(v), y.label(v));
            match (i, j) {
                (Some(i), Some(j)) => pairs.push((i, j)),
                _ => return Err(Error::UniverseMismatch),
            }
        }
        pairs.sort_unstable();
        let mut cells: Vec<(usize, usize, u64)> = Vec::new();
        for (i, j) in pairs {
            match cells.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += 1,
                _ => cells.push((i, j, 1)),
            }
        }
        let mut row_sums = vec![0u64; x.community_count()];
        let mut col_sums = vec![0u64; y.community_count()];
        for &(i, j, c) in &cells {
            row_sums[i] += c;
            col_sums[j] += c;
        }
        Ok(ContingencyTable {
            cells,
            row_sums,
            col_sums,
            total: x.node_count() as u64,
        })
    }

    /// True when every row and every column has exactly one non-zero cell,
    /// i.e. the two partitions are equal up to relabeling.
    pub fn is_matching(&self) -> bool {
        self.cells.len() == self.row_sums.len() && self.cells.len() == self.col_sums.len()
    }
}

fn entropy(sums: &[u64], total: f64) -> f64 {
    sums.iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / total;
            -p * libm::log(p)
        })
        .sum()
}

/// Normalized mutual information `2 I(X;Y) / (H(X) + H(Y))`.
///
/// Equal partitions score exactly 1. If either side has zero entropy the
/// score is 1 when both are a single community and 0 otherwise.
pub fn nmi(x: &Partition, y: &Partition) -> Result<f64> {
    let t = ContingencyTable::new(x, y)?;
    if t.total == 0 {
        return Err(Error::EmptyNodeSet);
    }
    if t.is_matching() {
        return Ok(1.0);
    }
    let n = t.total as f64;
    let hx = entropy(&t.row_sums, n);
    let hy = entropy(&t.col_sums, n);
    if hx == 0.0 || hy == 0.0 {
        return Ok(if t.row_sums.len() == 1 && t.col_sums.len() == 1 {
            1.0
        } else {
            0.0
        });
    }
    let mut mi = 0.0;
    for &(i, j, c) in &t.cells {
        let nij = c as f64;
        let ratio = (nij * n) / (t.row_sums[i] as f64 * t.col_sums[j] as f64);
        mi += nij / n * libm::log(ratio);
    }
    Ok((2.0 * mi / (hx + hy)).clamp(0.0, 1.0))
}

fn choose2(x: u64) -> i128 {
    let x = x as i128;
    x * (x - 1) / 2
}

/// Adjusted Rand index from exact integer pair counts.
///
/// With `I = sum C(n_ij, 2)`, `A = sum C(a_i, 2)`, `B = sum C(b_j, 2)` and
/// `N = C(n, 2)`, this is `(2 I N - 2 A B) / ((A + B) N - 2 A B)`; a zero
/// denominator (both trivial) scores 1.
pub fn ari(x: &Partition, y: &Partition) -> Result<f64> {
    let t = ContingencyTable::new(x, y)?;
    if t.total == 0 {
        return Err(Error::EmptyNodeSet);
    }
    let index: i128 = t.cells.iter().map(|&(_, _, c)| choose2(c)).sum();
    let a: i128 = t.row_sums.iter().map(|&s| choose2(s)).sum();
    let b: i128 = t.col_sums.iter().map(|&s| choose2(s)).sum();
    let pairs = choose2(t.total);
    Ok(ari_from_counts(index, a, b, pairs))
}

/// The shared final step of [`ari`], exposed so pair-counting code can reuse
/// the exact-integer reduction.
pub fn ari_from_counts(index: i128, a: i128, b: i128, pairs: i128) -> f64 {
    let num = 2 * index * pairs - 2 * a * b;
    let den = (a + b) * pairs - 2 * a * b;
    if den == 0 {
        return 1.0;
    }
    if num == den {
        return 1.0;
    }
    num as f64 / den as f64
}

/// Keeps only the nodes in `keep` and renumbers communities.
pub fn restrict(p: &Partition, keep: &NodeSet) -> Result<Partition> {
    if keep.is_empty() {
        return Err(Error::EmptyNodeSet);
    }
    let mut assignment = vec![None; p.universe_size()];
    for v in keep.iter() {
        if v >= p.universe_size() {
            return Err(Error::NodeOutOfRange {
                node: v,
                universe: p.universe_size(),
            });
        }
        assignment[v] = Some(p.label(v).ok_or(Error::UncoveredNode(v))?);
    }
    Ok(Partition::from_assignment(&assignment))
}

/// Which difference between community structures an attack maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ValueFunctionId {
    /// `Q(before) - Q(after)`; larger is more damage.
    ModularityDiff,
    /// NMI between before and after; smaller is more damage.
    Nmi,
    /// ARI between before and after; smaller is more damage.
    Ari,
}

impl ValueFunctionId {
    pub const ALL: [ValueFunctionId; 3] = [Self::ModularityDiff, Self::Nmi, Self::Ari];

    pub fn name(self) -> &'static str {
        match self {
            Self::ModularityDiff => "modularity",
            Self::Nmi => "nmi",
            Self::Ari => "ari",
        }
    }

    /// Maps a raw score onto the always-maximize damage scale.
    pub fn damage(self, raw: f64) -> f64 {
        match self {
            Self::ModularityDiff => raw,
            Self::Nmi | Self::Ari => 1.0 - raw,
        }
    }
}

impl fmt::Display for ValueFunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ValueFunctionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "modularity" | "modularity_diff" => Ok(Self::ModularityDiff),
            "nmi" => Ok(Self::Nmi),
            "ari" => Ok(Self::Ari),
            _ => Err(Error::UnknownName {
                kind: "value function",
                name: s.into(),
            }),
        }
    }
}

/// A value-function score in its reported form plus its damage form.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DamageScore {
    pub raw: f64,
    pub damage: f64,
}

impl DamageScore {
    pub fn new(vf: ValueFunctionId, raw: f64) -> Self {
        DamageScore {
            raw,
            damage: vf.damage(raw),
        }
    }
}

/// Modularity with the convention that a graph with no edges scores 0.
fn modularity_or_zero(g: &Graph, p: &Partition) -> Result<f64> {
    match modularity(g, p) {
        Err(Error::NoEdges) => Ok(0.0),
        other => other,
    }
}

/// Scores the change from `(g, x)` to `(g_pert, y)`.
///
/// NMI and ARI compare `x` restricted to the surviving nodes with `y`.
pub fn evaluate(vf: ValueFunctionId, g: &Graph, x: &Partition, g_pert: &Graph, y: &Partition) -> Result<DamageScore> {
    let raw = match vf {
        ValueFunctionId::ModularityDiff => modularity_or_zero(g, x)? - modularity_or_zero(g_pert, y)?,
        ValueFunctionId::Nmi | ValueFunctionId::Ari => {
            y.check_covers(g_pert)?;
            let before = restrict(x, &g_pert.node_set())?;
            if vf == ValueFunctionId::Nmi {
                nmi(&before, y)?
            } else {
                ari(&before, y)?
            }
        }
    };
    Ok(DamageScore::new(vf, raw))
}

/// [`evaluate`] with the original modularity already known, for search loops.
pub(crate) fn evaluate_with_base(
    vf: ValueFunctionId,
    base_modularity: f64,
    x: &Partition,
    g_pert: &Graph,
    y: &Partition,
) -> Result<DamageScore> {
    let raw = match vf {
        ValueFunctionId::ModularityDiff => base_modularity - modularity_or_zero(g_pert, y)?,
        ValueFunctionId::Nmi | ValueFunctionId::Ari => {
            let before = restrict(x, &g_pert.node_set())?;
            if vf == ValueFunctionId::Nmi {
                nmi(&before, y)?
            } else {
                ari(&before, y)?
            }
        }
    };
    Ok(DamageScore::new(vf, raw))
}

pub(crate) fn base_modularity(g: &Graph, x: &Partition) -> Result<f64> {
    modularity_or_zero(g, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::two_triangles;

    fn part(groups: &[&[usize]], universe: usize) -> Partition {
        let groups: Vec<Vec<usize>> = groups.iter().map(|g| g.to_vec()).collect();
        Partition::from_communities(universe, &groups).unwrap()
    }

    /// Double sum over all ordered node pairs.
    fn modularity_double_sum(g: &Graph, p: &Partition) -> f64 {
        let m2 = 2.0 * g.edge_count() as f64;
        let mut q = 0.0;
        for v in g.nodes() {
            for w in g.nodes() {
                if p.label(v) == p.label(w) {
                    let a = if g.has_edge(v, w) { 1.0 } else { 0.0 };
                    q += a - (g.degree(v) * g.degree(w)) as f64 / m2;
                }
            }
        }
        q / m2
    }

    #[test]
    fn single_community_has_zero_modularity() {
        let g = two_triangles();
        let q = modularity(&g, &Partition::single_community(&g)).unwrap();
        assert!(q.abs() < 1e-15);
    }

    #[test]
    fn two_triangle_modularity() {
        let g = two_triangles();
        let p = part(&[&[0, 1, 2], &[3, 4, 5]], 6);
        let q = modularity(&g, &p).unwrap();
        assert!((q - modularity_double_sum(&g, &p)).abs() < 1e-12);
        assert!((q - 5.0 / 14.0).abs() < 1e-12);
    }

    #[test]
    fn modularity_needs_edges_and_cover() {
        let g = Graph::from_edges(2, []).unwrap().0;
        assert_eq!(modularity(&g, &Partition::singletons(&g)).unwrap_err(), Error::NoEdges);
        let g = two_triangles();
        let p = part(&[&[0, 1, 2]], 6);
        assert_eq!(modularity(&g, &p).unwrap_err(), Error::UncoveredNode(3));
    }

    #[test]
    fn nmi_cases() {
        let x = part(&[&[0, 1], &[2, 3]], 4);
        let y = part(&[&[0, 2], &[1, 3]], 4);
        assert_eq!(nmi(&x, &x).unwrap(), 1.0);
        assert!(nmi(&x, &y).unwrap().abs() < 1e-15);
        let singles = part(&[&[0], &[1], &[2], &[3]], 4);
        let whole = part(&[&[0, 1, 2, 3]], 4);
        assert_eq!(nmi(&singles, &whole).unwrap(), 0.0);
        assert_eq!(nmi(&whole, &whole).unwrap(), 1.0);
    }

    #[test]
    fn ari_cases() {
        let x = part(&[&[0, 1], &[2, 3]], 4);
        let y = part(&[&[0, 2], &[1, 3]], 4);
        assert_eq!(ari(&x, &x).unwrap(), 1.0);
        assert_eq!(ari(&x, &y).unwrap(), -0.5);
        let whole = part(&[&[0, 1, 2, 3]], 4);
        assert_eq!(ari(&whole, &whole).unwrap(), 1.0);
    }

    #[test]
    fn mismatched_universe() {
        let x = part(&[&[0, 1], &[2, 3]], 4);
        let y = part(&[&[0, 1], &[2]], 4);
        assert_eq!(nmi(&x, &y).unwrap_err(), Error::UniverseMismatch);
        assert_eq!(ari(&x, &y).unwrap_err(), Error::UniverseMismatch);
    }

    #[test]
    fn restrict_cases() {
        let p = part(&[&[0, 1], &[2, 3]], 4);
        assert_eq!(restrict(&p, &NodeSet::new(0..4)).unwrap(), p);
        let r = restrict(&p, &NodeSet::new([0, 2])).unwrap();
        assert_eq!(r.sizes(), &[1, 1]);
        assert_eq!(r.label(1), None);
        assert_eq!(restrict(&p, &NodeSet::empty()).unwrap_err(), Error::EmptyNodeSet);
    }

    #[test]
    fn unperturbed_is_zero_damage() {
        let g = two_triangles();
        let x = part(&[&[0, 1, 2], &[3, 4, 5]], 6);
        for vf in ValueFunctionId::ALL {
            let s = evaluate(vf, &g, &x, &g, &x).unwrap();
            assert_eq!(s.damage, 0.0, "{vf}");
        }
        assert_eq!(evaluate(ValueFunctionId::Nmi, &g, &x, &g, &x).unwrap().raw, 1.0);
    }

    #[test]
    fn orientation() {
        assert!(ValueFunctionId::Nmi.damage(0.2) > ValueFunctionId::Nmi.damage(0.3));
        assert!(ValueFunctionId::Ari.damage(-0.5) > ValueFunctionId::Ari.damage(0.5));
        assert!(ValueFunctionId::ModularityDiff.damage(0.2) > ValueFunctionId::ModularityDiff.damage(0.1));
    }

    #[test]
    fn names_round_trip() {
        for vf in ValueFunctionId::ALL {
            assert_eq!(vf.name().parse::<ValueFunctionId>().unwrap(), vf);
        }
        assert!("vi".parse::<ValueFunctionId>().is_err());
    }
}
