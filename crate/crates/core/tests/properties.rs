use std::collections::BTreeSet;

use commvuln_core::attack::{community_greedy_attack, exhaustive_attack, network_greedy_attack, AttackSpec, Budget};
use commvuln_core::generate::random_partition;
use commvuln_core::graph::{connected_components, shortest_path_lengths, Bfs, UNREACHABLE};
use commvuln_core::metrics::{closeness, clustering_coefficient, coreness, eccentricity, eigenvector};
use commvuln_core::rng::rng_from_seed;
use commvuln_core::task::{cascade_once, f1_from_candidates, sample_non_edges};
use commvuln_core::{
    ari, detect_communities, evaluate, modularity, nmi, node_metric, rank_nodes, restrict, CommunityMetricId,
    DetectorConfig, Graph, NodeMetricId, NodeSet, Partition, Scorer, ValueFunctionId,
};
use proptest::prelude::*;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..(n * 3)).prop_map(move |edges| Graph::from_edges(n, edges).unwrap().0)
    })
}

fn graph_with_edges(max_n: usize) -> impl Strategy<Value = Graph> {
    graph_strategy(max_n).prop_filter("needs edges", |g| g.edge_count() > 0)
}

fn graph_and_removal(max_n: usize) -> impl Strategy<Value = (Graph, NodeSet)> {
    graph_strategy(max_n).prop_flat_map(|g| {
        let n = g.universe_size();
        prop::collection::btree_set(0..n, 0..n).prop_map(move |s| (g.clone(), NodeSet::new(s)))
    })
}

fn labels_strategy(n: usize, max_c: usize) -> impl Strategy<Value = Vec<Option<usize>>> {
    prop::collection::vec((0..max_c).prop_map(Some), n)
}

fn double_sum(g: &Graph, p: &Partition) -> f64 {
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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjacency_is_canonical(g in graph_strategy(30)) {
        let mut degree_sum = 0;
        for v in g.nodes() {
            let nb = g.neighbors(v);
            prop_assert!(nb.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(!nb.contains(&v));
            for &w in nb {
                prop_assert!(g.has_edge(w, v));
            }
            degree_sum += g.degree(v);
        }
        prop_assert_eq!(degree_sum, 2 * g.edge_count());
    }

    #[test]
    fn removal_is_complement_of_induction((g, s) in graph_and_removal(25)) {
        prop_assume!(s.len() < g.node_count());
        let keep = NodeSet::new(g.nodes().filter(|&v| !s.contains(v)));
        let removed = g.remove_nodes(&s).unwrap();
        prop_assert_eq!(&removed, &g.induced_subgraph(&keep).unwrap());
        let survivors = g.edges().filter(|&(u, v)| !s.contains(u) && !s.contains(v)).count();
        prop_assert_eq!(removed.edge_count(), survivors);
    }

    #[test]
    fn bfs_triangle_inequality(g in graph_strategy(25), a in 0usize..25, b in 0usize..25, c in 0usize..25) {
        let n = g.universe_size();
        let (a, b, c) = (a % n, b % n, c % n);
        let mut bfs = Bfs::new(n);
        bfs.run(&g, a, None);
        let dab = bfs.dist[b];
        let dac = bfs.dist[c];
        bfs.run(&g, b, None);
        let dbc = bfs.dist[c];
        if dab != UNREACHABLE && dbc != UNREACHABLE {
            prop_assert!(dac <= dab + dbc);
        }
        let map = shortest_path_lengths(&g, a).unwrap();
        prop_assert_eq!(map.get(&b).copied(), (dab != UNREACHABLE).then_some(dab));
    }

    #[test]
    fn components_cover_disjointly(g in graph_strategy(30)) {
        let comps = connected_components(&g);
        let mut seen = BTreeSet::new();
        for c in &comps {
            for v in c.iter() {
                prop_assert!(seen.insert(v));
            }
        }
        prop_assert_eq!(seen.len(), g.node_count());
    }

    #[test]
    fn modularity_matches_double_sum(g in graph_with_edges(30), seed in any::<u64>(), c in 1usize..6) {
        let p = random_partition(&g, c, seed);
        let q = modularity(&g, &p).unwrap();
        prop_assert!((q - double_sum(&g, &p)).abs() < 1e-9);
        prop_assert!((-0.5..1.0).contains(&q));
    }

    #[test]
    fn louvain_is_valid_and_reproducible(g in graph_with_edges(30), seed in any::<u64>()) {
        let cfg = DetectorConfig::default().with_seed(seed);
        let p = detect_communities(&g, &cfg);
        prop_assert!(p.check_covers(&g).is_ok());
        prop_assert_eq!(&p, &detect_communities(&g, &cfg));
        let q = modularity(&g, &p).unwrap();
        prop_assert!((-0.5..1.0).contains(&q));
        prop_assert!(q >= modularity(&g, &Partition::singletons(&g)).unwrap() - 1e-12);
        prop_assert!(q >= -1e-12);
    }

    #[test]
    fn comparison_bounds_and_symmetry(
        (x, y) in (2usize..60).prop_flat_map(|n| (labels_strategy(n, 6), labels_strategy(n, 6)))
    ) {
        let (x, y) = (Partition::from_assignment(&x), Partition::from_assignment(&y));
        let (a, b) = (ari(&x, &y).unwrap(), ari(&y, &x).unwrap());
        let (m, k) = (nmi(&x, &y).unwrap(), nmi(&y, &x).unwrap());
        prop_assert!((-1.0..=1.0).contains(&a));
        prop_assert!((0.0..=1.0).contains(&m));
        prop_assert_eq!(a, b);
        prop_assert!((m - k).abs() < 1e-12);
        prop_assert_eq!(ari(&x, &x).unwrap(), 1.0);
        prop_assert_eq!(nmi(&x, &x).unwrap(), 1.0);
    }

    #[test]
    fn comparison_ignores_relabeling(
        (x, y, shift) in (2usize..60).prop_flat_map(|n| (labels_strategy(n, 5), labels_strategy(n, 5), 1usize..5))
    ) {
        let px = Partition::from_assignment(&x);
        let relabeled: Vec<Option<usize>> = x.iter().map(|l| l.map(|c| (c + shift) % 5 + 10)).collect();
        let rx = Partition::from_assignment(&relabeled);
        let py = Partition::from_assignment(&y);
        prop_assert_eq!(ari(&px, &py).unwrap(), ari(&rx, &py).unwrap());
        prop_assert!((nmi(&px, &py).unwrap() - nmi(&rx, &py).unwrap()).abs() < 1e-12);
        prop_assert_eq!(nmi(&px, &rx).unwrap(), 1.0);
    }

    #[test]
    fn restrict_to_everything_is_identity(g in graph_strategy(20), seed in any::<u64>()) {
        let p = random_partition(&g, 4, seed);
        prop_assert_eq!(restrict(&p, &g.node_set()).unwrap(), p);
    }

    #[test]
    fn damage_orientation(r1 in -1.0f64..1.0, r2 in -1.0f64..1.0) {
        prop_assume!(r1 < r2);
        prop_assert!(ValueFunctionId::ModularityDiff.damage(r1) < ValueFunctionId::ModularityDiff.damage(r2));
        prop_assert!(ValueFunctionId::Nmi.damage(r1) > ValueFunctionId::Nmi.damage(r2));
        prop_assert!(ValueFunctionId::Ari.damage(r1) > ValueFunctionId::Ari.damage(r2));
    }

    #[test]
    fn node_metric_bounds(g in graph_strategy(25)) {
        let n = g.node_count();
        let cc = clustering_coefficient(&g);
        let cl = closeness(&g);
        let core = coreness(&g);
        let ecc = eccentricity(&g);
        let eig = eigenvector(&g);
        for v in g.nodes() {
            prop_assert!((0.0..=1.0).contains(&cc[v]));
            prop_assert!((0.0..=1.0).contains(&cl[v]));
            prop_assert!(core[v] <= g.degree(v));
            prop_assert!(ecc[v] < n);
            prop_assert!(eig[v] >= 0.0);
        }
        let norm: f64 = eig.iter().map(|x| x * x).sum();
        prop_assert!(g.edge_count() == 0 || (norm - 1.0).abs() < 1e-9);
        for id in NodeMetricId::ALL {
            let mv = node_metric(&g, id);
            prop_assert!(mv.scores.iter().all(|s| s.is_finite()));
            let ranked = rank_nodes(&mv, n);
            prop_assert_eq!(ranked.iter().copied().collect::<BTreeSet<_>>().len(), n);
        }
    }

    #[test]
    fn cascade_parents_are_active(g in graph_strategy(30), seed in any::<u64>(), p_in in 0.0f64..1.0) {
        let p = random_partition(&g, 3, seed);
        let mut rng = rng_from_seed(seed);
        let c = cascade_once(&g, &p, p_in, p_in / 2.0, 2, &mut rng);
        let mut active = BTreeSet::new();
        for &(v, parent) in &c.activations {
            match parent {
                Some(u) => prop_assert!(active.contains(&u) && g.has_edge(u, v)),
                None => prop_assert!(c.seeds.contains(&v)),
            }
            prop_assert!(active.insert(v));
        }
    }

    #[test]
    fn f1_is_a_fraction(g in graph_with_edges(25), seed in any::<u64>()) {
        let p = random_partition(&g, 3, seed);
        let pos: Vec<(usize, usize)> = g.edges().take(5).collect();
        let neg = sample_non_edges(&g, 5, seed);
        for sc in Scorer::ALL {
            let f1 = f1_from_candidates(&g, &p, &pos, &neg, sc);
            prop_assert!((0.0..=1.0).contains(&f1));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn attacks_reproduce_and_respect_optimality(g in graph_with_edges(10), seed in 0u64..1000, k in 1usize..3) {
        prop_assume!(k < g.node_count());
        for vf in ValueFunctionId::ALL {
            let spec = AttackSpec::new(Budget::Absolute(k), vf)
                .with_seed(seed)
                .with_node_metric(NodeMetricId::Degree)
                .with_community_metric(CommunityMetricId::LinkDensity);
            let best = exhaustive_attack(&g, &spec).unwrap();
            let cfg = spec.detector;
            let x = detect_communities(&g, &cfg);
            for r in [network_greedy_attack(&g, &spec).unwrap(), community_greedy_attack(&g, &spec).unwrap()] {
                prop_assert_eq!(r.selected.len(), k);
                prop_assert_eq!(r.selected_set().len(), k);
                let gp = g.remove_nodes(&r.selected_set()).unwrap();
                let y = detect_communities(&gp, &cfg);
                prop_assert_eq!(r.score, evaluate(vf, &g, &x, &gp, &y).unwrap());
                prop_assert!(best.score.damage >= r.score.damage);
            }
        }
    }
}
