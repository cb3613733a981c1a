use proptest::prelude::*;
use rqrao::graph::{
    cut_weight, max_spanning_forest, parse_rudy, perturb_weights, reduce_graph, reduction_offset, to_rudy, BitString,
    Graph, Parity, ParityRecord,
};
use rqrao::rng::seeded;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n)
        .prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n, -3i32..=3), 1..=2 * n)))
        .prop_map(|(n, es)| Graph::new(n, es.into_iter().map(|(u, v, w)| (u, v, w as f64))).unwrap())
}

fn bits_of(x: u64, n: usize) -> BitString {
    BitString::from_index(x, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cut_is_flip_symmetric(g in graph_strategy(12), x in any::<u64>()) {
        let b = bits_of(x, g.num_nodes());
        prop_assert_eq!(cut_weight(&g, &b).unwrap(), cut_weight(&g, &b.flipped()).unwrap());
    }

    #[test]
    fn rudy_round_trip(g in graph_strategy(12)) {
        let back = parse_rudy(&to_rudy(&g)).unwrap();
        prop_assert_eq!(back.edges(), g.edges());
        prop_assert_eq!(back.num_nodes(), g.num_nodes());
    }

    #[test]
    fn reduction_shifts_cut_by_a_constant(g in graph_strategy(10), pick in any::<prop::sample::Index>(), negative in any::<bool>()) {
        prop_assume!(g.num_edges() > 0);
        let e = g.edges()[pick.index(g.num_edges())];
        let parity = if negative { Parity::Negative } else { Parity::Positive };
        // lift keeps the reduced graph's node order and re-inserts `removed`
        let (removed, kept) = (e.v, e.u);
        let reduced = reduce_graph(&g, removed, kept, parity).unwrap();
        let offset = reduction_offset(&g, removed, parity).unwrap();
        let n = g.num_nodes();
        for x in 0..1u64 << (n - 1) {
            let small = bits_of(x, n - 1);
            let mut full = Vec::with_capacity(n);
            for i in 0..n {
                if i == removed {
                    full.push(0);
                } else {
                    let j = if i > removed { i - 1 } else { i };
                    full.push(small.get(j));
                }
            }
            let kept_bit = full[kept];
            full[removed] = kept_bit ^ parity.xor();
            let lifted = BitString::from_bits(full);
            let lhs = cut_weight(&g, &lifted).unwrap();
            let rhs = cut_weight(&reduced, &small).unwrap() + offset;
            prop_assert!((lhs - rhs).abs() < 1e-12, "{} vs {}", lhs, rhs);
        }
    }

    #[test]
    fn spanning_forest_is_maximum(
        n in 2usize..7,
        raw in prop::collection::vec((0usize..7, 0usize..7, 1u32..100), 1..=8),
        seed in any::<u64>(),
    ) {
        let mut edges: Vec<(usize, usize, f64)> = Vec::new();
        for (u, v, w) in raw {
            let (u, v) = (u % n, v % n);
            if u != v && !edges.iter().any(|e| (e.0.min(e.1), e.0.max(e.1)) == (u.min(v), u.max(v))) {
                edges.push((u, v, w as f64));
            }
        }
        prop_assume!(!edges.is_empty());
        let forest = max_spanning_forest(&edges, &mut seeded(seed));
        // every acyclic subset of maximum size is a spanning forest
        let acyclic = |mask: u32| {
            let mut parent: Vec<usize> = (0..n).collect();
            fn find(p: &mut Vec<usize>, x: usize) -> usize {
                let mut r = x;
                while p[r] != r { r = p[r]; }
                p[x] = r;
                r
            }
            for (i, &(u, v, _)) in edges.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    let (a, b) = (find(&mut parent, u), find(&mut parent, v));
                    if a == b { return false; }
                    parent[a] = b;
                }
            }
            true
        };
        let mut best_size = 0;
        let mut best_weight = 0.0f64;
        for mask in 0..1u32 << edges.len() {
            if !acyclic(mask) { continue; }
            let size = mask.count_ones();
            let w: f64 = (0..edges.len()).filter(|i| mask >> i & 1 == 1).map(|i| edges[i].2).sum();
            if size > best_size || (size == best_size && w > best_weight) {
                best_size = size;
                best_weight = w;
            }
        }
        prop_assert_eq!(forest.num_edges(), best_size as usize);
        prop_assert_eq!(forest.total_weight(), best_weight);
        for tree in &forest.trees {
            prop_assert_eq!(tree.leaf_to_root().count(), tree.num_edges());
        }
    }

    #[test]
    fn assembled_bits_respect_every_decision(g in graph_strategy(10), seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = seeded(seed);
        let mut rec = ParityRecord::new(g.clone());
        while rec.residual_graph.num_edges() > 0 && rec.residual_graph.num_nodes() > 2 {
            let r = &rec.residual_graph;
            let e = r.edges()[rng.random_range(0..r.num_edges())];
            let parity = if rng.random_bool(0.5) { Parity::Positive } else { Parity::Negative };
            let (removed, kept) = (r.label(e.v), r.label(e.u));
            rec.fix(removed, kept, parity).unwrap();
        }
        let residual = rec.replay(&g).unwrap();
        prop_assert_eq!(residual.labels(), rec.residual_graph.labels());
        let x: u64 = rng.random();
        rec.residual_assignment = Some(bits_of(x, residual.num_nodes()));
        let bits = rec.assemble(&g).unwrap();
        for d in &rec.decisions {
            let (r, k) = (g.index_of(d.removed).unwrap(), g.index_of(d.kept).unwrap());
            prop_assert_eq!(bits.get(r) ^ bits.get(k), d.parity.xor());
        }
    }
}

#[test]
fn perturbed_reduction_chains_avoid_exact_zeros() {
    use rand::Rng;
    let mut zeros = 0;
    for chain in 0..100u64 {
        let g = rqrao::graph::generate(&rqrao::graph::GeneratorSpec::ThreeRegular {
            n: 20,
            weights: rqrao::graph::WeightDist::Pm1,
            seed: chain,
        })
        .unwrap();
        let mut rng = seeded(1000 + chain);
        let mut cur = perturb_weights(&g, 1e-5, &mut rng);
        while cur.num_nodes() > 2 && cur.num_edges() > 0 {
            let e = cur.edges()[rng.random_range(0..cur.num_edges())];
            let parity = if rng.random_bool(0.5) { Parity::Positive } else { Parity::Negative };
            cur = reduce_graph(&cur, cur.label(e.v), cur.label(e.u), parity).unwrap();
            zeros += cur.edges().iter().filter(|e| e.w == 0.0).count();
        }
    }
    assert_eq!(zeros, 0);
}

#[test]
fn unperturbed_chains_do_cancel() {
    // the same chains without noise produce exact zeros, which is why the
    // perturbation exists
    use rand::Rng;
    let mut zeros = 0;
    for chain in 0..20u64 {
        let g = rqrao::graph::generate(&rqrao::graph::GeneratorSpec::ThreeRegular {
            n: 20,
            weights: rqrao::graph::WeightDist::Pm1,
            seed: chain,
        })
        .unwrap();
        let mut rng = seeded(1000 + chain);
        let mut cur = g;
        while cur.num_nodes() > 2 && cur.num_edges() > 0 {
            let e = cur.edges()[rng.random_range(0..cur.num_edges())];
            let parity = if rng.random_bool(0.5) { Parity::Positive } else { Parity::Negative };
            cur = reduce_graph(&cur, cur.label(e.v), cur.label(e.u), parity).unwrap();
            zeros += cur.edges().iter().filter(|e| e.w == 0.0).count();
        }
    }
    assert!(zeros > 0);
}
