use proptest::prelude::*;
use rqrao::graph::{cut_weight, generate, GeneratorSpec, WeightDist};
use rqrao::oracle::brute_force_maxcut;
use rqrao::solver::{
    qrao_solve, rank_two_solve, rqaoa_solve, rqrao_solve, tree_rounding_solve, QraoParams, Rank2Params, RqaoaParams,
    RqraoParams,
};
use rqrao::Graph;

fn regular(n: usize, seed: u64) -> Graph {
    generate(&GeneratorSpec::ThreeRegular {
        n,
        weights: WeightDist::Pm1,
        seed,
    })
    .unwrap()
}

fn random(n: usize, seed: u64) -> Graph {
    generate(&GeneratorSpec::Random {
        n,
        density: 0.4,
        weights: WeightDist::Pm1,
        seed,
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn threshold_covering_the_graph_is_exact(n in 2usize..=20, seed in any::<u64>()) {
        let g = random(n, seed);
        let p = RqraoParams { bf_threshold: n, seed, ..RqraoParams::default() };
        let r = rqrao_solve(&g, &p).unwrap();
        prop_assert_eq!(r.weight, brute_force_maxcut(&g).unwrap().weight);
        prop_assert!(r.rounds.is_empty());
    }
}

#[test]
fn reported_weight_is_recomputed_on_the_original_graph() {
    let g = random(18, 5);
    let reports = [
        rqrao_solve(&g, &RqraoParams { ensemble: 4, ..RqraoParams::default() }).unwrap(),
        qrao_solve(&g, &QraoParams::default()).unwrap(),
        rqaoa_solve(&g, &RqaoaParams::default()).unwrap(),
        rank_two_solve(&g, &Rank2Params::default()).unwrap(),
    ];
    for r in reports {
        assert_eq!(r.bits.len(), g.num_nodes());
        assert_eq!(r.weight, cut_weight(&g, &r.bits).unwrap(), "{}", r.algorithm);
    }
}

#[test]
fn tree_rounding_needs_one_round_on_a_connected_graph() {
    for seed in 0..5 {
        let g = regular(30, seed);
        let r = tree_rounding_solve(&g, &RqraoParams { seed, ..RqraoParams::default() }).unwrap();
        assert!(r.rounds.len() <= 1, "seed {seed}: {} rounds", r.rounds.len());
    }
}

#[test]
fn replay_reaches_the_optimum_on_small_graphs() {
    let mut hits = 0;
    let mut total = 0;
    for graph in 0..4 {
        let g = regular(16, 40 + graph);
        let opt = brute_force_maxcut(&g).unwrap().weight;
        for seed in 0..10 {
            let r = rqrao_solve(&g, &RqraoParams { seed, ..RqraoParams::default() }).unwrap();
            assert!(r.weight <= opt);
            hits += (r.weight == opt) as usize;
            total += 1;
        }
    }
    assert!(hits * 10 >= total * 9, "{hits}/{total}");
}

#[test]
fn rqaoa_is_deterministic() {
    let g = regular(24, 9);
    let a = rqaoa_solve(&g, &RqaoaParams::default()).unwrap();
    let b = rqaoa_solve(&g, &RqaoaParams::default()).unwrap();
    assert_eq!(a.bits, b.bits);
    assert_eq!(a.rounds, b.rounds);
}

#[test]
fn rqrao_is_deterministic_per_seed() {
    let g = regular(24, 2);
    let p = RqraoParams { seed: 3, ..RqraoParams::default() };
    let a = rqrao_solve(&g, &p).unwrap();
    let b = rqrao_solve(&g, &p).unwrap();
    assert_eq!(a.bits, b.bits);
    assert_eq!(a.rounds, b.rounds);
}

#[test]
fn qrao_handles_every_code() {
    let g = regular(20, 4);
    for m in 1..=3 {
        let r = qrao_solve(&g, &QraoParams { m, ..QraoParams::default() }).unwrap();
        assert!(r.weight >= -(g.num_edges() as f64));
        assert!(r.flags.is_empty(), "m={m}: {:?}", r.flags);
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    let g = regular(10, 0);
    for p in [
        RqraoParams { m: 4, ..RqraoParams::default() },
        RqraoParams { ensemble: 0, ..RqraoParams::default() },
        RqraoParams { chi: 0, ..RqraoParams::default() },
        RqraoParams { scale: -1.0, ..RqraoParams::default() },
    ] {
        assert!(rqrao_solve(&g, &p).is_err(), "{p:?}");
    }
}
