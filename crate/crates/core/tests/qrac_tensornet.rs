use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rqrao::graph::{generate, GeneratorSpec, WeightDist};
use rqrao::oracle::{dense_from_mps, product_vector, DenseState};
use rqrao::pauli::{dagger, mat_mul, trace};
use rqrao::qrac::{assign_paulis, build_terms, magic_density, MagicState};
use rqrao::rng::seeded;
use rqrao::tensornet::{build_mpo, evaluate, expectation, init_mps, optimize, OptimizerConfig};
use rqrao::{BitString, Graph};

fn random_graph(n: usize, density: f64, seed: u64) -> Graph {
    generate(&GeneratorSpec::Random {
        n,
        density,
        weights: WeightDist::Pm1,
        seed,
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn assignments_are_valid(n in 2usize..30, density in 0.05f64..0.9, m in 1usize..=3, seed in any::<u64>()) {
        let g = random_graph(n, density, seed);
        let a = assign_paulis(&g, m, &mut seeded(seed ^ 1)).unwrap();
        prop_assert!(a.validate(&g).is_ok());
        prop_assert_eq!(a.num_nodes(), n);
        prop_assert!(a.num_qubits() >= n.div_ceil(m));
    }

    #[test]
    fn diagonal_energy_is_cut_weight(n in 2usize..9, m in 1usize..=3, seed in any::<u64>(), x in any::<u64>()) {
        let g = random_graph(n, 0.6, seed);
        let a = assign_paulis(&g, m, &mut seeded(seed)).unwrap();
        prop_assume!(a.num_qubits() <= 8);
        let h = build_terms(&g, &a).unwrap();
        let b = BitString::from_index(x, n);
        let ms = MagicState::encode(&a, &b).unwrap();
        let local: Vec<[C64; 2]> = (0..a.num_qubits()).map(|q| ms.vector(q)).collect();
        let rho = DenseState::pure(product_vector(&local)).unwrap();
        let (mean, _) = rho.hamiltonian_moments(h.constant, &h.pauli_terms()).unwrap();
        prop_assert!((mean - g.cut_weight(&b).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn expectation_ignores_tensor_scale(seed in any::<u64>(), factor in 0.01f64..100.0) {
        let g = random_graph(7, 0.5, seed);
        let a = assign_paulis(&g, 2, &mut seeded(seed)).unwrap();
        let h = build_mpo(&build_terms(&g, &a).unwrap()).unwrap();
        let mut psi = init_mps(a.num_qubits(), 2, &mut seeded(seed ^ 7)).unwrap();
        let before = expectation(&psi, &h).unwrap();
        psi.rescale(factor);
        let after = expectation(&psi, &h).unwrap();
        prop_assert!((before - after).abs() < 1e-9 * (1.0 + before.abs()));
    }
}

#[test]
fn magic_density_is_a_pure_state() {
    let g = random_graph(9, 0.5, 3);
    for m in 1..=3 {
        let a = assign_paulis(&g, m, &mut seeded(m as u64)).unwrap();
        for x in 0..1u64 << 9 {
            let ms = MagicState::encode(&a, &BitString::from_index(x, 9)).unwrap();
            for q in 0..ms.num_qubits() {
                let rho = magic_density(&ms, q);
                let adj = dagger(&rho);
                let sq = mat_mul(&rho, &rho);
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((rho[i][j] - adj[i][j]).norm() < 1e-14);
                        assert!((sq[i][j] - rho[i][j]).norm() < 1e-14);
                    }
                }
                assert!((trace(&rho) - C64::new(1.0, 0.0)).norm() < 1e-14);
            }
        }
    }
}

#[test]
fn edgeless_graph_uses_ceiling_qubits() {
    for n in 1..20 {
        let g = Graph::new(n, std::iter::empty()).unwrap();
        for m in 1..=3 {
            let a = assign_paulis(&g, m, &mut seeded(n as u64)).unwrap();
            assert_eq!(a.num_qubits(), n.div_ceil(m), "n={n} m={m}");
        }
    }
}

#[test]
fn mps_matches_dense_for_several_bond_dims() {
    let g = random_graph(10, 0.4, 11);
    let a = assign_paulis(&g, 3, &mut seeded(11)).unwrap();
    let terms = build_terms(&g, &a).unwrap();
    let h = build_mpo(&terms).unwrap();
    for chi in [1, 2, 4] {
        let psi = init_mps(a.num_qubits(), chi, &mut seeded(chi as u64)).unwrap();
        let dense = dense_from_mps(&psi).unwrap();
        let (mean, _) = dense.hamiltonian_moments(terms.constant, &terms.pauli_terms()).unwrap();
        let mps = expectation(&psi, &h).unwrap();
        assert!((mean - mps).abs() < 1e-10 * (1.0 + mean.abs()), "chi={chi}: {mean} vs {mps}");
    }
}

#[test]
fn optimization_never_lowers_the_objective() {
    for seed in 0..5 {
        let g = random_graph(12, 0.4, 100 + seed);
        let a = assign_paulis(&g, 3, &mut seeded(seed)).unwrap();
        let h = build_mpo(&build_terms(&g, &a).unwrap()).unwrap();
        let psi = init_mps(a.num_qubits(), 2, &mut seeded(seed)).unwrap();
        let opt = optimize(&psi, &h, &OptimizerConfig::default()).unwrap();
        assert!(!opt.failed());
        assert!(opt.value >= opt.initial_value - 1e-12);
        let check = evaluate(&opt.psi, &h, false).unwrap().value;
        assert!((check - opt.value).abs() < 1e-9 * (1.0 + check.abs()));
    }
}
