use rqrao::graph::{generate, GeneratorSpec, WeightDist};
use rqrao::oracle::{
    brute_force_maxcut, magic_distribution, pair_probabilities, pair_probabilities_closed_form, DenseState,
};
use rqrao::pauli::{trace, Pauli};
use rqrao::qrac::{active_paulis, assign_paulis};
use rqrao::rng::seeded;
use rqrao::shadows::{estimate_pauli, magic_measure, snapshot_matrix, MagicBasis, Measured};
use rqrao::Graph;

fn random(n: usize, seed: u64) -> Graph {
    generate(&GeneratorSpec::Random {
        n,
        density: 0.5,
        weights: WeightDist::Pm1,
        seed,
    })
    .unwrap()
}

#[test]
fn pair_frequencies_follow_the_closed_form() {
    let shots = 20_000;
    for m in 2..=3 {
        let g = random(9, 21);
        let a = assign_paulis(&g, m, &mut seeded(m as u64)).unwrap();
        let rho = DenseState::random_pure(a.num_qubits(), &mut seeded(77));
        let snaps = magic_measure(Measured::Dense(&rho), m, shots, &mut seeded(5)).unwrap();
        let basis = MagicBasis::new(m).unwrap();
        let decoded: Vec<Vec<Vec<u8>>> = snaps.iter().map(|s| s.decoded(&basis)).collect();
        let active = active_paulis(m);
        let node_bit = |shot: usize, j: usize| {
            let s = a.slot(j);
            let i = active.iter().position(|&p| p == s.pauli).unwrap();
            decoded[shot][s.qubit][i]
        };
        let mut checked = 0;
        for j in 0..a.num_nodes() {
            for k in j + 1..a.num_nodes() {
                if a.slot(j).qubit == a.slot(k).qubit {
                    continue;
                }
                let exact = pair_probabilities(&rho, &a, j, k).unwrap();
                let closed = pair_probabilities_closed_form(&rho, &a, j, k).unwrap();
                assert!((exact.equal - closed.equal).abs() < 1e-9);
                let freq = (0..shots).filter(|&s| node_bit(s, j) == node_bit(s, k)).count() as f64 / shots as f64;
                let sigma = (closed.equal * (1.0 - closed.equal) / shots as f64).sqrt();
                // loose enough for the number of pairs checked
                assert!((freq - closed.equal).abs() < 4.0 * sigma, "m={m} ({j},{k}): {freq} vs {}", closed.equal);
                checked += 1;
            }
        }
        assert!(checked > 0);
    }
}

#[test]
fn snapshot_average_approaches_the_reduced_state() {
    let shots = 40_000;
    let rho = DenseState::random_pure(3, &mut seeded(8));
    let basis = MagicBasis::new(3).unwrap();
    let snaps = magic_measure(Measured::Dense(&rho), 3, shots, &mut seeded(9)).unwrap();
    for q in 0..3 {
        for p in Pauli::XYZ {
            let mean: f64 = snaps
                .iter()
                .map(|s| {
                    let f = snapshot_matrix(s, &basis)[q];
                    trace(&rqrao::pauli::mat_mul(&p.matrix(), &f)).re
                })
                .sum::<f64>()
                / shots as f64;
            let exact = rho.pauli_expectation(&[(q, p)]).unwrap();
            assert!((mean - exact).abs() < 5.0 * (3.0 / shots as f64).sqrt(), "q={q} {p}: {mean} vs {exact}");
        }
    }
}

#[test]
fn single_shot_second_moment_is_bounded() {
    let rho = DenseState::random_pure(4, &mut seeded(1));
    let snaps = magic_measure(Measured::Dense(&rho), 3, 2000, &mut seeded(2)).unwrap();
    let observables: [&[(usize, Pauli)]; 3] = [
        &[(0, Pauli::X)],
        &[(1, Pauli::Y), (3, Pauli::Z)],
        &[(0, Pauli::Z), (1, Pauli::X), (2, Pauli::Y)],
    ];
    for obs in observables {
        let bound = 3f64.powi(obs.len() as i32);
        let second: f64 = snaps
            .iter()
            .map(|s| estimate_pauli(std::slice::from_ref(s), 3, obs, false).unwrap().powi(2))
            .sum::<f64>()
            / snaps.len() as f64;
        assert!(second <= bound + 1e-9, "{obs:?}: {second}");
    }
}

#[test]
fn magic_distribution_is_normalized() {
    for m in 1..=3 {
        for seed in 0..5 {
            let g = random(6, seed);
            let a = assign_paulis(&g, m, &mut seeded(seed)).unwrap();
            if m * a.num_qubits() > 12 {
                continue;
            }
            let nq = a.num_qubits();
            let rho = DenseState::random_mixed(nq, 2, &mut seeded(seed + 50));
            let d = magic_distribution(&rho, &a).unwrap();
            let total: f64 = d.probs.iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
            assert!(d.probs.iter().all(|&p| p >= -1e-15));
            // each qubit's magic states sum to 2^{m-1} I
            let expected = 2f64.powi(((m - 1) * nq) as i32);
            assert!((d.normalizer - expected).abs() < 1e-9 * expected, "m={m}: {}", d.normalizer);
        }
    }
}

#[test]
fn brute_force_is_relabelling_invariant() {
    let g = random(12, 3);
    let base = brute_force_maxcut(&g).unwrap().weight;
    let perm: Vec<usize> = (0..12).map(|i| (i * 5 + 3) % 12).collect();
    let permuted = Graph::new(12, g.edges().iter().map(|e| (perm[e.u], perm[e.v], e.w))).unwrap();
    let r = brute_force_maxcut(&permuted).unwrap();
    assert_eq!(r.weight, base);
    assert_eq!(permuted.cut_weight(&r.best).unwrap(), base);
}
