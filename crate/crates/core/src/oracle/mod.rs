//! Exact ground truth: dense states, exhaustive magic-measurement
//! distributions, brute-force MAX-CUT and a Lanczos eigensolver.

mod dense;
mod lanczos;
pub mod suite;

pub use dense::{
    apply_hamiltonian, apply_pauli, dense_from_mps, hamiltonian_matrix, inner, product_vector, DenseState, DENSE_LIMIT,
};
pub use lanczos::{lanczos_top, Eigenpair};

use crate::error::{Error, Result};
use crate::graph::{BitString, Graph};
use crate::pauli::{self, Mat2, Pauli};
use crate::qrac::{active_paulis, build_terms, PauliAssignment};
use dense::contract_low_qubit;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest `m * num_qubits` (or node count) enumerated exhaustively.
pub const ENUMERATION_LIMIT: usize = 20;
/// Largest graph solved by [`brute_force_maxcut`].
pub const BRUTE_FORCE_LIMIT: usize = 26;

/// Sums `tr((M_0 (x) ... ) rho)` into `table[index]` for every choice of one
/// `(index contribution, operator)` option per qubit.
fn enumerate_products(rho: &[C64], d: usize, options: &[Vec<(usize, Mat2)>], table: &mut [f64]) {
    fn rec(rho: &[C64], d: usize, options: &[Vec<(usize, Mat2)>], acc: usize, table: &mut [f64]) {
        match options.split_first() {
            None => table[acc] += rho[0].re,
            Some((here, rest)) => {
                for (contrib, m) in here {
                    let next = contract_low_qubit(rho, d, m);
                    rec(&next, d / 2, rest, acc | contrib, table);
                }
            }
        }
    }
    rec(rho, d, options, 0, table);
}

fn check_state(rho: &DenseState, a: &PauliAssignment) -> Result<()> {
    if rho.num_qubits() != a.num_qubits() {
        return Err(Error::Dimension {
            expected: a.num_qubits(),
            got: rho.num_qubits(),
        });
    }
    Ok(())
}

/// Probabilities of all `2^{m n}` magic-state embeddings, proportional to
/// the fidelity `tr(mu(b) rho)`. Bit `q * m + i` carries the `i`-th active
/// Pauli of qubit `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct MagicDistribution {
    pub m: usize,
    pub num_qubits: usize,
    pub probs: Vec<f64>,
    /// `sum_b tr(mu(b) rho)`.
    pub normalizer: f64,
}

impl MagicDistribution {
    /// Bit of slot `(qubit, pauli)` in table index `b`.
    pub fn slot_bit(&self, b: usize, qubit: usize, pauli: Pauli) -> Result<u8> {
        let i = active_paulis(self.m)
            .iter()
            .position(|&p| p == pauli)
            .ok_or_else(|| Error::Contract(format!("{pauli} not active for m={}", self.m)))?;
        Ok(((b >> (qubit * self.m + i)) & 1) as u8)
    }

    /// Node labelling encoded by table index `b`.
    pub fn node_bits(&self, a: &PauliAssignment, b: usize) -> BitString {
        let active = active_paulis(self.m);
        BitString::from_bits(
            a.slots()
                .iter()
                .map(|s| {
                    let i = active.iter().position(|&p| p == s.pauli).unwrap();
                    ((b >> (s.qubit * self.m + i)) & 1) as u8
                })
                .collect(),
        )
    }
}

/// `|<phi_b|psi>|^2` for every product of magic states, indexed like
/// `MagicDistribution::probs`. Works on the state vector, so it avoids the
/// `4^n` density matrix.
fn pure_magic_fidelities(amps: &[C64], nq: usize, m: usize) -> Vec<f64> {
    let active = active_paulis(m);
    let amp = 1.0 / (m as f64).sqrt();
    let bras: Vec<[C64; 2]> = (0..1usize << m)
        .map(|c| {
            let mut r = [0.0; 3];
            for (i, p) in active.iter().enumerate() {
                r[p.axis().unwrap()] = if (c >> i) & 1 == 0 { amp } else { -amp };
            }
            pauli::state_from_bloch(r).map(|z| z.conj())
        })
        .collect();
    let mut cur = amps.to_vec();
    for q in 0..nq {
        let shift = q * m;
        let low_mask = (1usize << shift) - 1;
        let mut next = vec![C64::new(0.0, 0.0); cur.len() << (m - 1)];
        for (idx, &v) in cur.iter().enumerate() {
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            let low = idx & low_mask;
            let s = (idx >> shift) & 1;
            let high = (idx >> (shift + 1)) << (shift + m);
            for (c, bra) in bras.iter().enumerate() {
                next[low | (c << shift) | high] += bra[s] * v;
            }
        }
        cur = next;
    }
    cur.into_iter().map(|z| z.norm_sqr()).collect()
}

pub fn magic_distribution(rho: &DenseState, a: &PauliAssignment) -> Result<MagicDistribution> {
    check_state(rho, a)?;
    let (m, nq) = (a.m(), a.num_qubits());
    if m * nq > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            size: m * nq,
            limit: ENUMERATION_LIMIT,
        });
    }
    if let DenseState::Pure { amps, .. } = rho {
        let f = pure_magic_fidelities(amps, nq, m);
        let normalizer: f64 = f.iter().sum();
        return Ok(MagicDistribution {
            m,
            num_qubits: nq,
            probs: f.into_iter().map(|v| v / normalizer).collect(),
            normalizer,
        });
    }
    let active = active_paulis(m);
    let amp = 1.0 / (m as f64).sqrt();
    let options: Vec<Vec<(usize, Mat2)>> = (0..nq)
        .map(|q| {
            (0..1usize << m)
                .map(|c| {
                    let mut r = [0.0; 3];
                    for (i, p) in active.iter().enumerate() {
                        r[p.axis().unwrap()] = if (c >> i) & 1 == 0 { amp } else { -amp };
                    }
                    (c << (q * m), pauli::from_bloch(r))
                })
                .collect()
        })
        .collect();
    let mut f = vec![0.0; 1 << (m * nq)];
    enumerate_products(&rho.density_matrix(), 1 << nq, &options, &mut f);
    let normalizer: f64 = f.iter().sum();
    Ok(MagicDistribution {
        m,
        num_qubits: nq,
        probs: f.into_iter().map(|v| v / normalizer).collect(),
        normalizer,
    })
}

/// Marginal distribution of the node bits only, indexed by `sum_j b_j 2^j`.
/// Free slots are summed out analytically, so only `2^{|V|}` entries are
/// enumerated.
pub fn node_distribution(rho: &DenseState, a: &PauliAssignment) -> Result<Vec<f64>> {
    check_state(rho, a)?;
    let n = a.num_nodes();
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            size: n,
            limit: ENUMERATION_LIMIT,
        });
    }
    let m = a.m();
    if let DenseState::Pure { amps, .. } = rho {
        if m * a.num_qubits() <= ENUMERATION_LIMIT {
            let active = active_paulis(m);
            let slots: Vec<usize> = a
                .slots()
                .iter()
                .map(|s| s.qubit * m + active.iter().position(|&p| p == s.pauli).unwrap())
                .collect();
            let mut f = vec![0.0; 1 << n];
            for (idx, p) in pure_magic_fidelities(amps, a.num_qubits(), m).into_iter().enumerate() {
                let b = slots.iter().enumerate().fold(0, |acc, (j, &bit)| acc | (((idx >> bit) & 1) << j));
                f[b] += p;
            }
            let total: f64 = f.iter().sum();
            return Ok(f.into_iter().map(|v| v / total).collect());
        }
    }
    let amp = 1.0 / (m as f64).sqrt();
    let options: Vec<Vec<(usize, Mat2)>> = a
        .hosts()
        .iter()
        .map(|hosted| {
            let free = (m - hosted.len()) as i32;
            (0..1usize << hosted.len())
                .map(|c| {
                    let mut r = [0.0; 3];
                    let mut contrib = 0;
                    for (i, &j) in hosted.iter().enumerate() {
                        let bit = (c >> i) & 1;
                        contrib |= bit << j;
                        r[a.slot(j).pauli.axis().unwrap()] = if bit == 0 { amp } else { -amp };
                    }
                    let op = pauli::scale(&pauli::from_bloch(r), C64::new(2f64.powi(free), 0.0));
                    (contrib, op)
                })
                .collect()
        })
        .collect();
    let mut f = vec![0.0; 1 << n];
    enumerate_products(&rho.density_matrix(), 1 << a.num_qubits(), &options, &mut f);
    let total: f64 = f.iter().sum();
    Ok(f.into_iter().map(|v| v / total).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

impl Gap {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Gap {
            lhs,
            rhs,
            gap: (lhs - rhs).abs(),
        }
    }
}

/// `tr(P rho)` against `m^{k/2} E_b[(-1)^{sum of the observable's bits}]` for
/// a Pauli string with one active Pauli per distinct qubit.
pub fn verify_theorem2(rho: &DenseState, a: &PauliAssignment, observable: &[(usize, Pauli)]) -> Result<Gap> {
    let mut qubits: Vec<usize> = observable.iter().map(|&(q, _)| q).collect();
    qubits.sort_unstable();
    if qubits.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Contract("observable qubits must be distinct".into()));
    }
    let dist = magic_distribution(rho, a)?;
    let lhs = rho.pauli_expectation(observable)?;
    let mut e = 0.0;
    for (b, &p) in dist.probs.iter().enumerate() {
        let mut parity = 0;
        for &(q, pl) in observable {
            parity ^= dist.slot_bit(b, q, pl)?;
        }
        e += if parity == 0 { p } else { -p };
    }
    let rhs = (a.m() as f64).powf(observable.len() as f64 / 2.0) * e;
    Ok(Gap::new(lhs, rhs))
}

fn cut_moments(rho: &DenseState, g: &Graph, a: &PauliAssignment) -> Result<(f64, f64)> {
    a.validate(g)?;
    let dist = node_distribution(rho, a)?;
    let mut first = 0.0;
    let mut second = 0.0;
    for (b, &p) in dist.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let cw: f64 = g
            .edges()
            .iter()
            .filter(|e| ((b >> e.u) ^ (b >> e.v)) & 1 == 1)
            .map(|e| e.w)
            .sum();
        first += p * cw;
        second += p * cw * cw;
    }
    Ok((first, second))
}

/// `E_b[CW(b)]` over the magic-measurement distribution, by enumeration.
pub fn expected_cut(rho: &DenseState, g: &Graph, a: &PauliAssignment) -> Result<f64> {
    Ok(cut_moments(rho, g, a)?.0)
}

/// `Var_b[CW(b)]` over the magic-measurement distribution, by enumeration.
pub fn cut_variance(rho: &DenseState, g: &Graph, a: &PauliAssignment) -> Result<f64> {
    let (e1, e2) = cut_moments(rho, g, a)?;
    Ok(e2 - e1 * e1)
}

fn qrac_moments(rho: &DenseState, g: &Graph, a: &PauliAssignment) -> Result<(f64, f64)> {
    let h = build_terms(g, a)?;
    rho.hamiltonian_moments(h.constant, &h.pauli_terms())
}

/// `(tr(H_m rho) + (m^2 - 1)/2 * sum w) / m^2`.
pub fn expected_cut_closed_form(rho: &DenseState, g: &Graph, a: &PauliAssignment) -> Result<f64> {
    let (h1, _) = qrac_moments(rho, g, a)?;
    let m2 = (a.m() * a.m()) as f64;
    Ok((h1 + 0.5 * (m2 - 1.0) * g.total_weight()) / m2)
}

/// `(tr(H_m^2 rho) - tr(H_m rho)^2) / m^4`.
pub fn cut_variance_closed_form(rho: &DenseState, g: &Graph, a: &PauliAssignment) -> Result<f64> {
    let (h1, h2) = qrac_moments(rho, g, a)?;
    Ok((h2 - h1 * h1) / (a.m() as f64).powi(4))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairProbabilities {
    /// `P(b_j = 0)`
    pub first_zero: f64,
    /// `P(b_j = b_k)`
    pub equal: f64,
}

/// Node-bit probabilities by enumeration.
pub fn pair_probabilities(rho: &DenseState, a: &PauliAssignment, j: usize, k: usize) -> Result<PairProbabilities> {
    if j >= a.num_nodes() || k >= a.num_nodes() || j == k {
        return Err(Error::Contract(format!("bad node pair ({j}, {k})")));
    }
    let dist = node_distribution(rho, a)?;
    let mut out = PairProbabilities {
        first_zero: 0.0,
        equal: 0.0,
    };
    for (b, &p) in dist.iter().enumerate() {
        if (b >> j) & 1 == 0 {
            out.first_zero += p;
        }
        if ((b >> j) ^ (b >> k)) & 1 == 0 {
            out.equal += p;
        }
    }
    Ok(out)
}

/// `P(b_j = 0) = 1/2 + E_j / (2 sqrt m)` and `P(b_j = b_k) = 1/2 + x / (2m)`
/// with `x = E_j E_k` on a shared qubit and `x = E_jk` otherwise.
pub fn pair_probabilities_closed_form(rho: &DenseState, a: &PauliAssignment, j: usize, k: usize) -> Result<PairProbabilities> {
    let (sj, sk) = (a.slot(j), a.slot(k));
    let m = a.m() as f64;
    let ej = rho.pauli_expectation(&[(sj.qubit, sj.pauli)])?;
    let x = if sj.qubit == sk.qubit {
        ej * rho.pauli_expectation(&[(sk.qubit, sk.pauli)])?
    } else {
        rho.pauli_expectation(&[(sj.qubit, sj.pauli), (sk.qubit, sk.pauli)])?
    };
    Ok(PairProbabilities {
        first_zero: 0.5 + ej / (2.0 * m.sqrt()),
        equal: 0.5 + x / (2.0 * m),
    })
}

/// Exact MAX-CUT optima with node 0 fixed to 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BruteForce {
    pub weight: f64,
    pub best: BitString,
    /// Every maximizer with node 0 on side 0 (at most `MAX_LISTED`).
    pub maximizers: Vec<BitString>,
}

const MAX_LISTED: usize = 1024;

/// Exhaustive search over `2^{n-1}` labellings in Gray-code order, split into
/// parallel blocks.
pub fn brute_force_maxcut(g: &Graph) -> Result<BruteForce> {
    let n = g.num_nodes();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            size: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if n <= 1 {
        let best = BitString::zeros(n);
        return Ok(BruteForce {
            weight: 0.0,
            best: best.clone(),
            maximizers: vec![best],
        });
    }
    let adj = g.adjacency();
    let free = n - 1; // nodes 1..n
    let block_bits = free.saturating_sub(12).min(8);
    let low_bits = free - block_bits;
    let scale = g.edges().iter().map(|e| e.w.abs()).sum::<f64>().max(1.0);
    let tol = 1e-9 * scale;

    let blocks: Vec<(f64, Vec<u64>)> = (0..1u64 << block_bits)
        .into_par_iter()
        .map(|blk| {
            // node v (>= 1) is bit v-1 of the packed word
            let mut word: u64 = blk << low_bits;
            let bit = |w: u64, v: usize| if v == 0 { 0 } else { (w >> (v - 1)) & 1 };
            let mut cut: f64 = g
                .edges()
                .iter()
                .filter(|e| bit(word, e.u) != bit(word, e.v))
                .map(|e| e.w)
                .sum();
            let mut best = cut;
            let mut found = vec![word];
            for step in 1..(1u64 << low_bits) {
                let v = step.trailing_zeros() as usize + 1;
                let bv = bit(word, v);
                for &(u, w) in &adj[v] {
                    cut += if bit(word, u) == bv { w } else { -w };
                }
                word ^= 1 << (v - 1);
                if cut > best + tol {
                    best = cut;
                    found.clear();
                    found.push(word);
                } else if (cut - best).abs() <= tol && found.len() < MAX_LISTED {
                    found.push(word);
                }
            }
            (best, found)
        })
        .collect();

    let top = blocks.iter().map(|b| b.0).fold(f64::NEG_INFINITY, f64::max);
    let mut words: Vec<u64> = blocks
        .into_iter()
        .filter(|b| b.0 >= top - tol)
        .flat_map(|b| b.1)
        .collect();
    let to_bits = |w: u64| {
        let mut bits = vec![0u8; n];
        for (v, b) in bits.iter_mut().enumerate().skip(1) {
            *b = ((w >> (v - 1)) & 1) as u8;
        }
        BitString::from_bits(bits)
    };
    // recompute exactly and keep the true optima
    let mut scored: Vec<(f64, u64)> = words
        .drain(..)
        .map(|w| (g.cut_weight(&to_bits(w)).unwrap(), w))
        .collect();
    let weight = scored.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    scored.retain(|s| s.0 >= weight - tol);
    scored.sort_by_key(|s| s.1);
    scored.truncate(MAX_LISTED);
    let maximizers: Vec<BitString> = scored.iter().map(|s| to_bits(s.1)).collect();
    Ok(BruteForce {
        weight,
        best: maximizers[0].clone(),
        maximizers,
    })
}

/// Level-1 QAOA state `e^{i beta B} e^{i gamma C}|+>^n` with
/// `C = sum w Z_u Z_v` and `B = sum X_q`, by direct simulation.
pub fn qaoa1_statevector(g: &Graph, beta: f64, gamma: f64) -> Result<Vec<C64>> {
    let n = g.num_nodes();
    if n > DENSE_LIMIT {
        return Err(Error::TooLarge {
            size: n,
            limit: DENSE_LIMIT,
        });
    }
    let amp = (1usize << n) as f64;
    let mut v: Vec<C64> = (0..1usize << n)
        .map(|x| {
            let c: f64 = g
                .edges()
                .iter()
                .map(|e| if ((x >> e.u) ^ (x >> e.v)) & 1 == 0 { e.w } else { -e.w })
                .sum();
            C64::from_polar(1.0 / amp.sqrt(), gamma * c)
        })
        .collect();
    let u = pauli::rotation(Pauli::X, -beta);
    for q in 0..n {
        let bit = 1usize << q;
        for x in 0..v.len() {
            if x & bit == 0 {
                let (a0, a1) = (v[x], v[x | bit]);
                v[x] = u[0][0] * a0 + u[0][1] * a1;
                v[x | bit] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qrac::{assign_paulis, MagicState, Slot};
    use crate::rng::seeded;

    #[test]
    fn brute_force_small_graphs() {
        let tri = Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let r = brute_force_maxcut(&tri).unwrap();
        assert_eq!(r.weight, 2.0);
        assert_eq!(r.maximizers.len(), 3);
        let cycle = Graph::new(6, (0..6).map(|i| (i, (i + 1) % 6, 1.0))).unwrap();
        let r = brute_force_maxcut(&cycle).unwrap();
        assert_eq!(r.weight, 6.0);
        assert_eq!(r.maximizers, vec!["010101".parse().unwrap()]);
    }

    #[test]
    fn brute_force_parallel_blocks_match_naive() {
        let g = crate::graph::generate(&crate::graph::GeneratorSpec::Random {
            n: 16,
            density: 0.4,
            weights: crate::graph::WeightDist::Pm1,
            seed: 4,
        })
        .unwrap();
        let r = brute_force_maxcut(&g).unwrap();
        let naive = (0..1u64 << 15)
            .map(|x| g.cut_weight(&BitString::from_index(x << 1, 16)).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(r.weight, naive);
        assert!(r.maximizers.iter().all(|b| g.cut_weight(b).unwrap() == naive));
    }

    #[test]
    fn m1_point_mass() {
        let a = PauliAssignment::new(
            1,
            2,
            vec![
                Slot { qubit: 0, pauli: Pauli::Z },
                Slot { qubit: 1, pauli: Pauli::Z },
            ],
        )
        .unwrap();
        // |b'> = |q0=1, q1=0>
        let mut amps = vec![C64::new(0.0, 0.0); 4];
        amps[1] = C64::new(1.0, 0.0);
        let rho = DenseState::pure(amps).unwrap();
        let d = magic_distribution(&rho, &a).unwrap();
        assert!((d.probs[1] - 1.0).abs() < 1e-12);
        let nd = node_distribution(&rho, &a).unwrap();
        assert!((nd[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_is_uniform() {
        for m in 1..=3 {
            let g = Graph::new(4, []).unwrap();
            let a = assign_paulis(&g, m, &mut seeded(m as u64)).unwrap();
            let rho = DenseState::maximally_mixed(a.num_qubits());
            let d = magic_distribution(&rho, &a).unwrap();
            let u = 1.0 / d.probs.len() as f64;
            assert!(d.probs.iter().all(|p| (p - u).abs() < 1e-12));
        }
    }

    #[test]
    fn magic_state_is_most_likely() {
        let a = PauliAssignment::new(
            3,
            1,
            vec![
                Slot { qubit: 0, pauli: Pauli::X },
                Slot { qubit: 0, pauli: Pauli::Y },
                Slot { qubit: 0, pauli: Pauli::Z },
            ],
        )
        .unwrap();
        let b0: BitString = "101".parse().unwrap();
        let ms = MagicState::encode(&a, &b0).unwrap();
        let rho = DenseState::pure(ms.vector(0).to_vec()).unwrap();
        let d = magic_distribution(&rho, &a).unwrap();
        let argmax = (0..8).max_by(|&x, &y| d.probs[x].total_cmp(&d.probs[y])).unwrap();
        assert_eq!(d.node_bits(&a, argmax), b0);
    }

    #[test]
    fn node_distribution_is_marginal() {
        let g = Graph::new(5, [(0, 1, 1.0), (1, 2, -1.0), (3, 4, 2.0)]).unwrap();
        for m in 1..=3 {
            let a = assign_paulis(&g, m, &mut seeded(10 + m as u64)).unwrap();
            if a.num_qubits() * m > 12 {
                continue;
            }
            let rho = DenseState::random_mixed(a.num_qubits(), 2, &mut seeded(m as u64));
            let full = magic_distribution(&rho, &a).unwrap();
            let mut marg = vec![0.0; 1 << 5];
            for (b, p) in full.probs.iter().enumerate() {
                let bits = full.node_bits(&a, b);
                let idx: usize = (0..5).map(|j| (bits.get(j) as usize) << j).sum();
                marg[idx] += p;
            }
            let nd = node_distribution(&rho, &a).unwrap();
            for (x, y) in marg.iter().zip(&nd) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pure_path_matches_density_path() {
        let g = Graph::new(6, [(0, 1, 1.0), (1, 2, -1.0), (2, 3, 1.0), (4, 5, 2.0)]).unwrap();
        for m in 1..=3 {
            let a = assign_paulis(&g, m, &mut seeded(m as u64)).unwrap();
            let pure = DenseState::random_pure(a.num_qubits(), &mut seeded(40 + m as u64));
            let mixed = DenseState::mixed(a.num_qubits(), pure.density_matrix()).unwrap();
            let (x, y) = (magic_distribution(&pure, &a).unwrap(), magic_distribution(&mixed, &a).unwrap());
            assert!((x.normalizer - y.normalizer).abs() < 1e-12);
            for (p, q) in x.probs.iter().zip(&y.probs) {
                assert!((p - q).abs() < 1e-12);
            }
            let (x, y) = (node_distribution(&pure, &a).unwrap(), node_distribution(&mixed, &a).unwrap());
            for (p, q) in x.iter().zip(&y) {
                assert!((p - q).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn qaoa_simulation_matches_closed_form() {
        let g = crate::graph::generate(&crate::graph::GeneratorSpec::Random {
            n: 8,
            density: 0.5,
            weights: crate::graph::WeightDist::Pm1,
            seed: 2,
        })
        .unwrap();
        let (beta, gamma) = (0.37, 1.21);
        let v = qaoa1_statevector(&g, beta, gamma).unwrap();
        let closed = crate::solver::qaoa1_edge_energies(&g, beta, gamma);
        for (e, z) in g.edges().iter().zip(closed) {
            let exact: f64 = v
                .iter()
                .enumerate()
                .map(|(x, a)| if ((x >> e.u) ^ (x >> e.v)) & 1 == 0 { a.norm_sqr() } else { -a.norm_sqr() })
                .sum();
            assert!((exact - z).abs() < 1e-10, "{exact} vs {z}");
        }
    }

    #[test]
    fn enumeration_limit() {
        let g = Graph::new(8, []).unwrap();
        let a = assign_paulis(&g, 1, &mut seeded(0)).unwrap();
        let rho = DenseState::maximally_mixed(8);
        assert!(magic_distribution(&rho, &a).is_ok());
        let g = Graph::new(21, []).unwrap();
        let a = assign_paulis(&g, 3, &mut seeded(0)).unwrap();
        let rho = DenseState::maximally_mixed(a.num_qubits());
        assert!(matches!(magic_distribution(&rho, &a), Err(Error::TooLarge { .. })));
    }
}
