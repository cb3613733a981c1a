//! Random magic measurements and the classical-shadow estimator built on
//! them.

use crate::error::{Error, Result};
use crate::oracle::{dense_from_mps, DenseState, DENSE_LIMIT};
use crate::pauli::{self, Mat2, Pauli};
use crate::qrac::{active_paulis, check_m};
use crate::tensornet::{sample_bits, Mps};
use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Measurement bases for an (m,1) code. Basis `i` (1-based) maps outcome 0
/// to `U_i|0>` and outcome 1 to `U_i|1>`, two antipodal magic states.
#[derive(Clone, Debug, PartialEq)]
pub struct MagicBasis {
    pub m: usize,
    /// `U_i` for each basis.
    pub unitaries: Vec<Mat2>,
    /// Bits `(b_P for P in the active set)` decoded from outcome 0.
    pub plus_bits: Vec<Vec<u8>>,
}

impl MagicBasis {
    pub fn new(m: usize) -> Result<Self> {
        check_m(m)?;
        Ok(match m {
            1 => MagicBasis {
                m,
                unitaries: vec![Pauli::I.matrix()],
                plus_bits: vec![vec![0]],
            },
            2 => {
                // Y rotations taking |0> to (+-1, 0, 1)/sqrt2 on the X-Z square
                let q = std::f64::consts::FRAC_PI_8;
                MagicBasis {
                    m,
                    unitaries: vec![pauli::rotation(Pauli::Y, q), pauli::rotation(Pauli::Y, 3.0 * q)],
                    plus_bits: vec![vec![0, 0], vec![0, 1]],
                }
            }
            _ => {
                let s = std::f64::consts::FRAC_PI_8;
                let t = ((1.0 + 1.0 / 3f64.sqrt()) / 2.0).sqrt().acos();
                // U1^dagger = exp(-itX) exp(-isZ)
                let u1_dag = pauli::mat_mul(&pauli::rotation(Pauli::X, t), &pauli::rotation(Pauli::Z, s));
                let u1 = pauli::dagger(&u1_dag);
                let unitaries = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z]
                    .iter()
                    .map(|p| pauli::mat_mul(&p.matrix(), &u1))
                    .collect();
                MagicBasis {
                    m,
                    unitaries,
                    plus_bits: vec![vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]],
                }
            }
        })
    }

    pub fn num_bases(&self) -> usize {
        self.unitaries.len()
    }

    /// Decoded bits for basis `i` (1-based) and an outcome.
    pub fn decode(&self, basis: u8, outcome: u8) -> Vec<u8> {
        self.plus_bits[basis as usize - 1]
            .iter()
            .map(|b| b ^ outcome)
            .collect()
    }

    /// Bloch vector of the post-measurement magic state.
    pub fn bloch(&self, basis: u8, outcome: u8) -> [f64; 3] {
        let amp = 1.0 / (self.m as f64).sqrt();
        let mut r = [0.0; 3];
        for (p, b) in active_paulis(self.m).iter().zip(self.decode(basis, outcome)) {
            r[p.axis().unwrap()] = if b == 0 { amp } else { -amp };
        }
        r
    }
}

/// One random magic measurement of every qubit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShadowSnapshot {
    /// Basis index per qubit, 1-based.
    pub bases: Vec<u8>,
    pub outcomes: Vec<u8>,
}

impl ShadowSnapshot {
    pub fn num_qubits(&self) -> usize {
        self.bases.len()
    }

    /// Per-qubit decoded bits, ordered as the active Pauli set.
    pub fn decoded(&self, basis: &MagicBasis) -> Vec<Vec<u8>> {
        self.bases
            .iter()
            .zip(&self.outcomes)
            .map(|(&b, &o)| basis.decode(b, o))
            .collect()
    }
}

/// State to be measured.
pub enum Measured<'a> {
    Dense(&'a DenseState),
    Mps(&'a Mps),
}

fn sample_dense<R: Rng + ?Sized>(amps: &[C64], rotations: &[Mat2], rng: &mut R) -> Vec<u8> {
    let mut v = amps.to_vec();
    for (q, u) in rotations.iter().enumerate() {
        let bit = 1usize << q;
        for x in 0..v.len() {
            if x & bit == 0 {
                let (a0, a1) = (v[x], v[x | bit]);
                v[x] = u[0][0] * a0 + u[0][1] * a1;
                v[x | bit] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
    }
    let total: f64 = v.iter().map(|a| a.norm_sqr()).sum();
    let mut target = rng.random::<f64>() * total;
    let mut idx = v.len() - 1;
    for (x, a) in v.iter().enumerate() {
        target -= a.norm_sqr();
        if target < 0.0 {
            idx = x;
            break;
        }
    }
    (0..rotations.len()).map(|q| ((idx >> q) & 1) as u8).collect()
}

/// Draws `shots` snapshots. Bases are uniform per qubit; outcomes follow the
/// Born rule after rotating each qubit by `U_i^dagger`.
pub fn magic_measure<R: Rng + ?Sized>(state: Measured<'_>, m: usize, shots: usize, rng: &mut R) -> Result<Vec<ShadowSnapshot>> {
    let basis = MagicBasis::new(m)?;
    let dense_holder;
    let (amps, mps) = match state {
        Measured::Dense(DenseState::Pure { amps, .. }) => (Some(amps.as_slice()), None),
        Measured::Dense(DenseState::Mixed { .. }) => {
            return Err(Error::InvalidParameter("sampling needs a pure state".into()))
        }
        Measured::Mps(psi) if psi.num_qubits() <= DENSE_LIMIT => {
            dense_holder = dense_from_mps(psi)?;
            match &dense_holder {
                DenseState::Pure { amps, .. } => (Some(amps.as_slice()), None),
                DenseState::Mixed { .. } => unreachable!(),
            }
        }
        Measured::Mps(psi) => (None, Some(psi)),
    };
    let n = match (amps, mps) {
        (Some(a), _) => a.len().trailing_zeros() as usize,
        (None, Some(p)) => p.num_qubits(),
        _ => unreachable!(),
    };
    if let Some(a) = amps {
        let norm: f64 = a.iter().map(|x| x.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            log::warn!("measuring an unnormalized state (norm^2 = {norm}); renormalizing");
        }
    }
    let daggers: Vec<Mat2> = basis.unitaries.iter().map(pauli::dagger).collect();
    let nb = basis.num_bases();
    let mut out = Vec::with_capacity(shots);
    for _ in 0..shots {
        let bases: Vec<u8> = (0..n).map(|_| rng.random_range(0..nb) as u8 + 1).collect();
        let rot: Vec<Mat2> = bases.iter().map(|&b| daggers[b as usize - 1]).collect();
        let outcomes = match (amps, mps) {
            (Some(a), _) => sample_dense(a, &rot, rng),
            (None, Some(p)) => sample_bits(p, &rot, rng),
            _ => unreachable!(),
        };
        out.push(ShadowSnapshot { bases, outcomes });
    }
    Ok(out)
}

/// Single-qubit factors `(I + m r.sigma)/2` of the snapshot estimator; for
/// m=3 this is `3 U^dagger|b><b|U - I`.
pub fn snapshot_matrix(s: &ShadowSnapshot, basis: &MagicBasis) -> Vec<Mat2> {
    let mf = basis.m as f64;
    s.bases
        .iter()
        .zip(&s.outcomes)
        .map(|(&b, &o)| {
            let r = basis.bloch(b, o).map(|x| x * mf);
            pauli::from_bloch(r)
        })
        .collect()
}

/// Mean of `m^{k/2} (-1)^{sum of decoded bits}` over the snapshots, for a
/// Pauli string over the active set with distinct qubits. With `clamp` the
/// mean is truncated to `[-1, 1]`.
pub fn estimate_pauli(snapshots: &[ShadowSnapshot], m: usize, observable: &[(usize, Pauli)], clamp: bool) -> Result<f64> {
    let basis = MagicBasis::new(m)?;
    if snapshots.is_empty() {
        return Err(Error::InvalidParameter("no snapshots".into()));
    }
    let active = active_paulis(m);
    let nq = snapshots[0].num_qubits();
    let mut idx = Vec::with_capacity(observable.len());
    for &(q, p) in observable {
        if q >= nq {
            return Err(Error::Contract(format!("observable on qubit {q} >= {nq}")));
        }
        let i = active
            .iter()
            .position(|&a| a == p)
            .ok_or_else(|| Error::Contract(format!("{p} not in the m={m} active set")))?;
        idx.push((q, i));
    }
    let scale = (m as f64).powf(observable.len() as f64 / 2.0);
    let sum: f64 = snapshots
        .iter()
        .map(|s| {
            let parity = idx.iter().fold(0u8, |acc, &(q, i)| {
                acc ^ basis.plus_bits[s.bases[q] as usize - 1][i] ^ s.outcomes[q]
            });
            if parity == 0 {
                scale
            } else {
                -scale
            }
        })
        .sum();
    let mean = sum / snapshots.len() as f64;
    Ok(if clamp { mean.clamp(-1.0, 1.0) } else { mean })
}

/// CSV rows `shot,qubit,basis,outcome`.
pub fn to_csv(snapshots: &[ShadowSnapshot]) -> String {
    let mut out = String::from("shot,qubit,basis,outcome\n");
    for (k, s) in snapshots.iter().enumerate() {
        for (q, (b, o)) in s.bases.iter().zip(&s.outcomes).enumerate() {
            writeln!(out, "{k},{q},{b},{o}").unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use std::collections::HashSet;

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        (0..2).all(|i| (0..2).all(|j| (a[i][j] - b[i][j]).norm() < tol))
    }

    #[test]
    fn bases_are_unitary_and_hit_magic_states() {
        for m in 1..=3 {
            let basis = MagicBasis::new(m).unwrap();
            for (i, u) in basis.unitaries.iter().enumerate() {
                let uu = pauli::mat_mul(&pauli::dagger(u), u);
                assert!(close(&uu, &Pauli::I.matrix(), 1e-12));
                for o in 0..2u8 {
                    // U|o><o|U^dagger
                    let mut proj = [[C64::new(0.0, 0.0); 2]; 2];
                    proj[o as usize][o as usize] = C64::new(1.0, 0.0);
                    let rho = pauli::mat_mul(&pauli::mat_mul(u, &proj), &pauli::dagger(u));
                    let expect = pauli::from_bloch(basis.bloch(i as u8 + 1, o));
                    assert!(close(&rho, &expect, 1e-12), "m={m} basis {} outcome {o}", i + 1);
                }
            }
        }
    }

    #[test]
    fn table_decode_is_bijective() {
        let basis = MagicBasis::new(3).unwrap();
        assert_eq!(basis.decode(2, 0), vec![0, 1, 1]);
        let all: HashSet<Vec<u8>> = (1..=4)
            .flat_map(|i| (0..2).map(move |o| (i, o)))
            .map(|(i, o)| basis.decode(i, o))
            .collect();
        assert_eq!(all.len(), 8);
    }

    #[test]
    fn eigenstate_gives_deterministic_outcome() {
        let basis = MagicBasis::new(3).unwrap();
        let u1 = basis.unitaries[0];
        let v = vec![u1[0][0], u1[1][0]];
        let state = DenseState::pure(v).unwrap();
        let shots = magic_measure(Measured::Dense(&state), 3, 500, &mut seeded(2)).unwrap();
        for s in shots.iter().filter(|s| s.bases[0] == 1) {
            assert_eq!(s.outcomes[0], 0);
        }
    }

    #[test]
    fn snapshot_factors_have_unit_trace() {
        let basis = MagicBasis::new(3).unwrap();
        let s = ShadowSnapshot {
            bases: vec![1, 3],
            outcomes: vec![0, 1],
        };
        let f = snapshot_matrix(&s, &basis);
        for m in &f {
            assert!((pauli::trace(m) - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
        // 3 mu_1^+ - I
        let mu = pauli::from_bloch(basis.bloch(1, 0));
        let expect = pauli::add(&pauli::scale(&mu, C64::new(3.0, 0.0)), &pauli::scale(&Pauli::I.matrix(), C64::new(-1.0, 0.0)));
        assert!(close(&f[0], &expect, 1e-12));
    }

    #[test]
    fn z_on_zero_state() {
        let state = DenseState::pure(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        let n = 10_000;
        let shots = magic_measure(Measured::Dense(&state), 3, n, &mut seeded(5)).unwrap();
        let est = estimate_pauli(&shots, 3, &[(0, Pauli::Z)], false).unwrap();
        assert!((est - 1.0).abs() < 3.0 * (3.0 / n as f64).sqrt());
        let two = ShadowSnapshot {
            bases: vec![1, 2],
            outcomes: vec![0, 1],
        };
        let v = estimate_pauli(&[two], 3, &[(0, Pauli::X), (1, Pauli::Z)], false).unwrap();
        assert_eq!(v.abs(), 3.0);
    }

    #[test]
    fn mps_sampling_matches_dense_statistics() {
        let psi = crate::tensornet::init_mps(3, 2, &mut seeded(11)).unwrap();
        let dense = dense_from_mps(&psi).unwrap();
        let exact = dense.pauli_expectation(&[(0, Pauli::Z), (2, Pauli::X)]).unwrap();
        let basis = MagicBasis::new(3).unwrap();
        let daggers: Vec<Mat2> = basis.unitaries.iter().map(pauli::dagger).collect();
        let mut rng = seeded(12);
        let n = 20_000;
        let shots: Vec<ShadowSnapshot> = (0..n)
            .map(|_| {
                let bases: Vec<u8> = (0..3).map(|_| rng.random_range(1..=4)).collect();
                let rot: Vec<Mat2> = bases.iter().map(|&b| daggers[b as usize - 1]).collect();
                let outcomes = sample_bits(&psi, &rot, &mut rng);
                ShadowSnapshot { bases, outcomes }
            })
            .collect();
        let est = estimate_pauli(&shots, 3, &[(0, Pauli::Z), (2, Pauli::X)], false).unwrap();
        assert!((est - exact).abs() < 4.0 * (9.0 / n as f64).sqrt(), "{est} vs {exact}");
    }

    #[test]
    fn csv_layout() {
        let s = ShadowSnapshot {
            bases: vec![4],
            outcomes: vec![1],
        };
        assert_eq!(to_csv(&[s]), "shot,qubit,basis,outcome\n0,0,4,1\n");
    }
}
