//! Dense state vectors and density matrices with Pauli-string algebra.

use crate::error::{Error, Result};
use crate::pauli::{Mat2, Pauli, PauliTerm};
use crate::tensornet::Mps;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

pub const DENSE_LIMIT: usize = 20;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Bit masks of a Pauli string: flipped bits, sign bits and the number of Ys.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Masks {
    flip: usize,
    sign: usize,
    ys: u32,
}

impl Masks {
    pub(crate) fn of(ops: &[(usize, Pauli)]) -> Self {
        let mut m = Masks { flip: 0, sign: 0, ys: 0 };
        for &(q, p) in ops {
            match p {
                Pauli::I => {}
                Pauli::X => m.flip |= 1 << q,
                Pauli::Y => {
                    m.flip |= 1 << q;
                    m.sign |= 1 << q;
                    m.ys += 1;
                }
                Pauli::Z => m.sign |= 1 << q,
            }
        }
        m
    }

    /// `P|x> = phase(x) |x ^ flip>`.
    #[inline]
    pub(crate) fn phase(&self, x: usize) -> C64 {
        let base = match self.ys % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
        if (x & self.sign).count_ones() % 2 == 1 {
            -base
        } else {
            base
        }
    }
}

fn check_ops(ops: &[(usize, Pauli)], n: usize) -> Result<()> {
    match ops.iter().find(|&&(q, _)| q >= n) {
        Some(&(q, _)) => Err(Error::Contract(format!("Pauli on qubit {q} >= {n}"))),
        None => Ok(()),
    }
}

/// `P v` for a Pauli string (qubit `q` is bit `q` of the index).
pub fn apply_pauli(v: &[C64], ops: &[(usize, Pauli)]) -> Vec<C64> {
    let m = Masks::of(ops);
    let mut out = vec![ZERO; v.len()];
    for (x, a) in v.iter().enumerate() {
        out[x ^ m.flip] = m.phase(x) * a;
    }
    out
}

/// `(constant + sum_k C_k P_k) v`.
pub fn apply_hamiltonian(v: &[C64], constant: f64, terms: &[PauliTerm]) -> Vec<C64> {
    let mut out: Vec<C64> = v.iter().map(|a| a * constant).collect();
    for t in terms {
        let m = Masks::of(&t.ops);
        for (x, a) in v.iter().enumerate() {
            out[x ^ m.flip] += m.phase(x) * a * t.coeff;
        }
    }
    out
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Kronecker product of single-qubit vectors, qubit 0 least significant.
pub fn product_vector(local: &[[C64; 2]]) -> Vec<C64> {
    let mut v = vec![C64::new(1.0, 0.0)];
    for (q, l) in local.iter().enumerate() {
        let mut next = vec![ZERO; v.len() * 2];
        for (x, a) in v.iter().enumerate() {
            next[x] = a * l[0];
            next[x | (1 << q)] = a * l[1];
        }
        v = next;
    }
    v
}

/// A pure state vector or a density matrix (row-major) on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub enum DenseState {
    Pure { n: usize, amps: Vec<C64> },
    Mixed { n: usize, rho: Vec<C64> },
}

impl DenseState {
    /// Normalizes `amps`, whose length must be a power of two.
    pub fn pure(amps: Vec<C64>) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << n {
            return Err(Error::Contract(format!("length {} is not a power of two", amps.len())));
        }
        let norm = inner(&amps, &amps).re.sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Contract("zero state vector".into()));
        }
        Ok(DenseState::Pure {
            n,
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    /// Normalizes a Hermitian positive `rho` to unit trace.
    pub fn mixed(n: usize, rho: Vec<C64>) -> Result<Self> {
        let d = 1usize << n;
        if rho.len() != d * d {
            return Err(Error::Dimension {
                expected: d * d,
                got: rho.len(),
            });
        }
        let tr: f64 = (0..d).map(|i| rho[i * d + i].re).sum();
        if !(tr.is_finite() && tr > 0.0) {
            return Err(Error::Contract("density matrix has no positive trace".into()));
        }
        Ok(DenseState::Mixed {
            n,
            rho: rho.into_iter().map(|a| a / tr).collect(),
        })
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let d = 1usize << n;
        let mut rho = vec![ZERO; d * d];
        for i in 0..d {
            rho[i * d + i] = C64::new(1.0 / d as f64, 0.0);
        }
        DenseState::Mixed { n, rho }
    }

    /// Normalized complex Gaussian vector (Haar distributed).
    pub fn random_pure<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let amps = (0..1usize << n)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        DenseState::pure(amps).expect("nonzero Gaussian vector")
    }

    /// `G G^dagger / tr` for a `2^n x rank` complex Gaussian `G`.
    pub fn random_mixed<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Self {
        let d = 1usize << n;
        let g: Vec<C64> = (0..d * rank)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let mut rho = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                rho[i * d + j] = (0..rank).map(|k| g[i * rank + k] * g[j * rank + k].conj()).sum();
            }
        }
        DenseState::mixed(n, rho).expect("nonzero Gaussian matrix")
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            DenseState::Pure { n, .. } | DenseState::Mixed { n, .. } => *n,
        }
    }

    pub fn density_matrix(&self) -> Vec<C64> {
        match self {
            DenseState::Mixed { rho, .. } => rho.clone(),
            DenseState::Pure { amps, .. } => {
                let d = amps.len();
                let mut rho = vec![ZERO; d * d];
                for i in 0..d {
                    for j in 0..d {
                        rho[i * d + j] = amps[i] * amps[j].conj();
                    }
                }
                rho
            }
        }
    }

    /// `tr(P rho)` for a Pauli string.
    pub fn pauli_expectation(&self, ops: &[(usize, Pauli)]) -> Result<f64> {
        check_ops(ops, self.num_qubits())?;
        let m = Masks::of(ops);
        let z: C64 = match self {
            DenseState::Pure { amps, .. } => amps
                .iter()
                .enumerate()
                .map(|(x, a)| amps[x ^ m.flip].conj() * m.phase(x) * a)
                .sum(),
            DenseState::Mixed { rho, .. } => {
                let d = 1usize << self.num_qubits();
                (0..d).map(|x| m.phase(x) * rho[x * d + (x ^ m.flip)]).sum()
            }
        };
        Ok(z.re)
    }

    /// `tr(H rho)` and `tr(H^2 rho)`.
    pub fn hamiltonian_moments(&self, constant: f64, terms: &[PauliTerm]) -> Result<(f64, f64)> {
        for t in terms {
            check_ops(&t.ops, self.num_qubits())?;
        }
        match self {
            DenseState::Pure { amps, .. } => {
                let hv = apply_hamiltonian(amps, constant, terms);
                Ok((inner(amps, &hv).re, inner(&hv, &hv).re))
            }
            DenseState::Mixed { n, rho } => {
                let d = 1usize << n;
                // columns of H rho, then H applied again
                let mut first = 0.0;
                let mut second = 0.0;
                for c in 0..d {
                    let col: Vec<C64> = (0..d).map(|r| rho[r * d + c]).collect();
                    let h1 = apply_hamiltonian(&col, constant, terms);
                    let h2 = apply_hamiltonian(&h1, constant, terms);
                    first += h1[c].re;
                    second += h2[c].re;
                }
                Ok((first, second))
            }
        }
    }

    /// `tr((M_0 (x) ... (x) M_{n-1}) rho)` for single-qubit operators.
    pub fn product_expectation(&self, ops: &[Mat2]) -> Result<C64> {
        let n = self.num_qubits();
        if ops.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: ops.len(),
            });
        }
        let rho = self.density_matrix();
        Ok(contract_all(&rho, 1 << n, ops))
    }
}

/// Contracts qubit 0 of a `d x d` density matrix with `m`: returns
/// `tr_0((m (x) I) rho)` as a `d/2 x d/2` matrix.
pub(crate) fn contract_low_qubit(rho: &[C64], d: usize, m: &Mat2) -> Vec<C64> {
    let h = d / 2;
    let mut out = vec![ZERO; h * h];
    for x in 0..h {
        for y in 0..h {
            let mut acc = ZERO;
            for s in 0..2 {
                for t in 0..2 {
                    let mv = m[t][s];
                    if mv != ZERO {
                        acc += mv * rho[((x << 1) | s) * d + ((y << 1) | t)];
                    }
                }
            }
            out[x * h + y] = acc;
        }
    }
    out
}

fn contract_all(rho: &[C64], d: usize, ops: &[Mat2]) -> C64 {
    let mut cur = rho.to_vec();
    let mut dim = d;
    for m in ops {
        cur = contract_low_qubit(&cur, dim, m);
        dim /= 2;
    }
    cur[0]
}

/// Dense amplitude vector of an MPS, normalized.
pub fn dense_from_mps(psi: &Mps) -> Result<DenseState> {
    let n = psi.num_qubits();
    if n > DENSE_LIMIT {
        return Err(Error::TooLarge {
            size: n,
            limit: DENSE_LIMIT,
        });
    }
    // partial[x * dr + r] over the first i qubits
    let mut partial = vec![C64::new(1.0, 0.0)];
    for (i, site) in psi.sites().iter().enumerate() {
        let rows = 1usize << i;
        let mut next = vec![ZERO; rows * 2 * site.dr];
        for x in 0..rows {
            for l in 0..site.dl {
                let p = partial[x * site.dl + l];
                if p == ZERO {
                    continue;
                }
                for s in 0..2 {
                    let xs = x | (s << i);
                    for r in 0..site.dr {
                        next[xs * site.dr + r] += p * site.at(l, s, r);
                    }
                }
            }
        }
        partial = next;
    }
    DenseState::pure(partial)
}

/// Dense `2^n x 2^n` matrix of `constant + sum_k C_k P_k`, row-major.
pub fn hamiltonian_matrix(n: usize, constant: f64, terms: &[PauliTerm]) -> Result<Vec<C64>> {
    const LIMIT: usize = 12;
    if n > LIMIT {
        return Err(Error::TooLarge { size: n, limit: LIMIT });
    }
    let d = 1usize << n;
    let mut h = vec![ZERO; d * d];
    for x in 0..d {
        h[x * d + x] += constant;
    }
    for t in terms {
        check_ops(&t.ops, n)?;
        let m = Masks::of(&t.ops);
        for x in 0..d {
            h[(x ^ m.flip) * d + x] += m.phase(x) * t.coeff;
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn pauli_action_matches_matrices() {
        let mut rng = seeded(3);
        let DenseState::Pure { amps, .. } = DenseState::random_pure(3, &mut rng) else {
            unreachable!()
        };
        let ops = [(0, Pauli::Y), (2, Pauli::X)];
        let fast = apply_pauli(&amps, &ops);
        let y = Pauli::Y.matrix();
        let x = Pauli::X.matrix();
        for out in 0..8usize {
            let mut acc = ZERO;
            for inp in 0..8usize {
                if (out >> 1) & 1 != (inp >> 1) & 1 {
                    continue;
                }
                acc += y[out & 1][inp & 1] * x[(out >> 2) & 1][(inp >> 2) & 1] * amps[inp];
            }
            assert!((acc - fast[out]).norm() < 1e-14);
        }
    }

    #[test]
    fn pure_and_mixed_agree() {
        let psi = DenseState::random_pure(3, &mut seeded(8));
        let rho = DenseState::mixed(3, psi.density_matrix()).unwrap();
        let ops = [(0, Pauli::Z), (1, Pauli::Y), (2, Pauli::X)];
        let a = psi.pauli_expectation(&ops).unwrap();
        let b = rho.pauli_expectation(&ops).unwrap();
        assert!((a - b).abs() < 1e-13);
        let terms = vec![PauliTerm::new(0.7, ops).unwrap(), PauliTerm::from_label(-1.0, "XIZ").unwrap()];
        let (h1, h2) = psi.hamiltonian_moments(0.3, &terms).unwrap();
        let (g1, g2) = rho.hamiltonian_moments(0.3, &terms).unwrap();
        assert!((h1 - g1).abs() < 1e-12 && (h2 - g2).abs() < 1e-12);
    }

    #[test]
    fn product_expectation_of_paulis() {
        let psi = DenseState::random_pure(2, &mut seeded(1));
        let direct = psi.pauli_expectation(&[(0, Pauli::X), (1, Pauli::Z)]).unwrap();
        let via = psi
            .product_expectation(&[Pauli::X.matrix(), Pauli::Z.matrix()])
            .unwrap();
        assert!((direct - via.re).abs() < 1e-13 && via.im.abs() < 1e-13);
        let id = [Pauli::I.matrix(); 2];
        assert!((psi.product_expectation(&id).unwrap().re - 1.0).abs() < 1e-13);
    }

    #[test]
    fn product_mps_is_kronecker() {
        let a = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let b = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let psi = Mps::product(&[a, b, a], 2).unwrap();
        let DenseState::Pure { amps, .. } = dense_from_mps(&psi).unwrap() else {
            unreachable!()
        };
        let expect = product_vector(&[a, b, a]);
        for (x, y) in amps.iter().zip(&expect) {
            assert!((x - y).norm() < 1e-14);
        }
    }
}
