use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliTerm};
use crate::qrac::HamiltonianTerms;
use num_complex::Complex64 as C64;

/// Sum of Pauli strings `constant + sum_k C_k prod_i P_{k,i}` in
/// matrix-product form with one channel per term.
///
/// Every interior bond carries `K` channels and every site tensor is diagonal
/// in the channel index, so site `i` is stored as the coordinate list of
/// channels acting non-trivially there; all other channels carry identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Mpo {
    n: usize,
    constant: f64,
    terms: Vec<PauliTerm>,
    site_ops: Vec<Vec<(usize, Pauli)>>,
}

impl Mpo {
    pub fn from_terms(n: usize, constant: f64, terms: Vec<PauliTerm>) -> Result<Self> {
        let mut site_ops = vec![Vec::new(); n];
        for (k, t) in terms.iter().enumerate() {
            for &(q, p) in &t.ops {
                if q >= n {
                    return Err(Error::Contract(format!("term {k} acts on qubit {q} >= {n}")));
                }
                site_ops[q].push((k, p));
            }
        }
        Ok(Mpo {
            n,
            constant,
            terms,
            site_ops,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    /// Number of channels `K`.
    pub fn num_channels(&self) -> usize {
        self.terms.len()
    }

    /// Non-identity `(channel, Pauli)` entries of site `i`.
    pub fn site_ops(&self, i: usize) -> &[(usize, Pauli)] {
        &self.site_ops[i]
    }

    /// Dense site tensor `B[a, t, s, b]` of shape `(Kl, 2, 2, Kr)`, row-major.
    /// The first site carries the coefficients and the boundary bonds sum
    /// over channels, so `Kl = 1` at site 0 and `Kr = 1` at site n-1.
    pub fn site_tensor(&self, i: usize) -> (usize, usize, Vec<C64>) {
        let k = self.terms.len();
        let kl = if i == 0 { 1 } else { k };
        let kr = if i + 1 == self.n { 1 } else { k };
        let mut out = vec![C64::new(0.0, 0.0); kl * 4 * kr];
        for c in 0..k {
            let p = self.site_ops[i]
                .iter()
                .find(|&&(ch, _)| ch == c)
                .map_or(Pauli::I, |&(_, p)| p);
            let weight = if i == 0 { self.terms[c].coeff } else { 1.0 };
            let m = p.matrix();
            let (a, b) = (if i == 0 { 0 } else { c }, if i + 1 == self.n { 0 } else { c });
            for t in 0..2 {
                for s in 0..2 {
                    out[((a * 2 + t) * 2 + s) * kr + b] += m[t][s] * weight;
                }
            }
        }
        (kl, kr, out)
    }

    /// Dense `2^n x 2^n` matrix obtained by contracting the site tensors,
    /// row-major with qubit 0 as the least significant index bit.
    pub fn to_dense(&self) -> Result<Vec<C64>> {
        const LIMIT: usize = 12;
        if self.n > LIMIT {
            return Err(Error::TooLarge {
                size: self.n,
                limit: LIMIT,
            });
        }
        let dim = 1usize << self.n;
        let mut out = vec![C64::new(0.0, 0.0); dim * dim];
        if !self.terms.is_empty() {
            // acc[bond][row][col] over the qubits contracted so far
            let (_, kr0, b0) = self.site_tensor(0);
            let mut acc: Vec<C64> = vec![C64::new(0.0, 0.0); kr0 * 4];
            for b in 0..kr0 {
                for t in 0..2 {
                    for s in 0..2 {
                        acc[(b * 2 + t) * 2 + s] = b0[(t * 2 + s) * kr0 + b];
                    }
                }
            }
            let mut sub = 2usize;
            let mut kprev = kr0;
            for i in 1..self.n {
                let (kl, kr, bt) = self.site_tensor(i);
                debug_assert_eq!(kl, kprev);
                let nsub = sub * 2;
                let mut next = vec![C64::new(0.0, 0.0); kr * nsub * nsub];
                for a in 0..kl {
                    for row in 0..sub {
                        for col in 0..sub {
                            let v = acc[(a * sub + row) * sub + col];
                            if v == C64::new(0.0, 0.0) {
                                continue;
                            }
                            for t in 0..2 {
                                for s in 0..2 {
                                    for b in 0..kr {
                                        let w = bt[((a * 2 + t) * 2 + s) * kr + b];
                                        if w != C64::new(0.0, 0.0) {
                                            let r = row + t * sub;
                                            let c = col + s * sub;
                                            next[(b * nsub + r) * nsub + c] += v * w;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                acc = next;
                sub = nsub;
                kprev = kr;
            }
            out.copy_from_slice(&acc[..dim * dim]);
        }
        for d in 0..dim {
            out[d * dim + d] += self.constant;
        }
        Ok(out)
    }
}

/// MPO of a QRAC Hamiltonian on its `num_qubits` qubits.
pub fn build_mpo(h: &HamiltonianTerms) -> Result<Mpo> {
    Mpo::from_terms(h.num_qubits, h.constant, h.pauli_terms())
}
