//! (m,1) quantum random access codes: Pauli assignment, the relaxed MAX-CUT
//! Hamiltonian, magic states and Pauli rounding.

use crate::error::{Error, Result};
use crate::graph::{BitString, Graph};
use crate::pauli::{self, Mat2, Pauli, PauliTerm};
use num_complex::Complex64 as C64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Active Pauli set for an (m,1) code: `{Z}`, `{X, Z}` or `{X, Y, Z}`.
pub fn active_paulis(m: usize) -> &'static [Pauli] {
    match m {
        1 => &[Pauli::Z],
        2 => &[Pauli::X, Pauli::Z],
        3 => &[Pauli::X, Pauli::Y, Pauli::Z],
        _ => panic!("m must be 1, 2 or 3, got {m}"),
    }
}

pub fn check_m(m: usize) -> Result<()> {
    if (1..=3).contains(&m) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("m must be 1, 2 or 3, got {m}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub qubit: usize,
    pub pauli: Pauli,
}

/// Node-to-(qubit, Pauli) map, indexed by the graph's internal node index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "AssignmentJson", try_from = "AssignmentJson")]
pub struct PauliAssignment {
    m: usize,
    num_qubits: usize,
    slots: Vec<Slot>,
}

#[derive(Serialize, Deserialize)]
struct AssignmentJson {
    m: usize,
    num_qubits: usize,
    nodes: BTreeMap<usize, (usize, Pauli)>,
}

impl From<PauliAssignment> for AssignmentJson {
    fn from(a: PauliAssignment) -> Self {
        AssignmentJson {
            m: a.m,
            num_qubits: a.num_qubits,
            nodes: a
                .slots
                .iter()
                .enumerate()
                .map(|(j, s)| (j, (s.qubit, s.pauli)))
                .collect(),
        }
    }
}

impl TryFrom<AssignmentJson> for PauliAssignment {
    type Error = Error;

    fn try_from(j: AssignmentJson) -> Result<Self> {
        if j.nodes.keys().enumerate().any(|(i, &k)| i != k) {
            return Err(Error::Contract("assignment nodes must be 0..n".into()));
        }
        let slots = j
            .nodes
            .values()
            .map(|&(qubit, pauli)| Slot { qubit, pauli })
            .collect();
        PauliAssignment::new(j.m, j.num_qubits, slots)
    }
}

impl PauliAssignment {
    /// Checks the per-qubit constraints (Pauli in the active set, no Pauli
    /// used twice on a qubit). Adjacency is checked by [`Self::validate`].
    pub fn new(m: usize, num_qubits: usize, slots: Vec<Slot>) -> Result<Self> {
        check_m(m)?;
        let active = active_paulis(m);
        let mut used = vec![Vec::<Pauli>::new(); num_qubits];
        for (j, s) in slots.iter().enumerate() {
            if s.qubit >= num_qubits {
                return Err(Error::Contract(format!("node {j} on qubit {} >= {num_qubits}", s.qubit)));
            }
            if !active.contains(&s.pauli) {
                return Err(Error::Contract(format!("node {j} uses {} outside the m={m} set", s.pauli)));
            }
            if used[s.qubit].contains(&s.pauli) {
                return Err(Error::Contract(format!(
                    "Pauli {} used twice on qubit {}",
                    s.pauli, s.qubit
                )));
            }
            used[s.qubit].push(s.pauli);
        }
        Ok(PauliAssignment {
            m,
            num_qubits,
            slots,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_nodes(&self) -> usize {
        self.slots.len()
    }

    pub fn slot(&self, node: usize) -> Slot {
        self.slots[node]
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    /// Nodes hosted by each qubit.
    pub fn hosts(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_qubits];
        for (j, s) in self.slots.iter().enumerate() {
            out[s.qubit].push(j);
        }
        out
    }

    /// Full constraint check against `g`, including that adjacent nodes sit
    /// on different qubits.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.slots.len() != g.num_nodes() {
            return Err(Error::Dimension {
                expected: g.num_nodes(),
                got: self.slots.len(),
            });
        }
        Self::new(self.m, self.num_qubits, self.slots.clone())?;
        for e in g.edges() {
            if self.slots[e.u].qubit == self.slots[e.v].qubit {
                return Err(Error::Contract(format!(
                    "adjacent nodes {} and {} share qubit {}",
                    e.u, e.v, self.slots[e.u].qubit
                )));
            }
        }
        Ok(())
    }
}

/// Randomized greedy assignment: nodes are visited in random order and each
/// takes a uniformly random free `(qubit, Pauli)` slot on a qubit that hosts
/// none of its neighbours, or opens a new qubit.
pub fn assign_paulis<R: Rng + ?Sized>(g: &Graph, m: usize, rng: &mut R) -> Result<PauliAssignment> {
    check_m(m)?;
    let active = active_paulis(m);
    let n = g.num_nodes();
    let adj = g.adjacency();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut slots: Vec<Option<Slot>> = vec![None; n];
    let mut free: Vec<Vec<Pauli>> = Vec::new();
    let mut blocked_by: Vec<usize> = Vec::new();
    let mut candidates: Vec<Slot> = Vec::new();
    for (step, &v) in order.iter().enumerate() {
        let stamp = step + 1;
        for &(u, _) in &adj[v] {
            if let Some(s) = slots[u] {
                blocked_by[s.qubit] = stamp;
            }
        }
        candidates.clear();
        for (q, ps) in free.iter().enumerate() {
            if blocked_by[q] != stamp {
                candidates.extend(ps.iter().map(|&pauli| Slot { qubit: q, pauli }));
            }
        }
        let slot = if candidates.is_empty() {
            free.push(active.to_vec());
            blocked_by.push(0);
            let q = free.len() - 1;
            let pauli = active[rng.random_range(0..active.len())];
            Slot { qubit: q, pauli }
        } else {
            candidates[rng.random_range(0..candidates.len())]
        };
        free[slot.qubit].retain(|&p| p != slot.pauli);
        slots[v] = Some(slot);
    }
    let num_qubits = free.len();
    PauliAssignment::new(m, num_qubits, slots.into_iter().map(Option::unwrap).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QracTerm {
    pub coeff: f64,
    pub a: Slot,
    pub b: Slot,
    pub edge: (usize, usize),
}

/// `H_m = sum_{jk} w_jk/2 (I - m P_<j> P_<k>)` as a constant plus one
/// two-local term per edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianTerms {
    pub m: usize,
    pub num_qubits: usize,
    pub constant: f64,
    pub terms: Vec<QracTerm>,
}

impl HamiltonianTerms {
    pub fn pauli_terms(&self) -> Vec<PauliTerm> {
        self.terms
            .iter()
            .map(|t| {
                PauliTerm::new(t.coeff, [(t.a.qubit, t.a.pauli), (t.b.qubit, t.b.pauli)])
                    .expect("edge endpoints on distinct qubits")
            })
            .collect()
    }
}

pub fn build_terms(g: &Graph, a: &PauliAssignment) -> Result<HamiltonianTerms> {
    a.validate(g)?;
    let mf = a.m() as f64;
    let terms = g
        .edges()
        .iter()
        .map(|e| QracTerm {
            coeff: -0.5 * mf * e.w,
            a: a.slot(e.u),
            b: a.slot(e.v),
            edge: (e.u, e.v),
        })
        .collect();
    Ok(HamiltonianTerms {
        m: a.m(),
        num_qubits: a.num_qubits(),
        constant: 0.5 * g.total_weight(),
        terms,
    })
}

/// Product of single-qubit magic states; `bits[q][i]` is the bit carried by
/// the `i`-th Pauli of the active set on qubit `q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MagicState {
    pub m: usize,
    pub bits: Vec<Vec<u8>>,
}

impl MagicState {
    /// Magic state encoding node bits `b` under `a`; unused slots carry 0.
    pub fn encode(a: &PauliAssignment, b: &BitString) -> Result<Self> {
        if b.len() != a.num_nodes() {
            return Err(Error::Dimension {
                expected: a.num_nodes(),
                got: b.len(),
            });
        }
        let active = active_paulis(a.m());
        let mut bits = vec![vec![0u8; a.m()]; a.num_qubits()];
        for (j, s) in a.slots().iter().enumerate() {
            let i = active.iter().position(|&p| p == s.pauli).unwrap();
            bits[s.qubit][i] = b.get(j);
        }
        Ok(MagicState { m: a.m(), bits })
    }

    pub fn num_qubits(&self) -> usize {
        self.bits.len()
    }

    /// Bloch vector `m^{-1/2} sum_P (-1)^{b_P} e_P` of qubit `q`.
    pub fn bloch(&self, q: usize) -> [f64; 3] {
        let amp = 1.0 / (self.m as f64).sqrt();
        let mut r = [0.0; 3];
        for (&p, &bit) in active_paulis(self.m).iter().zip(&self.bits[q]) {
            r[p.axis().unwrap()] = if bit == 0 { amp } else { -amp };
        }
        r
    }

    /// State vector of qubit `q`.
    pub fn vector(&self, q: usize) -> [C64; 2] {
        pauli::state_from_bloch(self.bloch(q))
    }
}

/// `(I + m^{-1/2} sum_P (-1)^{b_P} P) / 2` for qubit `q`.
pub fn magic_density(ms: &MagicState, q: usize) -> Mat2 {
    pauli::from_bloch(ms.bloch(q))
}

/// Pauli rounding: bit 0 for a positive expectation, 1 for negative, a fair
/// coin for exactly zero.
pub fn decode_bits<R: Rng + ?Sized>(expectations: &[f64], rng: &mut R) -> BitString {
    BitString::from_bits(
        expectations
            .iter()
            .map(|&e| {
                if e > 0.0 {
                    0
                } else if e < 0.0 {
                    1
                } else {
                    rng.random_range(0..2)
                }
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn adjacency_forbids_sharing() {
        let g = Graph::new(2, [(0, 1, 1.0)]).unwrap();
        let a = assign_paulis(&g, 3, &mut seeded(0)).unwrap();
        assert_eq!(a.num_qubits(), 2);
        let tri = Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        assert_eq!(assign_paulis(&tri, 3, &mut seeded(0)).unwrap().num_qubits(), 3);
    }

    #[test]
    fn edgeless_graph_packs_tightly() {
        for m in 1..=3 {
            for n in [1, 5, 6, 7] {
                let g = Graph::new(n, []).unwrap();
                let a = assign_paulis(&g, m, &mut seeded(n as u64)).unwrap();
                a.validate(&g).unwrap();
                assert_eq!(a.num_qubits(), n.div_ceil(m));
            }
        }
    }

    #[test]
    fn single_edge_terms() {
        let g = Graph::new(2, [(0, 1, 2.0)]).unwrap();
        let a = assign_paulis(&g, 3, &mut seeded(1)).unwrap();
        let h = build_terms(&g, &a).unwrap();
        assert_eq!(h.constant, 1.0);
        assert_eq!(h.terms.len(), 1);
        assert_eq!(h.terms[0].coeff, -3.0);
    }

    #[test]
    fn magic_density_expectations() {
        let ms = MagicState {
            m: 3,
            bits: vec![vec![0, 1, 1]],
        };
        let rho = magic_density(&ms, 0);
        let s = 1.0 / 3f64.sqrt();
        for (p, sign) in [(Pauli::X, 1.0), (Pauli::Y, -1.0), (Pauli::Z, -1.0)] {
            let t = pauli::trace(&pauli::mat_mul(&p.matrix(), &rho));
            assert!((t.re - sign * s).abs() < 1e-12 && t.im.abs() < 1e-12);
        }
        let one = MagicState {
            m: 1,
            bits: vec![vec![0]],
        };
        let rho = magic_density(&one, 0);
        assert!((rho[0][0].re - 1.0).abs() < 1e-15 && rho[1][1].norm() < 1e-15);
    }

    #[test]
    fn decode_sign_rule() {
        let b = decode_bits(&[0.4, -0.2, 1.0], &mut seeded(0));
        assert_eq!(b.to_string(), "010");
        let ones: usize = (0..10_000)
            .map(|s| decode_bits(&[0.0], &mut seeded(s)).get(0) as usize)
            .sum();
        assert!((ones as f64 / 1e4 - 0.5).abs() < 0.02);
    }

    #[test]
    fn assignment_json_round_trip() {
        let g = Graph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let a = assign_paulis(&g, 2, &mut seeded(5)).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert!(s.contains("\"nodes\""));
        let back: PauliAssignment = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
    }
}
