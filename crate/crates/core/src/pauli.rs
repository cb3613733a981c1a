//! Single-qubit Pauli operators and 2x2 complex matrices.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::fmt;

pub type Mat2 = [[C64; 2]; 2];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const XYZ: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> Mat2 {
        match self {
            Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -I], [I, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    /// `P|s> = phase * |flip(s)>` as `(target, phase)` for input bit `s`.
    #[inline]
    pub fn act(self, s: usize) -> (usize, C64) {
        match self {
            Pauli::I => (s, ONE),
            Pauli::X => (s ^ 1, ONE),
            Pauli::Y => (s ^ 1, if s == 0 { I } else { -I }),
            Pauli::Z => (s, if s == 0 { ONE } else { -ONE }),
        }
    }

    /// Bloch-vector axis (0, 1, 2) for X, Y, Z.
    pub fn axis(self) -> Option<usize> {
        match self {
            Pauli::I => None,
            Pauli::X => Some(0),
            Pauli::Y => Some(1),
            Pauli::Z => Some(2),
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(c)
    }
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn dagger(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

pub fn trace(a: &Mat2) -> C64 {
    a[0][0] + a[1][1]
}

pub fn scale(a: &Mat2, s: C64) -> Mat2 {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

pub fn add(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

/// `(I + r.sigma) / 2` for a real Bloch vector `r`.
pub fn from_bloch(r: [f64; 3]) -> Mat2 {
    let half = 0.5;
    [
        [C64::new(half * (1.0 + r[2]), 0.0), C64::new(half * r[0], -half * r[1])],
        [C64::new(half * r[0], half * r[1]), C64::new(half * (1.0 - r[2]), 0.0)],
    ]
}

/// Matrix exponential `exp(-i * angle * P)` for a Pauli `P`.
pub fn rotation(p: Pauli, angle: f64) -> Mat2 {
    let c = C64::new(angle.cos(), 0.0);
    let s = C64::new(0.0, -angle.sin());
    let id = Pauli::I.matrix();
    add(&scale(&id, c), &scale(&p.matrix(), s))
}

/// Unit vector `psi` with `|psi><psi| = (I + r.sigma) / 2` for `|r| = 1`.
pub fn state_from_bloch(r: [f64; 3]) -> [C64; 2] {
    let theta = r[2].clamp(-1.0, 1.0).acos();
    let phi = r[1].atan2(r[0]);
    [
        C64::new((theta / 2.0).cos(), 0.0),
        C64::from_polar((theta / 2.0).sin(), phi),
    ]
}

/// Real-weighted Pauli string `coeff * P_{q1} P_{q2} ...` on distinct qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coeff: f64,
    pub ops: Vec<(usize, Pauli)>,
}

impl PauliTerm {
    /// Builds a term, dropping identities and sorting by qubit. Repeated
    /// qubits are rejected.
    pub fn new(coeff: f64, ops: impl IntoIterator<Item = (usize, Pauli)>) -> Option<Self> {
        let mut ops: Vec<(usize, Pauli)> = ops.into_iter().filter(|&(_, p)| p != Pauli::I).collect();
        ops.sort_by_key(|&(q, _)| q);
        if ops.windows(2).any(|w| w[0].0 == w[1].0) {
            return None;
        }
        Some(PauliTerm { coeff, ops })
    }

    /// Parses a dense label such as `"IXYI"` (character `i` acts on qubit `i`).
    pub fn from_label(coeff: f64, label: &str) -> Option<Self> {
        let ops = label
            .chars()
            .enumerate()
            .map(|(q, c)| Pauli::from_char(c).map(|p| (q, p)))
            .collect::<Option<Vec<_>>>()?;
        PauliTerm::new(coeff, ops)
    }

    pub fn locality(&self) -> usize {
        self.ops.len()
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.ops.last().map(|&(q, _)| q)
    }
}
