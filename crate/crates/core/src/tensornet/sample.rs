use super::contract::{transfer_left, transfer_right};
use super::{Mps, Site};
use crate::pauli::{Mat2, Pauli};
use num_complex::Complex64 as C64;
use rand::Rng;

/// Applies a single-qubit matrix to the physical index of a site tensor.
fn rotate(site: &Site, u: &Mat2) -> Site {
    let mut out = Site::zeros(site.dl, site.dr);
    for l in 0..site.dl {
        for t in 0..2 {
            for s in 0..2 {
                let c = u[t][s];
                for r in 0..site.dr {
                    let k = out.idx(l, t, r);
                    out.data[k] += c * site.at(l, s, r);
                }
            }
        }
    }
    out
}

/// Projects the physical index onto `bit`.
fn project(site: &Site, bit: usize) -> Site {
    let mut out = site.clone();
    for l in 0..site.dl {
        for r in 0..site.dr {
            let k = out.idx(l, bit ^ 1, r);
            out.data[k] = C64::new(0.0, 0.0);
        }
    }
    out
}

/// One computational-basis sample of `U_0 (x) ... (x) U_{n-1} |psi>`, drawn
/// qubit by qubit from conditional probabilities.
pub fn sample_bits<R: Rng + ?Sized>(psi: &Mps, rotations: &[Mat2], rng: &mut R) -> Vec<u8> {
    let n = psi.num_qubits();
    assert_eq!(rotations.len(), n, "one rotation per qubit");
    let sites: Vec<Site> = psi
        .sites()
        .iter()
        .zip(rotations)
        .map(|(s, u)| rotate(s, u))
        .collect();
    let mut right = vec![Vec::new(); n + 1];
    right[n] = vec![C64::new(1.0, 0.0)];
    for i in (0..n).rev() {
        right[i] = transfer_right(&right[i + 1], &sites[i], Pauli::I);
    }
    let mut env = vec![C64::new(1.0, 0.0)];
    let mut bits = Vec::with_capacity(n);
    for i in 0..n {
        let close = |e: &[C64]| -> f64 {
            e.iter().zip(&right[i + 1]).map(|(a, b)| a * b).sum::<C64>().re.max(0.0)
        };
        let e0 = transfer_left(&env, &project(&sites[i], 0), Pauli::I);
        let e1 = transfer_left(&env, &project(&sites[i], 1), Pauli::I);
        let (p0, p1) = (close(&e0), close(&e1));
        let bit = if rng.random::<f64>() * (p0 + p1) < p0 { 0 } else { 1 };
        let (e, p) = if bit == 0 { (e0, p0) } else { (e1, p1) };
        env = e.into_iter().map(|z| z / p).collect();
        bits.push(bit as u8);
    }
    bits
}
