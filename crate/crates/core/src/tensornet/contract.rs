//! Environment contractions. An environment at a bond is a `D x D` matrix
//! indexed `[bra, ket]`.

use super::{Mpo, Mps, Site};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliTerm};
use crate::qrac::PauliAssignment;
use num_complex::Complex64 as C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// `E'[r, r'] = sum conj(A[l,t,r]) P[t,s] E[l,l'] A[l',s,r']`.
pub(crate) fn transfer_left(e: &[C64], a: &Site, op: Pauli) -> Vec<C64> {
    let (dl, dr) = (a.dl, a.dr);
    let mut x = vec![ZERO; dl * 2 * dr];
    for l in 0..dl {
        for lp in 0..dl {
            let el = e[l * dl + lp];
            if el == ZERO {
                continue;
            }
            let src = &a.data[lp * 2 * dr..(lp + 1) * 2 * dr];
            let dst = &mut x[l * 2 * dr..(l + 1) * 2 * dr];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += el * s;
            }
        }
    }
    let mut out = vec![ZERO; dr * dr];
    for l in 0..dl {
        for s in 0..2 {
            let (t, ph) = op.act(s);
            let xrow = &x[(l * 2 + s) * dr..(l * 2 + s + 1) * dr];
            let arow = &a.data[(l * 2 + t) * dr..(l * 2 + t + 1) * dr];
            for (r, ar) in arow.iter().enumerate() {
                let c = ar.conj() * ph;
                let orow = &mut out[r * dr..(r + 1) * dr];
                for (o, xv) in orow.iter_mut().zip(xrow) {
                    *o += c * xv;
                }
            }
        }
    }
    out
}

/// `F'[l, l'] = sum conj(A[l,t,r]) P[t,s] A[l',s,r'] F[r,r']`.
pub(crate) fn transfer_right(f: &[C64], a: &Site, op: Pauli) -> Vec<C64> {
    let (dl, dr) = (a.dl, a.dr);
    // y[l', s, r] = sum_{r'} A[l', s, r'] F[r, r']
    let mut y = vec![ZERO; dl * 2 * dr];
    for ls in 0..dl * 2 {
        let arow = &a.data[ls * dr..(ls + 1) * dr];
        for r in 0..dr {
            let frow = &f[r * dr..(r + 1) * dr];
            y[ls * dr + r] = arow.iter().zip(frow).map(|(x, y)| x * y).sum();
        }
    }
    let mut out = vec![ZERO; dl * dl];
    for l in 0..dl {
        for s in 0..2 {
            let (t, ph) = op.act(s);
            let arow = &a.data[(l * 2 + t) * dr..(l * 2 + t + 1) * dr];
            for lp in 0..dl {
                let yrow = &y[(lp * 2 + s) * dr..(lp * 2 + s + 1) * dr];
                let v: C64 = arow.iter().zip(yrow).map(|(x, y)| x.conj() * y).sum();
                out[l * dl + lp] += ph * v;
            }
        }
    }
    out
}

/// `out[l,t,r] += coeff * sum L[l,l'] P[t,s] A[l',s,r'] R[r,r']`, the
/// derivative of `<psi|L P R|psi>` with respect to `conj(A[l,t,r])`.
pub(crate) fn apply_site(lenv: &[C64], op: Pauli, a: &Site, renv: &[C64], coeff: C64, out: &mut [C64]) {
    let (dl, dr) = (a.dl, a.dr);
    let mut x = vec![ZERO; dl * 2 * dr];
    for l in 0..dl {
        for lp in 0..dl {
            let el = lenv[l * dl + lp];
            if el == ZERO {
                continue;
            }
            let src = &a.data[lp * 2 * dr..(lp + 1) * 2 * dr];
            let dst = &mut x[l * 2 * dr..(l + 1) * 2 * dr];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += el * s;
            }
        }
    }
    for l in 0..dl {
        for s in 0..2 {
            let (t, ph) = op.act(s);
            let c = coeff * ph;
            let xrow = &x[(l * 2 + s) * dr..(l * 2 + s + 1) * dr];
            for r in 0..dr {
                let rrow = &renv[r * dr..(r + 1) * dr];
                let v: C64 = xrow.iter().zip(rrow).map(|(x, y)| x * y).sum();
                out[(l * 2 + t) * dr + r] += c * v;
            }
        }
    }
}

fn close(l: &[C64], r: &[C64]) -> C64 {
    l.iter().zip(r).map(|(a, b)| a * b).sum()
}

fn add_into(acc: &mut [C64], x: &[C64], c: f64) {
    for (a, v) in acc.iter_mut().zip(x) {
        *a += v * c;
    }
}

struct Identity {
    left: Vec<Vec<C64>>,
    right: Vec<Vec<C64>>,
    norm: f64,
}

fn identity_envs(psi: &Mps) -> Result<Identity> {
    let n = psi.num_qubits();
    let sites = psi.sites();
    let mut left = Vec::with_capacity(n + 1);
    left.push(vec![C64::new(1.0, 0.0)]);
    for s in sites {
        let next = transfer_left(left.last().unwrap(), s, Pauli::I);
        left.push(next);
    }
    let mut right = vec![Vec::new(); n + 1];
    right[n] = vec![C64::new(1.0, 0.0)];
    for i in (0..n).rev() {
        right[i] = transfer_right(&right[i + 1], &sites[i], Pauli::I);
    }
    let norm = left[n][0].re;
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::Contract(format!("MPS norm {norm} is not positive and finite")));
    }
    Ok(Identity { left, right, norm })
}

fn check_qubits(psi: &Mps, h_qubits: usize) -> Result<()> {
    if psi.num_qubits() != h_qubits {
        return Err(Error::Dimension {
            expected: h_qubits,
            got: psi.num_qubits(),
        });
    }
    Ok(())
}

/// Ops of `term` on sites `first..=last` (identity where absent).
fn term_ops(term: &PauliTerm) -> impl Iterator<Item = (usize, Pauli)> + '_ {
    let first = term.ops[0].0;
    let last = term.ops[term.ops.len() - 1].0;
    let mut k = 0;
    (first..=last).map(move |i| {
        if term.ops[k].0 == i {
            k += 1;
            (i, term.ops[k - 1].1)
        } else {
            (i, Pauli::I)
        }
    })
}

/// Left environments of one term across its support; `out[j]` sits at bond
/// `first + j`.
fn term_left(psi: &Mps, id: &Identity, term: &PauliTerm) -> Vec<Vec<C64>> {
    let first = term.ops[0].0;
    let mut envs = Vec::with_capacity(term.ops.last().unwrap().0 - first + 2);
    envs.push(id.left[first].clone());
    for (i, p) in term_ops(term) {
        let next = transfer_left(envs.last().unwrap(), &psi.sites()[i], p);
        envs.push(next);
    }
    envs
}

/// Unnormalized `<psi|P|psi>` for each Pauli string.
fn raw_term_values(psi: &Mps, id: &Identity, terms: &[PauliTerm]) -> Vec<C64> {
    terms
        .iter()
        .map(|t| {
            if t.ops.is_empty() {
                return C64::new(id.norm, 0.0);
            }
            let last = t.ops.last().unwrap().0;
            let envs = term_left(psi, id, t);
            close(envs.last().unwrap(), &id.right[last + 1])
        })
        .collect()
}

fn real_part(z: C64, scale: f64) -> Result<f64> {
    let v = z / scale;
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Contract("non-finite expectation value".into()));
    }
    if v.im.abs() > 1e-9 * v.re.abs().max(1.0) {
        return Err(Error::Contract(format!("expectation has imaginary part {:e}", v.im)));
    }
    Ok(v.re)
}

/// Rayleigh quotient and, optionally, its gradient with respect to the real
/// and imaginary parts of every tensor entry.
#[derive(Clone, Debug)]
pub struct Evaluation {
    /// `<psi|H|psi> / <psi|psi>`
    pub value: f64,
    pub norm_sq: f64,
    /// Per-site complex gradient; the derivative with respect to
    /// `Re A` is `grad.re` and with respect to `Im A` is `grad.im`.
    pub grad: Option<Vec<Vec<C64>>>,
}

impl Evaluation {
    /// Gradient flattened in the parameter layout of [`Mps::to_params`].
    pub fn flat_grad(&self) -> Option<Vec<f64>> {
        self.grad
            .as_ref()
            .map(|g| g.iter().flat_map(|s| s.iter().flat_map(|z| [z.re, z.im])).collect())
    }
}

pub fn evaluate(psi: &Mps, h: &Mpo, with_grad: bool) -> Result<Evaluation> {
    check_qubits(psi, h.num_qubits())?;
    let n = psi.num_qubits();
    let sites = psi.sites();
    let id = identity_envs(psi)?;
    let terms = h.terms();

    if !with_grad {
        let raw = raw_term_values(psi, &id, terms);
        let total = terms
            .iter()
            .zip(&raw)
            .fold(C64::new(h.constant() * id.norm, 0.0), |acc, (t, v)| acc + v * t.coeff);
        return Ok(Evaluation {
            value: real_part(total, id.norm)?,
            norm_sq: id.norm,
            grad: None,
        });
    }

    let mut heff: Vec<Vec<C64>> = sites.iter().map(|s| vec![ZERO; s.data.len()]).collect();
    let mut done_left_add: Vec<Vec<C64>> = (0..=n).map(|i| vec![ZERO; id.left[i].len()]).collect();
    let mut done_right_add: Vec<Vec<C64>> = (0..=n).map(|i| vec![ZERO; id.right[i].len()]).collect();
    let mut total = C64::new(h.constant() * id.norm, 0.0);
    let mut constant_terms = 0.0;

    for t in terms {
        if t.ops.is_empty() {
            constant_terms += t.coeff;
            continue;
        }
        let first = t.ops[0].0;
        let last = t.ops.last().unwrap().0;
        let lenvs = term_left(psi, &id, t);
        total += close(lenvs.last().unwrap(), &id.right[last + 1]) * t.coeff;
        let mut renv = id.right[last + 1].clone();
        let ops: Vec<(usize, Pauli)> = term_ops(t).collect();
        for &(i, p) in ops.iter().rev() {
            let j = i - first;
            apply_site(&lenvs[j], p, &sites[i], &renv, C64::new(t.coeff, 0.0), &mut heff[i]);
            renv = transfer_right(&renv, &sites[i], p);
        }
        add_into(&mut done_left_add[last + 1], lenvs.last().unwrap(), t.coeff);
        add_into(&mut done_right_add[first], &renv, t.coeff);
    }
    total += C64::new(constant_terms * id.norm, 0.0);
    let value = real_part(total, id.norm)?;

    // Completed terms to the left of each bond, and still-pending ones to the right.
    let mut done_left = id.left[0].iter().map(|z| z * (h.constant() + constant_terms)).collect::<Vec<_>>();
    let mut done_right: Vec<Vec<C64>> = vec![Vec::new(); n + 1];
    done_right[n] = done_right_add[n].clone();
    for i in (0..n).rev() {
        let mut r = transfer_right(&done_right[i + 1], &sites[i], Pauli::I);
        add_into(&mut r, &done_right_add[i], 1.0);
        done_right[i] = r;
    }
    let one = C64::new(1.0, 0.0);
    let mut grad = Vec::with_capacity(n);
    for i in 0..n {
        add_into(&mut done_left, &done_left_add[i], 1.0);
        let s = &sites[i];
        let g = &mut heff[i];
        apply_site(&done_left, Pauli::I, s, &id.right[i + 1], one, g);
        apply_site(&id.left[i], Pauli::I, s, &done_right[i + 1], one, g);
        let mut neff = vec![ZERO; s.data.len()];
        apply_site(&id.left[i], Pauli::I, s, &id.right[i + 1], one, &mut neff);
        let scale = 2.0 / id.norm;
        let gi: Vec<C64> = g
            .iter()
            .zip(&neff)
            .map(|(hv, nv)| (hv - nv * value) * scale)
            .collect();
        grad.push(gi);
        done_left = transfer_left(&done_left, s, Pauli::I);
    }
    Ok(Evaluation {
        value,
        norm_sq: id.norm,
        grad: Some(grad),
    })
}

/// `<psi|H|psi> / <psi|psi>`.
pub fn expectation(psi: &Mps, h: &Mpo) -> Result<f64> {
    Ok(evaluate(psi, h, false)?.value)
}

/// Gradient of the Rayleigh quotient, per site.
pub fn gradient(psi: &Mps, h: &Mpo) -> Result<Vec<Vec<C64>>> {
    Ok(evaluate(psi, h, true)?.grad.expect("gradient requested"))
}

/// Normalized expectation of every Pauli string (coefficients ignored),
/// sharing one pair of identity sweeps across all strings.
pub fn term_values(psi: &Mps, terms: &[PauliTerm]) -> Result<Vec<f64>> {
    let n = psi.num_qubits();
    if let Some(q) = terms.iter().filter_map(PauliTerm::max_qubit).find(|&q| q >= n) {
        return Err(Error::Contract(format!("Pauli string acts on qubit {q} >= {n}")));
    }
    let id = identity_envs(psi)?;
    raw_term_values(psi, &id, terms)
        .into_iter()
        .map(|z| {
            let v = real_part(z, id.norm)?;
            if v.abs() > 1.0 + 1e-9 {
                return Err(Error::Contract(format!("Pauli expectation {v} outside [-1, 1]")));
            }
            Ok(v.clamp(-1.0, 1.0))
        })
        .collect()
}

fn check_assignment(psi: &Mps, a: &PauliAssignment) -> Result<()> {
    if a.num_qubits() != psi.num_qubits() {
        return Err(Error::Dimension {
            expected: a.num_qubits(),
            got: psi.num_qubits(),
        });
    }
    Ok(())
}

/// `<P_<j> P_<k>>` for every edge `(j, k)` (internal node indices).
pub fn edge_energies(psi: &Mps, a: &PauliAssignment, edges: &[(usize, usize)]) -> Result<Vec<f64>> {
    check_assignment(psi, a)?;
    let terms = edges
        .iter()
        .map(|&(j, k)| {
            if j >= a.num_nodes() || k >= a.num_nodes() {
                return Err(Error::Contract(format!("edge ({j}, {k}) not covered by the assignment")));
            }
            let (sj, sk) = (a.slot(j), a.slot(k));
            PauliTerm::new(1.0, [(sj.qubit, sj.pauli), (sk.qubit, sk.pauli)])
                .ok_or_else(|| Error::Contract(format!("edge ({j}, {k}) endpoints share a qubit")))
        })
        .collect::<Result<Vec<_>>>()?;
    term_values(psi, &terms)
}

/// `<P_<j>>` for every node.
pub fn site_expectations(psi: &Mps, a: &PauliAssignment) -> Result<Vec<f64>> {
    check_assignment(psi, a)?;
    let terms: Vec<PauliTerm> = a
        .slots()
        .iter()
        .map(|s| PauliTerm::new(1.0, [(s.qubit, s.pauli)]).unwrap())
        .collect();
    term_values(psi, &terms)
}
