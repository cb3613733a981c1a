use super::dense::apply_hamiltonian;
use super::inner;
use crate::error::{Error, Result};
use crate::pauli::PauliTerm;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<C64>,
    pub residual: f64,
}

/// Largest eigenpair of `constant + sum_k C_k P_k` on `n` qubits by Lanczos
/// with full reorthogonalization and restarts from the current Ritz vector.
pub fn lanczos_top<R: Rng + ?Sized>(
    n: usize,
    constant: f64,
    terms: &[PauliTerm],
    rng: &mut R,
    tol: f64,
) -> Result<Eigenpair> {
    if n > super::DENSE_LIMIT {
        return Err(Error::TooLarge {
            size: n,
            limit: super::DENSE_LIMIT,
        });
    }
    let d = 1usize << n;
    let krylov = d.min(60);
    let normalize = |v: &mut Vec<C64>| {
        let nv = inner(v, v).re.sqrt();
        v.iter_mut().for_each(|x| *x /= nv);
        nv
    };
    let mut start: Vec<C64> = (0..d)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    normalize(&mut start);
    let mut best = Eigenpair {
        value: f64::NEG_INFINITY,
        vector: start.clone(),
        residual: f64::INFINITY,
    };
    for _restart in 0..50 {
        let mut basis: Vec<Vec<C64>> = vec![start.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        for j in 0..krylov {
            let mut w = apply_hamiltonian(&basis[j], constant, terms);
            let a = inner(&basis[j], &w).re;
            alpha.push(a);
            for _ in 0..2 {
                for v in &basis {
                    let c = inner(v, &w);
                    w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
                }
            }
            let b = inner(&w, &w).re.sqrt();
            if j + 1 == krylov || b < 1e-12 {
                break;
            }
            beta.push(b);
            w.iter_mut().for_each(|x| *x /= b);
            basis.push(w);
        }
        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = t.symmetric_eigen();
        let top = (0..k)
            .max_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]))
            .unwrap();
        let mut ritz = vec![C64::new(0.0, 0.0); d];
        for (i, v) in basis.iter().enumerate().take(k) {
            let c = eig.eigenvectors[(i, top)];
            ritz.iter_mut().zip(v).for_each(|(x, y)| *x += y * c);
        }
        normalize(&mut ritz);
        let hv = apply_hamiltonian(&ritz, constant, terms);
        let value = inner(&ritz, &hv).re;
        let residual = hv
            .iter()
            .zip(&ritz)
            .map(|(h, r)| (h - r * value).norm_sqr())
            .sum::<f64>()
            .sqrt();
        best = Eigenpair {
            value,
            vector: ritz.clone(),
            residual,
        };
        if residual < tol {
            break;
        }
        start = ritz;
    }
    Ok(best)
}
