//! Rank-two (angular) relaxation with exhaustive angle rounding and a 1-flip
//! local search, plus hyperplane rounding of user-supplied vectors.

use super::report::Algorithm;
use super::{finish, SolveReport};
use crate::error::{Error, Result};
use crate::graph::{BitString, Graph};
use crate::rng::stream;
use crate::tensornet::lbfgs::minimize;
use crate::tensornet::OptimizerConfig;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, TAU};
use std::time::Instant;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Rank2Params {
    pub restarts: usize,
    pub optimizer: OptimizerConfig,
    pub seed: u64,
}

impl Default for Rank2Params {
    fn default() -> Self {
        Rank2Params {
            restarts: 10,
            optimizer: OptimizerConfig {
                tol_change: 1e-10,
                tol_grad: 1e-8,
                max_iter: 2000,
                ..OptimizerConfig::default()
            },
            seed: 0,
        }
    }
}

/// `sum w (1 - cos(theta_u - theta_v)) / 2` and its gradient.
fn relaxed(g: &Graph, theta: &[f64]) -> (f64, Vec<f64>) {
    let mut f = 0.0;
    let mut grad = vec![0.0; theta.len()];
    for e in g.edges() {
        let d = theta[e.u] - theta[e.v];
        f += 0.5 * e.w * (1.0 - d.cos());
        let s = 0.5 * e.w * d.sin();
        grad[e.u] += s;
        grad[e.v] -= s;
    }
    (f, grad)
}

/// Best cut among `b_j = [cos(theta_j + alpha) < 0]` over all `alpha`.
fn angle_rounding(g: &Graph, adj: &[Vec<(usize, f64)>], theta: &[f64]) -> (BitString, f64) {
    let phi: Vec<f64> = theta.iter().map(|t| t.rem_euclid(TAU)).collect();
    let side = |x: f64| {
        let y = x.rem_euclid(TAU);
        (y > FRAC_PI_2 && y < 3.0 * FRAC_PI_2) as u8
    };
    // alpha values where one node changes side
    let mut events: Vec<(f64, usize)> = phi
        .iter()
        .enumerate()
        .flat_map(|(j, &p)| [((FRAC_PI_2 - p).rem_euclid(TAU), j), ((3.0 * FRAC_PI_2 - p).rem_euclid(TAU), j)])
        .collect();
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let alpha0 = events.first().map_or(0.0, |e| e.0) - 1e-9;
    let mut bits: Vec<u8> = phi.iter().map(|&p| side(p + alpha0)).collect();
    let mut cut = g.cut_weight(&BitString::from_bits(bits.clone())).unwrap();
    let mut best = (bits.clone(), cut);
    for (i, &(a, j)) in events.iter().enumerate() {
        // crossing one critical angle flips one node
        for &(k, w) in &adj[j] {
            cut += if bits[k] == bits[j] { w } else { -w };
        }
        bits[j] ^= 1;
        let simultaneous = events.get(i + 1).is_some_and(|next| next.0 - a < 1e-12);
        if !simultaneous && cut > best.1 {
            best = (bits.clone(), cut);
        }
    }
    (BitString::from_bits(best.0), best.1)
}

/// Flips single nodes while that strictly increases the cut.
pub(crate) fn one_flip_polish(adj: &[Vec<(usize, f64)>], bits: &mut BitString, tol: f64) -> f64 {
    let n = bits.len();
    let gain = |bits: &BitString, j: usize| -> f64 {
        adj[j]
            .iter()
            .map(|&(k, w)| if bits.get(k) == bits.get(j) { w } else { -w })
            .sum()
    };
    let mut total = 0.0;
    loop {
        let mut improved = false;
        for j in 0..n {
            let gj = gain(bits, j);
            if gj > tol {
                bits.set(j, bits.get(j) ^ 1);
                total += gj;
                improved = true;
            }
        }
        if !improved {
            return total;
        }
    }
}

pub fn rank_two_solve(g: &Graph, p: &Rank2Params) -> Result<SolveReport> {
    if p.restarts == 0 {
        return Err(Error::InvalidParameter("rank-two needs at least one restart".into()));
    }
    p.optimizer.validate()?;
    let start = Instant::now();
    let n = g.num_nodes();
    let adj = g.adjacency();
    let tol = 1e-12 * g.edges().iter().map(|e| e.w.abs()).sum::<f64>().max(1.0);
    let mut best: Option<(BitString, f64)> = None;
    for r in 0..p.restarts {
        let mut rng = stream(p.seed, &[r as u64]);
        let theta0: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
        let res = minimize(
            |x: &[f64]| {
                let (f, g) = relaxed(g, x);
                (-f, g.into_iter().map(|v| -v).collect())
            },
            theta0,
            &p.optimizer,
        );
        let (mut bits, _) = angle_rounding(g, &adj, &res.x);
        one_flip_polish(&adj, &mut bits, tol);
        let w = g.cut_weight(&bits)?;
        if best.as_ref().is_none_or(|b| w > b.1) {
            best = Some((bits, w));
        }
    }
    let (bits, _) = best.unwrap();
    finish(g, Algorithm::Rank2, bits, p.seed, p, start)
}

/// Random-hyperplane rounding `b_j = [v_j . r < 0]`, best of `trials`.
pub fn hyperplane_round<R: Rng + ?Sized>(g: &Graph, vectors: &[Vec<f64>], trials: usize, rng: &mut R) -> Result<(BitString, f64)> {
    if vectors.len() != g.num_nodes() {
        return Err(Error::Dimension {
            expected: g.num_nodes(),
            got: vectors.len(),
        });
    }
    let d = vectors.first().map_or(0, |v| v.len());
    if vectors.iter().any(|v| v.len() != d) {
        return Err(Error::InvalidParameter("vectors must share one dimension".into()));
    }
    let mut best = (BitString::zeros(g.num_nodes()), f64::NEG_INFINITY);
    for _ in 0..trials.max(1) {
        let r: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let bits = BitString::from_bits(
            vectors
                .iter()
                .map(|v| (v.iter().zip(&r).map(|(a, b)| a * b).sum::<f64>() < 0.0) as u8)
                .collect(),
        );
        let w = g.cut_weight(&bits)?;
        if w > best.1 {
            best = (bits, w);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn equal_angles_cut_nothing() {
        let g = Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let adj = g.adjacency();
        let side = |theta: &[f64], alpha: f64| -> Vec<u8> {
            theta.iter().map(|t| ((t + alpha).cos() < 0.0) as u8).collect()
        };
        for alpha in [0.0, 1.0, 2.5, 4.0] {
            let b = BitString::from_bits(side(&[0.3; 3], alpha));
            assert_eq!(g.cut_weight(&b).unwrap(), 0.0);
        }
        let (_, w) = angle_rounding(&g, &adj, &[0.3; 3]);
        assert_eq!(w, 0.0);
    }

    #[test]
    fn sweep_matches_dense_alpha_scan() {
        let g = crate::graph::generate(&crate::graph::GeneratorSpec::Random {
            n: 12,
            density: 0.5,
            weights: crate::graph::WeightDist::Pm1,
            seed: 8,
        })
        .unwrap();
        let mut rng = seeded(1);
        let theta: Vec<f64> = (0..12).map(|_| rng.random_range(0.0..TAU)).collect();
        let (_, w) = angle_rounding(&g, &g.adjacency(), &theta);
        let scan = (0..100_000)
            .map(|i| {
                let alpha = i as f64 * TAU / 100_000.0;
                let b = BitString::from_bits(theta.iter().map(|t| ((t + alpha).cos() < 0.0) as u8).collect());
                g.cut_weight(&b).unwrap()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(w, scan);
    }

    #[test]
    fn complete_bipartite() {
        let mut edges = Vec::new();
        for i in 0..3 {
            for j in 3..6 {
                edges.push((i, j, 1.0));
            }
        }
        let g = Graph::new(6, edges).unwrap();
        let r = rank_two_solve(&g, &Rank2Params::default()).unwrap();
        assert_eq!(r.weight, 9.0);
    }

    #[test]
    fn hyperplane_on_antipodal_vectors() {
        let g = Graph::new(2, [(0, 1, 1.0)]).unwrap();
        let (_, w) = hyperplane_round(&g, &[vec![1.0, 0.0], vec![-1.0, 0.0]], 5, &mut seeded(0)).unwrap();
        assert_eq!(w, 1.0);
    }
}
