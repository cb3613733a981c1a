//! Recursive level-1 QAOA with closed-form two-point correlations.
//!
//! For `|phi> = e^{i gamma C}|+>^n` with `C = sum w_uv Z_u Z_v`, the
//! correlations needed per edge are `<Y_u Z_v>`, `<Z_u Y_v>` and `<Y_u Y_v>`
//! (`<Z_u Z_v>` vanishes). Rotating by `e^{i beta B}` gives
//! `<Z_u Z_v> = -sin(4 beta)/2 (<YZ> + <ZY>) + sin^2(2 beta) <YY>`, so the
//! optimal `beta` for a fixed `gamma` is an `atan2`.

use super::report::{Algorithm, RoundLog};
use super::{components, detach_isolated, finish, scatter, SolveReport};
use crate::error::{Error, Result};
use crate::graph::{BitString, Graph, Parity, ParityRecord};
use crate::oracle::brute_force_maxcut;
use crate::rng::stream;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::time::Instant;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RqaoaParams {
    pub bf_threshold: usize,
    /// Points of the coarse `gamma` grid on `[0, pi]`.
    pub grid: usize,
    /// Successive grid refinements around the incumbent.
    pub refinements: usize,
    /// Only used to break the all-zero-energy tie.
    pub seed: u64,
}

impl Default for RqaoaParams {
    fn default() -> Self {
        RqaoaParams {
            bf_threshold: 10,
            grid: 50,
            refinements: 2,
            seed: 0,
        }
    }
}

/// Per edge `(<Y_u Z_v> + <Z_u Y_v>, <Y_u Y_v>)` in `e^{i gamma C}|+>`, in
/// the order of `g.edges()`.
pub fn qaoa1_correlations(g: &Graph, gamma: f64) -> Vec<(f64, f64)> {
    let adj: Vec<HashMap<usize, f64>> = g
        .adjacency()
        .into_iter()
        .map(|l| l.into_iter().collect())
        .collect();
    g.edges()
        .iter()
        .map(|e| {
            let (u, v) = (e.u, e.v);
            let s = -(2.0 * gamma * e.w).sin();
            let mut pu = 1.0;
            let mut pv = 1.0;
            let mut only_u = 1.0;
            let mut only_v = 1.0;
            let mut minus = 1.0;
            let mut plus = 1.0;
            for (&k, &wk) in &adj[u] {
                if k == v {
                    continue;
                }
                let a = 2.0 * gamma * wk;
                pu *= a.cos();
                match adj[v].get(&k) {
                    Some(&wl) => {
                        let b = 2.0 * gamma * wl;
                        minus *= (a - b).cos();
                        plus *= (a + b).cos();
                    }
                    None => only_u *= a.cos(),
                }
            }
            for (&l, &wl) in &adj[v] {
                if l == u {
                    continue;
                }
                let b = (2.0 * gamma * wl).cos();
                pv *= b;
                if !adj[u].contains_key(&l) {
                    only_v *= b;
                }
            }
            (s * (pu + pv), 0.5 * only_u * only_v * (minus - plus))
        })
        .collect()
}

/// `<Z_u Z_v>` per edge for the level-1 state at `(beta, gamma)`.
pub fn qaoa1_edge_energies(g: &Graph, beta: f64, gamma: f64) -> Vec<f64> {
    let (s4, s2) = ((4.0 * beta).sin(), (2.0 * beta).sin());
    qaoa1_correlations(g, gamma)
        .into_iter()
        .map(|(yz, yy)| -0.5 * s4 * yz + s2 * s2 * yy)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Qaoa1Optimum {
    pub beta: f64,
    pub gamma: f64,
    /// `(W - sum w <ZZ>) / 2` at the optimum.
    pub expected_cut: f64,
}

/// Best `beta` in `[0, pi/2)` and the resulting `sum w <ZZ>`.
fn best_beta(g: &Graph, gamma: f64) -> (f64, f64) {
    let (mut a, mut b) = (0.0, 0.0);
    for (e, (yz, yy)) in g.edges().iter().zip(qaoa1_correlations(g, gamma)) {
        a += e.w * yz;
        b += e.w * yy;
    }
    let beta = (a.atan2(b) / 4.0).rem_euclid(PI / 2.0);
    (beta, 0.5 * b - 0.5 * a.hypot(b))
}

/// Grid search over `gamma` with `beta` in closed form.
pub fn optimize_qaoa1(g: &Graph, grid: usize, refinements: usize) -> Qaoa1Optimum {
    let grid = grid.max(2);
    let scan = |lo: f64, hi: f64, points: usize| {
        (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .map(|gamma| (gamma, best_beta(g, gamma)))
            .fold(None, |best: Option<(f64, (f64, f64))>, cur| match best {
                Some(b) if b.1 .1 <= cur.1 .1 => Some(b),
                _ => Some(cur),
            })
            .unwrap()
    };
    let mut h = PI / (grid - 1) as f64;
    let mut best = scan(0.0, PI, grid);
    for _ in 0..refinements {
        let lo = (best.0 - h).max(0.0);
        let hi = (best.0 + h).min(PI);
        let points = 2 * grid + 1;
        let cand = scan(lo, hi, points);
        if cand.1 .1 < best.1 .1 {
            best = cand;
        }
        h = (hi - lo) / (points - 1) as f64;
    }
    let (gamma, (beta, zz)) = best;
    Qaoa1Optimum {
        beta,
        gamma,
        expected_cut: 0.5 * (g.total_weight() - zz),
    }
}

fn rqaoa_component(g: &Graph, p: &RqaoaParams, comp: u64, logs: &mut Vec<RoundLog>, secs: &mut Vec<f64>) -> Result<BitString> {
    let mut rec = ParityRecord::new(g.clone());
    let mut round = 0u64;
    while rec.residual_graph.num_nodes() > p.bf_threshold {
        let start = Instant::now();
        detach_isolated(&mut rec)?;
        if rec.residual_graph.num_nodes() <= p.bf_threshold {
            break;
        }
        let cur = rec.residual_graph.clone();
        let opt = optimize_qaoa1(&cur, p.grid, p.refinements);
        let energies = qaoa1_edge_energies(&cur, opt.beta, opt.gamma);
        let top = energies.iter().map(|e| e.abs()).fold(0.0, f64::max);
        let i = if top == 0.0 {
            let i = stream(p.seed, &[comp, round]).random_range(0..energies.len());
            log::info!("round {round}: all edge energies zero, fixing a random edge");
            i
        } else {
            energies.iter().position(|e| e.abs() == top).unwrap()
        };
        let e = cur.edges()[i];
        rec.fix(cur.label(e.v), cur.label(e.u), Parity::from_energy(energies[i]))?;
        logs.push(RoundLog {
            round: logs.len(),
            component: comp as usize,
            nodes: cur.num_nodes(),
            edges: cur.num_edges(),
            fixed: 1,
            trials: 1,
            best_objective: opt.expected_cut,
        });
        secs.push(start.elapsed().as_secs_f64());
        round += 1;
    }
    rec.residual_assignment = Some(brute_force_maxcut(&rec.residual_graph)?.best);
    rec.assemble(g)
}

/// One parity per round, on the edge with the largest `|<Z_u Z_v>|` of the
/// optimized level-1 state.
pub fn rqaoa_solve(g: &Graph, p: &RqaoaParams) -> Result<SolveReport> {
    if p.bf_threshold == 0 || p.bf_threshold > crate::oracle::BRUTE_FORCE_LIMIT {
        return Err(Error::InvalidParameter(format!("bad brute-force threshold {}", p.bf_threshold)));
    }
    let start = Instant::now();
    let mut logs = Vec::new();
    let mut secs = Vec::new();
    let mut bits = vec![0u8; g.num_nodes()];
    for (c, part) in components(g)?.iter().enumerate() {
        let b = rqaoa_component(part, p, c as u64, &mut logs, &mut secs)?;
        scatter(g, part, &b, &mut bits);
    }
    let mut report = finish(g, Algorithm::Rqaoa, BitString::from_bits(bits), p.seed, p, start)?;
    report.rounds = logs;
    report.timing.round_seconds = secs;
    Ok(report)
}
