//! Recursive QRAO and the baselines it is compared against.

mod rank2;
mod report;
mod rqaoa;

pub use rank2::{hyperplane_round, rank_two_solve, Rank2Params};
pub use report::{Algorithm, RoundLog, SolveReport, Timing};
pub use rqaoa::{optimize_qaoa1, qaoa1_correlations, qaoa1_edge_energies, rqaoa_solve, Qaoa1Optimum, RqaoaParams};

use crate::error::{Error, Result};
use crate::graph::{
    max_spanning_forest, perturb_weights, perturb_zero_weights, BitString, Graph, Parity, ParityRecord,
};
use crate::oracle::brute_force_maxcut;
use crate::qrac::{assign_paulis, build_terms, check_m, decode_bits};
use crate::rng::stream;
use crate::tensornet::{build_mpo, edge_energies, init_mps, optimize, site_expectations, OptimizerConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

// stream tags
const PERTURB: u64 = 1;
const ROUND: u64 = 2;
const FOREST: u64 = 3;
const TRIAL: u64 = 4;
const FALLBACK: u64 = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RqraoParams {
    pub m: usize,
    /// Trials per round, `N`.
    pub ensemble: usize,
    /// Shrinkage factor `S` of the ensemble energy.
    pub scale: f64,
    pub chi: usize,
    /// Brute-force threshold `M`.
    pub bf_threshold: usize,
    pub perturbation: f64,
    pub optimizer: OptimizerConfig,
    pub seed: u64,
}

impl Default for RqraoParams {
    fn default() -> Self {
        RqraoParams {
            m: 3,
            ensemble: 20,
            scale: 2.0,
            chi: 2,
            bf_threshold: 10,
            perturbation: 1e-5,
            optimizer: OptimizerConfig::default(),
            seed: 0,
        }
    }
}

impl RqraoParams {
    pub fn validate(&self) -> Result<()> {
        check_m(self.m)?;
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        if self.ensemble == 0 {
            return bad("ensemble size must be at least 1");
        }
        if self.bf_threshold == 0 {
            return bad("brute-force threshold must be at least 1");
        }
        if self.bf_threshold > crate::oracle::BRUTE_FORCE_LIMIT {
            return bad("brute-force threshold exceeds the exhaustive-search limit");
        }
        if !(self.scale >= 0.0) {
            return bad("scale factor must be non-negative");
        }
        if self.chi == 0 {
            return bad("bond dimension must be at least 1");
        }
        if !(self.perturbation >= 0.0) {
            return bad("perturbation amplitude must be non-negative");
        }
        self.optimizer.validate()
    }
}

/// Shrinks the trial mean toward zero by `S` population standard deviations,
/// clipping at zero.
pub fn ensemble_energy(samples: &[f64], scale: f64) -> f64 {
    assert!(!samples.is_empty(), "ensemble needs at least one sample");
    if samples.iter().all(|&x| x == samples[0]) {
        return samples[0];
    }
    let n = samples.len() as f64;
    let mu = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / n;
    let shrink = (scale * var.sqrt()).min(mu.abs());
    mu - mu.signum() * shrink
}

struct Trial {
    value: f64,
    energies: Vec<f64>,
}

fn run_trial(g: &Graph, edges: &[(usize, usize)], p: &RqraoParams, path: &[u64]) -> Result<Option<Trial>> {
    let mut rng = stream(p.seed, path);
    let a = assign_paulis(g, p.m, &mut rng)?;
    let mpo = build_mpo(&build_terms(g, &a)?)?;
    let psi = init_mps(a.num_qubits(), p.chi, &mut rng)?;
    let opt = optimize(&psi, &mpo, &p.optimizer)?;
    if opt.failed() {
        return Ok(None);
    }
    Ok(Some(Trial {
        value: opt.value,
        energies: edge_energies(&opt.psi, &a, edges)?,
    }))
}

fn run_round_trials(g: &Graph, edges: &[(usize, usize)], p: &RqraoParams, comp: u64, round: u64) -> Result<Vec<Trial>> {
    for attempt in 0..2u64 {
        let trials: Vec<Trial> = (0..p.ensemble as u64)
            .into_par_iter()
            .filter_map(|t| match run_trial(g, edges, p, &[TRIAL, comp, round, attempt, t]) {
                Ok(Some(trial)) => Some(trial),
                Ok(None) => {
                    log::warn!("round {round} trial {t}: optimizer diverged, trial dropped");
                    None
                }
                Err(e) => {
                    log::warn!("round {round} trial {t}: {e}, trial dropped");
                    None
                }
            })
            .collect();
        if !trials.is_empty() {
            if trials.len() < p.ensemble {
                log::info!("round {round}: {} of {} trials usable", trials.len(), p.ensemble);
            }
            return Ok(trials);
        }
        log::warn!("round {round}: every trial failed (attempt {attempt})");
    }
    Err(Error::SolveFailed(format!(
        "round {round}: all {} trials failed twice on a graph with {} nodes and {} edges",
        p.ensemble,
        g.num_nodes(),
        g.num_edges()
    )))
}

fn detach_isolated(rec: &mut ParityRecord) -> Result<()> {
    loop {
        let g = &rec.residual_graph;
        if g.num_nodes() < 2 {
            return Ok(());
        }
        let deg = g.degrees();
        let Some(r) = deg.iter().position(|&d| d == 0) else {
            return Ok(());
        };
        let kept = if r == 0 { 1 } else { 0 };
        let (rl, kl) = (g.label(r), g.label(kept));
        log::debug!("detaching isolated node {rl}");
        rec.detach_isolated(rl, kl)?;
    }
}

/// Recursion on one connected component (external labels preserved).
fn rqrao_component(g: &Graph, p: &RqraoParams, comp: u64, logs: &mut Vec<RoundLog>, secs: &mut Vec<f64>) -> Result<BitString> {
    let mut rng = stream(p.seed, &[PERTURB, comp]);
    let mut rec = ParityRecord::new(perturb_weights(g, p.perturbation, &mut rng));
    let mut round = 0u64;
    while rec.residual_graph.num_nodes() > p.bf_threshold {
        let start = Instant::now();
        let mut rng = stream(p.seed, &[ROUND, comp, round]);
        rec.residual_graph = perturb_zero_weights(&rec.residual_graph, p.perturbation, &mut rng);
        detach_isolated(&mut rec)?;
        if rec.residual_graph.num_nodes() <= p.bf_threshold {
            break;
        }
        let cur = rec.residual_graph.clone();
        let edges: Vec<(usize, usize)> = cur.edges().iter().map(|e| (e.u, e.v)).collect();
        let trials = run_round_trials(&cur, &edges, p, comp, round)?;

        let mut column = vec![0.0; trials.len()];
        let mut means = Vec::with_capacity(edges.len());
        let mut ensemble = Vec::with_capacity(edges.len());
        for i in 0..edges.len() {
            for (c, t) in column.iter_mut().zip(&trials) {
                *c = t.energies[i];
            }
            means.push(column.iter().sum::<f64>() / column.len() as f64);
            ensemble.push(ensemble_energy(&column, p.scale));
        }
        let mut candidates: Vec<(usize, usize, f64)> = edges
            .iter()
            .zip(&ensemble)
            .filter(|(_, e)| **e != 0.0)
            .map(|(&(u, v), e)| (u, v, e.abs()))
            .collect();
        if candidates.is_empty() {
            // every edge was shrunk to zero: fix the most confident mean instead
            let mut rng = stream(p.seed, &[FALLBACK, comp, round]);
            let top = means.iter().map(|m| m.abs()).fold(0.0, f64::max);
            let ties: Vec<usize> = (0..edges.len()).filter(|&i| means[i].abs() == top).collect();
            let i = ties[rand::Rng::random_range(&mut rng, 0..ties.len())];
            log::info!("round {round}: all ensemble energies zero, fixing edge {:?} by its mean", edges[i]);
            ensemble[i] = means[i];
            candidates.push((edges[i].0, edges[i].1, 1.0));
        }
        let energy_of = |u: usize, v: usize| {
            let key = (u.min(v), u.max(v));
            ensemble[edges.binary_search(&key).expect("forest edge in graph")]
        };
        let forest = max_spanning_forest(&candidates, &mut stream(p.seed, &[FOREST, comp, round]));
        let mut fixed = 0;
        for tree in &forest.trees {
            for (child, parent) in tree.leaf_to_root() {
                let parity = Parity::from_energy(energy_of(child, parent));
                rec.fix(cur.label(child), cur.label(parent), parity)?;
                fixed += 1;
            }
        }
        let best = trials.iter().map(|t| t.value).fold(f64::NEG_INFINITY, f64::max);
        logs.push(RoundLog {
            round: logs.len(),
            component: comp as usize,
            nodes: cur.num_nodes(),
            edges: cur.num_edges(),
            fixed,
            trials: trials.len(),
            best_objective: best,
        });
        secs.push(start.elapsed().as_secs_f64());
        round += 1;
    }
    // exhaustive search on the residual with the true (unperturbed) weights
    let residual = rec.replay(g)?;
    rec.residual_assignment = Some(brute_force_maxcut(&residual)?.best);
    rec.assemble(g)
}

fn components(g: &Graph) -> Result<Vec<Graph>> {
    g.components().iter().map(|c| g.induced(c)).collect()
}

/// Writes a component labelling into the full labelling by external label.
fn scatter(g: &Graph, part: &Graph, bits: &BitString, out: &mut [u8]) {
    for (i, &label) in part.labels().iter().enumerate() {
        out[g.index_of(label).expect("component label")] = bits.get(i);
    }
}

fn finish(g: &Graph, algorithm: Algorithm, bits: BitString, seed: u64, params: impl Serialize, start: Instant) -> Result<SolveReport> {
    let weight = g.cut_weight(&bits)?;
    Ok(SolveReport {
        algorithm,
        bits,
        weight,
        seed,
        params: serde_json::to_value(params)?,
        rounds: Vec::new(),
        flags: Vec::new(),
        timing: Timing {
            total_seconds: start.elapsed().as_secs_f64(),
            round_seconds: Vec::new(),
        },
    })
}

/// Recursive QRAO: ensemble edge energies over `N` independent trials,
/// parities fixed along a maximum spanning forest, exhaustive search once at
/// most `M` nodes remain. Components are solved independently.
pub fn rqrao_solve(g: &Graph, p: &RqraoParams) -> Result<SolveReport> {
    p.validate()?;
    let start = Instant::now();
    let mut logs = Vec::new();
    let mut secs = Vec::new();
    let mut bits = vec![0u8; g.num_nodes()];
    for (c, part) in components(g)?.iter().enumerate() {
        let b = rqrao_component(part, p, c as u64, &mut logs, &mut secs)?;
        scatter(g, part, &b, &mut bits);
    }
    let mut report = finish(g, Algorithm::Rqrao, BitString::from_bits(bits), p.seed, p, start)?;
    report.rounds = logs;
    report.timing.round_seconds = secs;
    Ok(report)
}

/// `N = 1`: a single trial whose raw edge energies orient one spanning
/// forest.
pub fn tree_rounding_solve(g: &Graph, p: &RqraoParams) -> Result<SolveReport> {
    let p = RqraoParams {
        ensemble: 1,
        ..p.clone()
    };
    rqrao_solve(g, &p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QraoParams {
    pub m: usize,
    pub chi: usize,
    pub optimizer: OptimizerConfig,
    pub seed: u64,
}

impl Default for QraoParams {
    fn default() -> Self {
        QraoParams {
            m: 3,
            chi: 2,
            optimizer: OptimizerConfig::default(),
            seed: 0,
        }
    }
}

/// One optimization of the relaxed Hamiltonian followed by Pauli rounding.
pub fn qrao_solve(g: &Graph, p: &QraoParams) -> Result<SolveReport> {
    check_m(p.m)?;
    let start = Instant::now();
    let mut rng = stream(p.seed, &[TRIAL]);
    let a = assign_paulis(g, p.m, &mut rng)?;
    let mpo = build_mpo(&build_terms(g, &a)?)?;
    let psi = init_mps(a.num_qubits(), p.chi, &mut rng)?;
    let opt = optimize(&psi, &mpo, &p.optimizer)?;
    let mut flags = Vec::new();
    let expectations = if opt.failed() {
        flags.push("optimizer failed; decoded from the initial state".to_string());
        site_expectations(&psi, &a)?
    } else {
        site_expectations(&opt.psi, &a)?
    };
    let bits = decode_bits(&expectations, &mut rng);
    let mut report = finish(g, Algorithm::Qrao, bits, p.seed, p, start)?;
    report.rounds.push(RoundLog {
        round: 0,
        component: 0,
        nodes: g.num_nodes(),
        edges: g.num_edges(),
        fixed: 0,
        trials: 1,
        best_objective: opt.value,
    });
    report.timing.round_seconds.push(report.timing.total_seconds);
    report.flags = flags;
    Ok(report)
}

/// Exhaustive MAX-CUT, per component.
pub fn brute_force_solve(g: &Graph) -> Result<SolveReport> {
    let start = Instant::now();
    let mut bits = vec![0u8; g.num_nodes()];
    for part in components(g)? {
        let b = brute_force_maxcut(&part)?.best;
        scatter(g, &part, &b, &mut bits);
    }
    finish(g, Algorithm::Brute, BitString::from_bits(bits), 0, serde_json::Value::Null, start)
}
