use crate::graph::BitString;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Rqrao,
    Qrao,
    Rqaoa,
    Rank2,
    Brute,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Rqrao,
        Algorithm::Qrao,
        Algorithm::Rqaoa,
        Algorithm::Rank2,
        Algorithm::Brute,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Rqrao => "rqrao",
            Algorithm::Qrao => "qrao",
            Algorithm::Rqaoa => "rqaoa",
            Algorithm::Rank2 => "rank2",
            Algorithm::Brute => "brute",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| crate::Error::InvalidParameter(format!("unknown algorithm '{s}'")))
    }
}

/// One recursion round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundLog {
    pub round: usize,
    pub component: usize,
    pub nodes: usize,
    pub edges: usize,
    /// Parities fixed this round.
    pub fixed: usize,
    /// Trials that produced usable energies.
    pub trials: usize,
    /// Best relaxed objective among the trials.
    pub best_objective: f64,
}

/// Wall-clock measurements, kept apart so the rest of a report is
/// reproducible byte for byte.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub round_seconds: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub bits: BitString,
    /// Cut weight of `bits` on the input graph.
    pub weight: f64,
    pub seed: u64,
    pub params: serde_json::Value,
    pub rounds: Vec<RoundLog>,
    pub flags: Vec<String>,
    pub timing: Timing,
}

impl SolveReport {
    /// Telemetry rows `round,nodes,edges,fixed,best_objective,seconds`.
    pub fn telemetry_csv(&self) -> String {
        let mut out = String::from("round,nodes,edges,fixed,best_objective,seconds\n");
        for (r, s) in self.rounds.iter().zip(&self.timing.round_seconds) {
            writeln!(out, "{},{},{},{},{},{:.6}", r.round, r.nodes, r.edges, r.fixed, r.best_objective, s).unwrap();
        }
        out
    }
}
