use super::{reduce_graph, BitString, Graph};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Edge parity: positive when both endpoints share a label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Parity {
    Positive,
    Negative,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Positive => 1.0,
            Parity::Negative => -1.0,
        }
    }

    /// Parity predicted by the sign of an edge energy (`> 0` is positive).
    pub fn from_energy(e: f64) -> Self {
        if e > 0.0 {
            Parity::Positive
        } else {
            Parity::Negative
        }
    }

    /// Bit offset `b_removed xor b_kept`.
    pub fn xor(self) -> u8 {
        match self {
            Parity::Positive => 0,
            Parity::Negative => 1,
        }
    }
}

impl From<Parity> for i8 {
    fn from(p: Parity) -> i8 {
        p.sign() as i8
    }
}

impl TryFrom<i8> for Parity {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Parity::Positive),
            -1 => Ok(Parity::Negative),
            other => Err(format!("parity must be +1 or -1, got {other}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityDecision {
    pub removed: usize,
    pub kept: usize,
    pub parity: Parity,
}

/// Ordered parity decisions taken during a recursive solve, plus the graph
/// left over for exhaustive search. Node ids are external labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParityRecord {
    pub decisions: Vec<ParityDecision>,
    pub residual_graph: Graph,
    pub residual_assignment: Option<BitString>,
}

impl ParityRecord {
    pub fn new(graph: Graph) -> Self {
        ParityRecord {
            decisions: Vec::new(),
            residual_graph: graph,
            residual_assignment: None,
        }
    }

    /// Applies a decision to the residual graph and records it.
    pub fn fix(&mut self, removed: usize, kept: usize, parity: Parity) -> Result<()> {
        self.residual_graph = reduce_graph(&self.residual_graph, removed, kept, parity)?;
        self.decisions.push(ParityDecision {
            removed,
            kept,
            parity,
        });
        Ok(())
    }

    /// Records a decision for a node with no incident edges left. Such a node
    /// contributes nothing to the cut, so it is detached with positive parity.
    pub fn detach_isolated(&mut self, removed: usize, kept: usize) -> Result<()> {
        let g = &self.residual_graph;
        let r = g
            .index_of(removed)
            .ok_or_else(|| Error::Contract(format!("node {removed} not in graph")))?;
        if g.edges().iter().any(|e| e.u == r || e.v == r) {
            return Err(Error::Contract(format!("node {removed} is not isolated")));
        }
        let mut labels = g.labels().to_vec();
        labels.remove(r);
        let remap = |i: usize| if i > r { i - 1 } else { i };
        let edges: Vec<_> = g.edges().iter().map(|e| (remap(e.u), remap(e.v), e.w)).collect();
        self.residual_graph = Graph::with_labels(labels, edges)?;
        self.decisions.push(ParityDecision {
            removed,
            kept,
            parity: Parity::Positive,
        });
        Ok(())
    }

    /// Replays the decisions on `original`, returning the resulting graph.
    pub fn replay(&self, original: &Graph) -> Result<Graph> {
        let mut g = original.clone();
        for d in &self.decisions {
            let r = g
                .index_of(d.removed)
                .ok_or_else(|| Error::Contract(format!("node {} not in graph", d.removed)))?;
            let isolated = !g.edges().iter().any(|e| e.u == r || e.v == r);
            if isolated {
                let mut rec = ParityRecord::new(g);
                rec.detach_isolated(d.removed, d.kept)?;
                g = rec.residual_graph;
            } else {
                g = reduce_graph(&g, d.removed, d.kept, d.parity)?;
            }
        }
        Ok(g)
    }

    /// Full labelling of `original` from the residual assignment and the
    /// decisions, replayed from last to first.
    pub fn assemble(&self, original: &Graph) -> Result<BitString> {
        let residual = self
            .residual_assignment
            .as_ref()
            .ok_or_else(|| Error::Contract("residual assignment missing".into()))?;
        if residual.len() != self.residual_graph.num_nodes() {
            return Err(Error::Dimension {
                expected: self.residual_graph.num_nodes(),
                got: residual.len(),
            });
        }
        let mut bits = vec![None; original.num_nodes()];
        let slot = |label: usize| {
            original
                .index_of(label)
                .ok_or_else(|| Error::Contract(format!("node {label} not in original graph")))
        };
        for (i, &label) in self.residual_graph.labels().iter().enumerate() {
            bits[slot(label)?] = Some(residual.get(i));
        }
        for d in self.decisions.iter().rev() {
            let kept = bits[slot(d.kept)?]
                .ok_or_else(|| Error::Contract(format!("node {} undetermined", d.kept)))?;
            bits[slot(d.removed)?] = Some(kept ^ d.parity.xor());
        }
        let bits = bits
            .into_iter()
            .enumerate()
            .map(|(i, b)| b.ok_or_else(|| Error::Contract(format!("node index {i} undetermined"))))
            .collect::<Result<Vec<u8>>>()?;
        Ok(BitString::from_bits(bits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assemble_follows_decisions() {
        // path 0-1-2-3
        let g = Graph::new(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let mut rec = ParityRecord::new(g.clone());
        rec.fix(0, 1, Parity::Negative).unwrap();
        rec.fix(1, 2, Parity::Negative).unwrap();
        assert_eq!(rec.residual_graph.labels(), &[2, 3]);
        rec.residual_assignment = Some("01".parse().unwrap());
        let b = rec.assemble(&g).unwrap();
        assert_eq!(b.to_string(), "0101");
        assert_eq!(rec.replay(&g).unwrap(), rec.residual_graph);
    }

    #[test]
    fn parity_serializes_as_sign() {
        assert_eq!(serde_json::to_string(&Parity::Negative).unwrap(), "-1");
        let p: Parity = serde_json::from_str("1").unwrap();
        assert_eq!(p, Parity::Positive);
    }
}
