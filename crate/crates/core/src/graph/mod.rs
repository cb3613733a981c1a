//! Weighted undirected graphs, cut evaluation and the reduction step that
//! fixes one edge parity.

mod forest;
mod generate;
mod io;
mod parity;

pub use forest::{max_spanning_forest, RootedForest, RootedTree};
pub use generate::{generate, GeneratorSpec, WeightDist};
pub use io::{parse_rudy, read_rudy, to_rudy, GraphJson};
pub use parity::{Parity, ParityDecision, ParityRecord};

use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// An undirected edge between internal node indices, `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Weighted undirected simple graph.
///
/// Nodes are addressed internally by position `0..num_nodes`; each position
/// carries a stable external label (strictly increasing) that survives
/// reductions. Edges are stored once per unordered pair, sorted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    labels: Vec<usize>,
    edges: Vec<Edge>,
}

impl Graph {
    /// Graph on nodes `0..num_nodes`. Self-loops are dropped with a warning and
    /// parallel edges are merged by summing weights.
    pub fn new(num_nodes: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        Self::with_labels((0..num_nodes).collect(), edges)
    }

    /// Graph whose internal node `i` carries external label `labels[i]`.
    pub fn with_labels(
        labels: Vec<usize>,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        if labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Contract("node labels must be strictly increasing".into()));
        }
        let n = labels.len();
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::NodeOutOfRange {
                    index: u.max(v) as i64,
                    num_nodes: n,
                    line: 0,
                });
            }
            if u == v {
                log::warn!("dropping self-loop on node {u}");
                continue;
            }
            *merged.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        }
        let edges = merged
            .into_iter()
            .map(|((u, v), w)| Edge { u, v, w })
            .collect();
        Ok(Graph { labels, edges })
    }

    pub fn num_nodes(&self) -> usize {
        self.labels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> usize {
        self.labels[index]
    }

    /// Internal index of an external label.
    pub fn index_of(&self, label: usize) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        let key = (u.min(v), u.max(v));
        self.edges
            .binary_search_by(|e| (e.u, e.v).cmp(&key))
            .ok()
            .map(|i| self.edges[i].w)
    }

    /// Neighbor lists `(neighbor, weight)` per internal node.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.num_nodes()];
        for e in &self.edges {
            adj[e.u].push((e.v, e.w));
            adj[e.v].push((e.u, e.w));
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.num_nodes()];
        for e in &self.edges {
            d[e.u] += 1;
            d[e.v] += 1;
        }
        d
    }

    /// Same graph with every weight replaced by `f(weight)`.
    pub fn map_weights(&self, mut f: impl FnMut(f64) -> f64) -> Graph {
        Graph {
            labels: self.labels.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge { w: f(e.w), ..*e })
                .collect(),
        }
    }

    /// Connected components as lists of internal indices, each sorted.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.num_nodes()];
        let mut out = Vec::new();
        for s in 0..self.num_nodes() {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut head = 0;
            while head < comp.len() {
                let x = comp[head];
                head += 1;
                for &(y, _) in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn cut_weight(&self, b: &BitString) -> Result<f64> {
        cut_weight(self, b)
    }

    /// Subgraph induced by sorted internal indices, keeping their labels.
    pub fn induced(&self, nodes: &[usize]) -> Result<Graph> {
        let pos = |x: usize| nodes.binary_search(&x).ok();
        let labels = nodes.iter().map(|&i| self.labels[i]).collect();
        let edges: Vec<_> = self
            .edges
            .iter()
            .filter_map(|e| Some((pos(e.u)?, pos(e.v)?, e.w)))
            .collect();
        Graph::with_labels(labels, edges)
    }
}

/// Node labelling `b_j in {0, 1}`, indexed by internal node position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct BitString(Vec<u8>);

impl BitString {
    pub fn zeros(n: usize) -> Self {
        BitString(vec![0; n])
    }

    pub fn from_bits(bits: Vec<u8>) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "bits must be 0 or 1");
        BitString(bits)
    }

    /// Bits of `value`, least significant bit as node 0.
    pub fn from_index(value: u64, n: usize) -> Self {
        BitString((0..n).map(|i| ((value >> i) & 1) as u8).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, bit: u8) {
        assert!(bit <= 1);
        self.0[i] = bit;
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn flipped(&self) -> Self {
        BitString(self.0.iter().map(|b| b ^ 1).collect())
    }

    /// Representative of `{b, flip(b)}` with node 0 labelled 0.
    pub fn canonical(&self) -> Self {
        if self.0.first() == Some(&1) {
            self.flipped()
        } else {
            self.clone()
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    /// Parses `"0101"` with the first character as node 0.
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidParameter(format!("invalid bit '{other}'"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(BitString)
    }
}

impl From<BitString> for String {
    fn from(b: BitString) -> String {
        b.to_string()
    }
}

impl TryFrom<String> for BitString {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Total weight of edges whose endpoints carry different labels.
pub fn cut_weight(g: &Graph, b: &BitString) -> Result<f64> {
    if b.len() != g.num_nodes() {
        return Err(Error::Dimension {
            expected: g.num_nodes(),
            got: b.len(),
        });
    }
    Ok(g.edges
        .iter()
        .filter(|e| b.get(e.u) != b.get(e.v))
        .map(|e| e.w)
        .sum())
}

/// Adds independent `Uniform[-amplitude, amplitude]` noise to every weight.
pub fn perturb_weights<R: Rng + ?Sized>(g: &Graph, amplitude: f64, rng: &mut R) -> Graph {
    assert!(amplitude >= 0.0, "amplitude must be non-negative");
    if amplitude == 0.0 {
        return g.clone();
    }
    g.map_weights(|w| w + rng.random_range(-amplitude..=amplitude))
}

/// Perturbs only weights that are exactly zero, leaving the rest untouched.
pub fn perturb_zero_weights<R: Rng + ?Sized>(g: &Graph, amplitude: f64, rng: &mut R) -> Graph {
    if amplitude == 0.0 {
        return g.clone();
    }
    g.map_weights(|w| {
        if w == 0.0 {
            let mut xi = 0.0;
            while xi == 0.0 {
                xi = rng.random_range(-amplitude..=amplitude);
            }
            xi
        } else {
            w
        }
    })
}

/// Deletes `removed` after constraining `b_removed = b_kept` (positive parity)
/// or `b_removed != b_kept` (negative parity).
///
/// Each other edge `(removed, l)` is folded into `(kept, l)` with its weight
/// multiplied by the parity sign. Zero weights produced by the fold are kept.
/// Arguments are external labels.
pub fn reduce_graph(g: &Graph, removed: usize, kept: usize, parity: Parity) -> Result<Graph> {
    let r = g
        .index_of(removed)
        .ok_or_else(|| Error::Contract(format!("node {removed} not in graph")))?;
    let k = g
        .index_of(kept)
        .ok_or_else(|| Error::Contract(format!("node {kept} not in graph")))?;
    if g.edge_weight(r, k).is_none() {
        return Err(Error::Contract(format!("edge ({removed}, {kept}) not in graph")));
    }
    let s = parity.sign();
    let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for e in &g.edges {
        let (mut u, mut v, mut w) = (e.u, e.v, e.w);
        if u == r || v == r {
            let other = if u == r { v } else { u };
            if other == k {
                continue;
            }
            u = k;
            v = other;
            w *= s;
        }
        *merged.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
    }
    let remap = |i: usize| if i > r { i - 1 } else { i };
    let mut labels = g.labels.clone();
    labels.remove(r);
    let edges = merged
        .into_iter()
        .map(|((u, v), w)| Edge {
            u: remap(u),
            v: remap(v),
            w,
        })
        .collect();
    Ok(Graph { labels, edges })
}

/// Constant `c` with `CW(original, lift(b')) = CW(reduced, b') + c` for the
/// reduction `reduce_graph(g, removed, kept, parity)`.
pub fn reduction_offset(g: &Graph, removed: usize, parity: Parity) -> Option<f64> {
    let r = g.index_of(removed)?;
    if parity == Parity::Positive {
        return Some(0.0);
    }
    Some(
        g.edges
            .iter()
            .filter(|e| e.u == r || e.v == r)
            .map(|e| e.w)
            .sum(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    #[test]
    fn cut_weight_examples() {
        let g = triangle();
        assert_eq!(cut_weight(&g, &"000".parse().unwrap()).unwrap(), 0.0);
        assert_eq!(cut_weight(&g, &"001".parse().unwrap()).unwrap(), 2.0);
        assert!(matches!(
            cut_weight(&g, &"00".parse().unwrap()),
            Err(Error::Dimension { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn parallel_edges_merge_and_self_loops_drop() {
        let g = Graph::new(3, [(0, 1, 1.0), (1, 0, 2.5), (2, 2, 4.0)]).unwrap();
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.edge_weight(0, 1), Some(3.5));
    }

    #[test]
    fn reduce_path() {
        // a-b-c, remove b keep c with positive parity -> (a, c) weight 1
        let g = Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let r = reduce_graph(&g, 1, 2, Parity::Positive).unwrap();
        assert_eq!(r.labels(), &[0, 2]);
        assert_eq!(r.num_edges(), 1);
        assert_eq!(r.edge_weight(0, 1), Some(1.0));
    }

    #[test]
    fn reduce_cancels_to_zero_and_keeps_edge() {
        // kept=0, removed=1, l=2: w_{0,2}=2, w_{1,2}=-2
        let g = Graph::new(3, [(0, 1, 1.0), (0, 2, 2.0), (1, 2, -2.0)]).unwrap();
        let r = reduce_graph(&g, 1, 0, Parity::Positive).unwrap();
        assert_eq!(r.num_edges(), 1);
        assert_eq!(r.edge_weight(0, 1), Some(0.0));
    }

    #[test]
    fn reduce_requires_edge() {
        let g = Graph::new(3, [(0, 1, 1.0)]).unwrap();
        assert!(matches!(
            reduce_graph(&g, 2, 0, Parity::Positive),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn perturbation_bounds_and_determinism() {
        let g = triangle();
        let a = perturb_weights(&g, 1e-5, &mut crate::rng::seeded(3));
        let b = perturb_weights(&g, 1e-5, &mut crate::rng::seeded(3));
        assert_eq!(a, b);
        for (e, f) in g.edges().iter().zip(a.edges()) {
            assert!((e.w - f.w).abs() <= 1e-5);
        }
        assert_eq!(perturb_weights(&g, 0.0, &mut crate::rng::seeded(3)), g);
    }

    #[test]
    fn bitstring_roundtrip() {
        let b: BitString = "00001101101010".parse().unwrap();
        assert_eq!(b.to_string(), "00001101101010");
        assert_eq!(b.flipped().canonical(), b);
        assert_eq!(BitString::from_index(0b110, 3).to_string(), "011");
    }
}
