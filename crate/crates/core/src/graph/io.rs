use super::Graph;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

/// Parses the rudy/Gset format: a header `n m` followed by `m` lines `i j w`
/// with 1-based node indices. Blank lines and `#` comments are skipped.
pub fn parse_rudy(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing header".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(Error::Parse {
            line: hline,
            msg: format!("expected \"n m\", got {header:?}"),
        });
    }
    let parse_count = |s: &str| {
        s.parse::<usize>().map_err(|e| Error::Parse {
            line: hline,
            msg: format!("bad count {s:?}: {e}"),
        })
    };
    let n = parse_count(fields[0])?;
    let m = parse_count(fields[1])?;

    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 3 {
            return Err(Error::Parse {
                line,
                msg: format!("expected \"i j w\", got {l:?}"),
            });
        }
        let mut idx = [0usize; 2];
        for (slot, s) in idx.iter_mut().zip(&f[..2]) {
            let v: i64 = s.parse().map_err(|e| Error::Parse {
                line,
                msg: format!("bad node index {s:?}: {e}"),
            })?;
            if v < 1 || v as u64 > n as u64 {
                return Err(Error::NodeOutOfRange {
                    index: v,
                    num_nodes: n,
                    line,
                });
            }
            *slot = (v - 1) as usize;
        }
        let w: f64 = f[2].parse().map_err(|e| Error::Parse {
            line,
            msg: format!("bad weight {:?}: {e}", f[2]),
        })?;
        edges.push((idx[0], idx[1], w));
    }
    if edges.len() != m {
        log::warn!("header announces {m} edges, found {}", edges.len());
    }
    Graph::new(n, edges)
}

pub fn read_rudy(path: impl AsRef<Path>) -> Result<Graph> {
    parse_rudy(&std::fs::read_to_string(path)?)
}

/// Serializes to the rudy format. Labels are dropped; nodes are written by
/// internal position.
pub fn to_rudy(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.num_nodes(), g.num_edges());
    for e in g.edges() {
        if e.w.fract() == 0.0 && e.w.abs() < 1e15 {
            writeln!(out, "{} {} {}", e.u + 1, e.v + 1, e.w as i64).unwrap();
        } else {
            writeln!(out, "{} {} {:?}", e.u + 1, e.v + 1, e.w).unwrap();
        }
    }
    out
}

/// JSON export form `{"nodes": [...], "edges": [[u, v, w], ...]}` using
/// external labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub nodes: Vec<usize>,
    pub edges: Vec<(usize, usize, f64)>,
}

impl From<&Graph> for GraphJson {
    fn from(g: &Graph) -> Self {
        GraphJson {
            nodes: g.labels().to_vec(),
            edges: g
                .edges()
                .iter()
                .map(|e| (g.label(e.u), g.label(e.v), e.w))
                .collect(),
        }
    }
}

impl TryFrom<GraphJson> for Graph {
    type Error = Error;

    fn try_from(j: GraphJson) -> Result<Graph> {
        let mut labels = j.nodes;
        labels.sort_unstable();
        labels.dedup();
        let pos = |x: usize| {
            labels.binary_search(&x).map_err(|_| Error::NodeOutOfRange {
                index: x as i64,
                num_nodes: labels.len(),
                line: 0,
            })
        };
        let edges = j
            .edges
            .iter()
            .map(|&(u, v, w)| Ok((pos(u)?, pos(v)?, w)))
            .collect::<Result<Vec<_>>>()?;
        Graph::with_labels(labels.clone(), edges)
    }
}
