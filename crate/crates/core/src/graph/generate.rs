use super::Graph;
use crate::error::{Error, Result};
use crate::rng::seeded;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightDist {
    /// Uniform over {+1, -1}.
    #[default]
    Pm1,
    /// All weights 1.
    Unit,
}

impl WeightDist {
    fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            WeightDist::Pm1 => {
                if rng.random_bool(0.5) {
                    1.0
                } else {
                    -1.0
                }
            }
            WeightDist::Unit => 1.0,
        }
    }
}

/// Graph family description, also accepted as JSON:
/// `{"kind": "3regular", "n": 100, "weights": "pm1", "seed": 7}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    /// `floor(density * n(n-1)/2)` distinct edges chosen uniformly.
    Random {
        n: usize,
        density: f64,
        #[serde(default)]
        weights: WeightDist,
        #[serde(default)]
        seed: u64,
    },
    #[serde(rename = "3regular")]
    ThreeRegular {
        n: usize,
        #[serde(default)]
        weights: WeightDist,
        #[serde(default)]
        seed: u64,
    },
    /// `g x g` periodic grid plus one hub node adjacent to every grid node.
    ToricPlusHub {
        g: usize,
        #[serde(default)]
        weights: WeightDist,
        #[serde(default)]
        seed: u64,
    },
}

impl GeneratorSpec {
    pub fn seed(&self) -> u64 {
        match *self {
            GeneratorSpec::Random { seed, .. }
            | GeneratorSpec::ThreeRegular { seed, .. }
            | GeneratorSpec::ToricPlusHub { seed, .. } => seed,
        }
    }

    pub fn with_seed(mut self, s: u64) -> Self {
        match &mut self {
            GeneratorSpec::Random { seed, .. }
            | GeneratorSpec::ThreeRegular { seed, .. }
            | GeneratorSpec::ToricPlusHub { seed, .. } => *seed = s,
        }
        self
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<Graph> {
    let mut rng = seeded(spec.seed());
    match *spec {
        GeneratorSpec::Random {
            n, density, weights, ..
        } => {
            if !(0.0..=1.0).contains(&density) {
                return Err(Error::InvalidParameter(format!("density {density} not in [0, 1]")));
            }
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .collect();
            let m = (density * pairs.len() as f64).floor() as usize;
            let chosen = rand::seq::index::sample(&mut rng, pairs.len(), m);
            let mut idx: Vec<usize> = chosen.into_vec();
            idx.sort_unstable();
            let edges: Vec<_> = idx
                .into_iter()
                .map(|i| (pairs[i].0, pairs[i].1, weights.draw(&mut rng)))
                .collect();
            Graph::new(n, edges)
        }
        GeneratorSpec::ThreeRegular { n, weights, .. } => {
            if n < 4 || n % 2 == 1 {
                return Err(Error::Generation(format!(
                    "no simple 3-regular graph on {n} nodes"
                )));
            }
            let pairs = random_regular(n, 3, &mut rng)?;
            let edges: Vec<_> = pairs
                .into_iter()
                .map(|(u, v)| (u, v, weights.draw(&mut rng)))
                .collect();
            Graph::new(n, edges)
        }
        GeneratorSpec::ToricPlusHub { g, weights, .. } => {
            if g < 3 {
                return Err(Error::InvalidParameter(format!(
                    "torus side {g} too small for a simple graph (need >= 3)"
                )));
            }
            let at = |r: usize, c: usize| (r % g) * g + (c % g);
            let mut edges = Vec::with_capacity(3 * g * g);
            for r in 0..g {
                for c in 0..g {
                    edges.push((at(r, c), at(r, c + 1), weights.draw(&mut rng)));
                    edges.push((at(r, c), at(r + 1, c), weights.draw(&mut rng)));
                }
            }
            let hub = g * g;
            for i in 0..hub {
                edges.push((i, hub, weights.draw(&mut rng)));
            }
            Graph::new(hub + 1, edges)
        }
    }
}

/// Uniform-ish random simple `d`-regular graph by the pairing model with
/// restarts.
fn random_regular<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<Vec<(usize, usize)>> {
    const MAX_ATTEMPTS: usize = 10_000;
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    'attempt: for _ in 0..MAX_ATTEMPTS {
        stubs.shuffle(rng);
        let mut seen = BTreeSet::new();
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
        }
        return Ok(seen.into_iter().collect());
    }
    Err(Error::Generation(format!(
        "pairing model found no simple {d}-regular graph on {n} nodes"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_regular_degrees_and_weights() {
        let spec = GeneratorSpec::ThreeRegular {
            n: 10,
            weights: WeightDist::Pm1,
            seed: 3,
        };
        let g = generate(&spec).unwrap();
        assert!(g.degrees().iter().all(|&d| d == 3));
        assert!(g.edges().iter().all(|e| e.w.abs() == 1.0));
        assert_eq!(g, generate(&spec).unwrap());
        assert!(generate(&GeneratorSpec::ThreeRegular { n: 7, weights: WeightDist::Pm1, seed: 0 }).is_err());
    }

    #[test]
    fn toric_plus_hub_counts() {
        let g = generate(&GeneratorSpec::ToricPlusHub {
            g: 3,
            weights: WeightDist::Unit,
            seed: 0,
        })
        .unwrap();
        assert_eq!(g.num_nodes(), 10);
        assert_eq!(g.num_edges(), 27);
        assert_eq!(g.degrees()[9], 9);
    }

    #[test]
    fn random_density() {
        let g = generate(&GeneratorSpec::Random {
            n: 14,
            density: 0.5,
            weights: WeightDist::Pm1,
            seed: 1,
        })
        .unwrap();
        assert_eq!(g.num_edges(), 45);
    }

    #[test]
    fn spec_json_form() {
        let s: GeneratorSpec =
            serde_json::from_str(r#"{"kind":"3regular","n":100,"weights":"pm1","seed":7}"#).unwrap();
        assert_eq!(
            s,
            GeneratorSpec::ThreeRegular {
                n: 100,
                weights: WeightDist::Pm1,
                seed: 7
            }
        );
    }
}
