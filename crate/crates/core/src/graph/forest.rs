use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};

/// One spanning tree, rooted, with nodes listed in breadth-first order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootedTree {
    pub root: usize,
    /// child -> (parent, edge weight)
    pub parent: BTreeMap<usize, (usize, f64)>,
    pub bfs_order: Vec<usize>,
}

impl RootedTree {
    /// `(child, parent)` pairs ordered so that every child is visited before
    /// its parent (reverse breadth-first order).
    pub fn leaf_to_root(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bfs_order
            .iter()
            .rev()
            .filter(|&&v| v != self.root)
            .map(move |&v| (v, self.parent[&v].0))
    }

    pub fn num_edges(&self) -> usize {
        self.parent.len()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RootedForest {
    pub trees: Vec<RootedTree>,
}

impl RootedForest {
    pub fn num_edges(&self) -> usize {
        self.trees.iter().map(RootedTree::num_edges).sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.trees
            .iter()
            .flat_map(|t| t.parent.values())
            .map(|&(_, w)| w)
            .sum()
    }
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Maximum-weight spanning forest (Kruskal) over arbitrary node ids.
///
/// Ties are broken by the smaller `(u, v)` pair. Each tree gets a root drawn
/// uniformly from its nodes; trees are ordered by their smallest node id.
pub fn max_spanning_forest<R: Rng + ?Sized>(edges: &[(usize, usize, f64)], rng: &mut R) -> RootedForest {
    let mut ids: Vec<usize> = edges.iter().flat_map(|&(u, v, _)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    let pos = |x: usize| ids.binary_search(&x).unwrap();

    let mut sorted: Vec<(usize, usize, f64)> = edges
        .iter()
        .map(|&(u, v, w)| (u.min(v), u.max(v), w))
        .collect();
    sorted.sort_by(|a, b| b.2.total_cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));

    let mut dsu = DisjointSet::new(ids.len());
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); ids.len()];
    for (u, v, w) in sorted {
        let (pu, pv) = (pos(u), pos(v));
        if pu != pv && dsu.union(pu, pv) {
            adj[pu].push((pv, w));
            adj[pv].push((pu, w));
        }
    }
    for list in &mut adj {
        list.sort_by_key(|&(x, _)| x);
    }

    let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..ids.len() {
        let r = dsu.find(i);
        comps.entry(r).or_default().push(i);
    }
    let mut comps: Vec<Vec<usize>> = comps.into_values().collect();
    comps.sort_by_key(|c| c[0]);

    let trees = comps
        .into_iter()
        .map(|members| {
            let root = members[rng.random_range(0..members.len())];
            let mut parent = BTreeMap::new();
            let mut order = vec![ids[root]];
            let mut seen = vec![false; ids.len()];
            seen[root] = true;
            let mut queue = VecDeque::from([root]);
            while let Some(x) = queue.pop_front() {
                for &(y, w) in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        parent.insert(ids[y], (ids[x], w));
                        order.push(ids[y]);
                        queue.push_back(y);
                    }
                }
            }
            RootedTree {
                root: ids[root],
                parent,
                bfs_order: order,
            }
        })
        .collect();
    RootedForest { trees }
}
