//! Directed acyclic graphs over nodes `0..n`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    parents: Vec<Vec<usize>>,
    order: Vec<usize>,
}

impl Dag {
    /// Parent lists keep the given order; kernel weights follow it.
    pub fn new(parents: Vec<Vec<usize>>) -> Result<Self> {
        let n = parents.len();
        for (i, ps) in parents.iter().enumerate() {
            for (k, &p) in ps.iter().enumerate() {
                if p >= n {
                    return Err(Error::InvalidGraph(format!(
                        "parent {p} of node {i} out of range"
                    )));
                }
                if p == i {
                    return Err(Error::InvalidGraph(format!("self loop at node {i}")));
                }
                if ps[..k].contains(&p) {
                    return Err(Error::InvalidGraph(format!(
                        "repeated parent {p} of node {i}"
                    )));
                }
            }
        }
        let order = topological_order(&parents)
            .ok_or_else(|| Error::InvalidGraph("graph has a cycle".into()))?;
        Ok(Dag { parents, order })
    }

    /// From `(from, to)` edges; parent lists sorted by index.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut parents = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a},{b}) out of range")));
            }
            parents[b].push(a);
        }
        for ps in &mut parents {
            ps.sort_unstable();
        }
        Dag::new(parents)
    }

    pub fn empty(n: usize) -> Self {
        Dag::new(vec![Vec::new(); n]).expect("edgeless graph is acyclic")
    }

    /// Complete graph in which each node's parents are its predecessors
    /// in `order`.
    pub fn complete(order: &[usize]) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &i in order {
            if i >= n || seen[i] {
                return Err(Error::InvalidGraph("order is not a permutation".into()));
            }
            seen[i] = true;
        }
        let mut parents = vec![Vec::new(); n];
        for (k, &i) in order.iter().enumerate() {
            let mut ps = order[..k].to_vec();
            ps.sort_unstable();
            parents[i] = ps;
        }
        Dag::new(parents)
    }

    pub fn n(&self) -> usize {
        self.parents.len()
    }

    pub fn parents(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.order
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.parents[to].contains(&from)
    }

    /// Every pair of distinct nodes is adjacent.
    pub fn is_complete(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (i + 1..n).all(|j| self.has_edge(i, j) || self.has_edge(j, i)))
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, ps) in self.parents.iter().enumerate() {
            for &p in ps {
                out.push((p, i));
            }
        }
        out.sort_unstable();
        out
    }
}

/// Kahn's algorithm, smallest ready index first.
fn topological_order(parents: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = parents.len();
    let mut indeg: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut children = vec![Vec::new(); n];
    for (i, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(i);
        }
    }
    let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for &c in &children[i] {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                ready.insert(c);
            }
        }
    }
    (order.len() == n).then_some(order)
}
