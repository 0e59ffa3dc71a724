//! Small-world and scale-free graphs and their structural metrics.

mod generate;
mod metrics;

use std::fmt::Write;

use serde::Serialize;

use crate::{Error, Result};

pub use generate::{barabasi_albert, ring_lattice, watts_strogatz, WattsStrogatz};
pub use metrics::{degree_ccdf, degree_ccdf_slope, metrics, small_world_scan, NetworkMetrics, ScanRow, SmallWorldScan};

/// Undirected simple graph on nodes `0..n`; neighbour lists are sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Graph {
    pub n: usize,
    pub adjacency: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Self { n, adjacency: vec![Vec::new(); n] }
    }

    /// Builds a graph from `(u, v)` pairs, rejecting loops and repeats.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::new(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::argument(format!("edge ({u}, {v}) outside 0..{n}")));
            }
            if !g.add_edge(u, v) {
                return Err(Error::argument(format!("edge ({u}, {v}) is a loop or duplicate")));
            }
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Inserts `{u, v}`; false (and no change) for loops and existing edges.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        if u == v {
            return false;
        }
        match self.adjacency[u].binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.adjacency[u].insert(pos, v);
                let pos = self.adjacency[v].binary_search(&u).unwrap_err();
                self.adjacency[v].insert(pos, u);
                true
            }
        }
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        match self.adjacency[u].binary_search(&v) {
            Ok(pos) => {
                self.adjacency[u].remove(pos);
                let pos = self.adjacency[v].binary_search(&u).expect("symmetric adjacency");
                self.adjacency[v].remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
            .collect()
    }

    /// Checks symmetry, absence of loops and duplicates, and sorted lists.
    pub fn check_invariants(&self) -> Result<()> {
        for (u, nb) in self.adjacency.iter().enumerate() {
            if nb.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::argument(format!("neighbours of {u} unsorted or repeated")));
            }
            for &v in nb {
                if v == u || v >= self.n || !self.has_edge(v, u) {
                    return Err(Error::argument(format!("bad edge ({u}, {v})")));
                }
            }
        }
        Ok(())
    }

    /// One `u v` line per edge, 0-indexed.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        for (u, v) in self.edges() {
            writeln!(s, "{u} {v}").expect("write to string");
        }
        s
    }
}
