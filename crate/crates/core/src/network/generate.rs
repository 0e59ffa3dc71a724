use serde::Serialize;

use super::Graph;
use crate::{Error, Result, RngStream};

/// Ring of `n` nodes, each joined to its `k / 2` nearest neighbours on
/// either side.
pub fn ring_lattice(n: usize, k: usize) -> Result<Graph> {
    if k < 2 || k % 2 != 0 || n <= k {
        return Err(Error::argument(format!("need n > k >= 2 with k even, got n = {n}, k = {k}")));
    }
    let mut g = Graph::new(n);
    for u in 0..n {
        for j in 1..=k / 2 {
            g.add_edge(u, (u + j) % n);
        }
    }
    Ok(g)
}

#[derive(Clone, Debug, Serialize)]
pub struct WattsStrogatz {
    pub graph: Graph,
    pub rewired: usize,
    /// Rewires abandoned because the node already touched every other node.
    pub skipped: usize,
}

/// Ring lattice whose edges `(u, u + j)`, taken for `j = 1..=k/2` and then
/// `u = 0..n`, each move their far end with probability `p` to a uniformly
/// chosen node that is neither `u` nor already a neighbour of `u`.
pub fn watts_strogatz(n: usize, k: usize, p: f64, rng: &mut RngStream) -> Result<WattsStrogatz> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("p must lie in [0, 1], got {p}")));
    }
    let mut g = ring_lattice(n, k)?;
    let (mut rewired, mut skipped) = (0, 0);
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            if !rng.bernoulli(p) || !g.has_edge(u, v) {
                continue;
            }
            if g.degree(u) >= n - 1 {
                skipped += 1;
                continue;
            }
            let w = loop {
                let w = rng.index(n);
                if w != u && !g.has_edge(u, w) {
                    break w;
                }
            };
            g.remove_edge(u, v);
            g.add_edge(u, w);
            rewired += 1;
        }
    }
    Ok(WattsStrogatz { graph: g, rewired, skipped })
}

/// Growth from a clique on nodes `0..=m`; each later node links to `m`
/// distinct existing nodes chosen with probability proportional to degree.
pub fn barabasi_albert(n: usize, m: usize, rng: &mut RngStream) -> Result<Graph> {
    if m < 1 || n <= m {
        return Err(Error::argument(format!("need n > m >= 1, got n = {n}, m = {m}")));
    }
    let mut g = Graph::new(n);
    // Every edge end appears once, so a uniform pick is degree-proportional.
    let mut ends: Vec<usize> = Vec::with_capacity(2 * m * n);
    for u in 0..=m {
        for v in u + 1..=m {
            g.add_edge(u, v);
            ends.push(u);
            ends.push(v);
        }
    }
    let mut chosen = Vec::with_capacity(m);
    for v in m + 1..n {
        chosen.clear();
        while chosen.len() < m {
            let t = if ends.is_empty() { rng.index(v) } else { ends[rng.index(ends.len())] };
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            g.add_edge(v, t);
            ends.push(v);
            ends.push(t);
        }
    }
    Ok(g)
}
