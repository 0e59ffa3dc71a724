use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;

use super::generate::watts_strogatz;
use super::Graph;
use crate::stats::{fit_power_law, spearman};
use crate::{Error, Result, RngStream};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NetworkMetrics {
    /// Mean local clustering; nodes of degree < 2 count as 0.
    pub clustering: f64,
    /// Global transitivity `3 * triangles / connected triples`.
    pub transitivity: f64,
    /// Mean shortest-path length over ordered pairs of the largest
    /// component.
    pub path_length: f64,
    /// `degree_histogram[d]` nodes have degree `d`.
    pub degree_histogram: Vec<usize>,
    pub connected: bool,
    pub largest_component: usize,
    /// False for `n < 3`, where clustering is reported as 0.
    pub clustering_defined: bool,
}

fn local_clustering(g: &Graph, u: usize) -> (f64, usize, usize) {
    let nb = &g.adjacency[u];
    let d = nb.len();
    if d < 2 {
        return (0.0, 0, 0);
    }
    let mut links = 0;
    for (a, &x) in nb.iter().enumerate() {
        for &y in &nb[a + 1..] {
            if g.has_edge(x, y) {
                links += 1;
            }
        }
    }
    let pairs = d * (d - 1) / 2;
    (links as f64 / pairs as f64, links, pairs)
}

fn components(g: &Graph) -> Vec<usize> {
    let mut label = vec![usize::MAX; g.n];
    let mut next = 0;
    for s in 0..g.n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = next;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &v in &g.adjacency[u] {
                if label[v] == usize::MAX {
                    label[v] = next;
                    queue.push_back(v);
                }
            }
        }
        next += 1;
    }
    label
}

/// Sum of BFS distances from `s` to every node reachable from it.
fn distance_sum(g: &Graph, s: usize, dist: &mut [u32], queue: &mut VecDeque<usize>) -> u64 {
    dist.iter_mut().for_each(|d| *d = u32::MAX);
    dist[s] = 0;
    queue.clear();
    queue.push_back(s);
    let mut total = 0u64;
    while let Some(u) = queue.pop_front() {
        let du = dist[u];
        total += du as u64;
        for &v in &g.adjacency[u] {
            if dist[v] == u32::MAX {
                dist[v] = du + 1;
                queue.push_back(v);
            }
        }
    }
    total
}

/// Exact clustering and all-pairs BFS path length.
pub fn metrics(g: &Graph) -> Result<NetworkMetrics> {
    if g.n == 0 {
        return Err(Error::argument("graph has no nodes"));
    }
    let clustering_defined = g.n >= 3;
    let (mut c_sum, mut tri, mut triples) = (0.0, 0usize, 0usize);
    if clustering_defined {
        for u in 0..g.n {
            let (c, l, p) = local_clustering(g, u);
            c_sum += c;
            tri += l;
            triples += p;
        }
    }
    let labels = components(g);
    let mut sizes = vec![0usize; labels.iter().max().map_or(0, |m| m + 1)];
    for &l in &labels {
        sizes[l] += 1;
    }
    let (big, &largest) = sizes.iter().enumerate().max_by_key(|&(i, s)| (*s, usize::MAX - i)).expect("n >= 1");
    let sources: Vec<usize> = (0..g.n).filter(|&u| labels[u] == big).collect();
    let total: u64 = sources
        .par_iter()
        .map_init(
            || (vec![u32::MAX; g.n], VecDeque::new()),
            |(dist, queue), &s| distance_sum(g, s, dist, queue),
        )
        .sum();
    let pairs = largest as f64 * (largest as f64 - 1.0);
    let max_deg = g.degrees().into_iter().max().unwrap_or(0);
    let mut degree_histogram = vec![0; max_deg + 1];
    for d in g.degrees() {
        degree_histogram[d] += 1;
    }
    Ok(NetworkMetrics {
        clustering: if clustering_defined { c_sum / g.n as f64 } else { 0.0 },
        transitivity: if triples > 0 { tri as f64 / triples as f64 } else { 0.0 },
        path_length: if largest > 1 { total as f64 / pairs } else { 0.0 },
        degree_histogram,
        connected: largest == g.n,
        largest_component: largest,
        clustering_defined,
    })
}

/// `(d, fraction of nodes with degree >= d)` for every occurring degree.
pub fn degree_ccdf(g: &Graph) -> Vec<(usize, f64)> {
    let mut deg = g.degrees();
    deg.sort_unstable();
    let n = deg.len() as f64;
    let mut out = Vec::new();
    let mut i = 0;
    while i < deg.len() {
        out.push((deg[i], (deg.len() - i) as f64 / n));
        let d = deg[i];
        while i < deg.len() && deg[i] == d {
            i += 1;
        }
    }
    out
}

/// Log-log slope (and standard error) of the degree CCDF over the
/// occurring degrees in `[d_min, d_max]`.
pub fn degree_ccdf_slope(g: &Graph, d_min: usize, d_max: usize) -> Result<(f64, f64)> {
    let (x, y): (Vec<f64>, Vec<f64>) = degree_ccdf(g)
        .into_iter()
        .filter(|&(d, _)| d >= d_min && d <= d_max)
        .map(|(d, p)| (d as f64, p))
        .unzip();
    fit_power_law(&x, &y)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub p: f64,
    /// Seed-averaged clustering and path length.
    pub clustering: f64,
    pub path_length: f64,
    pub c_ratio: f64,
    pub l_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SmallWorldScan {
    pub rows: Vec<ScanRow>,
    /// Smallest `p` with `L/L0 < 0.5` and `C/C0 > 0.7`, if any.
    pub window_p: Option<f64>,
    /// Rank correlation of mean path length with `p`.
    pub path_length_spearman: f64,
}

/// Watts-Strogatz ensemble averages normalized by the ring lattice. Graph
/// `s` at `p_values[i]` uses `rng.substream(i).substream(s)`.
pub fn small_world_scan(n: usize, k: usize, p_values: &[f64], seeds: usize, rng: &RngStream) -> Result<SmallWorldScan> {
    if !p_values.contains(&0.0) {
        return Err(Error::argument("p_values must include 0"));
    }
    if seeds < 10 {
        return Err(Error::argument("need at least 10 seeds"));
    }
    let jobs: Vec<(usize, usize)> = (0..p_values.len()).flat_map(|i| (0..seeds).map(move |s| (i, s))).collect();
    let results = jobs
        .iter()
        .map(|&(i, s)| {
            let ws = watts_strogatz(n, k, p_values[i], &mut rng.substream(i as u64).substream(s as u64))?;
            let m = metrics(&ws.graph)?;
            Ok((m.clustering, m.path_length))
        })
        .collect::<Result<Vec<_>>>()?;
    let means: Vec<(f64, f64)> = results
        .chunks(seeds)
        .map(|c| {
            let k = c.len() as f64;
            (c.iter().map(|r| r.0).sum::<f64>() / k, c.iter().map(|r| r.1).sum::<f64>() / k)
        })
        .collect();
    let zero = p_values.iter().position(|&p| p == 0.0).expect("checked above");
    let (c0, l0) = means[zero];
    let rows: Vec<ScanRow> = p_values
        .iter()
        .zip(&means)
        .map(|(&p, &(c, l))| ScanRow { p, clustering: c, path_length: l, c_ratio: c / c0, l_ratio: l / l0 })
        .collect();
    let window_p = rows
        .iter()
        .filter(|r| r.l_ratio < 0.5 && r.c_ratio > 0.7)
        .map(|r| r.p)
        .fold(None, |acc: Option<f64>, p| Some(acc.map_or(p, |a| a.min(p))));
    let ps: Vec<f64> = rows.iter().map(|r| r.p).collect();
    let ls: Vec<f64> = rows.iter().map(|r| r.path_length).collect();
    Ok(SmallWorldScan { rows, window_p, path_length_spearman: spearman(&ps, &ls) })
}
