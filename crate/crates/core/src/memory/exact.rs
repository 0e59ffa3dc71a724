use rayon::prelude::*;
use serde::Serialize;

use super::{energy, CouplingMatrix, SpinConfig};
use crate::{Error, Result};

/// Largest `N` for exhaustive enumeration.
pub const MAX_ENUMERATION_N: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThermoState {
    pub temperature: f64,
    pub log_z: f64,
    /// `exp(log_z)`; may overflow to infinity where `log_z` does not.
    pub partition_z: f64,
    /// `-T ln Z`.
    pub free_energy: f64,
    /// Boltzmann average of `H`.
    pub mean_energy: f64,
}

fn check_enumerable(c: &CouplingMatrix) -> Result<()> {
    if c.n > MAX_ENUMERATION_N {
        return Err(Error::Capability(format!(
            "exhaustive enumeration supports N <= {MAX_ENUMERATION_N}, got {}",
            c.n
        )));
    }
    Ok(())
}

/// Configurations as bit masks, bit `i` set when spin `i` is `+1`.
fn config_of(mask: u32, n: usize) -> SpinConfig {
    SpinConfig { spins: (0..n).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect() }
}

/// Enumeration covers the configurations with spin 0 down (the other half
/// follows by `H(s) = H(-s)`), split into chunks over the highest spins;
/// each chunk walks its low spins in Gray-code order with O(N) energy
/// updates.
struct Chunk {
    base: u32,
    low_bits: usize,
}

fn chunks(n: usize) -> Vec<Chunk> {
    let free = n - 1;
    let split = free.min(6);
    let low_bits = free - split;
    (0..1u32 << split)
        .map(|k| Chunk { base: k << (1 + low_bits), low_bits })
        .collect()
}

/// Calls `f(mask, energy)` for every configuration of the chunk.
fn walk(c: &CouplingMatrix, chunk: &Chunk, mut f: impl FnMut(u32, f64)) {
    let n = c.n;
    let mut mask = chunk.base;
    let mut s = config_of(mask, n);
    let mut h = c.fields(&s);
    let mut e = energy(&s, c).expect("sizes match");
    f(mask, e);
    for t in 1u32..(1u32 << chunk.low_bits) {
        let i = 1 + t.trailing_zeros() as usize;
        e += 2.0 * s.spins[i] as f64 * h[i];
        super::flip(&mut s, &mut h, c, i);
        mask ^= 1 << i;
        f(mask, e);
    }
}

/// True when configuration `a` precedes `b` in lexicographic order of the
/// spin vectors (`-1 < +1`, spin 0 first).
fn lex_less(a: u32, b: u32) -> bool {
    let d = a ^ b;
    d != 0 && a >> d.trailing_zeros() & 1 == 0
}

/// Exact partition function by enumeration (log-sum-exp accumulation).
pub fn exact_thermo(couplings: &CouplingMatrix, temperature: f64) -> Result<ThermoState> {
    check_enumerable(couplings)?;
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::domain("temperature must be > 0"));
    }
    let beta = 1.0 / temperature;
    // Per chunk: (max log-weight m, sum e^{v-m}, sum H e^{v-m}).
    let parts: Vec<(f64, f64, f64)> = chunks(couplings.n)
        .par_iter()
        .map(|chunk| {
            let (mut m, mut s, mut sh) = (f64::NEG_INFINITY, 0.0, 0.0);
            walk(couplings, chunk, |_, e| {
                let v = -beta * e;
                if v > m {
                    let r = (m - v).exp();
                    s = s * r + 1.0;
                    sh = sh * r + e;
                    m = v;
                } else {
                    let w = (v - m).exp();
                    s += w;
                    sh += w * e;
                }
            });
            (m, s, sh)
        })
        .collect();
    let m = parts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let (mut s, mut sh) = (0.0, 0.0);
    for &(pm, ps, psh) in &parts {
        let r = (pm - m).exp();
        s += ps * r;
        sh += psh * r;
    }
    let log_z = std::f64::consts::LN_2 + m + s.ln();
    Ok(ThermoState {
        temperature,
        log_z,
        partition_z: log_z.exp(),
        free_energy: -temperature * log_z,
        mean_energy: sh / s,
    })
}

/// Normalized Boltzmann probabilities of all `2^N` configurations, indexed
/// by bit mask (bit `i` set when spin `i` is `+1`). `N <= 20`.
pub fn boltzmann_weights(couplings: &CouplingMatrix, temperature: f64) -> Result<Vec<f64>> {
    if couplings.n > 20 {
        return Err(Error::Capability("boltzmann_weights supports N <= 20".into()));
    }
    if !(temperature > 0.0) {
        return Err(Error::domain("temperature must be > 0"));
    }
    let n = couplings.n;
    let log_w: Vec<f64> = (0..1u32 << n)
        .map(|mask| -energy(&config_of(mask, n), couplings).expect("sizes match") / temperature)
        .collect();
    let m = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = log_w.iter().map(|v| (v - m).exp()).collect();
    let total: f64 = w.iter().sum();
    Ok(w.into_iter().map(|v| v / total).collect())
}

/// Exhaustive ground state over the `2^(N-1)` configurations with spin 0
/// down; among (numerically) degenerate minima the lexicographically first
/// spin vector wins.
pub fn ground_state_bruteforce(couplings: &CouplingMatrix) -> Result<(SpinConfig, f64)> {
    check_enumerable(couplings)?;
    let tol = 1e-9 * (1.0 + couplings.max_abs() * couplings.n as f64);
    let better = |(ma, ea): (u32, f64), (mb, eb): (u32, f64)| ea < eb - tol || (ea <= eb + tol && lex_less(ma, mb));
    let best = chunks(couplings.n)
        .par_iter()
        .map(|chunk| {
            let mut best = (u32::MAX, f64::INFINITY);
            walk(couplings, chunk, |mask, e| {
                if best.0 == u32::MAX || better((mask, e), best) {
                    best = (mask, e);
                }
            });
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .reduce(|a, b| if better(b, a) { b } else { a })
        .expect("at least one chunk");
    let config = config_of(best.0, couplings.n);
    let e = energy(&config, couplings)?;
    Ok((config, e))
}
