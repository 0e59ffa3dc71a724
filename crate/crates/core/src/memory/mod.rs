//! Ising-type networks `H = -sum_{i<k} J_ik s_i s_k`: Hopfield memories with
//! Hebbian couplings and Sherrington-Kirkpatrick spin glasses.

mod anneal;
mod exact;

use serde::Serialize;

use crate::stats::standard_normal;
use crate::{Error, Result, RngStream};

pub use anneal::{simulated_annealing, AnnealRun, AnnealSchedule};
pub use exact::{boltzmann_weights, exact_thermo, ground_state_bruteforce, ThermoState, MAX_ENUMERATION_N};

/// Configuration of `N` Ising spins, each `-1` or `+1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SpinConfig {
    pub spins: Vec<i8>,
}

impl SpinConfig {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::argument("spins must be -1 or +1"));
        }
        Ok(Self { spins })
    }

    pub fn uniform(n: usize, value: i8) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn random(n: usize, rng: &mut RngStream) -> Self {
        Self { spins: (0..n).map(|_| if rng.bernoulli(0.5) { 1 } else { -1 }).collect() }
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    /// `m = (1/N) sum_i s_i t_i`.
    pub fn overlap(&self, other: &SpinConfig) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::argument("configurations differ in size"));
        }
        let dot: i64 = self.spins.iter().zip(&other.spins).map(|(&a, &b)| (a * b) as i64).sum();
        Ok(dot as f64 / self.len() as f64)
    }

    pub fn flipped(&self) -> SpinConfig {
        Self { spins: self.spins.iter().map(|s| -s).collect() }
    }

    /// Copy with `k` distinct randomly chosen spins reversed.
    pub fn corrupted(&self, k: usize, rng: &mut RngStream) -> Result<SpinConfig> {
        if k > self.len() {
            return Err(Error::argument("cannot flip more spins than exist"));
        }
        let mut idx: Vec<usize> = (0..self.len()).collect();
        rng.shuffle(&mut idx);
        let mut out = self.clone();
        for &i in &idx[..k] {
            out.spins[i] = -out.spins[i];
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum CouplingOrigin {
    Hebbian { patterns: usize },
    SkGaussian { seed: u64, stream_id: u64 },
    Explicit,
}

/// Symmetric coupling matrix with zero diagonal, stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CouplingMatrix {
    pub n: usize,
    pub j: Vec<f64>,
    pub origin: CouplingOrigin,
}

impl CouplingMatrix {
    /// Validates symmetry (exact) and the zero diagonal.
    pub fn new(n: usize, j: Vec<f64>) -> Result<Self> {
        if n == 0 || j.len() != n * n {
            return Err(Error::argument("coupling matrix must be n x n with n >= 1"));
        }
        for i in 0..n {
            if j[i * n + i] != 0.0 {
                return Err(Error::argument("coupling diagonal must be zero"));
            }
            for k in 0..i {
                if j[i * n + k] != j[k * n + i] || !j[i * n + k].is_finite() {
                    return Err(Error::argument("couplings must be finite and symmetric"));
                }
            }
        }
        Ok(Self { n, j, origin: CouplingOrigin::Explicit })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, vec![0.0; n * n])
    }

    /// Every pair coupled with strength `value`.
    pub fn uniform(n: usize, value: f64) -> Result<Self> {
        let mut j = vec![value; n * n];
        for i in 0..n {
            j[i * n + i] = 0.0;
        }
        Self::new(n, j)
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.j[i * self.n + k]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.j[i * self.n..(i + 1) * self.n]
    }

    pub fn max_abs(&self) -> f64 {
        self.j.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Local fields `h_i = sum_k J_ik s_k`.
    pub fn fields(&self, config: &SpinConfig) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(&config.spins).map(|(j, &s)| j * s as f64).sum())
            .collect()
    }

    /// `(i, k, J_ik)` for `i < k`.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |k| (i, k)))
            .map(|(i, k)| (i, k, self.get(i, k)))
            .collect()
    }
}

/// `J_ik = (1/N) sum_mu xi_i^mu xi_k^mu`, zero diagonal.
pub fn hebbian_couplings(patterns: &[SpinConfig]) -> Result<CouplingMatrix> {
    let n = patterns.first().ok_or_else(|| Error::argument("need at least one pattern"))?.len();
    if n == 0 || patterns.iter().any(|p| p.len() != n) {
        return Err(Error::argument("patterns must share a nonzero length"));
    }
    let mut j = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..i {
            let s: i64 = patterns.iter().map(|p| (p.spins[i] * p.spins[k]) as i64).sum();
            let v = s as f64 / n as f64;
            j[i * n + k] = v;
            j[k * n + i] = v;
        }
    }
    Ok(CouplingMatrix { n, j, origin: CouplingOrigin::Hebbian { patterns: patterns.len() } })
}

/// Independent `N(0, 1/N)` couplings for `i < k`, mirrored.
pub fn sk_couplings(n: usize, rng: &mut RngStream) -> Result<CouplingMatrix> {
    if n < 2 {
        return Err(Error::argument("SK instance needs n >= 2"));
    }
    let origin = CouplingOrigin::SkGaussian { seed: rng.seed(), stream_id: rng.stream_id() };
    let sigma = (1.0 / n as f64).sqrt();
    let mut j = vec![0.0; n * n];
    for i in 0..n {
        for k in i + 1..n {
            let v = sigma * standard_normal(rng);
            j[i * n + k] = v;
            j[k * n + i] = v;
        }
    }
    Ok(CouplingMatrix { n, j, origin })
}

fn check_size(config: &SpinConfig, couplings: &CouplingMatrix) -> Result<()> {
    if config.len() != couplings.n {
        return Err(Error::argument(format!(
            "configuration has {} spins, couplings expect {}",
            config.len(),
            couplings.n
        )));
    }
    Ok(())
}

/// `H = -sum_{i<k} J_ik s_i s_k`.
pub fn energy(config: &SpinConfig, couplings: &CouplingMatrix) -> Result<f64> {
    check_size(config, couplings)?;
    let n = couplings.n;
    let mut h = 0.0;
    for i in 0..n {
        let row = couplings.row(i);
        let si = config.spins[i] as f64;
        for k in i + 1..n {
            h -= row[k] * si * config.spins[k] as f64;
        }
    }
    Ok(h)
}

/// Outcome of zero-temperature descent.
#[derive(Clone, Debug, Serialize)]
pub struct ZeroTRun {
    pub config: SpinConfig,
    pub energy: f64,
    pub sweeps: usize,
    /// No single flip lowers the energy of `config`.
    pub converged: bool,
    /// Energy after each sweep, starting with the initial energy.
    pub energy_trace: Vec<f64>,
    /// Overlap with the starting configuration after each sweep.
    pub overlap_trace: Vec<f64>,
}

/// Asynchronous descent: each sweep visits the spins in a fresh random
/// order and flips a spin only if that strictly lowers `H`. Stops after the
/// first sweep without a flip or after `max_sweeps`.
pub fn zero_t_dynamics(
    config: &SpinConfig,
    couplings: &CouplingMatrix,
    rng: &mut RngStream,
    max_sweeps: usize,
) -> Result<ZeroTRun> {
    check_size(config, couplings)?;
    if max_sweeps == 0 {
        return Err(Error::argument("max_sweeps must be >= 1"));
    }
    let n = couplings.n;
    let mut s = config.clone();
    let mut h = couplings.fields(&s);
    let mut e = energy(&s, couplings)?;
    let mut energy_trace = vec![e];
    let mut overlap_trace = vec![1.0];
    let mut order: Vec<usize> = (0..n).collect();
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < max_sweeps {
        sweeps += 1;
        rng.shuffle(&mut order);
        let mut flips = 0;
        for &i in &order {
            let delta = 2.0 * s.spins[i] as f64 * h[i];
            if delta < 0.0 {
                flip(&mut s, &mut h, couplings, i);
                e += delta;
                flips += 1;
            }
        }
        energy_trace.push(e);
        overlap_trace.push(s.overlap(config)?);
        if flips == 0 {
            converged = true;
            break;
        }
    }
    Ok(ZeroTRun { energy: energy(&s, couplings)?, config: s, sweeps, converged, energy_trace, overlap_trace })
}

#[inline]
pub(crate) fn flip(s: &mut SpinConfig, h: &mut [f64], couplings: &CouplingMatrix, i: usize) {
    s.spins[i] = -s.spins[i];
    let d = 2.0 * s.spins[i] as f64;
    for (hk, j) in h.iter_mut().zip(couplings.row(i)) {
        *hk += d * j;
    }
}

/// True when no single spin flip lowers the energy.
pub fn is_local_minimum(config: &SpinConfig, couplings: &CouplingMatrix) -> Result<bool> {
    check_size(config, couplings)?;
    let h = couplings.fields(config);
    Ok(config.spins.iter().zip(&h).all(|(&s, &f)| 2.0 * s as f64 * f >= 0.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RetrievalTrial {
    /// Index of the cued pattern.
    pub target: usize,
    pub initial_overlap: f64,
    pub final_overlap: f64,
    pub sweeps: usize,
    pub converged: bool,
}

/// Stores `patterns` random patterns of `n` spins, cues one of them (chosen
/// uniformly) with `corrupted` spins reversed and runs zero-temperature
/// descent from the cue.
pub fn hopfield_retrieval(
    n: usize,
    patterns: usize,
    corrupted: usize,
    rng: &mut RngStream,
    max_sweeps: usize,
) -> Result<RetrievalTrial> {
    if patterns == 0 || n < 2 {
        return Err(Error::argument("need n >= 2 and at least one pattern"));
    }
    let stored: Vec<SpinConfig> = (0..patterns).map(|_| SpinConfig::random(n, rng)).collect();
    let c = hebbian_couplings(&stored)?;
    let target = rng.index(patterns);
    let cue = stored[target].corrupted(corrupted, rng)?;
    let run = zero_t_dynamics(&cue, &c, rng, max_sweeps)?;
    Ok(RetrievalTrial {
        target,
        initial_overlap: cue.overlap(&stored[target])?,
        final_overlap: run.config.overlap(&stored[target])?,
        sweeps: run.sweeps,
        converged: run.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_pattern_energy() {
        let xi = SpinConfig::new(vec![1, -1, -1, 1, 1]).unwrap();
        let c = hebbian_couplings(std::slice::from_ref(&xi)).unwrap();
        assert!((energy(&xi, &c).unwrap() + 2.0).abs() < 1e-12);
        assert!((energy(&xi.flipped(), &c).unwrap() + 2.0).abs() < 1e-12);
    }

    #[test]
    fn hebbian_rejects_mismatch() {
        let a = SpinConfig::new(vec![1, 1]).unwrap();
        let b = SpinConfig::new(vec![1, 1, 1]).unwrap();
        assert!(hebbian_couplings(&[a, b]).is_err());
        assert!(hebbian_couplings(&[]).is_err());
    }

    #[test]
    fn invalid_spin_values() {
        assert!(SpinConfig::new(vec![1, 0, -1]).is_err());
    }

    #[test]
    fn random_patterns_are_fixed_points() {
        let mut rng = RngStream::new(1, 0);
        let patterns: Vec<_> = (0..2).map(|_| SpinConfig::random(50, &mut rng)).collect();
        let c = hebbian_couplings(&patterns).unwrap();
        for p in &patterns {
            assert!(is_local_minimum(p, &c).unwrap());
            let run = zero_t_dynamics(p, &c, &mut rng, 10).unwrap();
            assert_eq!(run.sweeps, 1);
            assert!(run.converged);
            assert_eq!(&run.config, p);
        }
    }

    #[test]
    fn corrupted_pattern_is_retrieved() {
        let mut rng = RngStream::new(2, 0);
        let patterns: Vec<_> = (0..2).map(|_| SpinConfig::random(50, &mut rng)).collect();
        let c = hebbian_couplings(&patterns).unwrap();
        let cue = patterns[0].corrupted(5, &mut rng).unwrap();
        let run = zero_t_dynamics(&cue, &c, &mut rng, 100).unwrap();
        assert!(run.config.overlap(&patterns[0]).unwrap() >= 0.95);
        assert!(run.energy_trace.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn retrieval_trial_bookkeeping() {
        let t = hopfield_retrieval(50, 2, 5, &mut RngStream::new(5, 0), 100).unwrap();
        assert!(t.target < 2);
        assert_eq!(t.initial_overlap, 0.8);
        assert!(t.converged);
        let clean = hopfield_retrieval(40, 1, 0, &mut RngStream::new(6, 0), 10).unwrap();
        assert_eq!((clean.final_overlap, clean.sweeps), (1.0, 1));
        assert!(hopfield_retrieval(40, 0, 0, &mut RngStream::new(6, 0), 10).is_err());
        assert!(hopfield_retrieval(40, 1, 41, &mut RngStream::new(6, 0), 10).is_err());
    }

    #[test]
    fn sk_statistics() {
        let c = sk_couplings(1000, &mut RngStream::new(3, 0)).unwrap();
        let off: Vec<f64> = c.triplets().into_iter().map(|t| t.2).collect();
        let m = off.len() as f64;
        let mean = off.iter().sum::<f64>() / m;
        let var = off.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
        assert!((var - 0.001).abs() < 1e-4, "{var}");
        assert!(mean.abs() < 3.0 * (0.001 / m).sqrt());
        assert!(CouplingMatrix::new(1000, c.j.clone()).is_ok());
    }

    #[test]
    fn pair_energies() {
        let c = CouplingMatrix::new(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(energy(&SpinConfig::new(vec![1, 1]).unwrap(), &c).unwrap(), -1.0);
        assert_eq!(energy(&SpinConfig::new(vec![1, -1]).unwrap(), &c).unwrap(), 1.0);
        let z = CouplingMatrix::zeros(7).unwrap();
        assert_eq!(energy(&SpinConfig::random(7, &mut RngStream::new(1, 0)), &z).unwrap(), 0.0);
        assert!(energy(&SpinConfig::uniform(3, 1).unwrap(), &c).is_err());
    }

    #[test]
    fn energy_matches_double_loop() {
        let mut rng = RngStream::new(4, 0);
        let c = sk_couplings(30, &mut rng).unwrap();
        let s = SpinConfig::random(30, &mut rng);
        let mut oracle = 0.0;
        for i in 0..30 {
            for k in 0..30 {
                if i < k {
                    oracle += -c.j[i * 30 + k] * (s.spins[i] * s.spins[k]) as f64;
                }
            }
        }
        assert!((energy(&s, &c).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_patterns_are_local_minima() {
        // Rows of a Sylvester-Hadamard matrix are mutually orthogonal.
        let n = 64;
        let row = |r: usize| {
            SpinConfig::new((0..n).map(|c| if (r & c).count_ones() % 2 == 0 { 1 } else { -1 }).collect()).unwrap()
        };
        let patterns: Vec<_> = [1, 2, 3].iter().map(|&r| row(r)).collect();
        let c = hebbian_couplings(&patterns).unwrap();
        for p in &patterns {
            assert!(is_local_minimum(p, &c).unwrap());
        }
    }

    proptest! {
        #[test]
        fn spin_flip_symmetry(seed in 0u64..100_000, n in 2usize..40) {
            let mut rng = RngStream::new(seed, 0);
            let c = sk_couplings(n, &mut rng).unwrap();
            let s = SpinConfig::random(n, &mut rng);
            prop_assert_eq!(energy(&s, &c).unwrap(), energy(&s.flipped(), &c).unwrap());
        }

        #[test]
        fn descent_never_raises_energy(seed in 0u64..100_000) {
            let mut rng = RngStream::new(seed, 0);
            let c = sk_couplings(24, &mut rng).unwrap();
            let s = SpinConfig::random(24, &mut rng);
            let run = zero_t_dynamics(&s, &c, &mut rng, 200).unwrap();
            prop_assert!(run.energy_trace.windows(2).all(|w| w[1] <= w[0] + 1e-12));
            prop_assert!(run.converged);
            prop_assert!(is_local_minimum(&run.config, &c).unwrap());
        }
    }
}
