//! Bak-Tang-Wiesenfeld sandpile on a rectangle with open edges.

use serde::Serialize;

use crate::spectrum::{periodogram_with, Detrend, PowerSpectrum};
use crate::stats::linear_fit;
use crate::{Error, Result, RngStream};

/// Cell `(row, col)`.
pub type Site = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SandGrid {
    pub width: usize,
    pub height: usize,
    /// Row-major grain counts.
    pub heights: Vec<u32>,
    /// A cell with at least this many grains topples, sending one grain to
    /// each of its four neighbours (grains pushed off the edge are lost).
    pub threshold: u32,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Avalanche {
    /// Total topplings.
    pub size: u64,
    /// Distinct cells that toppled.
    pub area: u64,
    /// Parallel relaxation rounds.
    pub duration: u64,
    /// Grains lost over the edge.
    pub dissipated: u64,
}

impl SandGrid {
    /// Empty grid with threshold 4.
    pub fn new(width: usize, height: usize) -> Result<Self> {
        Self::with_threshold(width, height, 4)
    }

    pub fn with_threshold(width: usize, height: usize, threshold: u32) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::argument("grid dimensions must be >= 1"));
        }
        if threshold < 4 {
            return Err(Error::argument("threshold below 4 would drive heights negative"));
        }
        Ok(Self { width, height, heights: vec![0; width * height], threshold })
    }

    pub fn get(&self, site: Site) -> u32 {
        self.heights[site.0 * self.width + site.1]
    }

    pub fn total_grains(&self) -> u64 {
        self.heights.iter().map(|&h| h as u64).sum()
    }

    pub fn mean_height(&self) -> f64 {
        self.total_grains() as f64 / self.heights.len() as f64
    }

    pub fn is_stable(&self) -> bool {
        self.heights.iter().all(|&h| h < self.threshold)
    }

    fn index(&self, site: Site) -> Result<usize> {
        if site.0 >= self.height || site.1 >= self.width {
            return Err(Error::argument(format!(
                "site {site:?} outside {}x{} grid",
                self.height, self.width
            )));
        }
        Ok(site.0 * self.width + site.1)
    }

    pub fn center(&self) -> Site {
        (self.height / 2, self.width / 2)
    }
}

/// Adds one grain at `site` and relaxes the grid.
pub fn drop_and_relax(grid: &mut SandGrid, site: Site) -> Result<Avalanche> {
    let i = grid.index(site)?;
    Ok(relax(grid, i, &mut Scratch::new(grid), None))
}

struct Scratch {
    stamp: Vec<u64>,
    queued: Vec<u64>,
    epoch: u64,
    round: Vec<usize>,
    next: Vec<usize>,
}

impl Scratch {
    fn new(grid: &SandGrid) -> Self {
        let n = grid.heights.len();
        Self { stamp: vec![0; n], queued: vec![0; n], epoch: 0, round: Vec::new(), next: Vec::new() }
    }
}

/// Relaxes in parallel rounds: every cell unstable at the start of a round
/// topples once in that round.
fn relax(grid: &mut SandGrid, i: usize, s: &mut Scratch, mut activity: Option<&mut Vec<f64>>) -> Avalanche {
    grid.heights[i] += 1;
    let mut av = Avalanche::default();
    let th = grid.threshold;
    if grid.heights[i] < th {
        return av;
    }
    let (w, h) = (grid.width, grid.height);
    s.epoch += 1;
    s.round.clear();
    s.round.push(i);
    while !s.round.is_empty() {
        av.duration += 1;
        s.next.clear();
        let round_mark = av.duration + s.epoch * (1 << 32);
        for &c in &s.round {
            grid.heights[c] -= 4;
            av.size += 1;
            if s.stamp[c] != s.epoch {
                s.stamp[c] = s.epoch;
                av.area += 1;
            }
            let (r, col) = (c / w, c % w);
            let neighbours = [
                (r > 0).then(|| c - w),
                (r + 1 < h).then(|| c + w),
                (col > 0).then(|| c - 1),
                (col + 1 < w).then(|| c + 1),
            ];
            for nb in neighbours {
                match nb {
                    Some(n) => {
                        grid.heights[n] += 1;
                        if grid.heights[n] >= th && s.queued[n] != round_mark {
                            s.queued[n] = round_mark;
                            s.next.push(n);
                        }
                    }
                    None => av.dissipated += 1,
                }
            }
        }
        for &c in &s.round {
            if grid.heights[c] >= th && s.queued[c] != round_mark {
                s.queued[c] = round_mark;
                s.next.push(c);
            }
        }
        // A cell raised early in the round may topple later in it.
        let heights = &grid.heights;
        s.next.retain(|&c| heights[c] >= th);
        if let Some(a) = activity.as_mut() {
            a.push(s.round.len() as f64);
        }
        std::mem::swap(&mut s.round, &mut s.next);
    }
    av
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SitePolicy {
    Uniform,
    Center,
}

#[derive(Clone, Debug, Serialize)]
pub struct DriveRecord {
    pub avalanches: Vec<Avalanche>,
    /// Topplings per drop.
    pub activity_per_drop: Vec<f64>,
    /// Topplings per relaxation round, rounds of successive drops
    /// concatenated, with a single zero for each drop that toppled nothing.
    pub activity_per_round: Vec<f64>,
    /// Mean height after each drop.
    pub mean_height: Vec<f64>,
}

/// Drops `n_drops` grains and records every avalanche.
pub fn drive(grid: &mut SandGrid, rng: &mut RngStream, n_drops: usize, policy: SitePolicy) -> Result<DriveRecord> {
    if n_drops == 0 {
        return Err(Error::argument("n_drops must be >= 1"));
    }
    let mut scratch = Scratch::new(grid);
    let mut rec = DriveRecord {
        avalanches: Vec::with_capacity(n_drops),
        activity_per_drop: Vec::with_capacity(n_drops),
        activity_per_round: Vec::with_capacity(n_drops),
        mean_height: Vec::with_capacity(n_drops),
    };
    let cells = grid.heights.len() as f64;
    let mut grains = grid.total_grains();
    let center = grid.index(grid.center())?;
    for _ in 0..n_drops {
        let i = match policy {
            SitePolicy::Uniform => rng.index(grid.heights.len()),
            SitePolicy::Center => center,
        };
        let av = relax(grid, i, &mut scratch, Some(&mut rec.activity_per_round));
        if av.size == 0 {
            rec.activity_per_round.push(0.0);
        }
        grains = grains + 1 - av.dissipated;
        rec.avalanches.push(av);
        rec.activity_per_drop.push(av.size as f64);
        rec.mean_height.push(grains as f64 / cells);
    }
    Ok(rec)
}

/// Drops `drops` in their given order and in `permutations - 1` random
/// orders; true when every order ends in the same configuration.
pub fn abelian_check(grid: &SandGrid, drops: &[Site], rng: &mut RngStream, permutations: usize) -> Result<bool> {
    if permutations < 2 {
        return Err(Error::argument("permutations must be >= 2"));
    }
    let run = |order: &[Site]| -> Result<Vec<u32>> {
        let mut g = grid.clone();
        let mut scratch = Scratch::new(&g);
        for &site in order {
            let i = g.index(site)?;
            relax(&mut g, i, &mut scratch, None);
        }
        Ok(g.heights)
    };
    let reference = run(drops)?;
    let mut order = drops.to_vec();
    for _ in 1..permutations {
        rng.shuffle(&mut order);
        if run(&order)? != reference {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(s, P(size >= s))` at every distinct nonzero avalanche size.
pub fn size_ccdf(avalanches: &[Avalanche]) -> Vec<(u64, f64)> {
    let mut sizes: Vec<u64> = avalanches.iter().map(|a| a.size).filter(|&s| s > 0).collect();
    sizes.sort_unstable();
    let n = avalanches.len() as f64;
    let mut out = Vec::new();
    let mut i = 0;
    while i < sizes.len() {
        let s = sizes[i];
        out.push((s, (sizes.len() - i) as f64 / n));
        while i < sizes.len() && sizes[i] == s {
            i += 1;
        }
    }
    out
}

/// Log-log slope of the CCDF over `[s_min, s_max]`, read at 10 points per
/// decade. Returns `(slope, stderr)`.
pub fn ccdf_slope(avalanches: &[Avalanche], s_min: u64, s_max: u64) -> Result<(f64, f64)> {
    if s_min == 0 || s_max <= s_min {
        return Err(Error::argument("need 0 < s_min < s_max"));
    }
    let mut sizes: Vec<u64> = avalanches.iter().map(|a| a.size).collect();
    sizes.sort_unstable();
    let n = sizes.len() as f64;
    let decades = (s_max as f64 / s_min as f64).log10();
    let points = (10.0 * decades).round() as usize + 1;
    let (mut lx, mut ly) = (Vec::new(), Vec::new());
    for k in 0..points {
        let s = s_min as f64 * 10f64.powf(k as f64 / 10.0);
        let above = sizes.len() - sizes.partition_point(|&v| (v as f64) < s);
        if above > 0 {
            lx.push(s.ln());
            ly.push((above as f64 / n).ln());
        }
    }
    if lx.len() < 3 {
        return Err(Error::Fit("too few avalanches in the requested size range".into()));
    }
    let fit = linear_fit(&lx, &ly)?;
    Ok((fit.slope, fit.slope_stderr))
}

/// Spectrum of an activity series with low-versus-high frequency summary.
#[derive(Clone, Debug, Serialize)]
pub struct ActivitySpectrum {
    pub spectrum: PowerSpectrum,
    /// Mean power in the lowest tenth of nonzero frequencies divided by the
    /// mean power in the highest tenth.
    pub low_high_ratio: f64,
    /// Log-log slope of power against frequency (reported, not asserted).
    pub exponent: f64,
}

pub fn activity_spectrum(series: &[f64], segments: usize) -> Result<ActivitySpectrum> {
    let spectrum = periodogram_with(series, 1.0, segments, Detrend::Mean)?;
    let bins = spectrum.power.len() - 1;
    let k = (bins / 10).max(1);
    let low = spectrum.power[1..=k].iter().sum::<f64>() / k as f64;
    let high = spectrum.power[bins + 1 - k..].iter().sum::<f64>() / k as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = spectrum.frequencies[1..]
        .iter()
        .zip(&spectrum.power[1..])
        .filter(|(_, &p)| p > 0.0)
        .map(|(f, p)| (f.ln(), p.ln()))
        .unzip();
    let exponent = linear_fit(&lx, &ly).map(|f| f.slope).unwrap_or(f64::NAN);
    Ok(ActivitySpectrum { low_high_ratio: low / high, exponent, spectrum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_topple_on_three_by_three() {
        let mut g = SandGrid::new(3, 3).unwrap();
        for _ in 0..3 {
            assert_eq!(drop_and_relax(&mut g, (1, 1)).unwrap().size, 0);
        }
        let av = drop_and_relax(&mut g, (1, 1)).unwrap();
        assert_eq!(av, Avalanche { size: 1, area: 1, duration: 1, dissipated: 0 });
        assert_eq!(g.heights, vec![0, 1, 0, 1, 0, 1, 0, 1, 0]);
    }

    #[test]
    fn quiet_drop() {
        let mut g = SandGrid::new(4, 4).unwrap();
        g.heights.iter_mut().for_each(|h| *h = 2);
        assert_eq!(drop_and_relax(&mut g, (0, 3)).unwrap(), Avalanche::default());
    }

    #[test]
    fn corner_topple_dissipates_two() {
        let mut g = SandGrid::new(3, 3).unwrap();
        g.heights[0] = 3;
        let av = drop_and_relax(&mut g, (0, 0)).unwrap();
        assert_eq!(av.dissipated, 2);
        assert_eq!(g.total_grains(), 2);
    }

    #[test]
    fn out_of_bounds_site() {
        let mut g = SandGrid::new(3, 3).unwrap();
        assert!(drop_and_relax(&mut g, (3, 0)).is_err());
    }

    #[test]
    fn drive_conserves_and_stays_stable() {
        let mut g = SandGrid::new(16, 16).unwrap();
        let mut rng = RngStream::new(1, 0);
        let mut before = g.total_grains();
        for _ in 0..50 {
            let rec = drive(&mut g, &mut rng, 200, SitePolicy::Uniform).unwrap();
            let lost: u64 = rec.avalanches.iter().map(|a| a.dissipated).sum();
            assert_eq!(before + 200, g.total_grains() + lost);
            assert!(g.is_stable());
            for a in &rec.avalanches {
                assert!(a.area <= a.size && a.duration <= a.size);
            }
            before = g.total_grains();
        }
    }

    #[test]
    fn round_series_sums_to_drop_series() {
        let mut g = SandGrid::new(16, 16).unwrap();
        let rec = drive(&mut g, &mut RngStream::new(2, 0), 20_000, SitePolicy::Uniform).unwrap();
        let a: f64 = rec.activity_per_drop.iter().sum();
        let b: f64 = rec.activity_per_round.iter().sum();
        assert_eq!(a, b);
        let rounds: u64 = rec.avalanches.iter().map(|a| a.duration.max(1)).sum();
        assert_eq!(rounds as usize, rec.activity_per_round.len());
    }

    #[test]
    fn stationary_mean_height() {
        let mut g = SandGrid::new(32, 32).unwrap();
        let mut rng = RngStream::new(3, 0);
        drive(&mut g, &mut rng, 10_000, SitePolicy::Uniform).unwrap();
        let rec = drive(&mut g, &mut rng, 100_000, SitePolicy::Uniform).unwrap();
        let h = &rec.mean_height;
        let mean = h.iter().sum::<f64>() / h.len() as f64;
        assert!((2.0..=2.2).contains(&mean), "{mean}");
        let q = h.len() / 4;
        let m3 = h[2 * q..3 * q].iter().sum::<f64>() / q as f64;
        let m4 = h[3 * q..].iter().sum::<f64>() / q as f64;
        assert!((m3 - m4).abs() / m4 < 0.02);
        let (slope, se) = ccdf_slope(&rec.avalanches, 10, 1000).unwrap();
        assert!((-1.5..=-0.5).contains(&slope) && se < 0.1, "{slope} {se}");
    }

    #[test]
    fn center_policy_is_deterministic() {
        let mut a = SandGrid::new(9, 9).unwrap();
        let mut b = SandGrid::new(9, 9).unwrap();
        drive(&mut a, &mut RngStream::new(1, 0), 500, SitePolicy::Center).unwrap();
        drive(&mut b, &mut RngStream::new(2, 0), 500, SitePolicy::Center).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn abelian_examples() {
        let mut g = SandGrid::new(16, 16).unwrap();
        let mut rng = RngStream::new(4, 0);
        drive(&mut g, &mut rng, 2_000, SitePolicy::Uniform).unwrap();
        assert!(abelian_check(&g, &[(3, 4), (3, 5)], &mut rng, 2).unwrap());
        assert!(abelian_check(&g, &[(7, 7)], &mut rng, 2).unwrap());
        let drops: Vec<Site> = (0..10).map(|_| (rng.index(16), rng.index(16))).collect();
        assert!(abelian_check(&g, &drops, &mut rng, 5).unwrap());
        assert!(abelian_check(&g, &drops, &mut rng, 1).is_err());
    }

    #[test]
    fn ccdf_is_decreasing() {
        let mut g = SandGrid::new(16, 16).unwrap();
        let rec = drive(&mut g, &mut RngStream::new(5, 0), 20_000, SitePolicy::Uniform).unwrap();
        let c = size_ccdf(&rec.avalanches);
        assert!(c.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 > w[1].1));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn relaxation_is_order_independent(seed in 0u64..10_000) {
            let mut rng = RngStream::new(seed, 0);
            let mut g = SandGrid::new(8, 8).unwrap();
            g.heights.iter_mut().for_each(|h| *h = rng.below(4) as u32);
            let drops: Vec<Site> = (0..30).map(|_| (rng.index(8), rng.index(8))).collect();
            prop_assert!(abelian_check(&g, &drops, &mut rng, 4).unwrap());
        }
    }
}
