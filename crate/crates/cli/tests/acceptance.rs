//! Criteria 1-11: one PASS/FAIL line each, nonzero exit if any fails.

mod common;

use std::time::{Duration, Instant};

use stochlab::diffusion::{convergence_scan, WalkSpec};
use stochlab::memory::{exact_thermo, ground_state_bruteforce, hopfield_retrieval, simulated_annealing, sk_couplings, AnnealSchedule};
use stochlab::network::{barabasi_albert, degree_ccdf_slope, small_world_scan};
use stochlab::paths::{hausdorff_experiment, hausdorff_scan, straight_line_ensemble, HausdorffSpec};
use stochlab::potential::Potential;
use stochlab::quantum::{
    count_local_maxima, double_slit_pattern, uncertainty_product, Grid, SlitGeometry, SlitMode, WaveState,
};
use stochlab::resonance::{resonance_scan, DoubleWellSpec};
use stochlab::sandpile::{abelian_check, activity_spectrum, ccdf_slope, drive, SandGrid, SitePolicy};
use stochlab::stats::clt_scaling;
use stochlab::RngStream;
use stochlab_cli::rerun;
use stochlab_cli::run::MANIFEST;

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn within(elapsed: Duration, budget_s: u64) -> bool {
    elapsed <= Duration::from_secs(budget_s)
}

fn hausdorff() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (label, potential) in [("free", Potential::Free), ("harmonic", Potential::harmonic(1.0))] {
        let start = Instant::now();
        let spec = HausdorffSpec { potential, ..Default::default() };
        let run = hausdorff_experiment(&spec, &RngStream::new(SEED, 1)).expect("hausdorff run");
        let ok = (run.scan.d_h - 2.0).abs() <= 0.1 && within(start.elapsed(), 120);
        pass &= ok;
        parts.push(format!("{label} d_H={:.3}±{:.3} in {:.0?}", run.scan.d_h, run.scan.alpha_stderr, start.elapsed()));
    }
    let spec = HausdorffSpec::default();
    let line = straight_line_ensemble(spec.n_t, spec.a_t(), 1.0).expect("line");
    let scan = hausdorff_scan(&line, &spec.default_resolutions()).expect("line scan");
    pass &= (scan.d_h - 1.0).abs() <= 0.05;
    parts.push(format!("straight line d_H={:.3}", scan.d_h));
    Outcome { pass, detail: parts.join(", ") }
}

fn interference() -> Outcome {
    let g = SlitGeometry::new(1.0, 10.0, 1000.0);
    let xs: Vec<f64> = (0..=600).map(|i| -300.0 + i as f64).collect();
    let amp = double_slit_pattern(&g, &xs, SlitMode::Amplitude).expect("pattern");
    let cls = double_slit_pattern(&g, &xs, SlitMode::Classical).expect("pattern");
    let peak = amp.iter().cloned().fold(0.0, f64::max);
    let minima: Vec<f64> = amp.windows(3).filter(|w| w[1] <= w[0] && w[1] <= w[2]).map(|w| w[1] / peak).collect();
    let worst = minima.iter().cloned().fold(0.0, f64::max);
    let (ma, mc) = (count_local_maxima(&amp), count_local_maxima(&cls));
    Outcome {
        pass: ma >= 3 && !minima.is_empty() && worst < 1e-6 && mc == 1,
        detail: format!("amplitude maxima={ma}, highest minimum/peak={worst:.2e}, classical maxima={mc}"),
    }
}

fn diffusion() -> Outcome {
    let start = Instant::now();
    let base = WalkSpec::unit_diffusion(1, 0.5, 1.0, 10_000_000);
    match convergence_scan(&base, 2, &RngStream::new(SEED, 3)) {
        Ok(scan) => {
            let errs: Vec<f64> = scan.levels.iter().map(|l| l.sup_error).collect();
            let last = scan.levels.last().expect("levels");
            let rel = last.sup_error / last.peak_density;
            let monotone = errs.windows(2).all(|w| w[1] < w[0]);
            Outcome {
                pass: monotone && rel < 1e-2 && within(start.elapsed(), 60),
                detail: format!(
                    "sup errors {:?}, final/peak={rel:.2e}, {:.0?}",
                    errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>(),
                    start.elapsed()
                ),
            }
        }
        Err(e) => Outcome { pass: false, detail: e.to_string() },
    }
}

fn uncertainty() -> Outcome {
    let grid = Grid::symmetric(30.0, 1024).expect("grid");
    let rng = RngStream::new(SEED, 4);
    let mut min = f64::INFINITY;
    let mut bad = 0;
    for i in 0..1000 {
        let s = WaveState::random_packets(grid, &mut rng.substream(i), 1.0, 1.0).expect("state");
        let u = uncertainty_product(&s).expect("product");
        min = min.min(u.product);
        bad += (u.product < 0.5 - 1e-3) as usize;
    }
    let g = uncertainty_product(&WaveState::gaussian(grid, 0.0, 1.0, 0.0, 1.0, 1.0).expect("gaussian")).expect("product");
    Outcome {
        pass: bad == 0 && (g.product - 0.5).abs() <= 1e-3,
        detail: format!("1000 states, min product={min:.6}, below bound={bad}, gaussian={:.6}", g.product),
    }
}

fn spin_glass() -> Outcome {
    let start = Instant::now();
    let schedule = AnnealSchedule { t_initial: 2.0, ratio: 0.95, levels: 120, sweeps_per_level: 50 };
    let rng = RngStream::new(SEED, 5);
    let mut matched = 0;
    for i in 0..100 {
        let mut r = rng.substream(i);
        let c = sk_couplings(16, &mut r).expect("couplings");
        let run = simulated_annealing(&c, &schedule, &mut r).expect("anneal");
        let (_, e0) = ground_state_bruteforce(&c).expect("oracle");
        matched += ((run.energy - e0).abs() <= 1e-9 * (1.0 + e0.abs())) as usize;
    }
    let elapsed = start.elapsed();
    let mut worst: f64 = 0.0;
    for i in 0..5 {
        let c = sk_couplings(12, &mut rng.substream(1000 + i)).expect("couplings");
        for t in [0.3, 0.7, 1.5, 4.0] {
            let h = 1e-4 * t;
            let g = |tt: f64| exact_thermo(&c, tt).expect("thermo").free_energy / tt;
            let u_fd = -t * t * (g(t + h) - g(t - h)) / (2.0 * h);
            let u = exact_thermo(&c, t).expect("thermo").mean_energy;
            worst = worst.max((u_fd - u).abs() / u.abs());
        }
    }
    Outcome {
        pass: matched >= 95 && worst < 1e-4 && within(elapsed, 180),
        detail: format!("annealing matched {matched}/100 in {elapsed:.0?}, energy identity worst relative error {worst:.1e}"),
    }
}

fn hopfield() -> Outcome {
    let rng = RngStream::new(SEED, 6);
    let good = (0..1000)
        .filter(|&i| hopfield_retrieval(50, 2, 5, &mut rng.substream(i), 100).expect("trial").final_overlap >= 0.95)
        .count();
    Outcome { pass: good >= 950, detail: format!("{good}/1000 trials reach overlap >= 0.95") }
}

fn sandpile() -> Outcome {
    let start = Instant::now();
    let mut rng = RngStream::new(SEED, 7);
    let mut grid = SandGrid::new(32, 32).expect("grid");
    drive(&mut grid, &mut rng, 20_000, SitePolicy::Uniform).expect("warmup");
    let mut abelian = 0;
    for _ in 0..100 {
        let drops: Vec<(usize, usize)> = (0..50).map(|_| (rng.index(32), rng.index(32))).collect();
        abelian += abelian_check(&grid, &drops, &mut rng, 3).expect("abelian") as usize;
    }
    let rec = drive(&mut grid, &mut rng, 100_000, SitePolicy::Uniform).expect("drive");
    let (slope, se) = ccdf_slope(&rec.avalanches, 10, 100).expect("slope");
    let spec = activity_spectrum(&rec.activity_per_round, 16).expect("spectrum");
    Outcome {
        pass: abelian == 100 && slope < 0.0 && se < 0.1 && spec.low_high_ratio >= 10.0 && within(start.elapsed(), 60),
        detail: format!(
            "abelian {abelian}/100, CCDF slope {slope:.3}±{se:.3} over s in [10,100], low/high power {:.0}, {:.0?}",
            spec.low_high_ratio,
            start.elapsed()
        ),
    }
}

fn resonance() -> Outcome {
    let start = Instant::now();
    let levels: Vec<f64> = (0..6).map(|i| (0.02f64.ln() + (50f64).ln() * i as f64 / 5.0).exp()).collect();
    let base = DoubleWellSpec::driven(0.3, 0.1, 0.0, 128);
    let curve = resonance_scan(&base, &levels, 4, &RngStream::new(SEED, 8)).expect("scan");
    let peak = curve.snr_db.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let margin = peak - curve.snr_db[0].max(curve.snr_db[5]);
    Outcome {
        pass: curve.interior_peak && margin >= 3.0 && within(start.elapsed(), 120),
        detail: format!(
            "SNR dB {:?}, peak at D={:.3}, margin {margin:.2} dB, {:.0?}",
            curve.snr_db.iter().map(|s| format!("{s:.1}")).collect::<Vec<_>>(),
            curve.peak_d,
            start.elapsed()
        ),
    }
}

fn small_world() -> Outcome {
    let start = Instant::now();
    let ps = [0.0, 0.001, 0.003, 0.01, 0.02, 0.03, 0.05, 0.1, 0.3, 1.0];
    let scan = small_world_scan(1000, 10, &ps, 10, &RngStream::new(SEED, 9)).expect("scan");
    let hit = scan
        .rows
        .iter()
        .find(|r| (0.01..=0.1).contains(&r.p) && r.l_ratio < 0.5 && r.c_ratio > 0.7)
        .map(|r| r.p);
    let elapsed = start.elapsed();
    let g = barabasi_albert(10_000, 2, &mut RngStream::new(SEED, 10)).expect("ba");
    let (slope, se) = degree_ccdf_slope(&g, 4, 100).expect("ccdf");
    Outcome {
        pass: hit.is_some() && within(elapsed, 60) && (-2.2..=-1.6).contains(&slope),
        detail: format!("window p={hit:?} in {elapsed:.0?}, BA CCDF slope {slope:.3}±{se:.3}"),
    }
}

fn clt() -> Outcome {
    let d = rand_distr::Uniform::new(-3f64.sqrt(), 3f64.sqrt()).expect("range");
    let scan = clt_scaling(&mut RngStream::new(SEED, 11), &d, &[10, 100, 1000], 10_000).expect("scan");
    let slope = scan.slope.unwrap_or(f64::NAN);
    Outcome { pass: (slope + 0.5).abs() <= 0.05, detail: format!("slope {slope:.4}") }
}

fn reproducibility() -> Outcome {
    let dir = tempfile::tempdir().expect("tempdir");
    let mut failures = Vec::new();
    let runs = common::small_runs();
    for (i, (name, kv)) in runs.iter().enumerate() {
        let out = dir.path().join(format!("{i}-{name}"));
        common::run_into(&common::request(name, kv, SEED + i as u64), &out);
        if let Err(e) = rerun(&out.join(MANIFEST), None) {
            failures.push(format!("{name}: {e}"));
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{} runs over all 13 experiments reproduced byte-for-byte", runs.len())
        } else {
            failures.join("; ")
        },
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("hausdorff dimension", hausdorff),
        ("interference contrast", interference),
        ("diffusion equivalence", diffusion),
        ("uncertainty bound", uncertainty),
        ("spin-glass optimization", spin_glass),
        ("hopfield retrieval", hopfield),
        ("sandpile", sandpile),
        ("stochastic resonance", resonance),
        ("small-world window", small_world),
        ("clt slope", clt),
        ("reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        failed += !o.pass as usize;
        println!("criterion {:>2} {:<24} {}  {}", i + 1, name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
