use stochlab::diffusion::{simulate_walk, WalkSpec};
use stochlab::memory::{
    ground_state_bruteforce, hopfield_retrieval, simulated_annealing, sk_couplings, AnnealSchedule,
};
use stochlab::paths::{hausdorff_experiment, hausdorff_scan, straight_line_ensemble, HausdorffSpec};
use stochlab::potential::Potential;
use stochlab::quantum::wick_rotate_check;
use stochlab::resonance::{resonance_scan, DoubleWellSpec};
use stochlab::sandpile::{abelian_check, activity_spectrum, drive, SandGrid, SitePolicy};
use stochlab::RngStream;

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp()).collect()
}

#[test]
fn free_and_harmonic_paths_are_two_dimensional() {
    for potential in [Potential::Free, Potential::harmonic(1.0)] {
        let spec = HausdorffSpec {
            potential,
            sweeps: 2000,
            thermalization: 500,
            chains: 64,
            samples_per_chain: 8,
            ..Default::default()
        };
        let run = hausdorff_experiment(&spec, &RngStream::new(11, 0)).unwrap();
        assert!((run.scan.d_h - 2.0).abs() < 0.15, "{:?}", run.scan);
        assert!(run.acceptance_rate > 0.3 && run.acceptance_rate < 0.7);
    }
}

#[test]
fn straight_line_is_one_dimensional() {
    let e = straight_line_ensemble(256, 0.01, 3.0).unwrap();
    let res: Vec<f64> = [1usize, 2, 4, 8, 16, 32, 64, 128].iter().map(|&b| (0.01 * b as f64).sqrt()).collect();
    let s = hausdorff_scan(&e, &res).unwrap();
    assert!((s.d_h - 1.0).abs() < 0.05, "{s:?}");
}

#[test]
fn walk_variance_matches_wick_diffusion_width() {
    let t = 1.0;
    let spec = WalkSpec::unit_diffusion(1, 0.25, t, 200_000);
    let field = simulate_walk(&spec, &RngStream::new(4, 0)).unwrap();
    let w = wick_rotate_check(1e-4, spec.d_coeff(), t).unwrap();
    let var = field.variance()[0];
    let want = w.diffusion_width.powi(2);
    let se = want * (2.0 / 200_000f64).sqrt();
    assert!((var - want).abs() < 5.0 * se, "{var} vs {want}");
    assert!((w.quantum_width - w.diffusion_width).abs() < 1e-6);
}

fn sr_base() -> DoubleWellSpec {
    DoubleWellSpec::driven(0.3, 0.1, 0.0, 96)
}

#[test]
fn resonance_has_interior_peak() {
    let curve = resonance_scan(&sr_base(), &logspace(0.02, 1.0, 6), 4, &RngStream::new(5, 0)).unwrap();
    assert!(curve.interior_peak, "{:?}", curve.snr_db);
    let d = curve.peak_d;
    assert!(d > 0.02 && d < 1.0);
}

#[test]
fn undriven_well_has_no_resonance() {
    let base = DoubleWellSpec::driven(0.0, 0.1, 0.0, 96);
    let curve = resonance_scan(&base, &logspace(0.02, 1.0, 5), 4, &RngStream::new(5, 0)).unwrap();
    assert!(!curve.interior_peak, "{:?}", curve.snr_db);
    for s in &curve.snr_db {
        assert!(s.abs() < 6.0, "{:?}", curve.snr_db);
    }
}

#[test]
fn quadrupling_replicas_halves_stderr() {
    let levels = logspace(0.05, 0.5, 5);
    let rng = RngStream::new(8, 0);
    let a = resonance_scan(&sr_base(), &levels, 8, &rng).unwrap();
    let b = resonance_scan(&sr_base(), &levels, 32, &rng).unwrap();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let ratio = mean(&b.snr_stderr) / mean(&a.snr_stderr);
    assert!(ratio > 0.3 && ratio < 0.75, "{ratio}");
}

#[test]
fn slower_annealing_does_not_lose_ground_states() {
    let fast = AnnealSchedule { t_initial: 2.0, ratio: 0.9, levels: 30, sweeps_per_level: 5 };
    let slow = fast.slower(10);
    let (mut hit_fast, mut hit_slow) = (0, 0);
    for i in 0..40 {
        let c = sk_couplings(12, &mut RngStream::new(21, i)).unwrap();
        let (_, e0) = ground_state_bruteforce(&c).unwrap();
        let f = simulated_annealing(&c, &fast, &mut RngStream::new(22, i)).unwrap();
        let s = simulated_annealing(&c, &slow, &mut RngStream::new(22, i)).unwrap();
        assert!(f.energy >= e0 - 1e-9 && s.energy >= e0 - 1e-9);
        hit_fast += ((f.energy - e0).abs() < 1e-9) as usize;
        hit_slow += ((s.energy - e0).abs() < 1e-9) as usize;
    }
    assert!(hit_slow >= hit_fast, "{hit_slow} < {hit_fast}");
    assert!(hit_slow >= 38, "{hit_slow}");
}

#[test]
fn hopfield_retrieves_lightly_corrupted_cues() {
    let mut ok = 0;
    for i in 0..300 {
        let t = hopfield_retrieval(50, 2, 5, &mut RngStream::new(31, i), 100).unwrap();
        assert!(t.converged);
        ok += (t.final_overlap >= 0.95) as usize;
    }
    assert!(ok >= 285, "{ok}");
}

#[test]
fn sandpile_activity_is_low_frequency_dominated() {
    let mut grid = SandGrid::new(24, 24).unwrap();
    let mut rng = RngStream::new(41, 0);
    drive(&mut grid, &mut rng, 10_000, SitePolicy::Uniform).unwrap();
    let rec = drive(&mut grid, &mut rng, 30_000, SitePolicy::Uniform).unwrap();
    let s = activity_spectrum(&rec.activity_per_round, 16).unwrap();
    assert!(s.low_high_ratio >= 10.0, "{}", s.low_high_ratio);
    assert!(s.exponent < 0.0);
    let drops: Vec<(usize, usize)> = (0..200).map(|_| (rng.index(24), rng.index(24))).collect();
    assert!(abelian_check(&grid, &drops, &mut rng, 5).unwrap());
}
