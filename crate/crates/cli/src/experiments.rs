//! The thirteen experiment families: parameters, cross-key checks and
//! runners.

use rand_distr::{Exp, StandardNormal, Uniform};
use rayon::prelude::*;
use serde_json::json;
use stochlab::diffusion::{convergence_scan, WalkSpec};
use stochlab::memory::{
    exact_thermo, ground_state_bruteforce, hopfield_retrieval, simulated_annealing, sk_couplings, AnnealSchedule,
    MAX_ENUMERATION_N,
};
use stochlab::network::{barabasi_albert, degree_ccdf, degree_ccdf_slope, small_world_scan, watts_strogatz};
use stochlab::paths::{hausdorff_experiment, HausdorffSpec};
use stochlab::potential::Potential;
use stochlab::quantum::{
    count_local_maxima, decay_sample, double_slit_pattern, evolve_free, spectrum_gaps_with, superpose,
    uncertainty_product, ComplexAmplitude, DecayModel, Grid, SlitGeometry, SlitMode, WaveState,
};
use stochlab::resonance::{resonance_scan, DoubleWellSpec, SNR_SEGMENTS};
use stochlab::sandpile::{activity_spectrum, ccdf_slope, drive, size_ccdf, SandGrid, SitePolicy};
use stochlab::search::{strategy_tournament, TournamentSpec};
use stochlab::stats::{clt_scaling, mc_integrate};
use stochlab::{Result, RngStream};

use crate::output::{cell, opt_cell, Artifact, Table};
use crate::params::{choice, flag, int, ints, real, real_in, reals, Bound, ParamSpec, Params, Violation};

type Runner = fn(&Params, &RngStream) -> Result<Vec<Artifact>>;
type Checker = fn(&Params) -> Vec<Violation>;

pub struct Experiment {
    pub name: &'static str,
    pub about: &'static str,
    pub params: Vec<ParamSpec>,
    /// Parameter that `--replicas` sets, for experiments that already
    /// spread work over replicas; the rest fan out whole runs.
    pub replica_key: Option<&'static str>,
    check: Checker,
    run: Runner,
}

impl Experiment {
    pub fn check(&self, p: &Params) -> Vec<Violation> {
        (self.check)(p)
    }

    pub fn run(&self, p: &Params, rng: &RngStream) -> Result<Vec<Artifact>> {
        (self.run)(p, rng)
    }
}

pub const NAMES: [&str; 13] = [
    "interfere",
    "decay",
    "uncertainty",
    "spectrum",
    "paths",
    "diffuse",
    "sandpile",
    "resonance",
    "memory",
    "network",
    "search",
    "mcint",
    "clt",
];

pub fn find(name: &str) -> Option<Experiment> {
    Some(match name {
        "interfere" => interfere(),
        "decay" => decay(),
        "uncertainty" => uncertainty(),
        "spectrum" => spectrum(),
        "paths" => paths(),
        "diffuse" => diffuse(),
        "sandpile" => sandpile(),
        "resonance" => resonance(),
        "memory" => memory(),
        "network" => network(),
        "search" => search(),
        "mcint" => mcint(),
        "clt" => clt(),
        _ => return None,
    })
}

fn none(_: &Params) -> Vec<Violation> {
    Vec::new()
}

const POS: Bound = Bound::Above(0.0);
const NONNEG: Bound = Bound::AtLeast(0.0);
const ANY: Bound = Bound::None;

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linspace(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect()
}

fn interfere() -> Experiment {
    Experiment {
        name: "interfere",
        about: "amplitude versus probability addition and the two-slit screen pattern",
        params: vec![
            real("a_re", 0.5, ANY, "first amplitude, real part"),
            real("a_im", 0.0, ANY, "first amplitude, imaginary part"),
            real("b_re", -0.5, ANY, "second amplitude, real part"),
            real("b_im", 0.0, ANY, "second amplitude, imaginary part"),
            real("wavelength", 1.0, POS, "wavelength"),
            real("separation", 10.0, POS, "slit separation"),
            real("distance", 1000.0, POS, "slit-to-screen distance"),
            real("slit_width", 0.0, NONNEG, "slit width; 0 means a quarter of the separation"),
            real("screen", 300.0, POS, "screen half-width"),
            int("points", 1201, 3, 1_000_000, "detector positions"),
        ],
        replica_key: None,
        check: |p| {
            let mut v = Vec::new();
            if p.real("distance") < 10.0 * p.real("separation") {
                v.push(Violation::new("distance", "must be at least 10 slit separations (far field)"));
            }
            if p.real("slit_width") > p.real("separation") {
                v.push(Violation::new("slit_width", "must not exceed the separation"));
            }
            v
        },
        run: |p, _| {
            let a = ComplexAmplitude { re: p.real("a_re"), im: p.real("a_im") };
            let b = ComplexAmplitude { re: p.real("b_re"), im: p.real("b_im") };
            let s = superpose(a, b);
            let mut sup = Table::new(&["a_re", "a_im", "b_re", "b_im", "sum_re", "sum_im", "p_quantum", "p_classical", "interference"]);
            sup.push(
                [a.re, a.im, b.re, b.im, s.amplitude.re, s.amplitude.im, s.p_quantum, s.p_classical, s.interference]
                    .map(cell)
                    .to_vec(),
            );
            let w = p.real("slit_width");
            let geometry = SlitGeometry {
                wavelength: p.real("wavelength"),
                slit_separation: p.real("separation"),
                screen_distance: p.real("distance"),
                slit_width: (w > 0.0).then_some(w),
            };
            let xs = linspace(-p.real("screen"), p.real("screen"), p.usize("points"));
            let quantum = double_slit_pattern(&geometry, &xs, SlitMode::Amplitude)?;
            let classical = double_slit_pattern(&geometry, &xs, SlitMode::Classical)?;
            let mut pattern = Table::new(&["x", "amplitude_mode", "classical_mode"]);
            for ((x, q), c) in xs.iter().zip(&quantum).zip(&classical) {
                pattern.push(vec![cell(x), cell(q), cell(c)]);
            }
            let peak = quantum.iter().cloned().fold(0.0, f64::max);
            let deepest = quantum
                .windows(3)
                .filter(|w| w[1] <= w[0] && w[1] <= w[2])
                .map(|w| w[1])
                .fold(0.0, f64::max);
            let summary = json!({
                "p_quantum": s.p_quantum,
                "p_classical": s.p_classical,
                "interference": s.interference,
                "maxima_amplitude_mode": count_local_maxima(&quantum),
                "maxima_classical_mode": count_local_maxima(&classical),
                "highest_minimum_over_peak": deepest / peak,
                "fringe_spacing": geometry.fringe_spacing(),
            });
            Ok(vec![
                Artifact::csv("superposition.csv", sup),
                Artifact::csv("pattern.csv", pattern),
                Artifact::json("summary.json", summary),
            ])
        },
    }
}

fn decay() -> Experiment {
    Experiment {
        name: "decay",
        about: "exponential decay of independent unstable atoms",
        params: vec![
            real("rate", 1.0, POS, "decay rate"),
            int("atoms", 10_000, 1, 100_000_000, "initial population"),
            real("t_max", 5.0, POS, "end of the survival curve"),
            int("bins", 50, 2, 1_000_000, "survival curve intervals"),
        ],
        replica_key: None,
        check: none,
        run: |p, rng| {
            let model = DecayModel::new(p.real("rate"), p.usize("atoms"))?;
            let run = decay_sample(&model, &mut rng.clone(), p.real("t_max"), p.usize("bins"))?;
            let mut t = Table::new(&["t", "survival", "expected"]);
            for (time, s) in run.times.iter().zip(&run.survival) {
                t.push(vec![cell(time), cell(s), cell((-model.rate_lambda * time).exp())]);
            }
            let summary = json!({
                "atoms": model.n_atoms,
                "rate": model.rate_lambda,
                "mean_lifetime": run.mean_lifetime,
                "fitted_rate": run.fitted_rate,
                "fitted_rate_stderr": run.fitted_rate_stderr,
            });
            Ok(vec![Artifact::csv("survival.csv", t), Artifact::json("summary.json", summary)])
        },
    }
}

fn uncertainty() -> Experiment {
    Experiment {
        name: "uncertainty",
        about: "position-momentum spread products of random grid states",
        params: vec![
            int("states", 1000, 1, 10_000_000, "random states"),
            int("points", 1024, 16, 1 << 22, "grid points"),
            real("half_width", 30.0, POS, "grid half-width"),
            real("sigma", 1.0, POS, "width of the reference Gaussian"),
            real("time", 0.0, NONNEG, "free evolution time of the reference Gaussian"),
            real("hbar", 1.0, POS, "reduced Planck constant"),
            real("mass", 1.0, POS, "particle mass"),
        ],
        replica_key: None,
        check: |p| {
            let mut v = Vec::new();
            let (s, hw) = (p.real("sigma"), p.real("half_width"));
            let t = p.real("time");
            let spread = s * (1.0 + (p.real("hbar") * t / (2.0 * p.real("mass") * s * s)).powi(2)).sqrt();
            if 8.0 * spread > hw {
                v.push(Violation::new("half_width", format!("must be at least 8 Gaussian widths (width at the end {spread})")));
            }
            let dx = 2.0 * hw / (p.real("points") - 1.0);
            if s < 4.0 * dx {
                v.push(Violation::new("sigma", format!("must span at least 4 grid spacings ({dx})")));
            }
            v
        },
        run: |p, rng| {
            let grid = Grid::symmetric(p.real("half_width"), p.usize("points"))?;
            let (hbar, mass) = (p.real("hbar"), p.real("mass"));
            let rows = (0..p.usize("states") as u64)
                .into_par_iter()
                .map(|i| {
                    let state = WaveState::random_packets(grid, &mut rng.substream(i), hbar, mass)?;
                    uncertainty_product(&state)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut t = Table::new(&["state", "dx", "dp", "product"]);
            for (i, u) in rows.iter().enumerate() {
                t.push(vec![cell(i), cell(u.dx), cell(u.dp), cell(u.product)]);
            }
            let bound = 0.5 * hbar;
            let min = rows.iter().map(|u| u.product).fold(f64::INFINITY, f64::min);
            let below = rows.iter().filter(|u| u.product < bound - 1e-3).count();
            let g = WaveState::gaussian(grid, 0.0, p.real("sigma"), 0.0, hbar, mass)?;
            let g0 = uncertainty_product(&g)?;
            let gt = uncertainty_product(&evolve_free(&g, p.real("time"))?)?;
            let summary = json!({
                "bound": bound,
                "min_product": min,
                "states_below_bound": below,
                "gaussian": { "dx": g0.dx, "dp": g0.dp, "product": g0.product },
                "gaussian_evolved": { "time": p.real("time"), "dx": gt.dx, "dp": gt.dp, "product": gt.product },
            });
            Ok(vec![Artifact::csv("states.csv", t), Artifact::json("summary.json", summary)])
        },
    }
}

fn potential(p: &Params) -> Potential {
    match p.text("potential") {
        "free" => Potential::Free,
        "double_well" => Potential::DoubleWell { depth: p.real("depth") },
        _ => Potential::harmonic(p.real("stiffness")),
    }
}

fn spectrum() -> Experiment {
    Experiment {
        name: "spectrum",
        about: "lowest energy levels of a confined particle",
        params: vec![
            choice("potential", &["harmonic", "double_well", "free"], "potential shape"),
            real("stiffness", 1.0, POS, "harmonic stiffness"),
            real("depth", 1.0, POS, "double-well depth"),
            real("half_width", 8.0, POS, "box half-width"),
            int("points", 801, 5, 200_001, "grid points"),
            int("levels", 5, 2, 10_000, "levels to report"),
            flag("commuting", false, "treat kinetic and potential terms as commuting"),
            real("hbar", 1.0, POS, "reduced Planck constant"),
            real("mass", 1.0, POS, "particle mass"),
        ],
        replica_key: None,
        check: |p| {
            if p.usize("levels") >= p.usize("points") - 2 {
                vec![Violation::new("levels", "must be fewer than the interior grid points")]
            } else {
                Vec::new()
            }
        },
        run: |p, _| {
            let grid = Grid::symmetric(p.real("half_width"), p.usize("points"))?;
            let levels = spectrum_gaps_with(
                &potential(p),
                grid,
                p.usize("levels"),
                p.flag("commuting"),
                p.real("hbar"),
                p.real("mass"),
            )?;
            let mut t = Table::new(&["index", "energy", "gap"]);
            for l in &levels {
                t.push(vec![cell(l.index), cell(l.energy), opt_cell(l.gap)]);
            }
            let gaps: Vec<f64> = levels.iter().filter_map(|l| l.gap).collect();
            let summary = json!({
                "ground_energy": levels[0].energy,
                "min_gap": gaps.iter().cloned().fold(f64::INFINITY, f64::min),
                "commuting": p.flag("commuting"),
            });
            Ok(vec![Artifact::csv("levels.csv", t), Artifact::json("summary.json", summary)])
        },
    }
}

fn paths() -> Experiment {
    let d = HausdorffSpec::default();
    Experiment {
        name: "paths",
        about: "Hausdorff dimension of Metropolis-sampled lattice paths",
        params: vec![
            choice("potential", &["free", "harmonic"], "potential"),
            real("stiffness", 1.0, POS, "harmonic stiffness"),
            real("mass", d.mass, POS, "particle mass"),
            real("hbar", d.hbar, POS, "reduced Planck constant"),
            int("n_t", d.n_t as i64, 256, 1 << 16, "time slices"),
            real("extent", d.extent, POS, "imaginary-time extent"),
            int("sweeps", d.sweeps as i64, 1, 100_000_000, "production sweeps per chain"),
            int("thermalization", d.thermalization as i64, 0, 100_000_000, "discarded sweeps per chain"),
            int("chains", d.chains as i64, 1, 1_000_000, "independent chains"),
            int("samples_per_chain", d.samples_per_chain as i64, 1, 1_000_000, "stored paths per chain"),
        ],
        replica_key: None,
        check: |p| {
            if p.usize("chains") * p.usize("samples_per_chain") < 100 {
                vec![Violation::new("samples_per_chain", "chains * samples_per_chain must be >= 100")]
            } else {
                Vec::new()
            }
        },
        run: |p, rng| {
            let spec = HausdorffSpec {
                potential: potential(p),
                mass: p.real("mass"),
                hbar: p.real("hbar"),
                n_t: p.usize("n_t"),
                extent: p.real("extent"),
                sweeps: p.usize("sweeps"),
                thermalization: p.usize("thermalization"),
                chains: p.usize("chains"),
                samples_per_chain: p.usize("samples_per_chain"),
                resolutions: None,
            };
            let run = hausdorff_experiment(&spec, rng)?;
            let s = &run.scan;
            let mut scan = Table::new(&["resolution", "block_size", "mean_length", "length_stderr"]);
            for i in 0..s.resolutions.len() {
                scan.push(vec![cell(s.resolutions[i]), cell(s.block_sizes[i]), cell(s.mean_lengths[i]), cell(s.length_stderr[i])]);
            }
            let mut trace = Table::new(&["sweep", "action"]);
            for (i, a) in run.action_trace.iter().enumerate() {
                trace.push(vec![cell(i), cell(a)]);
            }
            let summary = json!({
                "d_h": s.d_h,
                "alpha": s.alpha,
                "alpha_stderr": s.alpha_stderr,
                "paths": run.paths,
                "chains": run.chains,
                "acceptance_rate": run.acceptance_rate,
                "mean_tau_int": run.mean_tau_int,
            });
            Ok(vec![
                Artifact::csv("scan.csv", scan),
                Artifact::csv("action_trace.csv", trace),
                Artifact::json("summary.json", summary),
            ])
        },
    }
}

fn diffuse() -> Experiment {
    Experiment {
        name: "diffuse",
        about: "random-walk densities against the heat kernel under lattice refinement",
        params: vec![
            int("dim", 1, 1, 3, "lattice dimension"),
            real("a_s", 0.5, POS, "coarsest lattice spacing"),
            real("time", 1.0, POS, "final time (D = 1)"),
            int("walkers", 5_000_000, 1, 1_000_000_000, "walkers per level"),
            int("refinements", 2, 2, 6, "spacing halvings after the coarsest level"),
        ],
        replica_key: None,
        check: |p| {
            let spec = WalkSpec::unit_diffusion(p.usize("dim"), p.real("a_s"), p.real("time"), p.usize("walkers"));
            match spec.validate() {
                Err(e) => vec![Violation::new("time", e.to_string())],
                Ok(()) if spec.n_steps == 0 => vec![Violation::new("time", "must cover at least one coarse step")],
                Ok(()) => Vec::new(),
            }
        },
        run: |p, rng| {
            let base = WalkSpec::unit_diffusion(p.usize("dim"), p.real("a_s"), p.real("time"), p.usize("walkers"));
            let scan = convergence_scan(&base, p.usize("refinements"), rng)?;
            let mut t = Table::new(&[
                "level",
                "a_s",
                "a_t",
                "n_steps",
                "sup_error",
                "peak_density",
                "relative_error",
                "discretization_estimate",
                "sampling_stderr",
            ]);
            for (i, l) in scan.levels.iter().enumerate() {
                t.push(vec![
                    cell(i),
                    cell(l.a_s),
                    cell(l.a_t),
                    cell(l.n_steps),
                    cell(l.sup_error),
                    cell(l.peak_density),
                    cell(l.sup_error / l.peak_density),
                    cell(l.discretization_estimate),
                    cell(l.sampling_stderr),
                ]);
            }
            let errs: Vec<f64> = scan.levels.iter().map(|l| l.sup_error).collect();
            let last = scan.levels.last().expect("at least three levels");
            let summary = json!({
                "ratio": scan.ratio,
                "monotone_decrease": errs.windows(2).all(|w| w[1] < w[0]),
                "final_relative_error": last.sup_error / last.peak_density,
            });
            Ok(vec![Artifact::csv("levels.csv", t), Artifact::json("summary.json", summary)])
        },
    }
}

fn sandpile() -> Experiment {
    Experiment {
        name: "sandpile",
        about: "avalanche statistics and activity spectrum of a driven sandpile",
        params: vec![
            int("width", 32, 2, 4096, "grid width"),
            int("height", 32, 2, 4096, "grid height"),
            int("warmup", 20_000, 0, 1_000_000_000, "unrecorded drops before measuring"),
            int("drops", 100_000, 1, 1_000_000_000, "recorded drops"),
            choice("policy", &["uniform", "center"], "drop site choice"),
            int("s_min", 10, 1, i64::MAX, "smallest avalanche size in the slope fit"),
            int("s_max", 1000, 2, i64::MAX, "largest avalanche size in the slope fit"),
            int("segments", 16, 1, 4096, "periodogram segments"),
        ],
        replica_key: None,
        check: |p| {
            if p.int("s_max") < 10 * p.int("s_min") {
                vec![Violation::new("s_max", "fit range must span at least one decade")]
            } else {
                Vec::new()
            }
        },
        run: |p, rng| {
            let mut grid = SandGrid::new(p.usize("width"), p.usize("height"))?;
            let policy = if p.text("policy") == "center" { SitePolicy::Center } else { SitePolicy::Uniform };
            let mut r = rng.clone();
            if p.usize("warmup") > 0 {
                drive(&mut grid, &mut r, p.usize("warmup"), policy)?;
            }
            let rec = drive(&mut grid, &mut r, p.usize("drops"), policy)?;
            let mut av = Table::new(&["drop", "size", "area", "duration", "dissipated"]);
            for (i, a) in rec.avalanches.iter().enumerate() {
                av.push(vec![cell(i), cell(a.size), cell(a.area), cell(a.duration), cell(a.dissipated)]);
            }
            let mut ccdf = Table::new(&["size", "ccdf"]);
            for (s, c) in size_ccdf(&rec.avalanches) {
                ccdf.push(vec![cell(s), cell(c)]);
            }
            let (slope, se) = ccdf_slope(&rec.avalanches, p.int("s_min") as u64, p.int("s_max") as u64)?;
            let act = activity_spectrum(&rec.activity_per_round, p.usize("segments"))?;
            let mut spec = Table::new(&["frequency", "power"]);
            for (f, w) in act.spectrum.frequencies.iter().zip(&act.spectrum.power) {
                spec.push(vec![cell(f), cell(w)]);
            }
            let summary = json!({
                "mean_height": grid.mean_height(),
                "ccdf_slope": slope,
                "ccdf_slope_stderr": se,
                "low_high_ratio": act.low_high_ratio,
                "spectral_exponent": act.exponent,
                "rounds": rec.activity_per_round.len(),
            });
            Ok(vec![
                Artifact::csv("avalanches.csv", av),
                Artifact::csv("ccdf.csv", ccdf),
                Artifact::csv("activity_spectrum.csv", spec),
                Artifact::json("summary.json", summary),
            ])
        },
    }
}

fn resonance() -> Experiment {
    Experiment {
        name: "resonance",
        about: "signal-to-noise ratio of a periodically driven double well against noise strength",
        params: vec![
            real("amplitude", 0.3, NONNEG, "drive amplitude"),
            real("omega", 0.1, POS, "drive angular frequency"),
            real("noise_min", 0.02, POS, "smallest noise strength D"),
            real("noise_max", 1.0, POS, "largest noise strength D"),
            int("levels", 6, 5, 1000, "log-spaced noise levels"),
            int("periods", 128, 8 * 11 + 8, 1_000_000, "drive periods per trajectory"),
            int("replicas", 4, 4, 1_000_000, "trajectories per noise level"),
        ],
        replica_key: Some("replicas"),
        check: |p| {
            let mut v = Vec::new();
            if p.real("noise_max") < 10.0 * p.real("noise_min") {
                v.push(Violation::new("noise_max", "noise levels must span at least one decade"));
            }
            if p.usize("periods") % SNR_SEGMENTS != 0 {
                v.push(Violation::new("periods", format!("must be a multiple of {SNR_SEGMENTS}")));
            }
            v
        },
        run: |p, rng| {
            let base = DoubleWellSpec::driven(p.real("amplitude"), p.real("omega"), 0.0, p.usize("periods"));
            let levels = logspace(p.real("noise_min"), p.real("noise_max"), p.usize("levels"));
            let curve = resonance_scan(&base, &levels, p.usize("replicas"), rng)?;
            let mut t = Table::new(&["noise_d", "snr_db", "snr_stderr"]);
            let mut r = Table::new(&["noise_d", "trajectory", "snr_db"]);
            for (i, d) in curve.noise_levels.iter().enumerate() {
                t.push(vec![cell(d), cell(curve.snr_db[i]), cell(curve.snr_stderr[i])]);
                for (k, s) in curve.snr_by_replica[i].iter().enumerate() {
                    r.push(vec![cell(d), cell(k), cell(s)]);
                }
            }
            let summary = json!({
                "peak_d": curve.peak_d,
                "interior_peak": curve.interior_peak,
                "peak_snr_db": curve.snr_db.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            });
            Ok(vec![Artifact::csv("snr.csv", t), Artifact::csv("snr_by_trajectory.csv", r), Artifact::json("summary.json", summary)])
        },
    }
}

fn memory() -> Experiment {
    Experiment {
        name: "memory",
        about: "Hopfield retrieval, spin-glass annealing and exact thermodynamics",
        params: vec![
            choice("task", &["retrieval", "anneal", "thermo"], "what to run"),
            int("n", 50, 2, 100_000, "retrieval: neurons"),
            int("patterns", 2, 1, 100_000, "retrieval: stored patterns"),
            real_in("corruption", 0.1, NONNEG, 1.0, "retrieval: fraction of cue spins reversed"),
            int("trials", 1000, 1, 100_000_000, "retrieval: independent trials"),
            int("max_sweeps", 100, 1, 1_000_000, "retrieval: descent sweep limit"),
            real_in("success_overlap", 0.95, NONNEG, 1.0, "retrieval: overlap counted as success"),
            int("sk_n", 16, 2, MAX_ENUMERATION_N as i64, "anneal/thermo: spins per instance"),
            int("instances", 100, 1, 1_000_000, "anneal: random instances"),
            real("t_initial", 2.0, POS, "anneal: starting temperature"),
            real_in("ratio", 0.95, POS, 1.0, "anneal: temperature ratio between levels"),
            int("schedule_levels", 120, 1, 1_000_000, "anneal: temperature levels"),
            int("sweeps_per_level", 50, 1, 1_000_000, "anneal: sweeps per level"),
            real("t_min", 0.1, POS, "thermo: lowest temperature"),
            real("t_max", 5.0, POS, "thermo: highest temperature"),
            int("temperatures", 50, 2, 100_000, "thermo: log-spaced temperatures"),
        ],
        replica_key: None,
        check: |p| {
            let mut v = Vec::new();
            if p.real("ratio") >= 1.0 {
                v.push(Violation::new("ratio", "must be < 1"));
            }
            if p.real("t_max") <= p.real("t_min") {
                v.push(Violation::new("t_max", "must exceed t_min"));
            }
            v
        },
        run: |p, rng| match p.text("task") {
            "retrieval" => retrieval(p, rng),
            "anneal" => anneal(p, rng),
            _ => thermo(p, rng),
        },
    }
}

fn retrieval(p: &Params, rng: &RngStream) -> Result<Vec<Artifact>> {
    let n = p.usize("n");
    let k = (p.real("corruption") * n as f64).round() as usize;
    let trials = (0..p.usize("trials") as u64)
        .into_par_iter()
        .map(|i| hopfield_retrieval(n, p.usize("patterns"), k, &mut rng.substream(i), p.usize("max_sweeps")))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&["trial", "target", "initial_overlap", "final_overlap", "sweeps", "converged"]);
    for (i, r) in trials.iter().enumerate() {
        t.push(vec![cell(i), cell(r.target), cell(r.initial_overlap), cell(r.final_overlap), cell(r.sweeps), cell(r.converged)]);
    }
    let good = trials.iter().filter(|r| r.final_overlap >= p.real("success_overlap")).count();
    let summary = json!({
        "flipped_spins": k,
        "success_fraction": good as f64 / trials.len() as f64,
        "mean_final_overlap": trials.iter().map(|r| r.final_overlap).sum::<f64>() / trials.len() as f64,
    });
    Ok(vec![Artifact::csv("retrieval.csv", t), Artifact::json("summary.json", summary)])
}

fn anneal(p: &Params, rng: &RngStream) -> Result<Vec<Artifact>> {
    let schedule = AnnealSchedule {
        t_initial: p.real("t_initial"),
        ratio: p.real("ratio"),
        levels: p.usize("schedule_levels"),
        sweeps_per_level: p.usize("sweeps_per_level"),
    };
    let n = p.usize("sk_n");
    let rows = (0..p.usize("instances") as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng.substream(i);
            let c = sk_couplings(n, &mut r)?;
            let run = simulated_annealing(&c, &schedule, &mut r)?;
            let (_, exact) = ground_state_bruteforce(&c)?;
            Ok((run.energy, exact))
        })
        .collect::<Result<Vec<_>>>()?;
    let tol = |e: f64| 1e-9 * (1.0 + e.abs());
    let mut t = Table::new(&["instance", "anneal_energy", "ground_energy", "matched"]);
    let mut matched = 0;
    for (i, &(a, g)) in rows.iter().enumerate() {
        let ok = (a - g).abs() <= tol(g);
        matched += ok as usize;
        t.push(vec![cell(i), cell(a), cell(g), cell(ok)]);
    }
    let summary = json!({ "instances": rows.len(), "matched": matched });
    Ok(vec![Artifact::csv("anneal.csv", t), Artifact::json("summary.json", summary)])
}

fn thermo(p: &Params, rng: &RngStream) -> Result<Vec<Artifact>> {
    let c = sk_couplings(p.usize("sk_n"), &mut rng.clone())?;
    let mut t = Table::new(&["temperature", "log_z", "free_energy", "mean_energy"]);
    for temp in logspace(p.real("t_min"), p.real("t_max"), p.usize("temperatures")) {
        let s = exact_thermo(&c, temp)?;
        t.push(vec![cell(temp), cell(s.log_z), cell(s.free_energy), cell(s.mean_energy)]);
    }
    let (ground, e0) = ground_state_bruteforce(&c)?;
    let spins: String = ground.spins.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect();
    let mut couplings = Table::new(&["i", "j", "value"]);
    for (i, j, v) in c.triplets() {
        couplings.push(vec![cell(i), cell(j), cell(v)]);
    }
    let summary = json!({ "ground_energy": e0, "ground_state": spins });
    Ok(vec![
        Artifact::csv("thermo.csv", t),
        Artifact::csv("couplings.csv", couplings),
        Artifact::json("summary.json", summary),
    ])
}

fn network() -> Experiment {
    Experiment {
        name: "network",
        about: "small-world scan and scale-free degree tail",
        params: vec![
            choice("model", &["ws", "ba"], "graph family"),
            int("n", 1000, 3, 10_000_000, "nodes"),
            int("k", 10, 2, 10_000, "ws: ring neighbours (even)"),
            reals("p_values", &[0.0, 0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1.0], NONNEG, 1.0, "ws: rewiring probabilities"),
            int("seeds", 10, 10, 1_000_000, "ws: graphs per probability"),
            int("m", 2, 1, 10_000, "ba: edges per new node"),
            int("d_min", 4, 1, i64::MAX, "ba: smallest degree in the tail fit"),
            int("d_max", 100, 2, i64::MAX, "ba: largest degree in the tail fit"),
            real_in("edge_p", 0.01, NONNEG, 1.0, "ws: rewiring probability of the exported graph"),
            flag("edges", false, "write one graph as an edge list"),
        ],
        replica_key: None,
        check: |p| {
            let mut v = Vec::new();
            let (n, k) = (p.usize("n"), p.usize("k"));
            if p.text("model") == "ws" {
                if k % 2 != 0 || n <= k {
                    v.push(Violation::new("k", "must be even and below n"));
                }
                if !p.reals("p_values").contains(&0.0) {
                    v.push(Violation::new("p_values", "must include 0"));
                }
            } else if p.usize("m") >= n {
                v.push(Violation::new("m", "must be below n"));
            }
            if p.int("d_max") <= p.int("d_min") {
                v.push(Violation::new("d_max", "must exceed d_min"));
            }
            v
        },
        run: |p, rng| {
            let n = p.usize("n");
            let mut out = Vec::new();
            if p.text("model") == "ws" {
                let k = p.usize("k");
                let p_values = p.reals("p_values");
                let scan = small_world_scan(n, k, &p_values, p.usize("seeds"), rng)?;
                let mut t = Table::new(&["p", "clustering", "path_length", "c_ratio", "l_ratio"]);
                for r in &scan.rows {
                    t.push(vec![cell(r.p), cell(r.clustering), cell(r.path_length), cell(r.c_ratio), cell(r.l_ratio)]);
                }
                out.push(Artifact::csv("scan.csv", t));
                out.push(Artifact::json(
                    "summary.json",
                    json!({ "window_p": scan.window_p, "path_length_spearman": scan.path_length_spearman }),
                ));
                if p.flag("edges") {
                    let ws = watts_strogatz(n, k, p.real("edge_p"), &mut rng.substream(p_values.len() as u64))?;
                    out.push(Artifact::text("edges.txt", ws.graph.to_edge_list()));
                }
            } else {
                let g = barabasi_albert(n, p.usize("m"), &mut rng.clone())?;
                let mut t = Table::new(&["degree", "ccdf"]);
                for (d, c) in degree_ccdf(&g) {
                    t.push(vec![cell(d), cell(c)]);
                }
                let (slope, se) = degree_ccdf_slope(&g, p.usize("d_min"), p.usize("d_max"))?;
                out.push(Artifact::csv("degree_ccdf.csv", t));
                out.push(Artifact::json(
                    "summary.json",
                    json!({ "edges": g.edge_count(), "ccdf_slope": slope, "ccdf_slope_stderr": se }),
                ));
                if p.flag("edges") {
                    out.push(Artifact::text("edges.txt", g.to_edge_list()));
                }
            }
            Ok(out)
        },
    }
}

fn search() -> Experiment {
    Experiment {
        name: "search",
        about: "random-walk versus sweep target search tournament",
        params: vec![
            ints("sides", &[32], 1, 1 << 14, "torus side lengths"),
            ints("target_counts", &[1, 256], 1, i64::MAX, "targets per arena"),
            reals("radii", &[0.0, 1.0], NONNEG, f64::INFINITY, "capture radii"),
            int("budget", 0, 0, i64::MAX, "step budget; 0 means 10 side^2"),
            int("replicas", 200, 100, 100_000_000, "arenas per cell"),
        ],
        replica_key: Some("replicas"),
        check: |p| {
            let smallest = p.usizes("sides").into_iter().min().unwrap_or(0);
            if p.usizes("target_counts").into_iter().any(|c| c > smallest * smallest) {
                vec![Violation::new("target_counts", "must not exceed the cell count of the smallest side")]
            } else {
                Vec::new()
            }
        },
        run: |p, rng| {
            let spec = TournamentSpec {
                sides: p.usizes("sides"),
                target_counts: p.usizes("target_counts"),
                radii: p.reals("radii"),
                step_budget: (p.int("budget") > 0).then(|| p.int("budget") as u64),
                replicas: p.usize("replicas"),
            };
            let rows = strategy_tournament(&spec, rng)?;
            let mut t = Table::new(&[
                "side",
                "target_count",
                "radius",
                "strategy",
                "success_probability",
                "mean_steps",
                "median_steps",
                "rank",
            ]);
            for r in &rows {
                t.push(vec![
                    cell(r.side),
                    cell(r.target_count),
                    cell(r.radius),
                    r.strategy.name().to_string(),
                    cell(r.success_probability),
                    opt_cell(r.mean_steps),
                    opt_cell(r.median_steps),
                    cell(r.rank),
                ]);
            }
            Ok(vec![Artifact::csv("tournament.csv", t)])
        },
    }
}

fn mcint() -> Experiment {
    Experiment {
        name: "mcint",
        about: "plain Monte Carlo integration over the unit hypercube",
        params: vec![
            choice("integrand", &["product", "sum_squares", "linear", "constant"], "function to integrate"),
            int("dim", 10, 1, 10_000, "dimension"),
            int("samples", 1_000_000, 2, i64::MAX, "sample points"),
        ],
        replica_key: None,
        check: none,
        run: |p, rng| {
            let dim = p.usize("dim");
            let mut r = rng.clone();
            let (stats, exact) = match p.text("integrand") {
                "product" => (mc_integrate(&mut r, |x| x.iter().product(), dim, p.usize("samples"))?, 0.5f64.powi(dim as i32)),
                "sum_squares" => (mc_integrate(&mut r, |x| x.iter().map(|v| v * v).sum(), dim, p.usize("samples"))?, dim as f64 / 3.0),
                "linear" => (mc_integrate(&mut r, |x| x[0], dim, p.usize("samples"))?, 0.5),
                _ => (mc_integrate(&mut r, |_| 1.0, dim, p.usize("samples"))?, 1.0),
            };
            let z = if stats.std_error > 0.0 { (stats.mean - exact) / stats.std_error } else { 0.0 };
            let summary = json!({
                "estimate": stats.mean,
                "std_error": stats.std_error,
                "variance": stats.variance,
                "samples": stats.n,
                "exact": exact,
                "z_score": z,
            });
            Ok(vec![Artifact::json("summary.json", summary)])
        },
    }
}

fn clt() -> Experiment {
    Experiment {
        name: "clt",
        about: "spread of sample means against sample size",
        params: vec![
            choice("distribution", &["uniform", "exponential", "normal"], "unit-variance source distribution"),
            ints("n_values", &[10, 100, 1000], 2, i64::MAX, "sample sizes"),
            int("replicas", 10_000, 2, i64::MAX, "means per sample size"),
        ],
        replica_key: Some("replicas"),
        check: none,
        run: |p, rng| {
            let ns = p.usizes("n_values");
            let reps = p.usize("replicas");
            let mut r = rng.clone();
            let scan = match p.text("distribution") {
                "exponential" => clt_scaling(&mut r, &Exp::new(1.0).expect("valid rate"), &ns, reps)?,
                "normal" => clt_scaling(&mut r, &StandardNormal, &ns, reps)?,
                _ => {
                    let h = 3f64.sqrt();
                    clt_scaling(&mut r, &Uniform::new(-h, h).expect("valid range"), &ns, reps)?
                }
            };
            let mut t = Table::new(&["n", "std_error", "expected"]);
            for &(n, se) in &scan.points {
                t.push(vec![cell(n), cell(se), cell(1.0 / (n as f64).sqrt())]);
            }
            let summary = json!({ "slope": scan.slope, "slope_stderr": scan.slope_stderr });
            Ok(vec![Artifact::csv("points.csv", t), Artifact::json("summary.json", summary)])
        },
    }
}
