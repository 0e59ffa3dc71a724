//! Grid wavefunctions, spectral free evolution and the imaginary-time map.

use std::f64::consts::PI;

use rustfft::{num_complex::Complex64, FftPlanner};
use serde::Serialize;

use super::amplitude::ComplexAmplitude;
use crate::{Error, Result, RngStream};

/// Uniform grid `x_i = x_min + i dx`, `dx = (x_max - x_min) / (n_points - 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::argument("grid needs at least 2 points"));
        }
        if !(x_max > x_min) {
            return Err(Error::argument("grid requires x_max > x_min"));
        }
        Ok(Self { x_min, x_max, n_points })
    }

    /// Symmetric grid `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n_points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n_points)
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    /// Angular wavenumbers in FFT order for the periodic extension of the
    /// grid (period `n_points * dx`).
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points;
        let dk = 2.0 * PI / (n as f64 * self.dx());
        (0..n)
            .map(|j| if j <= n / 2 { j as f64 } else { j as f64 - n as f64 } * dk)
            .collect()
    }
}

/// Discretized wavefunction, normalized so that `sum |psi_i|^2 dx = 1`.
#[derive(Clone, Debug, Serialize)]
pub struct WaveState {
    pub grid: Grid,
    pub values: Vec<ComplexAmplitude>,
    pub hbar: f64,
    pub mass: f64,
}

impl WaveState {
    /// Normalizes `values`; fails if they carry no probability.
    pub fn new(grid: Grid, values: Vec<ComplexAmplitude>, hbar: f64, mass: f64) -> Result<Self> {
        if values.len() != grid.n_points {
            return Err(Error::argument("values length differs from grid size"));
        }
        if !(hbar > 0.0) || !(mass > 0.0) {
            return Err(Error::domain("hbar and mass must be > 0"));
        }
        let mut state = Self { grid, values, hbar, mass };
        let norm = state.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::argument("state has zero or non-finite norm"));
        }
        let s = 1.0 / norm.sqrt();
        state.values.iter_mut().for_each(|v| *v = v.scale(s));
        Ok(state)
    }

    /// `psi ~ exp(-(x - x0)^2 / (4 sigma0^2) + i p0 x / hbar)`; position
    /// spread is exactly `sigma0`.
    pub fn gaussian(grid: Grid, x0: f64, sigma0: f64, p0: f64, hbar: f64, mass: f64) -> Result<Self> {
        if !(sigma0 > 0.0) {
            return Err(Error::domain("sigma0 must be > 0"));
        }
        let values = grid
            .points()
            .into_iter()
            .map(|x| {
                let r = (-(x - x0).powi(2) / (4.0 * sigma0 * sigma0)).exp();
                ComplexAmplitude::from_polar(r, p0 * x / hbar)
            })
            .collect();
        Self::new(grid, values, hbar, mass)
    }

    /// Superposition of one to four Gaussian packets with random centres in
    /// the middle fifth of the grid, widths between 1/75 and 1/15 of the
    /// half-width, wavenumbers within an eighth of the grid cutoff, and
    /// random complex weights.
    pub fn random_packets(grid: Grid, rng: &mut RngStream, hbar: f64, mass: f64) -> Result<Self> {
        let centre = 0.5 * (grid.x_min + grid.x_max);
        let half = 0.5 * (grid.x_max - grid.x_min);
        let k_max = PI / grid.dx() / 8.0;
        let packets = 1 + rng.index(4);
        let spec: Vec<(f64, f64, f64, ComplexAmplitude)> = (0..packets)
            .map(|_| {
                let x0 = centre + 0.2 * half * (2.0 * rng.uniform() - 1.0);
                let sigma = half * (1.0 / 75.0 + (1.0 / 15.0 - 1.0 / 75.0) * rng.uniform());
                let k = k_max * (2.0 * rng.uniform() - 1.0);
                let c = ComplexAmplitude::from_polar(0.2 + rng.uniform(), 2.0 * PI * rng.uniform());
                (x0, sigma, k, c)
            })
            .collect();
        let values = grid
            .points()
            .into_iter()
            .map(|x| {
                spec.iter().fold(ComplexAmplitude::ZERO, |acc, &(x0, s, k, c)| {
                    let r = (-(x - x0).powi(2) / (4.0 * s * s)).exp();
                    acc + c * ComplexAmplitude::from_polar(r, k * x)
                })
            })
            .collect();
        Self::new(grid, values, hbar, mass)
    }

    /// `sum |psi_i|^2 dx`.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.probability()).sum::<f64>() * self.grid.dx()
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.probability()).collect()
    }

    /// Position spread `sqrt(<(X - <X>)^2>)`.
    pub fn position_spread(&self) -> f64 {
        let dx = self.grid.dx();
        let (mut m1, mut m2) = (0.0, 0.0);
        for (i, v) in self.values.iter().enumerate() {
            let p = v.probability() * dx;
            let x = self.grid.x(i);
            m1 += p * x;
            m2 += p * x * x;
        }
        (m2 - m1 * m1).max(0.0).sqrt()
    }

    /// Momentum spread from the discrete Fourier transform, `p = hbar k`.
    pub fn momentum_spread(&self) -> f64 {
        let mut buf: Vec<Complex64> = self.values.iter().map(|&v| v.into()).collect();
        FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
        let ks = self.grid.wavenumbers();
        let (mut w, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for (c, k) in buf.iter().zip(ks) {
            let p = self.hbar * k;
            let a = c.norm_sqr();
            w += a;
            m1 += a * p;
            m2 += a * p * p;
        }
        m1 /= w;
        m2 /= w;
        (m2 - m1 * m1).max(0.0).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Uncertainty {
    pub dx: f64,
    pub dp: f64,
    pub product: f64,
}

const NORM_TOLERANCE: f64 = 1e-6;

/// `Delta X * Delta P`, which is bounded below by `hbar / 2`.
pub fn uncertainty_product(state: &WaveState) -> Result<Uncertainty> {
    let norm = state.norm();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::argument(format!("state is not normalized (norm = {norm})")));
    }
    let dx = state.position_spread();
    let dp = state.momentum_spread();
    Ok(Uncertainty { dx, dp, product: dx * dp })
}

/// Exact free evolution on the periodic grid: multiply each Fourier mode by
/// `exp(-i hbar k^2 t / (2 m))`.
pub fn evolve_free(state: &WaveState, t: f64) -> Result<WaveState> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("t must be >= 0, got {t}")));
    }
    let n = state.values.len();
    let mut planner = FftPlanner::new();
    let mut buf: Vec<Complex64> = state.values.iter().map(|&v| v.into()).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    let c = state.hbar * t / (2.0 * state.mass);
    for (b, k) in buf.iter_mut().zip(state.grid.wavenumbers()) {
        *b *= Complex64::from_polar(1.0, -c * k * k);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let inv = 1.0 / n as f64;
    Ok(WaveState {
        grid: state.grid,
        values: buf.into_iter().map(|z| (z * inv).into()).collect(),
        hbar: state.hbar,
        mass: state.mass,
    })
}

/// Imaginary-time free evolution versus the heat kernel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WickCheck {
    /// Spread of the profile evolved by the Schroedinger propagator with
    /// `t -> -i t`.
    pub quantum_width: f64,
    /// Spread of the initial profile convolved with the heat kernel,
    /// `D = hbar / 2m`.
    pub diffusion_width: f64,
    /// `max |u_quantum - u_diffusion| / max u_diffusion` on the grid.
    pub residual: f64,
    pub hbar: f64,
    pub mass: f64,
}

/// Start from a normalized Gaussian profile of spread `sigma0` and evolve
/// it two ways: (a) the free Schroedinger propagator continued to
/// imaginary time, `exp(-hbar k^2 t / 2m)` per Fourier mode, with
/// `hbar = 1`, `m = 1 / (2 D)`; (b) the analytic diffusion solution with
/// coefficient `D`, whose variance is `sigma0^2 + 2 D t`. The profile is
/// read as the probability density itself (the quantity that diffuses).
pub fn wick_rotate_check(sigma0: f64, d_coeff: f64, t: f64) -> Result<WickCheck> {
    for (name, v) in [("sigma0", sigma0), ("d_coeff", d_coeff), ("t", t)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::domain(format!("{name} must be > 0, got {v}")));
        }
    }
    let hbar = 1.0;
    let mass = hbar / (2.0 * d_coeff);
    let final_var = sigma0 * sigma0 + 2.0 * d_coeff * t;
    let grid = Grid::symmetric(14.0 * final_var.sqrt(), 4096)?;
    let n = grid.n_points;

    // Route (a): exact Fourier transform of the initial Gaussian, then the
    // imaginary-time propagator, back to the grid with the x_min phase.
    let mut buf: Vec<Complex64> = grid
        .wavenumbers()
        .into_iter()
        .map(|k| {
            let amp = (-0.5 * sigma0 * sigma0 * k * k).exp() * (-hbar * k * k * t / (2.0 * mass)).exp();
            Complex64::from_polar(amp, k * grid.x_min)
        })
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let period = n as f64 * grid.dx();
    let quantum: Vec<f64> = buf.iter().map(|z| z.re / period).collect();

    // Route (b): heat-kernel solution.
    let diffusion: Vec<f64> = grid
        .points()
        .into_iter()
        .map(|x| (-x * x / (2.0 * final_var)).exp() / (2.0 * PI * final_var).sqrt())
        .collect();

    let peak = diffusion.iter().cloned().fold(0.0, f64::max);
    let residual = quantum
        .iter()
        .zip(&diffusion)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / peak;
    Ok(WickCheck {
        quantum_width: profile_spread(&grid, &quantum),
        diffusion_width: profile_spread(&grid, &diffusion),
        residual,
        hbar,
        mass,
    })
}

fn profile_spread(grid: &Grid, u: &[f64]) -> f64 {
    let (mut w, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for (i, &v) in u.iter().enumerate() {
        let x = grid.x(i);
        w += v;
        m1 += v * x;
        m2 += v * x * x;
    }
    m1 /= w;
    m2 /= w;
    (m2 - m1 * m1).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gaussian(sigma0: f64) -> WaveState {
        let grid = Grid::symmetric(40.0, 2048).unwrap();
        WaveState::gaussian(grid, 0.0, sigma0, 0.0, 1.0, 1.0).unwrap()
    }

    fn random_state(rng: &mut RngStream, grid: Grid) -> WaveState {
        WaveState::random_packets(grid, rng, 1.0, 1.0).unwrap()
    }

    #[test]
    fn construction_normalizes() {
        let s = gaussian(1.3);
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn minimum_uncertainty_gaussian() {
        let u = uncertainty_product(&gaussian(1.0)).unwrap();
        assert!((u.product - 0.5).abs() < 1e-3, "{u:?}");
        assert!((u.dx - 1.0).abs() < 1e-6);
    }

    #[test]
    fn gaussian_scaling_symmetry() {
        let a = uncertainty_product(&gaussian(1.0)).unwrap();
        let b = uncertainty_product(&gaussian(2.0)).unwrap();
        assert!((b.dx / a.dx - 2.0).abs() < 1e-3);
        assert!((b.dp / a.dp - 0.5).abs() < 1e-3);
        assert!((b.product - 0.5).abs() < 1e-3);
    }

    #[test]
    fn double_hump_exceeds_bound() {
        let grid = Grid::symmetric(40.0, 2048).unwrap();
        let values = grid
            .points()
            .into_iter()
            .map(|x| {
                let r = (-(x - 3.0).powi(2) / 4.0).exp() + (-(x + 3.0).powi(2) / 4.0).exp();
                ComplexAmplitude::new(r, 0.0)
            })
            .collect();
        let s = WaveState::new(grid, values, 1.0, 1.0).unwrap();
        let u = uncertainty_product(&s).unwrap();
        assert!(u.product > 0.5 + 1e-3, "{u:?}");
    }

    #[test]
    fn unnormalized_state_is_rejected() {
        let mut s = gaussian(1.0);
        s.values.iter_mut().for_each(|v| *v = v.scale(2.0));
        assert!(matches!(uncertainty_product(&s), Err(Error::Argument(_))));
    }

    #[test]
    fn random_states_respect_bound() {
        let grid = Grid::symmetric(40.0, 1024).unwrap();
        let mut rng = RngStream::new(99, 0);
        for _ in 0..200 {
            let s = random_state(&mut rng, grid);
            let u = uncertainty_product(&s).unwrap();
            assert!(u.product >= 0.5 - 1e-3, "{u:?}");
        }
    }

    #[test]
    fn evolve_zero_time_is_identity() {
        let s = random_state(&mut RngStream::new(1, 0), Grid::symmetric(30.0, 512).unwrap());
        let e = evolve_free(&s, 0.0).unwrap();
        for (a, b) in s.values.iter().zip(&e.values) {
            assert!((a.re - b.re).abs() < 1e-12 && (a.im - b.im).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_spreading_matches_closed_form() {
        let e = evolve_free(&gaussian(1.0), 2.0).unwrap();
        assert!((e.position_spread() - 2f64.sqrt()).abs() < 1e-3);
        assert!((e.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn negative_time_rejected() {
        assert!(evolve_free(&gaussian(1.0), -1.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn evolution_is_unitary(seed in 0u64..1_000_000, t in 0.0f64..10.0) {
            let s = random_state(&mut RngStream::new(seed, 0), Grid::symmetric(40.0, 512).unwrap());
            let e = evolve_free(&s, t).unwrap();
            prop_assert!((e.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn wick_point_source_variance() {
        let w = wick_rotate_check(1e-4, 0.5, 1.0).unwrap();
        assert!((w.diffusion_width.powi(2) - 1.0).abs() < 1e-6);
        assert!((w.quantum_width.powi(2) - 1.0).abs() < 1e-6);
        assert!((w.mass - 1.0).abs() < 1e-15);
    }

    #[test]
    fn wick_small_time_recovers_initial_width() {
        let w = wick_rotate_check(1.0, 0.5, 1e-9).unwrap();
        assert!((w.quantum_width - 1.0).abs() < 1e-6);
        assert!((w.diffusion_width - 1.0).abs() < 1e-6);
    }

    #[test]
    fn wick_identity_residual() {
        let w = wick_rotate_check(1.0, 0.5, 0.5).unwrap();
        assert!(w.residual < 1e-6, "{w:?}");
        assert!((w.quantum_width - w.diffusion_width).abs() < 1e-6);
    }
}
