//! Bound-state spectra of `H = p^2 / 2m + V(x)` on a Dirichlet grid.

use serde::Serialize;

use super::wave::Grid;
use crate::potential::Potential;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Level {
    pub index: usize,
    pub energy: f64,
    /// `E_i - E_{i-1}`; absent for the lowest level.
    pub gap: Option<f64>,
}

/// Relative gap change between a grid and its refinement above which the
/// spectrum is declared unconverged.
pub const GAP_STABILITY: f64 = 0.01;

/// Lowest `n_levels` energies with `hbar = m = 1`.
pub fn spectrum_gaps(
    potential: &Potential,
    grid: Grid,
    n_levels: usize,
    commuting_mode: bool,
) -> Result<Vec<Level>> {
    spectrum_gaps_with(potential, grid, n_levels, commuting_mode, 1.0, 1.0)
}

/// Lowest `n_levels` energies.
///
/// Default mode diagonalizes the three-point finite-difference Hamiltonian
/// on the interior grid points (wavefunction zero at both ends), then
/// repeats on the grid with half the spacing; a gap moving by more than
/// 1% means the grid is too coarse. A practical rule is at least 20 points
/// per de Broglie wavelength of the highest requested level.
///
/// `commuting_mode` reads the grid points as momenta `p` and returns the
/// sorted values `p^2 / 2m + v(p)`, the spectrum when kinetic and
/// potential terms commute. Its gaps shrink with the grid spacing.
pub fn spectrum_gaps_with(
    potential: &Potential,
    grid: Grid,
    n_levels: usize,
    commuting_mode: bool,
    hbar: f64,
    mass: f64,
) -> Result<Vec<Level>> {
    if n_levels < 2 {
        return Err(Error::argument("n_levels must be >= 2"));
    }
    if !(hbar > 0.0) || !(mass > 0.0) {
        return Err(Error::domain("hbar and mass must be > 0"));
    }
    if commuting_mode {
        if grid.n_points < n_levels {
            return Err(Error::argument("grid has fewer points than requested levels"));
        }
        let mut e: Vec<f64> = grid
            .points()
            .into_iter()
            .map(|p| p * p / (2.0 * mass) + potential.eval(p))
            .collect();
        e.sort_by(f64::total_cmp);
        e.truncate(n_levels);
        return Ok(with_gaps(e));
    }
    let coarse = dirichlet_levels(potential, grid, n_levels, hbar, mass)?;
    let fine_grid = Grid::new(grid.x_min, grid.x_max, 2 * grid.n_points - 1)?;
    let fine = dirichlet_levels(potential, fine_grid, n_levels, hbar, mass)?;
    for i in 1..n_levels {
        let g0 = coarse[i] - coarse[i - 1];
        let g1 = fine[i] - fine[i - 1];
        let rel = (g0 - g1).abs() / g1.abs().max(f64::MIN_POSITIVE);
        if rel > GAP_STABILITY {
            return Err(Error::Convergence(format!(
                "gap {i} changes by {:.2}% under grid refinement; use a finer grid",
                100.0 * rel
            )));
        }
    }
    Ok(with_gaps(coarse))
}

fn with_gaps(e: Vec<f64>) -> Vec<Level> {
    e.iter()
        .enumerate()
        .map(|(i, &energy)| Level { index: i, energy, gap: (i > 0).then(|| energy - e[i - 1]) })
        .collect()
}

struct Tridiagonal {
    diag: Vec<f64>,
    off: f64,
}

fn hamiltonian(potential: &Potential, grid: Grid, hbar: f64, mass: f64) -> Result<Tridiagonal> {
    if grid.n_points < 3 {
        return Err(Error::argument("grid needs at least one interior point"));
    }
    let dx = grid.dx();
    let t = hbar * hbar / (2.0 * mass * dx * dx);
    let diag = (1..grid.n_points - 1)
        .map(|i| 2.0 * t + potential.eval(grid.x(i)))
        .collect::<Vec<_>>();
    if diag.iter().any(|d| !d.is_finite()) {
        return Err(Error::domain("potential is not finite on the grid"));
    }
    Ok(Tridiagonal { diag, off: -t })
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below `lambda` (Sturm sequence).
    fn count_below(&self, lambda: f64) -> usize {
        let e2 = self.off * self.off;
        let mut count = 0;
        let mut q = 1.0;
        for (i, &d) in self.diag.iter().enumerate() {
            q = d - lambda - if i == 0 { 0.0 } else { e2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (d.abs() + lambda.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let r = 2.0 * self.off.abs();
        let lo = self.diag.iter().cloned().fold(f64::INFINITY, f64::min) - r;
        let hi = self.diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + r;
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue by bisection.
    fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solves `(H - shift) y = b` by the Thomas algorithm.
    fn solve_shifted(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let mut c = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut denom = self.diag[0] - shift;
        c[0] = self.off / denom;
        y[0] = b[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - shift - self.off * c[i - 1];
            c[i] = self.off / denom;
            y[i] = (b[i] - self.off * y[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            y[i] -= c[i] * y[i + 1];
        }
        y
    }
}

fn dirichlet_levels(potential: &Potential, grid: Grid, n_levels: usize, hbar: f64, mass: f64) -> Result<Vec<f64>> {
    let h = hamiltonian(potential, grid, hbar, mass)?;
    if h.diag.len() < n_levels {
        return Err(Error::argument("grid has fewer interior points than requested levels"));
    }
    Ok((0..n_levels).map(|k| h.eigenvalue(k)).collect())
}

/// Lowest eigenpair of the Dirichlet finite-difference Hamiltonian.
#[derive(Clone, Debug, Serialize)]
pub struct GroundState {
    pub energy: f64,
    pub grid: Grid,
    /// Real amplitude on every grid point (zero at both ends), normalized
    /// so that `sum psi_i^2 dx = 1`.
    pub amplitude: Vec<f64>,
}

impl GroundState {
    /// `<f(x)>` in the ground state.
    pub fn expectation(&self, f: impl Fn(f64) -> f64) -> f64 {
        let dx = self.grid.dx();
        self.amplitude
            .iter()
            .enumerate()
            .map(|(i, a)| a * a * f(self.grid.x(i)))
            .sum::<f64>()
            * dx
    }
}

/// Ground state by inverse iteration about the bisection eigenvalue.
pub fn ground_state(potential: &Potential, grid: Grid, hbar: f64, mass: f64) -> Result<GroundState> {
    if !(hbar > 0.0) || !(mass > 0.0) {
        return Err(Error::domain("hbar and mass must be > 0"));
    }
    let h = hamiltonian(potential, grid, hbar, mass)?;
    let e0 = h.eigenvalue(0);
    let shift = e0 - 1e-9 * (1.0 + e0.abs());
    let n = h.diag.len();
    let mut v = vec![1.0; n];
    for _ in 0..8 {
        v = h.solve_shifted(shift, &v);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
    }
    let dx = grid.dx();
    let scale = 1.0 / (v.iter().map(|x| x * x).sum::<f64>() * dx).sqrt();
    let sign = if v.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let mut amplitude = Vec::with_capacity(grid.n_points);
    amplitude.push(0.0);
    amplitude.extend(v.iter().map(|x| sign * scale * x));
    amplitude.push(0.0);
    Ok(GroundState { energy: e0, grid, amplitude })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ho_grid() -> Grid {
        Grid::symmetric(8.0, 801).unwrap()
    }

    #[test]
    fn harmonic_ladder() {
        let levels = spectrum_gaps(&Potential::harmonic(1.0), ho_grid(), 6, false).unwrap();
        assert!((levels[0].energy - 0.5).abs() < 0.005);
        assert!((levels[1].energy - 1.5).abs() < 0.01);
        assert!(levels[0].gap.is_none());
        for l in &levels[1..] {
            assert!((l.gap.unwrap() - 1.0).abs() < 0.01, "{l:?}");
        }
    }

    #[test]
    fn box_energies_scale_quadratically() {
        let grid = Grid::new(0.0, 1.0, 401).unwrap();
        let levels = spectrum_gaps(&Potential::Free, grid, 3, false).unwrap();
        let ratio = levels[1].energy / levels[0].energy;
        assert!((ratio - 4.0).abs() < 0.08, "{ratio}");
        let exact = std::f64::consts::PI.powi(2) / 2.0;
        assert!((levels[0].energy - exact).abs() / exact < 1e-3);
    }

    #[test]
    fn commuting_band_gaps_shrink_as_one_over_n() {
        let max_gap = |n: usize| {
            let grid = Grid::symmetric(1.0, n).unwrap();
            spectrum_gaps(&Potential::Free, grid, n, true)
                .unwrap()
                .iter()
                .filter_map(|l| l.gap)
                .fold(0.0, f64::max)
        };
        let (g1, g2, g3) = (max_gap(101), max_gap(201), max_gap(401));
        assert!((g1 / g2 - 2.0).abs() < 0.05, "{g1} {g2}");
        assert!((g2 / g3 - 2.0).abs() < 0.05, "{g2} {g3}");
    }

    #[test]
    fn confining_gaps_are_resolution_independent() {
        let g = |n| {
            spectrum_gaps(&Potential::harmonic(1.0), Grid::symmetric(8.0, n).unwrap(), 4, false)
                .unwrap()
                .iter()
                .filter_map(|l| l.gap)
                .fold(f64::INFINITY, f64::min)
        };
        assert!(g(401) > 0.98 && g(1601) > 0.98);
    }

    #[test]
    fn coarse_grid_is_a_convergence_error() {
        let grid = Grid::symmetric(8.0, 12).unwrap();
        let r = spectrum_gaps(&Potential::harmonic(1.0), grid, 4, false);
        assert!(matches!(r, Err(Error::Convergence(_))), "{r:?}");
    }

    #[test]
    fn too_few_levels() {
        assert!(spectrum_gaps(&Potential::Free, ho_grid(), 1, false).is_err());
    }

    #[test]
    fn harmonic_ground_state_moments() {
        let gs = ground_state(&Potential::harmonic(1.0), ho_grid(), 1.0, 1.0).unwrap();
        assert!((gs.energy - 0.5).abs() < 1e-4);
        assert!((gs.expectation(|_| 1.0) - 1.0).abs() < 1e-12);
        assert!((gs.expectation(|x| x * x) - 0.5).abs() < 1e-4);
        assert!(gs.amplitude.iter().all(|&a| a >= -1e-12));
    }
}
