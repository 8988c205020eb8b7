//! Low-lying eigenstates of the single-mode fluxonium Hamiltonian
//!
//! ```text
//! H = 4 E_C n² + E_J (1 − cos(θ − φ)) + E_L θ²/2,   n = −i ∂/∂θ
//! ```
//!
//! on the non-compact phase axis. The offset charge is a pure gauge here and
//! does not enter. `n²` is discretized with second-order central differences
//! on a symmetric uniform grid whose spacing divides 2π exactly, so that
//! 2π-shifted overlaps are index shifts.

use std::f64::consts::PI;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::linalg;
use crate::params::QubitSpec;

const TWO_PI: f64 = 2.0 * PI;

/// Minimum number of grid points.
pub const MIN_POINTS: usize = 512;
/// Grid steps per 2π used by [`PhaseGrid::auto`].
pub const DEFAULT_STEPS_PER_PERIOD: usize = 2048;
/// Refinement stops once every requested level moves less than this (GHz)
/// under grid doubling.
pub const CONVERGENCE_TOL_GHZ: f64 = 1e-7;
/// Largest steps-per-2π the refinement loop will try.
pub const MAX_STEPS_PER_PERIOD: usize = 1 << 17;
/// Wavefunction amplitude allowed at either grid edge.
pub const BOUNDARY_TOL: f64 = 1e-10;
const MAX_WIDENINGS: usize = 8;

/// Symmetric phase grid `θ_k = k·h`, `k = −K..=K`, with `h = 2π/m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseGrid {
    half_points: usize,
    steps_per_period: usize,
}

impl PhaseGrid {
    /// Grid reaching at least `theta_max` with `steps_per_period` points per 2π.
    pub fn new(theta_max: f64, steps_per_period: usize) -> Result<Self> {
        if !(theta_max.is_finite() && theta_max > 0.0) {
            return Err(Error::invalid(
                "theta_max",
                format!("must be positive, got {theta_max}"),
            ));
        }
        if steps_per_period < 4 {
            return Err(Error::invalid("steps_per_period", "must be at least 4"));
        }
        let h = TWO_PI / steps_per_period as f64;
        let half_points = (theta_max / h - 1e-9).ceil() as usize;
        let grid = Self {
            half_points,
            steps_per_period,
        };
        if grid.points() < MIN_POINTS {
            return Err(Error::invalid(
                "points",
                format!(
                    "grid has {} points, need at least {MIN_POINTS}",
                    grid.points()
                ),
            ));
        }
        Ok(grid)
    }

    /// Extent `max(4π, 8·w)` where `w = (8E_C/E_L)^{1/4}` is the Gaussian
    /// width of the inductive ground state.
    pub fn auto(spec: &QubitSpec) -> Self {
        let width = (8.0 * spec.e_c() / spec.e_l()).powf(0.25);
        let theta_max = (4.0 * PI).max(8.0 * width);
        Self::new(theta_max, DEFAULT_STEPS_PER_PERIOD).expect("auto grid is always valid")
    }

    pub fn spacing(&self) -> f64 {
        TWO_PI / self.steps_per_period as f64
    }

    pub fn points(&self) -> usize {
        2 * self.half_points + 1
    }

    pub fn steps_per_period(&self) -> usize {
        self.steps_per_period
    }

    pub fn theta_max(&self) -> f64 {
        self.half_points as f64 * self.spacing()
    }

    pub fn theta_min(&self) -> f64 {
        -self.theta_max()
    }

    pub fn theta(&self, index: usize) -> f64 {
        (index as f64 - self.half_points as f64) * self.spacing()
    }

    pub fn thetas(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points()).map(move |i| self.theta(i))
    }

    /// Same extent, twice the resolution.
    pub fn refined(&self) -> Self {
        Self {
            half_points: 2 * self.half_points,
            steps_per_period: 2 * self.steps_per_period,
        }
    }

    /// Same resolution, extent grown by 2π on each side.
    pub fn widened(&self) -> Self {
        Self {
            half_points: self.half_points + self.steps_per_period,
            steps_per_period: self.steps_per_period,
        }
    }
}

/// Normalized real eigenfunctions on a [`PhaseGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSolution {
    grid: PhaseGrid,
    flux_phi: f64,
    energies: Vec<f64>,
    wavefunctions: Vec<Vec<f64>>,
}

impl EigenSolution {
    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn flux_phi(&self) -> f64 {
        self.flux_phi
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn levels(&self) -> usize {
        self.energies.len()
    }

    pub fn wavefunction(&self, level: usize) -> &[f64] {
        &self.wavefunctions[level]
    }

    /// E1 − E0 in GHz.
    pub fn f01(&self) -> f64 {
        self.energies[1] - self.energies[0]
    }

    /// Largest |ψ| at either edge of the grid, over all levels.
    pub fn boundary_amplitude(&self) -> f64 {
        self.wavefunctions
            .iter()
            .map(|psi| psi[0].abs().max(psi[psi.len() - 1].abs()))
            .fold(0.0, f64::max)
    }

    /// ∫ψ_n(θ) ψ_n(−θ) dθ: +1 for an even state, −1 for an odd one.
    pub fn parity_overlap(&self, level: usize) -> f64 {
        let psi = &self.wavefunctions[level];
        let h = self.grid.spacing();
        trapezoid(
            psi.iter().zip(psi.iter().rev()).map(|(a, b)| a * b),
            psi.len(),
            h,
        )
    }
}

fn trapezoid(values: impl Iterator<Item = f64>, len: usize, h: f64) -> f64 {
    let mut sum = 0.0;
    for (i, v) in values.enumerate() {
        sum += if i == 0 || i + 1 == len { 0.5 * v } else { v };
    }
    sum * h
}

/// Diagonalize on exactly `grid`, without refinement.
pub fn solve_on_grid(spec: &QubitSpec, grid: &PhaseGrid, n_levels: usize) -> Result<EigenSolution> {
    if n_levels < 2 {
        return Err(Error::invalid("n_levels", "need at least levels 0 and 1"));
    }
    let h = grid.spacing();
    let kinetic = 4.0 * spec.e_c() / (h * h);
    let phi = spec.flux_phi();
    let diag: Vec<f64> = grid
        .thetas()
        .map(|t| 2.0 * kinetic + spec.e_j() * (1.0 - (t - phi).cos()) + 0.5 * spec.e_l() * t * t)
        .collect();
    let off = vec![-kinetic; diag.len() - 1];

    let energies = linalg::tridiagonal_lowest(&diag, &off, n_levels);
    for pair in energies.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::NonConvergence(format!(
                "levels not separated on the grid ({} vs {})",
                pair[0], pair[1]
            )));
        }
    }
    let wavefunctions = energies
        .iter()
        .map(|&e| {
            let mut psi = linalg::tridiagonal_eigenvector(&diag, &off, e);
            let norm = trapezoid(psi.iter().map(|v| v * v), psi.len(), h).sqrt();
            psi.iter_mut().for_each(|v| *v /= norm);
            fix_sign(&mut psi);
            psi
        })
        .collect();

    Ok(EigenSolution {
        grid: *grid,
        flux_phi: phi,
        energies,
        wavefunctions,
    })
}

/// Make ψ positive at its first extremum from the left.
fn fix_sign(psi: &mut [f64]) {
    let peak = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-3 * peak;
    let first = (1..psi.len() - 1)
        .find(|&i| psi[i].abs() > floor && (psi[i] - psi[i - 1]) * (psi[i + 1] - psi[i]) <= 0.0);
    if let Some(i) = first {
        if psi[i] < 0.0 {
            psi.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

/// Solve starting from `grid`, doubling the resolution until the requested
/// energies are stable to [`CONVERGENCE_TOL_GHZ`] and widening the extent
/// while the wavefunctions have not decayed below [`BOUNDARY_TOL`].
pub fn solve_fluxonium(
    spec: &QubitSpec,
    grid: &PhaseGrid,
    n_levels: usize,
) -> Result<EigenSolution> {
    let mut grid = *grid;
    let mut widenings = 0;
    let mut previous: Option<EigenSolution> = None;
    loop {
        let sol = solve_on_grid(spec, &grid, n_levels)?;
        if sol.boundary_amplitude() > BOUNDARY_TOL {
            if widenings == MAX_WIDENINGS {
                return Err(Error::NonConvergence(format!(
                    "wavefunction amplitude {:.3e} at θ = ±{:.3} after {MAX_WIDENINGS} widenings",
                    sol.boundary_amplitude(),
                    grid.theta_max()
                )));
            }
            widenings += 1;
            grid = grid.widened();
            previous = None;
            continue;
        }
        if let Some(prev) = &previous {
            let stable = prev
                .energies
                .iter()
                .zip(&sol.energies)
                .all(|(a, b)| (a - b).abs() < CONVERGENCE_TOL_GHZ);
            if stable {
                return Ok(sol);
            }
        }
        if grid.steps_per_period() >= MAX_STEPS_PER_PERIOD {
            return Err(Error::NonConvergence(format!(
                "energies still moving at {} steps per 2π",
                grid.steps_per_period()
            )));
        }
        previous = Some(sol);
        grid = grid.refined();
    }
}

/// |⟨ψ_a| n |ψ_b⟩| with `n = −i ∂/∂θ` (central differences).
pub fn charge_matrix_element_between(sol: &EigenSolution, a: usize, b: usize) -> f64 {
    let left = &sol.wavefunctions[a];
    let right = &sol.wavefunctions[b];
    let h = sol.grid.spacing();
    let n = right.len();
    let derivative = |i: usize| {
        let up = if i + 1 < n { right[i + 1] } else { 0.0 };
        let down = if i > 0 { right[i - 1] } else { 0.0 };
        (up - down) / (2.0 * h)
    };
    let sum: f64 = (0..n).map(|i| left[i] * derivative(i)).sum();
    (sum * h).abs()
}

/// |⟨ψ0| n |ψ1⟩|.
pub fn charge_matrix_element(sol: &EigenSolution) -> f64 {
    charge_matrix_element_between(sol, 0, 1)
}

/// `∫ ψ_n(θ + 2π·shift) ψ_n(θ) w(θ) dθ` by the trapezoid rule. The shifted
/// factor is zero beyond the grid, which is exact to [`BOUNDARY_TOL`].
pub fn shifted_overlap<W>(sol: &EigenSolution, level: usize, shift: usize, weight: W) -> Result<f64>
where
    W: Fn(f64) -> f64,
{
    if level >= sol.levels() {
        return Err(Error::invalid(
            "level",
            format!("solution holds {} levels", sol.levels()),
        ));
    }
    let offset = shift * sol.grid.steps_per_period();
    let points = sol.grid.points();
    if shift > 0 {
        if offset >= points || sol.grid.theta_max() < TWO_PI * shift as f64 {
            return Err(Error::ShiftOutsideSupport(format!(
                "grid half-width {:.3} cannot hold a {shift}×2π shift",
                sol.grid.theta_max()
            )));
        }
        if sol.boundary_amplitude() > BOUNDARY_TOL {
            return Err(Error::ShiftOutsideSupport(format!(
                "edge amplitude {:.3e} exceeds {BOUNDARY_TOL:e}",
                sol.boundary_amplitude()
            )));
        }
    }
    let psi = &sol.wavefunctions[level];
    let len = points - offset;
    let h = sol.grid.spacing();
    Ok(trapezoid(
        (0..len).map(|i| psi[i + offset] * psi[i] * weight(sol.grid.theta(i))),
        len,
        h,
    ))
}

/// `∫ |ψ_n(θ)|² w(θ) dθ`.
pub fn expectation<W>(sol: &EigenSolution, level: usize, weight: W) -> Result<f64>
where
    W: Fn(f64) -> f64,
{
    shifted_overlap(sol, level, 0, weight)
}

/// Two-column `θ ψ_n(θ)` text, one block per level separated by a blank line.
/// At most `max_points` rows are written per level.
pub fn write_wavefunctions<W: Write>(
    sol: &EigenSolution,
    out: &mut W,
    max_points: usize,
) -> io::Result<()> {
    let stride = sol.grid.points().div_ceil(max_points.max(1)).max(1);
    for (level, psi) in sol.wavefunctions.iter().enumerate() {
        if level > 0 {
            writeln!(out)?;
        }
        writeln!(out, "# level {level} energy_ghz {}", sol.energies[level])?;
        for i in (0..psi.len()).step_by(stride) {
            writeln!(out, "{} {}", sol.grid.theta(i), psi[i])?;
        }
    }
    Ok(())
}
