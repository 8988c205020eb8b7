//! Charge-dispersion amplitudes from the tight-binding (phase-slip) sum over
//! 2π-shifted copies of the effective-mode eigenstates.
//!
//! For level n at junction count N:
//!
//! ```text
//! ε_n = 4 N E_L · exp(−π² √(λ²E_L / 8𝓔_C^a) (N−1))
//!     · ∫ dθ ψ_n(θ+2π) ψ_n(θ) [ λ² (π²/2)(1 − 1/N)
//!                              + θ²/2N − ⟨θ̄²⟩_n / 2N
//!                              + exp(−√(𝓔_C^a / 2λ²E_L) (N−1)/N²)
//!                                · ((N−2) cos((θ+π)/N) − N ⟨cos(θ̄/N)⟩_n) ]
//! ```
//!
//! λ < 1 broadens the array-mode Gaussians. It rescales E_L inside both
//! exponentials and the π²/2 term, but not the 4NE_L prefactor. The bracket
//! is kept exactly as written, including the (N−2) versus N asymmetry in the
//! cosine terms; whether that asymmetry is intended is unknown.
//!
//! For reference, the exact single-junction (Mathieu) dispersion decays as
//! exp(−√(8E_J/E_C)); matching that exponent corresponds to λ ≈ 8/π² ≈ 0.81,
//! between the harmonic value 1 and the lower bound 2/π.
//!
//! Next-nearest-neighbour slip terms are not included.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::{DerivedScales, QubitSpec};
use crate::spectrum::{self, EigenSolution};

/// ε_0 and ε_1 at one junction count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionAmplitudes {
    pub n: usize,
    pub eps0: f64,
    pub eps1: f64,
    pub lambda_used: f64,
}

impl DispersionAmplitudes {
    pub fn eps(&self, level: usize) -> f64 {
        match level {
            0 => self.eps0,
            _ => self.eps1,
        }
    }

    /// ε1 − ε0.
    pub fn diff(&self) -> f64 {
        self.eps1 - self.eps0
    }
}

/// Offset charges in units of e: `Q_τ` and `Q_1..Q_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct OffsetCharges {
    pub q_tau: f64,
    pub q_list: Vec<f64>,
}

impl OffsetCharges {
    pub fn new(q_tau: f64, q_list: Vec<f64>) -> Result<Self> {
        if !q_tau.is_finite() || q_list.iter().any(|q| !q.is_finite()) {
            return Err(Error::invalid("offset charge", "charges must be finite"));
        }
        Ok(Self { q_tau, q_list })
    }

    /// `Q_τ = 0`, every `Q_j = e/2`.
    pub fn sweet_spot(n: usize) -> Self {
        Self {
            q_tau: 0.0,
            q_list: vec![0.5; n],
        }
    }
}

/// ε_level for one junction count.
pub fn epsilon_n(
    spec: &QubitSpec,
    sol: &EigenSolution,
    scales: &DerivedScales,
    n: usize,
    level: usize,
) -> Result<f64> {
    if n < 1 {
        return Err(Error::invalid("n", "junction count must be at least 1"));
    }
    if level > 1 {
        return Err(Error::invalid("level", "only levels 0 and 1 are modeled"));
    }
    let nf = n as f64;
    let lambda = spec.lambda();
    let l2 = lambda * lambda;
    let e_l = spec.e_l();
    let ea = scales.script_e_ca;

    let overlap = spectrum::shifted_overlap(sol, level, 1, |_| 1.0)?;
    let shifted_theta2 = spectrum::shifted_overlap(sol, level, 1, |t| t * t)?;
    let shifted_cos = spectrum::shifted_overlap(sol, level, 1, |t| ((t + PI) / nf).cos())?;
    let mean_theta2 = spectrum::expectation(sol, level, |t| t * t)?;
    let mean_cos = spectrum::expectation(sol, level, |t| (t / nf).cos())?;

    let slip = (-(ea / (2.0 * l2 * e_l)).sqrt() * (nf - 1.0) / (nf * nf)).exp();
    let bracket = l2 * 0.5 * PI * PI * (1.0 - 1.0 / nf) * overlap
        + (shifted_theta2 - overlap * mean_theta2) / (2.0 * nf)
        + slip * ((nf - 2.0) * shifted_cos - nf * overlap * mean_cos);
    let prefactor = 4.0 * nf * e_l * (-PI * PI * (l2 * e_l / (8.0 * ea)).sqrt() * (nf - 1.0)).exp();
    Ok(prefactor * bracket)
}

/// ε_0 and ε_1 together.
pub fn dispersion_amplitudes(
    spec: &QubitSpec,
    sol: &EigenSolution,
    scales: &DerivedScales,
    n: usize,
) -> Result<DispersionAmplitudes> {
    Ok(DispersionAmplitudes {
        n,
        eps0: epsilon_n(spec, sol, scales, n, 0)?,
        eps1: epsilon_n(spec, sol, scales, n, 1)?,
        lambda_used: spec.lambda(),
    })
}

/// Energy of level `level` relative to the sweet spot `(0, e/2, …, e/2)`:
/// `−(ε_n/2) Σ_j cos((2πQ_j − πQ_τ)/2e)`.
pub fn dispersion_energy(
    eps: &DispersionAmplitudes,
    charges: &OffsetCharges,
    level: usize,
) -> Result<f64> {
    if charges.q_list.len() != eps.n {
        return Err(Error::invalid(
            "charges",
            format!(
                "expected {} island charges, got {}",
                eps.n,
                charges.q_list.len()
            ),
        ));
    }
    let sum: f64 = charges
        .q_list
        .iter()
        .map(|q| (PI * q - 0.5 * PI * charges.q_tau).cos())
        .sum();
    Ok(-0.5 * eps.eps(level) * sum)
}
