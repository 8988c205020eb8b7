//! Dephasing, relaxation and net coherence times.
//!
//! Energies are E/h in GHz, so every E/ħ becomes `2π · 1e9 · E[GHz]` rad/s.
//!
//! ```text
//! 1/Tφ = √((N/2)((N−1)/2 + r²)) · 2π·1e9·|ε1 − ε0| · (A_charge/e) · π/2
//! 1/T1 = 8 (2π·1e9·E_C)² |⟨ψ0|n|ψ1⟩|² ((N−2)(N−1)/6N + r²) · S_charge(ω01)/e²
//! 1/T2 = 1/Tφ + 1/(2 T1)
//! ```
//!
//! with `r = C_d^b / C_d^a`. Times are in µs; a vanishing rate gives
//! `f64::INFINITY`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::noise::{self, NoiseSpec};
use crate::params::QubitSpec;
use crate::spectrum::EigenSolution;
use crate::tightbinding::DispersionAmplitudes;

const GHZ_TO_RAD_PER_S: f64 = 2.0 * PI * 1e9;
const SECONDS_TO_MICROS: f64 = 1e6;

/// One row of an N sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceRecord {
    pub n: usize,
    pub t_phi: f64,
    pub t_one: f64,
    pub t_two: f64,
    pub f01: f64,
    pub ratio_ja_ca: f64,
    pub eps0: f64,
    pub eps1: f64,
    /// ε1 − ε0 in GHz.
    pub eps_diff: f64,
}

fn rate_to_micros(rate: f64) -> f64 {
    if rate == 0.0 {
        f64::INFINITY
    } else {
        SECONDS_TO_MICROS / rate
    }
}

/// Pure dephasing time from 1/f charge noise, µs.
pub fn t_phi(eps: &DispersionAmplitudes, noise: &NoiseSpec, n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::invalid("n", "junction count must be at least 1"));
    }
    if !(eps.eps0.is_finite() && eps.eps1.is_finite()) {
        return Err(Error::invalid(
            "eps",
            "dispersion amplitudes are not finite",
        ));
    }
    let nf = n as f64;
    let r = noise.cd_ratio();
    let multiplicity = (0.5 * nf * (0.5 * (nf - 1.0) + r * r)).sqrt();
    let rate = multiplicity
        * GHZ_TO_RAD_PER_S
        * (eps.eps1 - eps.eps0).abs()
        * noise::low_freq_amplitude(noise)
        * PI
        / 2.0;
    Ok(rate_to_micros(rate))
}

/// Relaxation time from ohmic charge noise at ω01, µs.
pub fn t_one(
    spec: &QubitSpec,
    sol: &EigenSolution,
    matelem: f64,
    noise: &NoiseSpec,
    n: usize,
) -> Result<f64> {
    t_one_at(spec, sol.f01(), matelem, noise, n)
}

/// [`t_one`] for an explicit transition frequency in GHz.
pub fn t_one_at(
    spec: &QubitSpec,
    f01: f64,
    matelem: f64,
    noise: &NoiseSpec,
    n: usize,
) -> Result<f64> {
    if n < 1 {
        return Err(Error::invalid("n", "junction count must be at least 1"));
    }
    if !(matelem.is_finite() && matelem >= 0.0) {
        return Err(Error::invalid(
            "matelem",
            "must be a non-negative magnitude",
        ));
    }
    let nf = n as f64;
    let r = noise.cd_ratio();
    let ec = GHZ_TO_RAD_PER_S * spec.e_c();
    let islands = (nf - 2.0) * (nf - 1.0) / (6.0 * nf) + r * r;
    let rate = 8.0 * ec * ec * matelem * matelem * islands * noise::s_charge_over_e2(noise, f01);
    Ok(rate_to_micros(rate))
}

/// `1/T2 = 1/Tφ + 1/(2T1)`; infinite inputs contribute zero rate.
pub fn t_two(t_phi: f64, t_one: f64) -> f64 {
    let rate = 1.0 / t_phi + 0.5 / t_one;
    if rate == 0.0 {
        f64::INFINITY
    } else {
        1.0 / rate
    }
}
