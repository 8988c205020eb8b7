//! Circuit scales shared by every junction count, and the per-N array
//! junction parameters that keep the effective qubit Hamiltonian fixed.
//!
//! All energies are E/h in GHz. Holding the qubit-level `E_C`, `E_J`, `E_L`
//! fixed, the black-sheep capacitance is tied to its Josephson energy by the
//! junction-area scaling `C^b/C^a = E_J^b/E_J^a`, which gives
//!
//! ```text
//! e²/2C^b = E_C (1 + E_L/E_J)
//! 𝓔_C^a   = N·E_C^a = 1 / (1/E_C − 2C^b/e²)
//! E_J^a   = N·E_L
//! ```

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Target fluxonium parameters, held fixed while N varies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitSpec {
    e_c: f64,
    e_j: f64,
    e_l: f64,
    flux_phi: f64,
    lambda: f64,
    cd_ratio: f64,
}

impl QubitSpec {
    /// Charging, black-sheep Josephson and inductive energies in GHz, with
    /// flux φ = π, λ = 1 and `C_d^b/C_d^a` = 1.
    pub fn new(e_c: f64, e_j: f64, e_l: f64) -> Result<Self> {
        for (name, value) in [("e_c", e_c), ("e_j", e_j), ("e_l", e_l)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(
                    name,
                    format!("must be a positive energy, got {value}"),
                ));
            }
        }
        Ok(Self {
            e_c,
            e_j,
            e_l,
            flux_phi: PI,
            lambda: 1.0,
            cd_ratio: 1.0,
        })
    }

    pub fn with_flux(mut self, flux_phi: f64) -> Result<Self> {
        if !flux_phi.is_finite() {
            return Err(Error::invalid("flux_phi", "must be finite"));
        }
        self.flux_phi = flux_phi;
        Ok(self)
    }

    /// Wavefunction broadening factor for the array modes, λ ∈ (0, 1].
    pub fn with_lambda(mut self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::invalid(
                "lambda",
                format!("must lie in (0, 1], got {lambda}"),
            ));
        }
        self.lambda = lambda;
        Ok(self)
    }

    /// Ratio of end-island to array-island ground capacitance.
    pub fn with_cd_ratio(mut self, cd_ratio: f64) -> Result<Self> {
        if !(cd_ratio.is_finite() && cd_ratio >= 0.0) {
            return Err(Error::invalid(
                "cd_ratio",
                format!("must be finite and ≥ 0, got {cd_ratio}"),
            ));
        }
        self.cd_ratio = cd_ratio;
        Ok(self)
    }

    pub fn e_c(&self) -> f64 {
        self.e_c
    }

    pub fn e_j(&self) -> f64 {
        self.e_j
    }

    pub fn e_l(&self) -> f64 {
        self.e_l
    }

    pub fn flux_phi(&self) -> f64 {
        self.flux_phi
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn cd_ratio(&self) -> f64 {
        self.cd_ratio
    }
}

/// N-independent energy scales derived from a [`QubitSpec`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScales {
    /// e²/2C^b in GHz.
    pub e_cb: f64,
    /// 𝓔_C^a = N·E_C^a in GHz.
    pub script_e_ca: f64,
}

/// Array junction parameters realizing the fixed qubit at a given N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayJunctionParams {
    pub n: usize,
    pub e_ja: f64,
    pub e_ca: f64,
    /// E_J^a / E_C^a.
    pub ratio: f64,
}

pub fn derive_shared_scales(spec: &QubitSpec) -> DerivedScales {
    let e_cb = spec.e_c * (1.0 + spec.e_l / spec.e_j);
    let script_e_ca = 1.0 / (1.0 / spec.e_c - 1.0 / e_cb);
    DerivedScales { e_cb, script_e_ca }
}

pub fn array_params(
    scales: &DerivedScales,
    spec: &QubitSpec,
    n: usize,
) -> Result<ArrayJunctionParams> {
    if n < 1 {
        return Err(Error::invalid("n", "junction count must be at least 1"));
    }
    let nf = n as f64;
    let e_ja = nf * spec.e_l;
    let e_ca = scales.script_e_ca / nf;
    Ok(ArrayJunctionParams {
        n,
        e_ja,
        e_ca,
        ratio: e_ja / e_ca,
    })
}
