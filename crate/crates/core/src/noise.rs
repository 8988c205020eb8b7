//! Charge-noise spectra. Charges are in units of e throughout, so only
//! `S_charge / e²` (1/Hz) leaves this module.
//!
//! * low frequency: 1/f with amplitude `A_charge`; the dephasing formula
//!   absorbs the spectral shape, so no infrared cutoff is modeled.
//! * high frequency: ohmic, `S(ω) = 𝒜² ω / (2π × f_ref)`. With `ω = 2π f`
//!   this is `𝒜² f / f_ref`.

use crate::error::{Error, Result};

pub const DEFAULT_A_LOW: f64 = 1e-3;
pub const DEFAULT_A_HIGH: f64 = 5.2e-9;
pub const F_REF_GHZ: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    a_low: f64,
    a_high: f64,
    f_ref: f64,
    cd_ratio: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            a_low: DEFAULT_A_LOW,
            a_high: DEFAULT_A_HIGH,
            f_ref: F_REF_GHZ,
            cd_ratio: 1.0,
        }
    }
}

impl NoiseSpec {
    /// `a_low` in e, `a_high` in e/√Hz.
    pub fn new(a_low: f64, a_high: f64, cd_ratio: f64) -> Result<Self> {
        if !(a_low.is_finite() && a_low >= 0.0) {
            return Err(Error::invalid("a_low", format!("must be ≥ 0, got {a_low}")));
        }
        if !(a_high.is_finite() && a_high >= 0.0) {
            return Err(Error::invalid(
                "a_high",
                format!("must be ≥ 0, got {a_high}"),
            ));
        }
        if !(cd_ratio.is_finite() && cd_ratio >= 0.0) {
            return Err(Error::invalid(
                "cd_ratio",
                format!("must be ≥ 0, got {cd_ratio}"),
            ));
        }
        Ok(Self {
            a_low,
            a_high,
            f_ref: F_REF_GHZ,
            cd_ratio,
        })
    }

    pub fn a_high(&self) -> f64 {
        self.a_high
    }

    pub fn f_ref(&self) -> f64 {
        self.f_ref
    }

    pub fn cd_ratio(&self) -> f64 {
        self.cd_ratio
    }
}

/// Ohmic `S_charge(2π f01) / e²` in 1/Hz.
pub fn s_charge_over_e2(noise: &NoiseSpec, f01_ghz: f64) -> f64 {
    noise.a_high * noise.a_high * f01_ghz / noise.f_ref
}

/// `A_charge / e` of the 1/f spectrum.
pub fn low_freq_amplitude(noise: &NoiseSpec) -> f64 {
    noise.a_low
}
