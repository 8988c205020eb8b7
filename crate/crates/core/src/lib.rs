//! Charge-noise coherence of a fluxonium qubit versus the number of array
//! junctions, with an exact small-N circuit check.
//!
//! Energies are E/h in GHz, times in µs, charges in units of e.

pub mod coherence;
pub mod error;
pub mod linalg;
pub mod noise;
pub mod oracle;
pub mod params;
pub mod spectrum;
pub mod sweep;
pub mod tightbinding;

pub use coherence::CoherenceRecord;
pub use error::{Error, Result};
pub use noise::NoiseSpec;
pub use oracle::{FullCircuitModel, OracleReport};
pub use params::{ArrayJunctionParams, DerivedScales, QubitSpec};
pub use spectrum::{EigenSolution, PhaseGrid};
pub use sweep::{SweepOptions, SweepResult};
pub use tightbinding::{DispersionAmplitudes, OffsetCharges};
