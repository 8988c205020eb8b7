//! Scan the junction count, locate the T2 optimum and the rule-of-thumb band.
//!
//! The effective single-mode Hamiltonian does not depend on N at fixed
//! `E_C`, `E_J`, `E_L`, so a sweep solves it once and only re-evaluates the
//! dispersion amplitudes and the N-dependent prefactors per row.

use rayon::prelude::*;

use crate::coherence::{self, CoherenceRecord};
use crate::error::{Error, Result};
use crate::noise::NoiseSpec;
use crate::params::{self, DerivedScales, QubitSpec};
use crate::spectrum::{self, EigenSolution, PhaseGrid};
use crate::tightbinding;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub records: Vec<CoherenceRecord>,
    pub n_opt: usize,
    /// T2 at `n_opt`, µs.
    pub t2_opt: f64,
    pub band_low: f64,
    pub band_high: f64,
}

impl SweepResult {
    pub fn record(&self, n: usize) -> Option<&CoherenceRecord> {
        self.records.iter().find(|r| r.n == n)
    }
}

#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    /// Starting grid for the eigensolver; [`PhaseGrid::auto`] when absent.
    pub grid: Option<PhaseGrid>,
    /// Worker threads; rayon's global pool when absent.
    pub jobs: Option<usize>,
}

/// `(5, 10) / √(E_L / 𝓔_C^a)`.
pub fn rule_of_thumb_band(scales: &DerivedScales, spec: &QubitSpec) -> (f64, f64) {
    let inv = 1.0 / (spec.e_l() / scales.script_e_ca).sqrt();
    (5.0 * inv, 10.0 * inv)
}

/// `2 ..= max(⌈4·band_high⌉, 120)`.
pub fn default_range(scales: &DerivedScales, spec: &QubitSpec) -> (usize, usize) {
    let (_, high) = rule_of_thumb_band(scales, spec);
    (2, ((4.0 * high).ceil() as usize).max(120))
}

/// One sweep row from a solved effective Hamiltonian.
pub fn record_at(
    spec: &QubitSpec,
    noise: &NoiseSpec,
    scales: &DerivedScales,
    sol: &EigenSolution,
    matelem: f64,
    n: usize,
) -> Result<CoherenceRecord> {
    let ratio = params::array_params(scales, spec, n)?.ratio;
    let eps = tightbinding::dispersion_amplitudes(spec, sol, scales, n)?;
    let t_phi = coherence::t_phi(&eps, noise, n)?;
    let t_one = coherence::t_one(spec, sol, matelem, noise, n)?;
    Ok(CoherenceRecord {
        n,
        t_phi,
        t_one,
        t_two: coherence::t_two(t_phi, t_one),
        f01: sol.f01(),
        ratio_ja_ca: ratio,
        eps0: eps.eps0,
        eps1: eps.eps1,
        eps_diff: eps.diff(),
    })
}

pub fn sweep_t2(
    spec: &QubitSpec,
    noise: &NoiseSpec,
    n_min: usize,
    n_max: usize,
) -> Result<SweepResult> {
    sweep_t2_with(spec, noise, n_min, n_max, &SweepOptions::default())
}

pub fn sweep_t2_with(
    spec: &QubitSpec,
    noise: &NoiseSpec,
    n_min: usize,
    n_max: usize,
    options: &SweepOptions,
) -> Result<SweepResult> {
    check_range(n_min, n_max)?;
    let grid = options.grid.unwrap_or_else(|| PhaseGrid::auto(spec));
    let sol = spectrum::solve_fluxonium(spec, &grid, 2)?;
    sweep_with_solution(spec, noise, &sol, n_min, n_max, options.jobs)
}

fn check_range(n_min: usize, n_max: usize) -> Result<()> {
    if n_min < 1 {
        return Err(Error::invalid("n_min", "must be at least 1"));
    }
    if n_max < n_min {
        return Err(Error::invalid(
            "n_max",
            format!("{n_max} is below n_min = {n_min}"),
        ));
    }
    Ok(())
}

/// Sweep over `n_min..=n_max` reusing an existing solution. Rows are
/// assembled in N order whatever the worker count.
pub fn sweep_with_solution(
    spec: &QubitSpec,
    noise: &NoiseSpec,
    sol: &EigenSolution,
    n_min: usize,
    n_max: usize,
    jobs: Option<usize>,
) -> Result<SweepResult> {
    check_range(n_min, n_max)?;
    if spec.cd_ratio() != noise.cd_ratio() {
        return Err(Error::invalid(
            "cd_ratio",
            format!(
                "qubit uses {} but noise model uses {}",
                spec.cd_ratio(),
                noise.cd_ratio()
            ),
        ));
    }
    let scales = params::derive_shared_scales(spec);
    let matelem = spectrum::charge_matrix_element(sol);

    let row = |n: usize| {
        record_at(spec, noise, &scales, sol, matelem, n).map_err(|e| Error::AtJunctionCount {
            n,
            source: Box::new(e),
        })
    };
    let records: Vec<CoherenceRecord> = match jobs {
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.max(1))
                .build()
                .map_err(|e| Error::invalid("jobs", e.to_string()))?;
            pool.install(|| {
                (n_min..=n_max)
                    .into_par_iter()
                    .map(row)
                    .collect::<Result<_>>()
            })?
        }
        None => (n_min..=n_max)
            .into_par_iter()
            .map(row)
            .collect::<Result<_>>()?,
    };

    // ties go to the smaller N
    let best = records.iter().fold(
        &records[0],
        |best, r| if r.t_two > best.t_two { r } else { best },
    );
    let (band_low, band_high) = rule_of_thumb_band(&scales, spec);
    Ok(SweepResult {
        n_opt: best.n,
        t2_opt: best.t_two,
        records,
        band_low,
        band_high,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_examples() {
        let spec = QubitSpec::new(2.5, 9.0, 0.52).unwrap();
        let (lo, hi) = rule_of_thumb_band(&params::derive_shared_scales(&spec), &spec);
        assert!(
            (lo - 46.9).abs() < 0.1 && (hi - 93.8).abs() < 0.1,
            "{lo} {hi}"
        );

        let spec = QubitSpec::new(0.55, 2.2, 0.72).unwrap();
        let (lo, hi) = rule_of_thumb_band(&params::derive_shared_scales(&spec), &spec);
        assert!(
            (lo - 8.80).abs() < 0.01 && (hi - 17.60).abs() < 0.01,
            "{lo} {hi}"
        );

        let unit = DerivedScales {
            e_cb: 1.0,
            script_e_ca: 0.7,
        };
        let spec = QubitSpec::new(1.0, 1.0, 0.7).unwrap();
        assert_eq!(rule_of_thumb_band(&unit, &spec), (5.0, 10.0));
    }

    #[test]
    fn default_range_covers_band() {
        let spec = QubitSpec::new(2.5, 9.0, 0.52).unwrap();
        let s = params::derive_shared_scales(&spec);
        assert_eq!(default_range(&s, &spec), (2, 376));
        let spec = QubitSpec::new(0.55, 2.2, 0.72).unwrap();
        let s = params::derive_shared_scales(&spec);
        assert_eq!(default_range(&s, &spec), (2, 120));
    }

    #[test]
    fn rejects_bad_ranges_and_mismatched_noise() {
        let spec = QubitSpec::new(0.55, 2.2, 0.72).unwrap();
        let noise = NoiseSpec::default();
        assert!(sweep_t2(&spec, &noise, 0, 10).is_err());
        assert!(sweep_t2(&spec, &noise, 10, 5).is_err());
        let other = NoiseSpec::new(1e-3, 5.2e-9, 0.5).unwrap();
        assert!(sweep_t2(&spec, &other, 2, 5).is_err());
    }

    #[test]
    fn singleton_range() {
        let spec = QubitSpec::new(0.55, 2.2, 0.72).unwrap();
        let r = sweep_t2(&spec, &NoiseSpec::default(), 12, 12).unwrap();
        assert_eq!(r.records.len(), 1);
        assert_eq!(r.n_opt, 12);
    }

    #[test]
    fn parallel_matches_serial_bitwise() {
        let spec = QubitSpec::new(0.55, 2.2, 0.72).unwrap();
        let noise = NoiseSpec::default();
        let sol = spectrum::solve_fluxonium(&spec, &PhaseGrid::auto(&spec), 2).unwrap();
        let a = sweep_with_solution(&spec, &noise, &sol, 2, 60, Some(1)).unwrap();
        let b = sweep_with_solution(&spec, &noise, &sol, 2, 60, Some(4)).unwrap();
        assert_eq!(a, b);
    }
}
