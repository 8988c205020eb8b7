//! Exact charge-basis Hamiltonian of the (N+1)-island loop for N ≤ 3.
//!
//! Coordinates are `(τ, Θ_1, …, Θ_N)`: τ is the phase of the node left of
//! the black-sheep junction and Θ_i is the phase drop across array junction
//! i, so node i sits at `τ + Σ_{j≤i} Θ_j`. Conjugate charges are Cooper-pair
//! numbers `𝒩`, with `𝒩_τ` conserved and set to zero.
//!
//! Capacitances are stored as `2C/e²` in 1/GHz, so a junction with charging
//! energy `E_C = e²/2C` contributes `1/E_C`, and the kinetic term is
//! `vᵀ 𝒞⁻¹ v` GHz with `v = 2𝒩 + Q`.
//!
//! ```text
//! H = vᵀ𝒞⁻¹v + Σ_i E_J^a (1 − cos Θ_i) + E_J^b (1 − cos(ΣΘ_i − φ))
//! ```
//!
//! Offset charges are static; a fluctuating `V_i` would make them drives.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, HermitianCsr};
use crate::params::{self, QubitSpec};
use crate::spectrum::{self, PhaseGrid};
use crate::tightbinding;

pub const MAX_JUNCTIONS: usize = 3;
pub const MAX_CHARGE_CUTOFF: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct FullCircuitModel {
    pub n: usize,
    pub e_ja: f64,
    pub e_jb: f64,
    /// `(N+1)×(N+1)` in `(τ, Θ_1..Θ_N)` coordinates, units of 1/GHz.
    pub capacitance_matrix: DMatrix<f64>,
    /// `Q_τ, Q_1, …, Q_N` in units of e.
    pub charge_offsets: Vec<f64>,
    pub flux_phi: f64,
    /// Each `𝒩_i` runs over `−n_max..=n_max`.
    pub n_max: usize,
}

impl FullCircuitModel {
    /// Loop with array capacitance `c_a` and black-sheep capacitance `c_b`
    /// (both `2C/e²`), no ground capacitances, offsets at the sweet spot.
    pub fn new(
        n: usize,
        e_ja: f64,
        e_jb: f64,
        c_a: f64,
        c_b: f64,
        flux_phi: f64,
        n_max: usize,
    ) -> Result<Self> {
        if n < 1 {
            return Err(Error::invalid("n", "junction count must be at least 1"));
        }
        if !(c_a.is_finite() && c_a > 0.0 && c_b.is_finite() && c_b >= 0.0) {
            return Err(Error::invalid("capacitance", "need c_a > 0 and c_b ≥ 0"));
        }
        if !(e_ja.is_finite() && e_ja >= 0.0 && e_jb.is_finite() && e_jb >= 0.0) {
            return Err(Error::invalid(
                "e_j",
                "Josephson energies must be finite and ≥ 0",
            ));
        }
        let mut c = DMatrix::zeros(n + 1, n + 1);
        for i in 1..=n {
            for j in 1..=n {
                c[(i, j)] = c_b + if i == j { c_a } else { 0.0 };
            }
        }
        let mut charge_offsets = vec![0.5; n + 1];
        charge_offsets[0] = 0.0;
        Ok(Self {
            n,
            e_ja,
            e_jb,
            capacitance_matrix: c,
            charge_offsets,
            flux_phi,
            n_max,
        })
    }

    /// Parameters matching the effective model at junction count `n`:
    /// `E_J^a = N E_L`, `E_C^a = 𝓔_C^a / N`, `e²/2C^b = e_cb`.
    pub fn from_spec(spec: &QubitSpec, n: usize, n_max: usize) -> Result<Self> {
        let scales = params::derive_shared_scales(spec);
        let arr = params::array_params(&scales, spec, n)?;
        Self::new(
            n,
            arr.e_ja,
            spec.e_j(),
            1.0 / arr.e_ca,
            1.0 / scales.e_cb,
            spec.flux_phi(),
            n_max,
        )
    }

    /// Add ground capacitances: `cd_a` on the N−1 interior nodes, `cd_b` on
    /// the two nodes flanking the black-sheep junction (units of 1/GHz).
    pub fn with_ground_capacitances(mut self, cd_a: f64, cd_b: f64) -> Result<Self> {
        if !(cd_a.is_finite() && cd_a >= 0.0 && cd_b.is_finite() && cd_b >= 0.0) {
            return Err(Error::invalid(
                "ground capacitance",
                "must be finite and ≥ 0",
            ));
        }
        let n = self.n;
        for node in 0..=n {
            let cd = if node == 0 || node == n { cd_b } else { cd_a };
            // node = τ + Θ_1 + … + Θ_node
            let touches = |k: usize| k == 0 || k <= node;
            for i in 0..=n {
                for j in 0..=n {
                    if touches(i) && touches(j) {
                        self.capacitance_matrix[(i, j)] += cd;
                    }
                }
            }
        }
        Ok(self)
    }

    pub fn with_offsets(mut self, q_tau: f64, q_list: &[f64]) -> Result<Self> {
        if q_list.len() != self.n {
            return Err(Error::invalid(
                "charge_offsets",
                format!("expected {} island charges, got {}", self.n, q_list.len()),
            ));
        }
        if !q_tau.is_finite() || q_list.iter().any(|q| !q.is_finite()) {
            return Err(Error::invalid("charge_offsets", "charges must be finite"));
        }
        self.charge_offsets = std::iter::once(q_tau)
            .chain(q_list.iter().copied())
            .collect();
        Ok(self)
    }

    /// `(2n_max + 1)^N`.
    pub fn dimension(&self) -> usize {
        (2 * self.n_max + 1).pow(self.n as u32)
    }

    fn check(&self) -> Result<()> {
        if self.n < 1 || self.n > MAX_JUNCTIONS {
            return Err(Error::DimensionGuard(format!(
                "N = {} outside 1..={MAX_JUNCTIONS}",
                self.n
            )));
        }
        if self.n_max < 1 || self.n_max > MAX_CHARGE_CUTOFF {
            return Err(Error::DimensionGuard(format!(
                "n_max = {} outside 1..={MAX_CHARGE_CUTOFF}",
                self.n_max
            )));
        }
        let m = &self.capacitance_matrix;
        if m.nrows() != self.n + 1 || m.ncols() != self.n + 1 {
            return Err(Error::invalid("capacitance_matrix", "must be (N+1)×(N+1)"));
        }
        if self.charge_offsets.len() != self.n + 1 {
            return Err(Error::invalid(
                "charge_offsets",
                "need Q_τ followed by N island charges",
            ));
        }
        if (m - m.transpose()).amax() > 1e-12 * m.amax() {
            return Err(Error::invalid("capacitance_matrix", "must be symmetric"));
        }
        Ok(())
    }

    /// Inverse capacitance acting on `v = (Q_τ, 2𝒩_1 + Q_1, …)`.
    ///
    /// Without ground capacitance the τ row vanishes and τ is a free mode;
    /// only the Θ block is inverted and `Q_τ` must be zero.
    fn inverse_capacitance(&self) -> Result<DMatrix<f64>> {
        let m = &self.capacitance_matrix;
        let n = self.n;
        let tau_free = (0..=n).all(|k| m[(0, k)] == 0.0);
        if tau_free {
            if self.charge_offsets[0] != 0.0 {
                return Err(Error::invalid(
                    "q_tau",
                    "a nonzero Q_τ needs ground capacitances to couple",
                ));
            }
            let block = m.view((1, 1), (n, n)).into_owned();
            let inv = block
                .cholesky()
                .ok_or(Error::SingularCapacitance)?
                .inverse();
            let mut full = DMatrix::zeros(n + 1, n + 1);
            full.view_mut((1, 1), (n, n)).copy_from(&inv);
            Ok(full)
        } else {
            Ok(m.clone()
                .cholesky()
                .ok_or(Error::SingularCapacitance)?
                .inverse())
        }
    }
}

/// Charge-basis Hamiltonian in GHz. State index is the mixed-radix number
/// of `(𝒩_1 + n_max, …, 𝒩_N + n_max)`, most significant first.
pub fn build_full_hamiltonian(model: &FullCircuitModel) -> Result<HermitianCsr> {
    model.check()?;
    let n = model.n;
    let cut = model.n_max as i64;
    let radix = 2 * model.n_max + 1;
    let dim = model.dimension();
    let cinv = model.inverse_capacitance()?;
    let strides: Vec<usize> = (0..n).map(|k| radix.pow((n - 1 - k) as u32)).collect();
    let all_stride: usize = strides.iter().sum();

    let constant = n as f64 * model.e_ja + model.e_jb;
    let array_hop = Complex64::new(-0.5 * model.e_ja, 0.0);
    // e^{i(ΣΘ − φ)} raises every 𝒩_i by one
    let up = Complex64::from_polar(-0.5 * model.e_jb, -model.flux_phi);

    let mut rows = Vec::with_capacity(dim);
    let mut digits = vec![0i64; n];
    let mut v = DVector::zeros(n + 1);
    v[0] = model.charge_offsets[0];
    for index in 0..dim {
        let mut rest = index;
        for k in 0..n {
            digits[k] = (rest / strides[k]) as i64 - cut;
            rest %= strides[k];
        }
        for k in 0..n {
            v[k + 1] = 2.0 * digits[k] as f64 + model.charge_offsets[k + 1];
        }
        let kinetic = v.dot(&(&cinv * &v));

        let mut row = Vec::with_capacity(2 * n + 3);
        row.push((index, Complex64::new(kinetic + constant, 0.0)));
        for k in 0..n {
            if digits[k] < cut {
                row.push((index + strides[k], array_hop));
            }
            if digits[k] > -cut {
                row.push((index - strides[k], array_hop));
            }
        }
        if model.e_jb != 0.0 {
            if digits.iter().all(|&d| d < cut) {
                row.push((index + all_stride, up));
            }
            if digits.iter().all(|&d| d > -cut) {
                row.push((index - all_stride, up.conj()));
            }
        }
        rows.push(row);
    }
    Ok(HermitianCsr::from_rows(rows))
}

/// Lowest `count` eigenvalues, ascending, GHz.
pub fn lowest_levels(model: &FullCircuitModel, count: usize) -> Result<Vec<f64>> {
    let h = build_full_hamiltonian(model)?;
    let values = linalg::hermitian_lowest(&h, count)?;
    if values.len() < count {
        return Err(Error::NonConvergence(format!(
            "found {} of {count} requested levels",
            values.len()
        )));
    }
    Ok(values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub q: f64,
    pub e0: f64,
    pub e1: f64,
}

/// Sweep `Q_island` (1-based) uniformly over `[0, 2]` e, endpoints included,
/// holding every other offset fixed.
pub fn dispersion_scan(
    model: &FullCircuitModel,
    island: usize,
    points: usize,
) -> Result<Vec<ScanPoint>> {
    model.check()?;
    if island < 1 || island > model.n {
        return Err(Error::invalid(
            "island",
            format!("must lie in 1..={}", model.n),
        ));
    }
    if points < 2 {
        return Err(Error::invalid("points", "need at least two scan points"));
    }
    (0..points)
        .into_par_iter()
        .map(|i| {
            let q = 2.0 * i as f64 / (points - 1) as f64;
            let mut m = model.clone();
            m.charge_offsets[island] = q;
            let e = lowest_levels(&m, 2)?;
            Ok(ScanPoint {
                q,
                e0: e[0],
                e1: e[1],
            })
        })
        .collect()
}

/// Least-squares fit `E(Q) = a + b cos(πQ) + c sin(πQ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosineFit {
    pub offset: f64,
    pub cos_amp: f64,
    pub sin_amp: f64,
    pub r_squared: f64,
}

impl CosineFit {
    /// `E(Q = e) − E(Q = 0)` of the fitted curve, the same convention as ε_n.
    pub fn epsilon(&self) -> f64 {
        -2.0 * self.cos_amp
    }

    pub fn peak_to_peak(&self) -> f64 {
        2.0 * self.cos_amp.hypot(self.sin_amp)
    }
}

pub fn fit_cosine(samples: &[(f64, f64)]) -> Result<CosineFit> {
    if samples.len() < 3 {
        return Err(Error::invalid(
            "samples",
            "need at least three points for a cosine fit",
        ));
    }
    let pi = std::f64::consts::PI;
    let a = DMatrix::from_fn(samples.len(), 3, |i, j| {
        let q = samples[i].0;
        match j {
            0 => 1.0,
            1 => (pi * q).cos(),
            _ => (pi * q).sin(),
        }
    });
    // center the data so the fit sees the small variation, not the offset
    let mean = samples.iter().map(|s| s.1).sum::<f64>() / samples.len() as f64;
    let y = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1 - mean));
    let coef = a
        .clone()
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| Error::NonConvergence(format!("cosine fit: {e}")))?;
    let resid = &y - &a * &coef;
    let ss_tot = y.norm_squared();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - resid.norm_squared() / ss_tot
    };
    Ok(CosineFit {
        offset: coef[0] + mean,
        cos_amp: coef[1],
        sin_amp: coef[2],
        r_squared,
    })
}

/// Exact versus effective-model comparison at one junction count.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub n: usize,
    pub n_max: usize,
    pub ratio_ja_ca: f64,
    pub f01_exact: f64,
    pub f01_effective: f64,
    /// `f01_exact / f01_effective − 1`.
    pub f01_rel_diff: f64,
    pub eps_exact: [f64; 2],
    pub eps_effective: [f64; 2],
    pub cosine_r2: [f64; 2],
    /// Largest relative change of E0, E1 under `Q_1 → Q_1 + 2`.
    pub periodicity_rel: f64,
    /// Largest relative change of E0, E1 under `n_max → n_max − 2`.
    pub truncation_rel: f64,
    /// The `Q_1` scan behind the fits.
    pub scan: Vec<ScanPoint>,
}

/// Diagonalize the full circuit matched to `spec` and compare with the
/// effective single-mode model. `model` supplies the circuit (typically
/// [`FullCircuitModel::from_spec`], optionally with ground capacitances);
/// its offsets are overwritten by the scan.
pub fn compare(
    spec: &QubitSpec,
    model: &FullCircuitModel,
    scan_points: usize,
) -> Result<OracleReport> {
    model.check()?;
    let n = model.n;
    let scales = params::derive_shared_scales(spec);
    let ratio = params::array_params(&scales, spec, n)?.ratio;

    let sweet = model.clone().with_offsets(0.0, &vec![0.5; n])?;
    let e_sweet = lowest_levels(&sweet, 2)?;
    let f01_exact = e_sweet[1] - e_sweet[0];

    let sol = spectrum::solve_fluxonium(spec, &PhaseGrid::auto(spec), 2)?;
    let eff = tightbinding::dispersion_amplitudes(spec, &sol, &scales, n)?;

    let scan = dispersion_scan(&sweet, 1, scan_points)?;
    let fit0 = fit_cosine(&scan.iter().map(|p| (p.q, p.e0)).collect::<Vec<_>>())?;
    let fit1 = fit_cosine(&scan.iter().map(|p| (p.q, p.e1)).collect::<Vec<_>>())?;

    let generic = [0.37, 0.5, 0.5];
    let a = model.clone().with_offsets(0.0, &generic[..n])?;
    let mut shifted = generic;
    shifted[0] += 2.0;
    let b = model.clone().with_offsets(0.0, &shifted[..n])?;
    let periodicity_rel = max_rel(&lowest_levels(&a, 2)?, &lowest_levels(&b, 2)?);

    let truncation_rel = if sweet.n_max > 2 {
        let mut coarse = sweet.clone();
        coarse.n_max -= 2;
        max_rel(&e_sweet, &lowest_levels(&coarse, 2)?)
    } else {
        f64::NAN
    };

    Ok(OracleReport {
        n,
        n_max: model.n_max,
        ratio_ja_ca: ratio,
        f01_exact,
        f01_effective: sol.f01(),
        f01_rel_diff: f01_exact / sol.f01() - 1.0,
        eps_exact: [fit0.epsilon(), fit1.epsilon()],
        eps_effective: [eff.eps0, eff.eps1],
        cosine_r2: [fit0.r_squared, fit1.r_squared],
        periodicity_rel,
        truncation_rel,
        scan,
    })
}

fn max_rel(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()))
        .fold(0.0, f64::max)
}
