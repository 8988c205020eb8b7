use std::f64::consts::PI;

use fluxopt_core::spectrum::{self, EigenSolution, PhaseGrid};
use fluxopt_core::{params, tightbinding, QubitSpec};
use proptest::prelude::*;

fn solve(spec: &QubitSpec) -> EigenSolution {
    spectrum::solve_fluxonium(spec, &PhaseGrid::auto(spec), 2).unwrap()
}

fn trapezoid(y: &[f64], h: f64) -> f64 {
    h * (y.iter().sum::<f64>() - 0.5 * (y[0] + y[y.len() - 1]))
}

#[test]
fn doubling_resolution_changes_f01_by_under_1e_6() {
    let spec = QubitSpec::new(0.55, 2.2, 0.72).unwrap();
    let grid = PhaseGrid::auto(&spec);
    let a = spectrum::solve_on_grid(&spec, &grid.refined(), 2).unwrap();
    let b = spectrum::solve_on_grid(&spec, &grid.refined().refined(), 2).unwrap();
    assert!((a.f01() - b.f01()).abs() / b.f01() < 1e-6);
}

#[test]
fn parity_at_half_flux() {
    // at φ = π the potential is even in θ, so states alternate in parity
    let spec = QubitSpec::new(0.55, 2.2, 0.72).unwrap();
    let sol = solve(&spec);
    assert!((sol.parity_overlap(0) - 1.0).abs() < 1e-9);
    assert!((sol.parity_overlap(1) + 1.0).abs() < 1e-9);
}

#[test]
fn harmonic_shift_overlap_closed_form() {
    for (e_c, e_l) in [(0.55, 0.72), (2.5, 0.52), (1.0, 3.0)] {
        let spec = QubitSpec::new(e_c, 1e-300, e_l).unwrap();
        let sol = solve(&spec);
        let s = spectrum::shifted_overlap(&sol, 0, 1, |_| 1.0).unwrap();
        let want = (-PI * PI * (e_l / (8.0 * e_c)).sqrt()).exp();
        assert!((s - want).abs() / want < 1e-5, "{s} {want}");
    }
}

#[test]
fn odd_weight_overlap_matches_direct_quadrature() {
    let spec = QubitSpec::new(0.55, 2.2, 0.72).unwrap();
    let sol = solve(&spec);
    let w = |t: f64| (t + PI).sin();
    let got = spectrum::shifted_overlap(&sol, 0, 1, w).unwrap();

    let grid = sol.grid();
    let m = grid.steps_per_period();
    let psi = sol.wavefunction(0);
    let y: Vec<f64> = (0..psi.len() - m)
        .map(|i| psi[i + m] * psi[i] * w(grid.theta(i)))
        .collect();
    let direct = trapezoid(&y, grid.spacing());
    assert!((got - direct).abs() < 1e-8, "{got} {direct}");
}

/// The dispersion formula written out again from scratch with plain sums.
fn epsilon_by_hand(spec: &QubitSpec, sol: &EigenSolution, n: usize, level: usize) -> f64 {
    let grid = sol.grid();
    let h = grid.spacing();
    let m = grid.steps_per_period();
    let psi = sol.wavefunction(level);
    let nf = n as f64;
    let ecb = spec.e_c() * (1.0 + spec.e_l() / spec.e_j());
    let ea = 1.0 / (1.0 / spec.e_c() - 1.0 / ecb);
    let lam2 = spec.lambda().powi(2);
    let el = spec.e_l();

    let pair = |f: &dyn Fn(f64) -> f64| -> f64 {
        let y: Vec<f64> = (0..psi.len() - m)
            .map(|i| psi[i + m] * psi[i] * f(grid.theta(i)))
            .collect();
        trapezoid(&y, h)
    };
    let mean = |f: &dyn Fn(f64) -> f64| -> f64 {
        let y: Vec<f64> = (0..psi.len())
            .map(|i| psi[i] * psi[i] * f(grid.theta(i)))
            .collect();
        trapezoid(&y, h)
    };
    let s = pair(&|_| 1.0);
    let mut bracket = lam2 * PI * PI / 2.0 * (1.0 - 1.0 / nf) * s;
    bracket += pair(&|t| t * t / (2.0 * nf)) - s * mean(&|t| t * t) / (2.0 * nf);
    let decay = (-(ea / (2.0 * lam2 * el)).sqrt() * (nf - 1.0) / (nf * nf)).exp();
    bracket += decay
        * ((nf - 2.0) * pair(&|t| ((t + PI) / nf).cos()) - nf * s * mean(&|t| (t / nf).cos()));
    4.0 * nf * el * (-PI * PI * (lam2 * el / (8.0 * ea)).sqrt() * (nf - 1.0)).exp() * bracket
}

#[test]
fn dispersion_matches_independent_transcription() {
    for spec in [
        QubitSpec::new(0.55, 2.2, 0.72).unwrap(),
        QubitSpec::new(2.5, 9.0, 0.52).unwrap(),
        QubitSpec::new(2.5, 9.0, 0.52)
            .unwrap()
            .with_lambda(2.0 / PI)
            .unwrap(),
    ] {
        let sol = solve(&spec);
        let scales = params::derive_shared_scales(&spec);
        for n in [2, 3, 12, 47, 90] {
            for level in 0..2 {
                let got = tightbinding::epsilon_n(&spec, &sol, &scales, n, level).unwrap();
                let want = epsilon_by_hand(&spec, &sol, n, level);
                assert!(
                    (got - want).abs() <= 1e-10 * want.abs(),
                    "N={n} l={level}: {got} {want}"
                );
            }
        }
    }
}

#[test]
fn dispersion_decays_at_the_harmonic_rate() {
    let spec = QubitSpec::new(0.55, 2.2, 0.72).unwrap();
    let sol = solve(&spec);
    let scales = params::derive_shared_scales(&spec);
    let step = (-PI * PI * (spec.e_l() / (8.0 * scales.script_e_ca)).sqrt()).exp();
    for n in 20..60 {
        for level in 0..2 {
            let a = tightbinding::epsilon_n(&spec, &sol, &scales, n, level).unwrap();
            let b = tightbinding::epsilon_n(&spec, &sol, &scales, n + 1, level).unwrap();
            let want = (n as f64 + 1.0) / n as f64 * step;
            assert!(
                ((b / a) / want - 1.0).abs() < 0.2,
                "N={n} l={level}: {} vs {want}",
                b / a
            );
        }
    }
}

#[test]
fn dispersion_levels_have_opposite_sign_at_half_flux() {
    let spec = QubitSpec::new(2.5, 9.0, 0.52).unwrap();
    let sol = solve(&spec);
    let scales = params::derive_shared_scales(&spec);
    for n in [10, 40, 68, 120] {
        let e = tightbinding::dispersion_amplitudes(&spec, &sol, &scales, n).unwrap();
        assert!(e.eps0 > 0.0 && e.eps1 < 0.0, "N={n}: {e:?}");
    }
}

#[test]
fn matrix_element_converges_and_is_symmetric() {
    let spec = QubitSpec::new(0.55, 2.2, 0.72).unwrap();
    let grid = PhaseGrid::auto(&spec);
    let a = spectrum::solve_on_grid(&spec, &grid, 2).unwrap();
    let b = spectrum::solve_on_grid(&spec, &grid.refined(), 2).unwrap();
    let ma = spectrum::charge_matrix_element(&a);
    let mb = spectrum::charge_matrix_element(&b);
    assert!((ma - mb).abs() / mb < 1e-6);
    let fwd = spectrum::charge_matrix_element_between(&a, 0, 1);
    let back = spectrum::charge_matrix_element_between(&a, 1, 0);
    assert!((fwd - back).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn harmonic_limit(e_c in 0.2f64..3.0, e_l in 0.2f64..3.0) {
        let spec = QubitSpec::new(e_c, 1e-300, e_l).unwrap();
        let sol = solve(&spec);
        let f = (8.0 * e_c * e_l).sqrt();
        prop_assert!((sol.f01() - f).abs() / f < 1e-6);
        let n01 = spectrum::charge_matrix_element(&sol);
        let want = (e_l / (8.0 * e_c)).powf(0.25) / 2f64.sqrt();
        prop_assert!((n01 - want).abs() / want < 1e-6);
    }

    #[test]
    fn flux_periodicity(phi in 0.0f64..(2.0 * PI)) {
        // E_n(φ) = E_n(−φ) by θ → −θ
        let a = QubitSpec::new(1.0, 4.0, 0.8).unwrap().with_flux(phi).unwrap();
        let b = QubitSpec::new(1.0, 4.0, 0.8).unwrap().with_flux(-phi).unwrap();
        let (sa, sb) = (solve(&a), solve(&b));
        for l in 0..2 {
            prop_assert!((sa.energies()[l] - sb.energies()[l]).abs() < 1e-9);
        }
    }
}
