use anharmonic::spectral::*;
use anharmonic::{action, Complex64, OscillatorParams};
use std::f64::consts::PI;

type C = Complex64;

#[test]
fn harmonic_zeros_of_q_plus() {
    let e = exact_eigenvalues(1.0, 0.0, 4, &ScanOptions::default()).unwrap();
    for (got, want) in e.iter().zip([3.0, 7.0, 11.0, 15.0, 19.0]) {
        assert!((got / want - 1.0).abs() < 1e-10);
    }
    // the real determinant changes sign across each level
    let sign = |e: f64| spectral_determinant(&OscillatorParams::real(1.0, e, 0.0).unwrap()).unwrap().normalized.re.signum();
    let signs: Vec<f64> = [1.0, 5.0, 9.0, 13.0, 17.0, 21.0].into_iter().map(sign).collect();
    for w in signs.windows(2) {
        assert_eq!(w[0], -w[1], "{signs:?}");
    }
}

#[test]
fn quartic_levels_match_bohr_sommerfeld_asymptotically() {
    let e = exact_eigenvalues(2.0, 0.0, 12, &ScanOptions::default()).unwrap();
    let dev: Vec<f64> = e
        .iter()
        .enumerate()
        .map(|(n, &x)| (action::bohr_sommerfeld_energy(n as u32, 2.0, 0.0).unwrap() / x - 1.0).abs())
        .collect();
    assert!(dev[12] < dev[2] && dev[12] < 1e-3, "{dev:?}");
    assert!(e.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn products_of_stokes_multipliers() {
    // R_(0,2,1,−1) = σ₀σ₁
    for (alpha, e, ell) in [(1.0, 2.5, 0.3), (2.0, 4.0, 0.0), (1.5, 3.0, 1.0)] {
        let p = OscillatorParams::real(alpha, e, ell).unwrap();
        let r = fock_goncharov(&p, Label::Ray(0), Label::Ray(2), Label::Ray(1), Label::Ray(-1)).unwrap().value;
        let s = stokes_multiplier(&p, 0).unwrap() * stokes_multiplier(&p, 1).unwrap();
        assert!((r / s - 1.0).norm() < 1e-8, "alpha {alpha}: {r} vs {s}");
    }
}

#[test]
fn stokes_multipliers_reflect() {
    // σ₋ₖ = −conj(σₖ) for real E and ℓ
    for (alpha, e, ell) in [(1.0, 2.5, 0.3), (2.0, 4.0, 0.0)] {
        let p = OscillatorParams::real(alpha, e, ell).unwrap();
        for k in [1, 2] {
            let a = stokes_multiplier(&p, k).unwrap();
            let b = stokes_multiplier(&p, -k).unwrap();
            assert!((b + a.conj()).norm() < 1e-8 * a.norm().max(1.0), "k {k}: {a} {b}");
        }
    }
}

#[test]
fn harmonic_stokes_multiplier_vanishes_on_full_line_levels() {
    // α = 1, ℓ = 0 is the full-line oscillator: at E = 2m + 1 the solution
    // decaying at +∞ (Ψ₀) also decays at −∞ (Ψ₂), so σ₁ = 0
    for e in [1.0, 3.0, 5.0] {
        let p = OscillatorParams::real(1.0, e, 0.0).unwrap();
        assert!(stokes_multiplier(&p, 1).unwrap().norm() < 1e-8);
        assert!(stokes_multiplier(&p, 0).unwrap().norm() > 1.0);
    }
}

#[test]
fn neighbouring_ray_solutions_have_unit_wronskian() {
    // Wr[Ψ_k, Ψ_{k+1}] = 2(−1)^k for the normalisation x^{α/2} e^{(−1)^k R} Ψ_k → 1
    for (alpha, e, ell) in [(0.5, 1.5, 0.2), (1.0, 2.5, 0.3), (1.5, 3.0, 0.0), (2.0, 4.0, 0.5), (3.0, 6.0, 1.0)] {
        let p = OscillatorParams::real(alpha, e, ell).unwrap();
        let mut bank = SolutionBank::new(p, anharmonic::CoverPoint::new(1.5, 0.3), SpectralOptions::refined());
        for k in -2i64..=1 {
            let w = bank.wronskian(Label::Ray(k), Label::Ray(k + 1)).unwrap().to_complex();
            let want = if k.rem_euclid(2) == 0 { 2.0 } else { -2.0 };
            assert!((w - want).norm() < 1e-9, "alpha {alpha}, k {k}: {w}");
        }
    }
}

#[test]
fn cross_ratio_ignores_normalisation() {
    let p = OscillatorParams::new(1.5, C::new(3.0, 0.4), C::new(0.6, 0.0)).unwrap();
    let mut bank = SolutionBank::on_axis(p, SpectralOptions::default());
    let before = fock_goncharov_in(&mut bank, Label::Origin, Label::Ray(-1), Label::Ray(0), Label::Ray(1)).unwrap().value;
    for l in [Label::Origin, Label::Ray(-1), Label::Ray(0), Label::Ray(1)] {
        bank.rescale(l, C::new(17.0, 3.0)).unwrap();
    }
    let after = fock_goncharov_in(&mut bank, Label::Origin, Label::Ray(-1), Label::Ray(0), Label::Ray(1)).unwrap().value;
    assert!((after / before - 1.0).norm() < 1e-12);
    assert!((r_zero(&p).unwrap() / before - 1.0).norm() < 1e-8);
}

#[test]
fn r_zero_at_quartic_levels() {
    let e = exact_eigenvalues(2.0, 1.0, 3, &ScanOptions::default()).unwrap();
    for x in e {
        let r = r_zero(&OscillatorParams::real(2.0, x, 1.0).unwrap()).unwrap();
        assert!((r + 1.0).norm() < 1e-7, "E = {x}: {r}");
    }
}

#[test]
fn r_zero_tracks_wkb_phase_at_alpha_one() {
    // α = 1 is WKB-exact: R₀ = exp(2πi I) for every E
    assert_eq!(semiclassical_orientation().unwrap(), 1.0);
    for e in [4.0, 6.3, 9.9] {
        let p = OscillatorParams::real(1.0, e, 0.5).unwrap();
        let r = r_zero(&p).unwrap();
        let i = (e - 2.0) / 4.0;
        assert!((r - C::from_polar(1.0, 2.0 * PI * i)).norm() < 1e-8, "E = {e}: {r}");
    }
}

#[test]
fn repeated_labels_are_rejected() {
    let p = OscillatorParams::real(1.0, 3.0, 0.0).unwrap();
    assert!(fock_goncharov(&p, Label::Ray(0), Label::Ray(0), Label::Ray(1), Label::Ray(-1)).is_err());
    assert!(fock_goncharov(&p, Label::Ray(3), Label::Ray(0), Label::Ray(1), Label::Ray(-1)).is_err());
}

#[test]
fn method_registry_columns() {
    let reg = spectrum_methods();
    assert_eq!(reg.names(), ["exact", "bs", "asym"]);
    let exact = reg.get("exact").unwrap().energies(1.0, 0.5, 3).unwrap();
    let bs = reg.get("bs").unwrap().energies(1.0, 0.5, 3).unwrap();
    for (a, b) in exact.iter().zip(&bs) {
        assert!((a / b - 1.0).abs() < 1e-9);
    }
    let rows = eigenvalues(0.5, 3, 1.0).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.rel_dev_bs < 1e-9));
}

#[test]
fn determinant_needs_ell_above_minus_half() {
    let p = OscillatorParams::real(1.0, 3.0, -0.5).unwrap();
    assert!(spectral_determinant(&p).is_err());
}
