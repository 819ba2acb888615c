use anharmonic::action::{self, asymptotic, JKind, PhaseOptions};
use anharmonic::model;
use approx::assert_relative_eq;
use std::f64::consts::PI;

/// Composite Simpson on [a, b] with n (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (f(m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// (1/π)∫ √(E − x^{2α} − (ℓ+1/2)²/x²) dx with x = c + h cos φ, which makes
/// the integrand smooth and periodic so Simpson converges fast.
fn phase_oracle(alpha: f64, e: f64, ell: f64) -> f64 {
    let lam2 = (ell + 0.5) * (ell + 0.5);
    let f = |x: f64| e - x.powf(2.0 * alpha) - lam2 / (x * x);
    // bottom of the well: x^{2α+2} = λ²/α
    let xs = (lam2 / alpha).powf(1.0 / (2.0 * alpha + 2.0));
    let xm = bisect(f, 1e-12, xs);
    let xp = bisect(f, xs, 10.0 * (e.powf(0.5 / alpha) + 1.0));
    let (c, h) = (0.5 * (xp + xm), 0.5 * (xp - xm));
    simpson(|phi| f(c + h * phi.cos()).max(0.0).sqrt() * h * phi.sin(), 0.0, PI, 4000) / PI
}

#[test]
fn phase_matches_independent_quadrature() {
    for (alpha, e, ell) in [(2.0, 5.0, 0.0), (2.0, 30.0, 1.5), (0.5, 3.0, 0.2), (3.0, 12.0, 2.0), (1.5, 4.0, -0.3)] {
        let got = action::phase(alpha, e, ell, &PhaseOptions::default()).unwrap();
        assert_relative_eq!(got, phase_oracle(alpha, e, ell), max_relative = 1e-9);
    }
}

#[test]
fn phase_derivative_matches_difference_quotient() {
    for (alpha, e, ell) in [(2.0, 5.0, 0.0), (0.5, 3.0, 0.2), (1.0, 7.0, 1.0)] {
        let o = PhaseOptions::default();
        let h = 1e-4 * e;
        let fd = (action::phase(alpha, e + h, ell, &o).unwrap() - action::phase(alpha, e - h, ell, &o).unwrap()) / (2.0 * h);
        assert_relative_eq!(action::phase_derivative(alpha, e, ell, &o).unwrap(), fd, max_relative = 1e-7);
    }
}

#[test]
fn j1_at_zero_is_the_gamma_value() {
    // J₁(0) = (1/π)∫_0^1 √(1 − x^{2α}) dx; x = (1 − s²)⁴ smooths both ends
    for alpha in [0.25, 0.5, 1.0, 2.0, 3.0] {
        let integrand = |s: f64| {
            let w = 1.0 - s * s;
            (1.0 - w.powf(8.0 * alpha)).max(0.0).sqrt() * 8.0 * s * w.powi(3)
        };
        let oracle = simpson(integrand, 0.0, 1.0, 20000) / PI;
        let got = action::reduced_wkb_integral(JKind::J1, 0.0, alpha).unwrap();
        assert_relative_eq!(got, oracle, max_relative = 1e-8);
        // and the quadrature branch agrees just above u = 0
        let near = action::reduced_wkb_integral(JKind::J1, 1e-6, alpha).unwrap();
        assert!((near - got).abs() < 1e-4, "alpha {alpha}: {near} vs {got}");
    }
    // closed form at α = 1/4: ∫_0^1 √(1 − √x) dx = 8/15
    assert_relative_eq!(asymptotic::j1_leading(0.25), 8.0 / (15.0 * PI), max_relative = 1e-14);
}

#[test]
fn j2_vanishes_at_and_below_nu_star() {
    for alpha in [0.5, 1.0, 2.0] {
        let nu_star = model::critical_data_real(alpha, 0.5).unwrap().nu_star;
        assert!(action::reduced_wkb_integral(JKind::J2, nu_star, alpha).unwrap().abs() < 1e-14);
        assert_eq!(action::reduced_wkb_integral(JKind::J2, 0.5 * nu_star, alpha).unwrap(), 0.0);
        let slope = action::critical_slope(alpha);
        let d = 1e-5 * nu_star;
        let j = action::reduced_wkb_integral(JKind::J2, nu_star + d, alpha).unwrap();
        assert_relative_eq!(j / d, slope, max_relative = 1e-4);
    }
}

#[test]
fn bohr_sommerfeld_solves_quantisation_condition() {
    for (alpha, ell) in [(2.0, 0.0), (0.5, 1.0), (3.0, 2.5)] {
        for n in [0, 1, 5, 20] {
            let e = action::bohr_sommerfeld_energy(n, alpha, ell).unwrap();
            let i = action::phase(alpha, e, ell, &PhaseOptions::default()).unwrap();
            assert!((i - (n as f64 + 0.5)).abs() < 1e-10, "alpha {alpha}, n {n}: I = {i}");
        }
    }
}

#[test]
fn large_n_constant_reproduces_bohr_sommerfeld() {
    // Ê_n ≈ [K(4n+2ℓ+1)]^{2α/(α+1)} with K = 1/(4J₁(0)); the π/2 variant does not
    let (alpha, ell, n) = (2.0, 0.0, 400u32);
    let e = action::bohr_sommerfeld_energy(n, alpha, ell).unwrap();
    let ours = asymptotic::large_n_energy(alpha, ell, n as f64 + 0.5);
    assert!((ours / e - 1.0).abs() < 1e-3);
    let pi_half = (asymptotic::large_n_constant_pi_half(alpha) * (4.0 * n as f64 + 2.0 * ell + 3.0)).powf(2.0 * alpha / (alpha + 1.0));
    assert!((pi_half / e - 1.0).abs() > 0.1);
    // at α = 1 it gives E = 4n + 2ℓ + 1, the exact levels with n shifted by 1/2
    assert_relative_eq!(asymptotic::large_n_constant(1.0), 1.0, max_relative = 1e-14);
}

#[test]
fn named_formulas_dispatch() {
    let reg = asymptotic::registry();
    assert!(reg.len() >= 10);
    let v = action::asymptotic_reference("large_n", 1.0, &[0.0, 2.0]).unwrap();
    assert_relative_eq!(v, asymptotic::large_n_energy(1.0, 0.0, 2.0), max_relative = 1e-15);
    assert!(action::asymptotic_reference("no-such-formula", 1.0, &[]).is_err());
}

#[test]
fn phase_rejects_bad_inputs() {
    let o = PhaseOptions::default();
    assert!(action::phase(0.0, 3.0, 0.0, &o).is_err());
    assert!(action::phase(1.0, 3.0, -0.5, &o).is_err());
    assert!(action::reduced_wkb_integral(JKind::J1, -0.1, 1.0).is_err());
    assert!(action::bohr_sommerfeld_energy(0, 1.0, -0.7).is_err());
}
