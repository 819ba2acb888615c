use anharmonic::action::{self, PhaseOptions};
use anharmonic::integrate::{wronskian, SeedTag, SolutionState};
use anharmonic::spectral::{solution_at, Label, SpectralOptions};
use anharmonic::volterra::certified_bound;
use anharmonic::{model, Complex64, CoverPoint, OscillatorParams};
use proptest::prelude::*;
use std::f64::consts::PI;

type C = Complex64;

fn state(x: CoverPoint, v: (f64, f64), d: (f64, f64)) -> SolutionState {
    SolutionState::new(x, C::new(v.0, v.1), C::new(d.0, d.1), SeedTag::Custom)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cover_point_round_trip(r in 1e-3f64..1e3, arg in -3.1f64..3.1, turns in -3i32..=3) {
        let x = CoverPoint::new(r, arg + 2.0 * PI * turns as f64);
        let back = CoverPoint::lift_near(x.to_complex(), &x);
        prop_assert!((back.modulus / r - 1.0).abs() < 1e-13);
        prop_assert!((back.arg - x.arg).abs() < 1e-12);
        prop_assert!((x.ln().im - x.arg).abs() < 1e-15);
    }

    #[test]
    fn harmonic_phase_is_linear(ell in -0.45f64..6.0, excess in 0.01f64..60.0) {
        let e = 2.0 * ell + 1.0 + excess;
        let i = action::phase(1.0, e, ell, &PhaseOptions::default()).unwrap();
        prop_assert!((i - excess / 4.0).abs() < 1e-11 * (1.0 + excess));
    }

    #[test]
    fn harmonic_bohr_sommerfeld_is_exact(ell in -0.45f64..6.0, n in 0u32..30) {
        let e = action::bohr_sommerfeld_energy(n, 1.0, ell).unwrap();
        let want = 4.0 * n as f64 + 2.0 * ell + 3.0;
        prop_assert!((e / want - 1.0).abs() < 1e-9);
    }

    #[test]
    fn phase_increases_with_energy(alpha in 0.3f64..4.0, ell in -0.4f64..4.0, a in 0.05f64..20.0, b in 0.05f64..20.0) {
        let e_star = model::critical_data_real(alpha, ell).unwrap().e_star;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-3);
        let o = PhaseOptions::default();
        let i_lo = action::phase(alpha, e_star + lo, ell, &o).unwrap();
        let i_hi = action::phase(alpha, e_star + hi, ell, &o).unwrap();
        prop_assert!(i_lo > 0.0 && i_hi > i_lo);
        prop_assert!(action::phase_derivative(alpha, e_star + lo, ell, &o).unwrap() > 0.0);
    }

    #[test]
    fn wronskian_is_antisymmetric_and_bilinear(
        v1 in (-5.0f64..5.0, -5.0f64..5.0), d1 in (-5.0f64..5.0, -5.0f64..5.0),
        v2 in (-5.0f64..5.0, -5.0f64..5.0), d2 in (-5.0f64..5.0, -5.0f64..5.0),
        c in (-3.0f64..3.0, -3.0f64..3.0),
    ) {
        let x = CoverPoint::new(1.3, 0.4);
        let a = state(x, v1, d1);
        let b = state(x, v2, d2);
        let w = wronskian(&a, &b).unwrap();
        prop_assert!((w + wronskian(&b, &a).unwrap()).norm() < 1e-12 * (1.0 + w.norm()));
        prop_assert!(wronskian(&a, &a).unwrap().norm() < 1e-12);
        let c = C::new(c.0, c.1);
        let scaled = wronskian(&a.scaled_by(c), &b).unwrap();
        prop_assert!((scaled - c * w).norm() < 1e-11 * (1.0 + (c * w).norm()));
    }

    #[test]
    fn chi_transforms_under_rotation(alpha in 0.5f64..3.0, e in 0.5f64..6.0, ell in -0.3f64..2.0) {
        // χ₊(qx, q⁻²E) = q^{ℓ+1} χ₊(x, E), q = e^{iπ/(α+1)}
        let phi = PI / (alpha + 1.0);
        let q = C::from_polar(1.0, phi);
        let p = OscillatorParams::real(alpha, e, ell).unwrap();
        let pr = OscillatorParams::new(alpha, C::new(e, 0.0) / (q * q), C::new(ell, 0.0)).unwrap();
        let x = CoverPoint::new(0.6, 0.1);
        let opts = SpectralOptions::default();
        let a = solution_at(&p, Label::Origin, &x, &opts).unwrap();
        let b = solution_at(&pr, Label::Origin, &x.rotate(phi), &opts).unwrap();
        let got = b.psi() / a.psi();
        prop_assert!((got - C::from_polar(1.0, phi * (ell + 1.0))).norm() < 1e-8, "{}", got);
    }

    #[test]
    fn certified_bound_is_monotone(rho in 0.0f64..3.0, drho in 1e-6f64..1.0, beta in 0.0f64..10.0, dbeta in 1e-3f64..5.0) {
        let b = certified_bound(rho, beta);
        prop_assert!(certified_bound(rho + drho, beta) > b);
        prop_assert!(certified_bound(rho, beta + dbeta) <= b);
        prop_assert!(b <= rho.exp_m1() + 1e-15);
    }

    #[test]
    fn turning_pair_brackets_the_well(alpha in 0.3f64..4.0, ell in -0.4f64..4.0, excess in 1e-3f64..30.0) {
        let cd = model::critical_data_real(alpha, ell).unwrap();
        let e = cd.e_star + excess;
        let (xm, xp) = model::real_turning_pair(alpha, e, ell).unwrap().unwrap();
        prop_assert!(xm < cd.x_star && cd.x_star < xp);
        let lam2 = (ell + 0.5) * (ell + 0.5);
        for x in [xm, xp] {
            let v = x.powf(2.0 * alpha) + lam2 / (x * x) - e;
            prop_assert!(v.abs() < 1e-9 * e);
        }
    }
}
