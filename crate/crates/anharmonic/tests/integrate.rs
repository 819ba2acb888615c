use anharmonic::integrate::{self, frobenius, sibuya, wronskian, SolutionState, StepOptions};
use anharmonic::spectral::{solution_at, Label, SolutionBank, SpectralOptions};
use anharmonic::{Complex64, CoverPoint, OscillatorParams, PathSpec};
use approx::assert_relative_eq;
use std::f64::consts::PI;

type C = Complex64;

#[test]
fn wronskian_is_path_independent() {
    let p = OscillatorParams::new(1.5, C::new(4.0, 0.7), C::new(0.8, 0.0)).unwrap();
    let opts = SpectralOptions::default();
    let reference = SolutionBank::new(p, CoverPoint::real(0.9), opts).wronskian(Label::Origin, Label::Ray(0)).unwrap().to_complex();
    for at in [CoverPoint::real(0.5), CoverPoint::real(1.7), CoverPoint::new(1.2, 0.4), CoverPoint::new(2.0, -0.3)] {
        let w = SolutionBank::new(p, at, opts).wronskian(Label::Origin, Label::Ray(0)).unwrap().to_complex();
        assert!((w / reference - 1.0).norm() < 1e-9, "at {at:?}: {w} vs {reference}");
    }
}

#[test]
fn wronskian_of_rays_is_constant_along_a_loop() {
    // carry Ψ₋₁ and Ψ₁ around a closed detour and compare
    let p = OscillatorParams::real(2.0, 3.0, 0.0).unwrap();
    let opts = SpectralOptions::default();
    let at = CoverPoint::real(1.3);
    let a = solution_at(&p, Label::Ray(-1), &at, &opts).unwrap();
    let b = solution_at(&p, Label::Ray(1), &at, &opts).unwrap();
    let w0 = wronskian(&a, &b).unwrap();
    let path = PathSpec::new(at).line_to(C::new(2.0, 1.0)).line_to(C::new(0.6, 0.5)).line_to(at.to_complex());
    let step = StepOptions::default();
    let a1 = integrate::propagate(&p, &a, &path, &step).unwrap();
    let b1 = integrate::propagate(&p, &b, &path, &step).unwrap();
    let w1 = wronskian(&a1, &b1).unwrap();
    assert!((w1 / w0 - 1.0).norm() < 1e-10);
    // and the states themselves return unchanged: no singularity was enclosed
    assert!((a1.psi() / a.psi() - 1.0).norm() < 1e-10);
}

#[test]
fn loop_around_origin_picks_up_monodromy() {
    // χ₊ ~ x^{ℓ+1}: one turn multiplies it by e^{2πi(ℓ+1)}
    let ell = 0.3;
    let p = OscillatorParams::real(1.0, 2.0, ell).unwrap();
    let x0 = CoverPoint::real(0.4);
    let (chi, _) = frobenius::frobenius_seed(&p, &x0, 1e-15).unwrap();
    let path = PathSpec::new(x0).arc_to(2.0 * PI);
    let turned = integrate::propagate(&p, &chi, &path, &StepOptions::default()).unwrap();
    let factor = turned.psi() / chi.psi();
    let want = C::from_polar(1.0, 2.0 * PI * (ell + 1.0));
    assert!((factor - want).norm() < 1e-10, "{factor} vs {want}");
}

#[test]
fn chi_rotation_symmetry() {
    // χ₊(qx, q⁻²E) = q^{ℓ+1} χ₊(x, E) with q = e^{iπ/(α+1)}
    for (alpha, e, ell) in [(1.0, 3.5, 0.0), (2.0, 2.0, 0.7), (0.5, 1.2, 1.4)] {
        let phi = PI / (alpha + 1.0);
        let q = C::from_polar(1.0, phi);
        let p = OscillatorParams::real(alpha, e, ell).unwrap();
        let pr = OscillatorParams::new(alpha, C::new(e, 0.0) / (q * q), C::new(ell, 0.0)).unwrap();
        let x = CoverPoint::new(0.8, 0.2);
        let opts = SpectralOptions::default();
        let a = solution_at(&p, Label::Origin, &x, &opts).unwrap();
        let b = solution_at(&pr, Label::Origin, &x.rotate(phi), &opts).unwrap();
        let want = C::from_polar(1.0, phi * (ell + 1.0));
        let got = b.psi() / a.psi();
        assert!((got - want).norm() < 1e-9, "alpha {alpha}: {got} vs {want}");
        let want_d = C::from_polar(1.0, phi * ell);
        assert!((b.dpsi() / a.dpsi() - want_d).norm() < 1e-9);
    }
}

#[test]
fn harmonic_ground_state_along_real_axis() {
    // α = 1, ℓ = 0, E = 3: χ₊ = x e^{−x²/2}
    let p = OscillatorParams::real(1.0, 3.0, 0.0).unwrap();
    let (seed, _) = frobenius::frobenius_seed(&p, &CoverPoint::real(0.05), 1e-15).unwrap();
    let exact = |x: f64| x * (-x * x / 2.0).exp();
    let mut trace: Vec<SolutionState> = Vec::new();
    let stepper = integrate::steppers().get("taylor").unwrap();
    let path = PathSpec::segment(CoverPoint::real(0.05), CoverPoint::real(4.0));
    integrate::propagate_with(stepper, &p, &seed, &path, &StepOptions::default(), Some(&mut trace)).unwrap();
    let scale = seed.psi().re / exact(0.05);
    for st in &trace {
        let x = st.location.to_complex().re;
        assert_relative_eq!(st.psi().re / scale, exact(x), max_relative = 1e-10);
        assert!(st.psi().im.abs() < 1e-12 * st.psi().norm());
    }
}

#[test]
fn steppers_agree() {
    let p = OscillatorParams::new(2.0, C::new(5.0, -1.0), C::new(1.0, 0.0)).unwrap();
    let x0 = CoverPoint::new(1.0, 0.3);
    let st = SolutionState::new(x0, C::new(1.0, 0.0), C::new(0.0, 1.0), integrate::SeedTag::Frobenius);
    let path = PathSpec::new(x0).line_to(C::new(2.5, 0.5)).arc_to(1.0);
    let opts = StepOptions::default();
    let reg = integrate::steppers();
    let names = reg.names();
    assert_eq!(names, ["taylor", "dopri5"]);
    let a = integrate::propagate_with(reg.get("taylor").unwrap(), &p, &st, &path, &opts, None).unwrap();
    let b = integrate::propagate_with(reg.get("dopri5").unwrap(), &p, &st, &path, &opts, None).unwrap();
    assert!((a.psi() / b.psi() - 1.0).norm() < 1e-8);
    assert!((a.dpsi() / b.dpsi() - 1.0).norm() < 1e-8);
}

#[test]
fn sibuya_seed_decays_along_its_ray() {
    let p = OscillatorParams::real(1.0, 2.0, 0.5).unwrap();
    let opts = SpectralOptions::default();
    let mut last = f64::INFINITY;
    for r in [2.0, 3.0, 4.0, 5.0] {
        let st = solution_at(&p, Label::Ray(1), &CoverPoint::new(r, sibuya::ray_arg(1.0, 1)), &opts).unwrap();
        let m = st.psi().norm().ln();
        assert!(m < last);
        last = m;
    }
}

#[test]
fn mismatched_start_is_rejected() {
    let p = OscillatorParams::real(1.0, 2.0, 0.5).unwrap();
    let st = SolutionState::new(CoverPoint::real(1.0), C::new(1.0, 0.0), C::new(0.0, 0.0), integrate::SeedTag::Frobenius);
    let path = PathSpec::segment(CoverPoint::real(2.0), CoverPoint::real(3.0));
    assert!(integrate::propagate(&p, &st, &path, &StepOptions::default()).is_err());
}
