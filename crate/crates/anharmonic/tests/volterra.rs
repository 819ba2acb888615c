use anharmonic::volterra::{self, check, Curve, GridOptions, VolterraOptions};
use anharmonic::{CoverPoint, OscillatorParams, PathSpec};

fn ray(r0: f64, arg: f64, power: f64) -> Curve {
    Curve::Path(PathSpec::new(CoverPoint::new(r0, arg)).ray_out(power))
}

#[test]
fn iteration_matches_direct_integration() {
    // two routes to ψ/Ψ^W: the Volterra fixed point and the ODE solution
    let p = OscillatorParams::real(1.0, 1.0, 1.0).unwrap();
    let curve = ray(5.0, 0.0, 0.5);
    let run = volterra::volterra_solve(&p, &curve, 1e-13, 200).unwrap();
    let direct = check::fundamental_check(&p, &curve, &GridOptions::default()).unwrap();
    let mut compared = 0;
    for s in &direct.samples {
        if let Some((_, z)) = run.samples.iter().find(|(t, _)| (t - s.t).abs() < 1e-12) {
            assert!(((*z - 1.0).norm() - s.measured).abs() < 1e-7 + 1e-4 * s.measured, "t = {}", s.t);
            compared += 1;
        }
    }
    assert!(compared > 10);
}

#[test]
fn iterates_contract() {
    let p = OscillatorParams::real(2.0, 5.0, 1.0).unwrap();
    let run = volterra::volterra_solve(&p, &ray(6.0, 0.0, 1.0 / 3.0), 1e-13, 200).unwrap();
    let ch = &run.iterate_changes;
    assert!(ch.len() >= 2);
    assert!(*ch.last().unwrap() < 1e-13);
    for w in ch.windows(2) {
        assert!(w[1] <= w[0] * 1.0001 || w[1] < 1e-14, "{ch:?}");
    }
    let worst = run.samples.iter().map(|(_, z)| (z - 1.0).norm()).fold(0.0, f64::max);
    assert!(worst <= run.bound);
    assert!(run.refined_bound <= run.bound * (1.0 + 1e-12));
}

#[test]
fn zero_forcing_gives_unit_solution() {
    let p = OscillatorParams::real(1.0, 3.0, 0.5).unwrap();
    let grid = volterra::CurveGrid::build(&p, &ray(4.0, 0.1, 0.5), &GridOptions::default()).unwrap();
    let run = volterra::volterra_solve_on(&grid, &VolterraOptions { zero_forcing: true, ..VolterraOptions::default() }).unwrap();
    assert!(run.samples.iter().all(|(_, z)| (z - 1.0).norm() == 0.0));
}

#[test]
fn certified_bound_shape() {
    // β = 0 gives exp(ρ) − 1; larger β only tightens it, down to exp(ρ/2) − 1
    for rho in [1e-6, 0.01, 0.3, 2.0] {
        assert!((volterra::certified_bound(rho, 0.0) - rho.exp_m1()).abs() < 1e-15 * rho.exp());
        let tight = volterra::certified_bound(rho, 50.0);
        assert!((tight - (0.5 * rho).exp_m1()).abs() < 1e-12);
        assert!(volterra::certified_bound(rho, 1.0) < volterra::certified_bound(rho, 0.0));
    }
}

#[test]
fn rho_shrinks_as_the_start_moves_out() {
    let p = OscillatorParams::real(1.0, 1.0, 1.0).unwrap();
    let rhos: Vec<f64> = [5.0, 10.0, 20.0, 40.0]
        .iter()
        .map(|&r| volterra::error_functionals(&p, &ray(r, 0.0, 0.5)).unwrap().0)
        .collect();
    for w in rhos.windows(2) {
        assert!(w[1] < w[0], "{rhos:?}");
    }
}

#[test]
fn segment_from_origin_is_bounded() {
    let p = OscillatorParams::real(1.0, 1.0, 1.0).unwrap();
    let c = check::fundamental_check(&p, &Curve::FromOrigin { end: CoverPoint::real(3.0) }, &GridOptions::default()).unwrap();
    assert!(c.strictly_admissible);
    assert!(c.holds(), "worst ratio {}", c.worst_ratio());
}

#[test]
fn curve_crossing_the_well_is_rejected() {
    // Re S is not monotone between the turning points
    let p = OscillatorParams::real(1.0, 3.0, 0.5).unwrap();
    let c = Curve::Path(PathSpec::segment(CoverPoint::real(0.7), CoverPoint::real(1.5)));
    assert!(volterra::volterra_solve(&p, &c, 1e-12, 100).is_err() || !volterra::CurveGrid::build(&p, &c, &GridOptions::default()).unwrap().strictly_increasing());
}
