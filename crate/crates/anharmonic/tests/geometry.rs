use anharmonic::geometry::*;
use anharmonic::{Complex64, CoverPoint, OscillatorParams, PathSpec};
use std::f64::consts::PI;

fn fixture(name: &str) -> serde_json::Value {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn check_fixture(name: &str) {
    let f = fixture(name);
    let p = OscillatorParams::real(f["alpha"].as_f64().unwrap(), f["energy"].as_f64().unwrap(), f["ell"].as_f64().unwrap()).unwrap();
    let c = stokes_complex(&p, &StokesOptions::plane()).unwrap();
    let g = c.graph();
    let want_v: Vec<String> = f["vertices"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    let got_v: Vec<String> = g.vertices.iter().map(|v| v.label.clone()).collect();
    assert_eq!(got_v, want_v);
    let want_e: Vec<(String, String)> = f["edges"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e[0].as_str().unwrap().to_string(), e[1].as_str().unwrap().to_string()))
        .collect();
    assert_eq!(g.edges, want_e);
    assert_eq!(g.unresolved, 0);
    assert!(c.fan_counts_hold((-PI, PI)));
}

#[test]
fn stokes_topology_above_critical_energy() {
    check_fixture("stokes_alpha1_above.json");
}

#[test]
fn stokes_topology_at_critical_energy() {
    check_fixture("stokes_alpha1_critical.json");
}

#[test]
fn stokes_topology_below_critical_energy() {
    check_fixture("stokes_alpha1_below.json");
}

#[test]
fn real_pair_joined_by_real_segment() {
    let p = OscillatorParams::real(1.0, 3.0, 0.5).unwrap();
    let c = stokes_complex(&p, &StokesOptions::plane()).unwrap();
    let e = c
        .edges
        .iter()
        .find(|e| e.from == VertexLabel::TurningPoint(0) && e.to == VertexLabel::TurningPoint(1))
        .unwrap();
    assert!(e.trajectory.points.iter().all(|x| x.to_complex().im.abs() < 1e-12));
}

#[test]
fn double_point_has_four_edges() {
    let p = OscillatorParams::real(1.0, 2.0, 0.5).unwrap();
    let c = stokes_complex(&p, &StokesOptions::plane()).unwrap();
    assert_eq!(c.turning_points[0].multiplicity, 2);
    assert_eq!(c.degree(VertexLabel::TurningPoint(0)), 4);
    // simple points elsewhere carry three
    let q = OscillatorParams::real(1.0, 5.0, 0.5).unwrap();
    let d = stokes_complex(&q, &StokesOptions::plane()).unwrap();
    for v in &d.turning_points {
        assert_eq!(d.degree(v.label), 3);
    }
}

#[test]
fn quartic_complex_resolves() {
    let p = OscillatorParams::real(2.0, 5.0, 1.0).unwrap();
    let c = stokes_complex(&p, &StokesOptions::plane()).unwrap();
    assert_eq!(c.turning_points.len(), 6);
    assert!(c.unresolved.is_empty());
    assert!(c.fan_counts_hold((-PI, PI)));
    // half-edges: each turning-point pair edge counts twice
    let half: usize = c.turning_points.iter().map(|v| v.multiplicity as usize + 2).sum();
    let inner = c.edges.iter().filter(|e| matches!(e.to, VertexLabel::TurningPoint(_))).count();
    assert_eq!(half, 2 * inner + (c.edges.len() - inner));
}

#[test]
fn pure_power_trajectories_follow_polar_form() {
    for (a, phi0) in [(1.0, 0.4), (2.0, 0.3), (0.5, 1.0), (3.0, 0.1)] {
        let q = PurePower { alpha: a };
        let x0 = CoverPoint::new(1.5, phi0);
        let stops = Stops { r_max: 100.0, ..Stops::default() };
        for dir in [1.0, -1.0] {
            let tr = trace_with(&q, x0, 0.0, dir, &stops).unwrap();
            let c = x0.modulus.powf(a + 1.0) * ((a + 1.0) * phi0).sin();
            for x in &tr.points {
                let rho = (c / ((a + 1.0) * x.arg).sin()).powf(1.0 / (a + 1.0));
                assert!((x.modulus / rho - 1.0).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn horizontal_escape_directions() {
    // θ-trajectories leave along (θ + kπ)/(α+1)
    for (a, theta) in [(1.0, 0.0), (2.0, 0.5), (0.5, -0.3)] {
        let p = OscillatorParams::real(a, 1.0, 1.0).unwrap();
        let stops = Stops { r_max: 1e3, ..Stops::default() };
        let tr = trace_trajectory(&p, CoverPoint::new(3.0, 0.35), theta, 1.0, &stops).unwrap();
        let Termination::EnteredSector(k) = tr.termination else { panic!("{:?}", tr.termination) };
        let dir = (theta + k as f64 * PI) / (a + 1.0);
        assert!((tr.end().arg - dir).abs() < 0.05, "alpha {a}: {} vs {dir}", tr.end().arg);
    }
}

#[test]
fn pole_with_imaginary_lambda_gives_circles() {
    let q = PurePole { lambda: Complex64::new(0.0, 0.8) };
    let stops = Stops { max_steps: 500, ..Stops::default() };
    let tr = trace_with(&q, CoverPoint::new(2.0, 0.0), 0.0, 1.0, &stops).unwrap();
    assert!(tr.points.iter().all(|x| (x.modulus - 2.0).abs() < 1e-8));
    // the cover keeps winding instead of closing up
    assert!(tr.end().arg.abs() > 2.0 * PI);
}

#[test]
fn pole_with_complex_lambda_spirals_in() {
    let q = PurePole { lambda: Complex64::new(1.0, 0.3) };
    let stops = Stops { r_min: 1e-12, ..Stops::default() };
    let a = trace_with(&q, CoverPoint::new(1.0, 0.0), PI / 2.0, 1.0, &stops).unwrap();
    let b = trace_with(&q, CoverPoint::new(1.0, 0.0), PI / 2.0, -1.0, &stops).unwrap();
    let inward = [a.termination, b.termination].iter().any(|t| matches!(t, Termination::SpiralIntoOrigin | Termination::HitRadiusMin));
    assert!(inward, "{:?} {:?}", a.termination, b.termination);
}

#[test]
fn reversal_retraces() {
    let p = OscillatorParams::real(1.0, 3.0, 1.0).unwrap();
    let x0 = CoverPoint::new(2.5, 0.6);
    let stops = Stops { max_length: Some(1.5), ..Stops::default() };
    let fwd = trace_trajectory(&p, x0, 0.3, 1.0, &stops).unwrap();
    assert_eq!(fwd.termination, Termination::LengthLimit);
    let back = trace_trajectory(&p, fwd.end(), 0.3, -1.0, &stops).unwrap();
    assert!(back.end().dist(&x0) < 1e-7 * x0.modulus, "{:?}", back.end());
}

#[test]
fn admissibility_of_a_traced_trajectory() {
    // a horizontal trajectory, followed as a polyline, is admissible, and
    // ρ shrinks as it moves away from the turning points
    let p = OscillatorParams::real(1.0, 1.0, 0.5).unwrap();
    let mut rhos = Vec::new();
    for r0 in [3.0, 6.0, 12.0] {
        let x0 = CoverPoint::new(r0, PI / 4.0);
        let stops = Stops { r_max: 4.0 * r0, max_step: 0.05, ..Stops::default() };
        let tr = trace_trajectory(&p, x0, 0.0, 1.0, &stops).unwrap();
        let rep = check_admissible(&p, &PathSpec::polyline(&tr.points)).unwrap();
        assert!(rep.monotone, "r0 = {r0}");
        assert!(rep.beta > -1e-12);
        rhos.push(rep.rho);
    }
    assert!(rhos[0] > rhos[1] && rhos[1] > rhos[2], "{rhos:?}");
}

#[test]
fn path_from_origin_to_infinity_is_admissible() {
    // in the semiclassical regime a horizontal trajectory leaving the pole
    // reaches ∞ in a sector direction with Re S monotone
    let p = OscillatorParams::real(1.0, 40.0, 0.5).unwrap();
    let stops = Stops { r_max: 30.0, ..Stops::default() };
    let tr = trace_trajectory(&p, CoverPoint::new(1e-2, 1.2), 0.0, 1.0, &stops).unwrap();
    assert_eq!(tr.termination, Termination::EnteredSector(1));
    let rep = check_admissible(&p, &PathSpec::polyline(&tr.points)).unwrap();
    assert!(rep.monotone);
}

#[test]
fn well_crossing_is_not_admissible() {
    let p = OscillatorParams::real(1.0, 3.0, 0.5).unwrap();
    let (xm, xp) = (0.6180339887498949, 1.618033988749895);
    let path = PathSpec::segment(CoverPoint::real(xm + 0.05), CoverPoint::real(xp - 0.05));
    let rep = check_admissible(&p, &path).unwrap();
    assert!(!rep.monotone);
}

#[test]
fn trajectory_csv_has_header_and_rows() {
    let p = OscillatorParams::real(1.0, 1.0, 1.0).unwrap();
    let stops = Stops { max_steps: 10, ..Stops::default() };
    let tr = trace_trajectory(&p, CoverPoint::new(2.0, 0.2), 0.0, 1.0, &stops).unwrap();
    let csv = tr.to_csv();
    assert!(csv.starts_with("re,im,sheet\n"));
    assert_eq!(csv.lines().count(), tr.points.len() + 1);
}
