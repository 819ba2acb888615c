//! θ-trajectories of the quadratic differential V dx², the Stokes complex
//! they assemble into, and admissibility reports for candidate paths.
//!
//! A θ-trajectory is a curve along which Im(e^{−iθ}S) is constant, with
//! S = ∫√V dx. They are traced in a log-arclength parameter σ,
//! dx/dσ = ±e^{iθ}|x||√V|/√V, so the speed in x is |x| and both the origin
//! and infinity are reached gracefully.

mod complex;

pub use complex::{stokes_complex, Edge, GraphVertex, StokesComplex, StokesGraph, StokesOptions, Vertex, VertexLabel};

use crate::cover::{sqrt_near, CoverPoint};
use crate::error::{Error, Result};
use crate::integrate::dopri::dopri5_step;
use crate::model::{self, OscillatorParams};
use crate::path::PathSpec;
use crate::quad;
use crate::registry::Named;
use crate::volterra::{Curve, CurveGrid, GridOptions};
use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A meromorphic V on the cover whose trajectories can be traced.
pub trait Differential: Named + Send + Sync {
    /// V, V', V'' at `x`.
    fn eval(&self, x: &CoverPoint) -> Result<(C, C, C)>;
    /// The exponent a in V ~ x^{2a} at infinity, when a > −1.
    fn infinity_order(&self) -> Option<f64>;
}

impl Named for OscillatorParams {
    fn name(&self) -> &'static str {
        "oscillator"
    }
}

impl Differential for OscillatorParams {
    fn eval(&self, x: &CoverPoint) -> Result<(C, C, C)> {
        model::reduced_with_derivatives(self, x)
    }
    fn infinity_order(&self) -> Option<f64> {
        Some(self.alpha)
    }
}

/// V = x^{2α}; horizontal trajectories are known in closed form.
#[derive(Debug, Clone, Copy)]
pub struct PurePower {
    pub alpha: f64,
}

impl Named for PurePower {
    fn name(&self) -> &'static str {
        "pure-power"
    }
}

impl Differential for PurePower {
    fn eval(&self, x: &CoverPoint) -> Result<(C, C, C)> {
        let a = self.alpha;
        let v = x.powf(2.0 * a);
        let inv = 1.0 / x.to_complex();
        Ok((v, 2.0 * a * v * inv, 2.0 * a * (2.0 * a - 1.0) * v * inv * inv))
    }
    fn infinity_order(&self) -> Option<f64> {
        Some(self.alpha)
    }
}

/// V = λ²/x²; trajectories are rays, circles or log-spirals.
#[derive(Debug, Clone, Copy)]
pub struct PurePole {
    pub lambda: C,
}

impl Named for PurePole {
    fn name(&self) -> &'static str {
        "pure-pole"
    }
}

impl Differential for PurePole {
    fn eval(&self, x: &CoverPoint) -> Result<(C, C, C)> {
        let z = x.to_complex();
        let l2 = self.lambda * self.lambda;
        Ok((l2 / (z * z), -2.0 * l2 / (z * z * z), 6.0 * l2 / (z * z * z * z)))
    }
    fn infinity_order(&self) -> Option<f64> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    HitRadiusMax,
    HitRadiusMin,
    NearTurningPoint(usize),
    /// Escaped to infinity along (θ + kπ)/(a+1).
    EnteredSector(i64),
    SpiralIntoOrigin,
    StepLimit,
    /// The requested parameter length was used up.
    LengthLimit,
}

/// When to stop tracing.
#[derive(Debug, Clone)]
pub struct Stops {
    pub r_max: f64,
    pub r_min: f64,
    pub turning_points: Vec<CoverPoint>,
    pub exclusion: Vec<f64>,
    /// A turning point to ignore until the trace has left its neighbourhood.
    pub source: Option<(usize, f64)>,
    /// Compare turning points in the plane rather than on the cover.
    pub plane: bool,
    pub max_steps: usize,
    pub max_length: Option<f64>,
    /// Largest step in σ, which bounds |Δx|/|x|.
    pub max_step: f64,
    pub tol: f64,
    /// Half-width of the sector-entry window in units of π/(a+1).
    pub sector_window: f64,
    /// Drift correction every this many accepted steps.
    pub correct_every: usize,
}

impl Default for Stops {
    fn default() -> Self {
        Stops {
            r_max: 50.0,
            r_min: 1e-4,
            turning_points: Vec::new(),
            exclusion: Vec::new(),
            source: None,
            plane: false,
            max_steps: 20_000,
            max_length: None,
            max_step: 0.02,
            tol: 1e-11,
            sector_window: 0.25,
            correct_every: 20,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub theta: f64,
    pub direction: f64,
    pub points: Vec<CoverPoint>,
    /// S − S(start) at each point, from chordwise quadrature of √V.
    pub action: Vec<C>,
    pub termination: Termination,
    /// Largest |Im(e^{−iθ}(S − S(start)))| seen before correction.
    pub level_drift: f64,
    pub length: f64,
}

impl Trajectory {
    pub fn end(&self) -> CoverPoint {
        *self.points.last().unwrap()
    }

    /// Im(e^{−iθ}(S − S(start))) at each point.
    pub fn level_values(&self) -> Vec<f64> {
        let rot = C::from_polar(1.0, -self.theta);
        self.action.iter().map(|s| (rot * s).im).collect()
    }

    /// Polyline as CSV rows `re,im,sheet`, with sheet = round(arg/2π).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,sheet\n");
        for p in &self.points {
            let z = p.to_complex();
            let sheet = (p.arg / (2.0 * PI)).round() as i64;
            out.push_str(&format!("{:.15e},{:.15e},{}\n", z.re, z.im, sheet));
        }
        out
    }
}

fn unit_velocity(q: &dyn Differential, z: C, near: &CoverPoint, sv_ref: C, rot: C) -> Result<(C, C)> {
    let x = CoverPoint::lift_near(z, near);
    let (v, _, _) = q.eval(&x)?;
    let sv = sqrt_near(v, sv_ref);
    let n = sv.norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::Singular(format!("trajectory meets a zero of V at {z:?}")));
    }
    Ok((rot * z.norm() * sv.conj() / n, sv))
}

/// ∫ √V dx along the chord a → b, continuing the branch from `sv_a` to `sv_b`.
fn chord_action(q: &dyn Differential, a: &CoverPoint, b: C, sv_a: C, sv_b: C) -> C {
    let za = a.to_complex();
    let d = b - za;
    let f = |t: f64| {
        let x = CoverPoint::lift_near(za + d * t, a);
        match q.eval(&x) {
            Ok((v, _, _)) => sqrt_near(v, sv_a + (sv_b - sv_a) * t) * d,
            Err(_) => C::new(f64::NAN, f64::NAN),
        }
    };
    quad::gk15(&f, 0.0, 1.0).0
}

fn near_turning_point(stops: &Stops, x: &CoverPoint, source_active: bool) -> Option<usize> {
    let z = x.to_complex();
    for (i, t) in stops.turning_points.iter().enumerate() {
        if let Some((s, _)) = stops.source {
            if s == i && !source_active {
                continue;
            }
        }
        let r = stops.exclusion.get(i).copied().unwrap_or(0.0);
        let close = if stops.plane {
            (z - t.to_complex()).norm() < r
        } else {
            x.dist(t) < r && (x.arg - t.arg).abs() < PI
        };
        if close {
            return Some(i);
        }
    }
    None
}

/// Trace the θ-trajectory of the oscillator's V through `x0`.
pub fn trace_trajectory(p: &OscillatorParams, x0: CoverPoint, theta: f64, direction: f64, stops: &Stops) -> Result<Trajectory> {
    trace_with(p, x0, theta, direction, stops)
}

/// Trace the θ-trajectory of `q` through `x0` with adaptive DOPRI5 steps and
/// periodic Newton projection back onto the level set.
pub fn trace_with(q: &dyn Differential, x0: CoverPoint, theta: f64, direction: f64, stops: &Stops) -> Result<Trajectory> {
    let (v0, _, _) = q.eval(&x0)?;
    if v0.norm() == 0.0 {
        return Err(Error::Singular("trajectory started at a zero of V".into()));
    }
    let rot = C::from_polar(direction.signum(), theta);
    let level_rot = C::from_polar(1.0, -theta);
    let mut x = x0;
    let mut sv = v0.sqrt();
    let mut s = C::new(0.0, 0.0);
    let mut points = vec![x];
    let mut action = vec![s];
    let mut drift = 0.0f64;
    let mut sigma = 0.0;
    let mut h = stops.max_step * 0.1;
    let mut accepted = 0usize;
    let mut source_active = stops.source.is_none();
    // winding bookkeeping for spiral detection
    let mut turn_arg = x.arg;
    let mut turn_mod = x.modulus;

    let termination = loop {
        if accepted >= stops.max_steps {
            break Termination::StepLimit;
        }
        if let Some(l) = stops.max_length {
            if sigma >= l * (1.0 - 1e-14) {
                break Termination::LengthLimit;
            }
            h = h.min(l - sigma);
        }
        let z = x.to_complex();
        let sv_ref = sv;
        let xr = x;
        let mut f = |_t: f64, y: &[C; 1]| -> Result<[C; 1]> { Ok([unit_velocity(q, y[0], &xr, sv_ref, rot)?.0]) };
        let (yn, err) = match dopri5_step(&mut f, sigma, &[z], h) {
            Ok(r) => r,
            Err(_) => {
                h *= 0.25;
                if h < 1e-14 {
                    return Err(Error::StepUnderflow { re: z.re, im: z.im });
                }
                continue;
            }
        };
        let ratio = err / (stops.tol * z.norm());
        let zn = yn[0];
        // reject steps that turn the branch or jump more than max_step
        let big = (zn - z).norm() > 1.5 * stops.max_step * z.norm();
        if !(ratio <= 1.0) || big || !zn.re.is_finite() {
            let fac = if ratio.is_finite() { (0.9 * ratio.powf(-0.25)).clamp(0.1, 0.5) } else { 0.1 };
            h *= fac;
            if h < 1e-14 {
                return Err(Error::StepUnderflow { re: z.re, im: z.im });
            }
            continue;
        }
        sigma += h;
        let xn = CoverPoint::lift_near(zn, &x);
        let (vn, _, _) = q.eval(&xn)?;
        let svn = sqrt_near(vn, sv);
        s += chord_action(q, &x, zn, sv, svn);
        x = xn;
        sv = svn;
        accepted += 1;
        drift = drift.max((level_rot * s).im.abs());

        if stops.correct_every > 0 && accepted.is_multiple_of(stops.correct_every) {
            let d = (level_rot * s).im;
            let dx = -d * C::i() / (level_rot * sv);
            if dx.norm() < 0.01 * x.modulus && near_turning_point(stops, &x, true).is_none() {
                let zc = x.to_complex() + dx;
                let xc = CoverPoint::lift_near(zc, &x);
                let (vc, _, _) = q.eval(&xc)?;
                let svc = sqrt_near(vc, sv);
                s += chord_action(q, &x, zc, sv, svc);
                x = xc;
                sv = svc;
            }
        }
        points.push(x);
        action.push(s);

        let fac = if ratio > 0.0 { (0.9 * ratio.powf(-0.2)).min(4.0) } else { 4.0 };
        h = (h * fac).min(stops.max_step);

        if let Some((src, radius)) = stops.source {
            if !source_active {
                let t = stops.turning_points[src];
                let away = if stops.plane { (x.to_complex() - t.to_complex()).norm() } else { x.dist(&t) };
                source_active = away > radius;
            }
        }
        if let Some(i) = near_turning_point(stops, &x, source_active) {
            break Termination::NearTurningPoint(i);
        }
        if x.modulus < stops.r_min {
            break Termination::HitRadiusMin;
        }
        if x.modulus > stops.r_max {
            break match q.infinity_order() {
                Some(a) => {
                    let k = (((a + 1.0) * x.arg - theta) / PI).round();
                    let dir = (theta + k * PI) / (a + 1.0);
                    if (x.arg - dir).abs() < stops.sector_window * PI / (a + 1.0) {
                        Termination::EnteredSector(k as i64)
                    } else {
                        Termination::HitRadiusMax
                    }
                }
                None => Termination::HitRadiusMax,
            };
        }
        if (x.arg - turn_arg).abs() >= 2.0 * PI {
            if x.modulus < 0.99 * turn_mod {
                break Termination::SpiralIntoOrigin;
            }
            turn_arg = x.arg;
            turn_mod = x.modulus;
        }
    };
    Ok(Trajectory { theta, direction: direction.signum(), points, action, termination, level_drift: drift, length: sigma })
}

/// S(x) − S(t) from a turning point `t`, by a quadrature that absorbs the
/// square-root behaviour at `t`.
pub fn action_from_turning_point(q: &dyn Differential, t: &CoverPoint, x: &CoverPoint, sv_x: C) -> C {
    let zt = t.to_complex();
    let d = x.to_complex() - zt;
    let f = |u: f64| {
        let y = CoverPoint::lift_near(zt + d * u * u, x);
        match q.eval(&y) {
            Ok((v, _, _)) => sqrt_near(v, sv_x * u) * d * 2.0 * u,
            Err(_) => C::new(f64::NAN, f64::NAN),
        }
    };
    let n = 8;
    (0..n).map(|i| quad::gk15(&f, i as f64 / n as f64, (i + 1) as f64 / n as f64).0).sum()
}

/// Result of [`check_admissible`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub monotone: bool,
    pub rho: f64,
    pub beta: f64,
}

/// Whether Re S strictly increases along `path` (for the better of the two
/// branches of √V), together with ρ and β.
pub fn check_admissible(p: &OscillatorParams, path: &PathSpec) -> Result<AdmissibilityReport> {
    let grid = CurveGrid::build(p, &Curve::Path(path.clone()), &GridOptions::default())?;
    Ok(AdmissibilityReport { monotone: grid.strictly_increasing(), rho: grid.rho_total(), beta: grid.beta() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_power_horizontal_closed_form() {
        let a = 1.5;
        let q = PurePower { alpha: a };
        let x0 = CoverPoint::new(2.0, 0.3);
        let stops = Stops { r_max: 200.0, ..Stops::default() };
        let tr = trace_with(&q, x0, 0.0, 1.0, &stops).unwrap();
        let c = x0.modulus.powf(a + 1.0) * ((a + 1.0) * x0.arg).sin();
        for p in &tr.points {
            let rho = (c / ((a + 1.0) * p.arg).sin()).powf(1.0 / (a + 1.0));
            assert!((p.modulus / rho - 1.0).abs() < 1e-6, "{p:?} vs {rho}");
        }
        assert!(matches!(tr.termination, Termination::EnteredSector(_)));
    }

    #[test]
    fn pole_rays_and_circles() {
        let stops = Stops { r_max: 10.0, r_min: 0.1, max_steps: 400, ..Stops::default() };
        let ray = trace_with(&PurePole { lambda: C::new(1.5, 0.0) }, CoverPoint::new(1.0, 0.7), 0.0, 1.0, &stops).unwrap();
        assert!(ray.points.iter().all(|p| (p.arg - 0.7).abs() < 1e-9));
        let circ = trace_with(&PurePole { lambda: C::new(0.0, 1.5) }, CoverPoint::new(1.0, 0.7), 0.0, 1.0, &stops).unwrap();
        assert!(circ.points.iter().all(|p| (p.modulus - 1.0).abs() < 1e-9));
        assert_eq!(circ.termination, Termination::StepLimit);
    }

    #[test]
    fn level_set_is_kept() {
        let p = OscillatorParams::real(1.0, 3.0, 0.5).unwrap();
        let tr = trace_trajectory(&p, CoverPoint::new(1.0, 0.4), PI / 2.0, 1.0, &Stops::default()).unwrap();
        let lv = tr.level_values();
        for (l, s) in lv.iter().zip(&tr.action) {
            assert!(l.abs() < 1e-6 * (1.0 + s.norm()));
        }
    }
}
