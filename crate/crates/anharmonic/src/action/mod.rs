//! Action integrals of √V: along complex paths, and the real phase integral
//! I(E, ℓ) between the two positive turning points together with its
//! E-derivative, the reduced integrals J₁, J₂ and the Bohr-Sommerfeld energies.

pub mod asymptotic;

use crate::cover::{sqrt_near, CoverPoint};
use crate::error::{Error, Result};
use crate::model::{self, critical_data_real, OscillatorParams};
use crate::path::{PathSpec, Segment};
use crate::quad::{self, QuadOptions};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub use asymptotic::{asymptotic_reference, AsymptoticFormula};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionResult {
    pub value: Complex64,
    pub segment_values: Vec<Complex64>,
    pub quadrature_error_estimate: f64,
}

/// Smoothstep reparametrisation: analytic, with u' vanishing at both ends so
/// a square-root zero of V at an endpoint becomes a regular integrand.
fn smoothstep(tau: f64) -> (f64, f64) {
    (tau * tau * (3.0 - 2.0 * tau), 6.0 * tau * (1.0 - tau))
}

/// Position and velocity in the quadrature variable of a segment.
fn seg_eval(seg: &Segment, start: &CoverPoint, tau: f64) -> (CoverPoint, Complex64) {
    match seg {
        Segment::Line { .. } => {
            let (u, du) = smoothstep(tau);
            let (x, dx) = seg.point(start, u);
            (x, dx * du)
        }
        _ => seg.point(start, tau),
    }
}

struct BranchGrid {
    taus: Vec<f64>,
    roots: Vec<Complex64>,
}

const MAX_TURN: f64 = 0.7;

/// Continue √V across a segment starting from `prev` (zero if unknown).
fn branch_grid(
    p: &OscillatorParams,
    seg: &Segment,
    start: &CoverPoint,
    prev: Complex64,
    vscale: f64,
) -> Result<BranchGrid> {
    let mut taus: Vec<f64> = (0..=32).map(|j| j as f64 / 32.0).collect();
    let vals = |taus: &[f64]| -> Result<Vec<Complex64>> {
        taus.iter()
            .map(|&t| model::eval_reduced(p, &seg_eval(seg, start, t).0))
            .collect()
    };
    let mut v = vals(&taus)?;
    for _ in 0..40 {
        let mut roots = Vec::with_capacity(v.len());
        let mut cur = prev;
        for vi in &v {
            if vi.norm() <= 1e-14 * vscale {
                roots.push(Complex64::new(0.0, 0.0));
                continue;
            }
            let s = if cur.norm() == 0.0 { vi.sqrt() } else { sqrt_near(*vi, cur) };
            roots.push(s);
            cur = s;
        }
        let mut insert = Vec::new();
        for j in 0..taus.len() - 1 {
            let (a, b) = (roots[j], roots[j + 1]);
            if a.norm() > 0.0 && b.norm() > 0.0 && (b / a).arg().abs() > MAX_TURN {
                if taus[j + 1] - taus[j] < 1e-9 {
                    return Err(Error::Branch(format!(
                        "sqrt(V) turns by {:.2} rad near x = {:?}",
                        (b / a).arg(),
                        seg_eval(seg, start, taus[j]).0.to_complex()
                    )));
                }
                insert.push(j);
            }
        }
        if insert.is_empty() {
            return Ok(BranchGrid { taus, roots });
        }
        for &j in insert.iter().rev() {
            let m = 0.5 * (taus[j] + taus[j + 1]);
            taus.insert(j + 1, m);
            let vm = model::eval_reduced(p, &seg_eval(seg, start, m).0)?;
            v.insert(j + 1, vm);
        }
    }
    Err(Error::Branch("branch grid refinement did not settle".into()))
}

/// S = ∫ √V dx along a finite path, continuing the branch of √V fixed by the
/// path's anchor. Endpoints of straight segments may be turning points.
pub fn action_integral(p: &OscillatorParams, path: &PathSpec, tol: f64) -> Result<ActionResult> {
    path.validate()?;
    if !path.is_finite() {
        return Err(Error::domain("action integral along an unbounded path"));
    }
    let vscale = 1.0 + p.energy.norm();
    let nodes = path.nodes();
    let mut prev = Complex64::new(0.0, 0.0);
    let mut grids = Vec::with_capacity(path.segments.len());
    for (i, seg) in path.segments.iter().enumerate() {
        let g = branch_grid(p, seg, &nodes[i], prev, vscale)?;
        if let Some(last) = g.roots.iter().rev().find(|r| r.norm() > 0.0) {
            prev = *last;
        }
        grids.push(g);
    }
    // sign fix from the anchor node
    let anchor = path.branch.node.min(path.segments.len().saturating_sub(1));
    let flip = {
        let g = &grids[anchor];
        let (j, r) = g
            .roots
            .iter()
            .enumerate()
            .find(|(_, r)| r.norm() > 0.0)
            .ok_or_else(|| Error::Branch("sqrt(V) vanishes along an entire segment".into()))?;
        let x = seg_eval(&path.segments[anchor], &nodes[anchor], g.taus[j]).0;
        let principal = model::eval_reduced(p, &x)?.sqrt() * path.branch.sign;
        if (principal - r).norm() <= (principal + r).norm() {
            1.0
        } else {
            -1.0
        }
    };

    let total_intervals: usize = grids.iter().map(|g| g.taus.len() - 1).sum();
    let opts = QuadOptions { abs_tol: tol / total_intervals as f64, rel_tol: 1e-13, max_intervals: 400 };
    let mut segment_values = Vec::with_capacity(grids.len());
    let mut err = 0.0;
    for (i, (seg, g)) in path.segments.iter().zip(&grids).enumerate() {
        let start = nodes[i];
        let mut sv = Complex64::new(0.0, 0.0);
        for j in 0..g.taus.len() - 1 {
            let reference = if g.roots[j].norm() >= g.roots[j + 1].norm() { g.roots[j] } else { g.roots[j + 1] };
            let f = |tau: f64| {
                let (x, dx) = seg_eval(seg, &start, tau);
                match model::eval_reduced(p, &x) {
                    Ok(v) => sqrt_near(v, reference) * dx,
                    Err(_) => Complex64::new(f64::NAN, f64::NAN),
                }
            };
            let r = quad::integrate(f, g.taus[j], g.taus[j + 1], &opts)?;
            sv += r.value;
            err += r.error;
        }
        segment_values.push(sv * flip);
    }
    let value = segment_values.iter().sum();
    if err > tol.max(1e-13 * Complex64::norm(value)) * 10.0 {
        return Err(Error::Quadrature(format!("action error estimate {err:.3e} above {tol:.3e}")));
    }
    Ok(ActionResult { value, segment_values, quadrature_error_estimate: err })
}

/// Tolerances for the real phase integrals.
#[derive(Debug, Clone, Copy)]
pub struct PhaseOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Relative window above E_* where the linear expansion replaces quadrature.
    pub guard: f64,
}

impl Default for PhaseOptions {
    fn default() -> Self {
        PhaseOptions { abs_tol: 1e-14, rel_tol: 1e-13, guard: 1e-6 }
    }
}

/// Slope of J₂ at ν_*.
pub fn critical_slope(alpha: f64) -> f64 {
    alpha.powf(-1.0 / (alpha + 1.0)) / (2.0 * (2.0 * alpha + 2.0).sqrt())
}

/// The two desingularised halves of the phase integrand, as functions of t.
/// `g(t) = −V(x)/t²` with `x = x_- + t²` on the left and `x = x_+ − t²` on
/// the right, written to avoid cancellation.
fn g_left(alpha: f64, lam2: f64, xm: f64, t: f64) -> f64 {
    let t2 = t * t;
    let x = xm + t2;
    let pow_part = xm.powf(2.0 * alpha) * (2.0 * alpha * (t2 / xm).ln_1p()).exp_m1() / t2;
    -(pow_part - lam2 * (2.0 * xm + t2) / (x * x * xm * xm))
}

fn g_right(alpha: f64, lam2: f64, xp: f64, t: f64) -> f64 {
    let t2 = t * t;
    let x = xp - t2;
    let pow_part = xp.powf(2.0 * alpha) * (2.0 * alpha * (-t2 / xp).ln_1p()).exp_m1() / t2;
    -(pow_part + lam2 * (2.0 * xp - t2) / (x * x * xp * xp))
}

fn phase_parts(
    alpha: f64,
    energy: f64,
    ell: f64,
    opts: &PhaseOptions,
    integrand: fn(f64, f64) -> f64,
) -> Result<f64> {
    let (xm, xp) = model::real_turning_pair(alpha, energy, ell)?
        .ok_or_else(|| Error::domain("energy below the critical value"))?;
    let lam2 = (ell + 0.5) * (ell + 0.5);
    let mid = 0.5 * (xm + xp);
    let q = QuadOptions { abs_tol: opts.abs_tol, rel_tol: opts.rel_tol, max_intervals: 2000 };
    let (l, _) = quad::integrate_real(
        |t| integrand(t, g_left(alpha, lam2, xm, t).max(0.0)),
        0.0,
        (mid - xm).sqrt(),
        &q,
    )?;
    let (r, _) = quad::integrate_real(
        |t| integrand(t, g_right(alpha, lam2, xp, t).max(0.0)),
        0.0,
        (xp - mid).sqrt(),
        &q,
    )?;
    Ok((l + r) / PI)
}

/// I(E, ℓ) = (1/π)∫_{x_-}^{x_+} √(E − x^{2α} − (ℓ+1/2)²/x²) dx, and 0 for E ≤ E_*.
pub fn phase(alpha: f64, energy: f64, ell: f64, opts: &PhaseOptions) -> Result<f64> {
    if !(alpha > 0.0) || !(ell > -0.5) {
        return Err(Error::domain("phase integral needs alpha > 0 and ell > -1/2"));
    }
    let crit = critical_data_real(alpha, ell)?;
    let de = energy - crit.e_star;
    if de <= 0.0 {
        return Ok(0.0);
    }
    let lam = ell + 0.5;
    if de < opts.guard * crit.e_star {
        let nu_excess = de * lam.powf(-2.0 * alpha / (alpha + 1.0));
        return Ok(lam * critical_slope(alpha) * nu_excess);
    }
    phase_parts(alpha, energy, ell, opts, |t, g| 2.0 * t * t * g.sqrt())
}

/// ∂I/∂E = (1/π)∫ dx / (2√(E − x^{2α} − (ℓ+1/2)²/x²)).
pub fn phase_derivative(alpha: f64, energy: f64, ell: f64, opts: &PhaseOptions) -> Result<f64> {
    let crit = critical_data_real(alpha, ell)?;
    let de = energy - crit.e_star;
    if de <= 0.0 {
        return Err(Error::domain("phase derivative needs E > E_*"));
    }
    let lam = ell + 0.5;
    if de < opts.guard * crit.e_star {
        return Ok(lam.powf((1.0 - alpha) / (1.0 + alpha)) * critical_slope(alpha));
    }
    phase_parts(alpha, energy, ell, opts, |_, g| 1.0 / g.sqrt())
}

pub fn wkb_phase(p: &OscillatorParams) -> Result<f64> {
    phase(p.alpha, p.real_energy()?, p.real_ell()?, &PhaseOptions::default())
}

pub fn wkb_phase_derivative(p: &OscillatorParams) -> Result<f64> {
    phase_derivative(p.alpha, p.real_energy()?, p.real_ell()?, &PhaseOptions::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JKind {
    J1,
    J2,
}

/// J₁(u) = I(1, u − 1/2) and J₂(u) = I(u, 1/2).
pub fn reduced_wkb_integral(kind: JKind, u: f64, alpha: f64) -> Result<f64> {
    reduced_wkb_integral_with(kind, u, alpha, &PhaseOptions::default())
}

pub fn reduced_wkb_integral_with(kind: JKind, u: f64, alpha: f64, opts: &PhaseOptions) -> Result<f64> {
    match kind {
        JKind::J1 => {
            if u < 0.0 {
                return Err(Error::domain("J1 needs u >= 0"));
            }
            if u == 0.0 {
                return Ok(asymptotic::j1_leading(alpha));
            }
            phase(alpha, 1.0, u - 0.5, opts)
        }
        JKind::J2 => phase(alpha, u, 0.5, opts),
    }
}

/// J₂'(ν).
pub fn reduced_wkb_derivative(nu: f64, alpha: f64) -> Result<f64> {
    phase_derivative(alpha, nu, 0.5, &PhaseOptions::default())
}

/// Options for the Bohr-Sommerfeld solve.
#[derive(Debug, Clone, Copy)]
pub struct BsOptions {
    pub residual_tol: f64,
    pub max_newton: usize,
    pub phase: PhaseOptions,
}

impl Default for BsOptions {
    fn default() -> Self {
        BsOptions { residual_tol: 1e-10, max_newton: 60, phase: PhaseOptions::default() }
    }
}

/// Ê_n(ℓ): the unique solution of I(E, ℓ) = n + 1/2.
pub fn bohr_sommerfeld_energy(n: u32, alpha: f64, ell: f64) -> Result<f64> {
    bohr_sommerfeld_energy_with(n, alpha, ell, &BsOptions::default())
}

pub fn bohr_sommerfeld_energy_with(n: u32, alpha: f64, ell: f64, opts: &BsOptions) -> Result<f64> {
    if !(ell > -0.5) {
        return Err(Error::domain("Bohr-Sommerfeld energies need ell > -1/2"));
    }
    let target = n as f64 + 0.5;
    let e_star = critical_data_real(alpha, ell)?.e_star;
    let f = |e: f64| phase(alpha, e, ell, &opts.phase).map(|i| i - target);

    let mut e = if n >= 5 {
        asymptotic::large_n_energy(alpha, ell, n as f64 + 0.5)
    } else {
        let probe = e_star * (1.0 + 1e-3);
        e_star + target / phase_derivative(alpha, probe, ell, &opts.phase)?
    };
    if !(e > e_star) {
        e = e_star * 1.5;
    }
    // bracket [lo, hi] with f(lo) < 0 < f(hi)
    let mut lo = e_star;
    let mut hi = e;
    let mut fhi = f(hi)?;
    while fhi <= 0.0 {
        lo = hi;
        hi = e_star + 2.0 * (hi - e_star);
        fhi = f(hi)?;
    }
    e = e.clamp(lo, hi);
    let mut fe = f(e)?;
    for _ in 0..opts.max_newton {
        if fe.abs() < opts.residual_tol {
            return Ok(e);
        }
        if fe < 0.0 {
            lo = lo.max(e);
        } else {
            hi = hi.min(e);
        }
        let d = phase_derivative(alpha, e, ell, &opts.phase)?;
        let mut next = e - fe / d;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        e = next;
        fe = f(e)?;
    }
    // bisection fallback
    for _ in 0..200 {
        if fe.abs() < opts.residual_tol || hi - lo < 4.0 * f64::EPSILON * hi {
            return Ok(e);
        }
        if fe < 0.0 {
            lo = e;
        } else {
            hi = e;
        }
        e = 0.5 * (lo + hi);
        fe = f(e)?;
    }
    Err(Error::no_convergence(format!("Bohr-Sommerfeld solve for n = {n}, ell = {ell}")))
}
