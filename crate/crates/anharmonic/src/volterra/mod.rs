//! The Volterra equation behind the WKB error bound on a curve γ:
//! ψ = z Ψ^W with Ψ^W = V^{−1/4} e^{S}, S' = √V, and
//! z(t) = 1 + ∫_0^t B(t, s) F(γ(s)) γ'(s) z(s) ds,
//! B(t, s) = (e^{−2(S(t)−S(s))} − 1)/2.
//!
//! The kernel separates, so each sweep is a single pass with two running
//! accumulators and exact exponential weights on every panel.

pub mod check;

use crate::cover::{sqrt_near, CoverPoint};
use crate::error::{Error, Result};
use crate::model::{self, OscillatorParams};
use crate::path::{PathSpec, Segment};
use crate::quad::{self, QuadOptions};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub use check::{fundamental_check, FundamentalCheck, RatioSample};

type C = Complex64;

/// A curve for the Volterra problem: a path on the cover, or the straight
/// segment from the origin to `end`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Curve {
    Path(PathSpec),
    FromOrigin { end: CoverPoint },
}

impl Curve {
    fn pieces(&self) -> usize {
        match self {
            Curve::Path(p) => p.segments.len(),
            Curve::FromOrigin { .. } => 1,
        }
    }

    pub fn starts_at_origin(&self) -> bool {
        matches!(self, Curve::FromOrigin { .. })
    }

    pub fn is_unbounded(&self) -> bool {
        match self {
            Curve::Path(p) => !p.is_finite(),
            Curve::FromOrigin { .. } => false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Curve::Path(p) => p.validate(),
            Curve::FromOrigin { end } => {
                if end.modulus > 0.0 {
                    Ok(())
                } else {
                    Err(Error::domain("segment from the origin needs a nonzero end"))
                }
            }
        }
    }

    /// Point and velocity at local parameter `u` of piece `i`.
    fn local(&self, nodes: &[CoverPoint], i: usize, u: f64) -> (CoverPoint, C) {
        match self {
            Curve::Path(p) => p.segments[i].point(&nodes[i], u),
            Curve::FromOrigin { end } => (end.scale(u.max(1e-300)), end.to_complex()),
        }
    }

    fn nodes(&self) -> Vec<CoverPoint> {
        match self {
            Curve::Path(p) => p.nodes(),
            Curve::FromOrigin { end } => vec![CoverPoint::new(0.0, end.arg), *end],
        }
    }

    fn piece_unbounded(&self, i: usize) -> bool {
        match self {
            Curve::Path(p) => matches!(p.segments[i], Segment::RayToInfinity { .. }),
            Curve::FromOrigin { .. } => false,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GridOptions {
    /// Nodes per piece, clustered at both ends.
    pub nodes_per_piece: usize,
    pub panel_tol: f64,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions { nodes_per_piece: 400, panel_tol: 1e-13 }
    }
}

/// The curve sampled on a graded grid, with √V continued along it and
/// oriented so that Re S increases overall.
#[derive(Debug, Clone)]
pub struct CurveGrid {
    pub params: OscillatorParams,
    pub curve: Curve,
    /// Global parameter: piece i covers [i/n, (i+1)/n].
    pub t: Vec<f64>,
    pub x: Vec<CoverPoint>,
    pub velocity: Vec<C>,
    pub sqrt_v: Vec<C>,
    /// g = F γ'.
    pub g: Vec<C>,
    /// ∫ √V dγ over each panel (infinite on a panel touching the origin).
    pub panel_action: Vec<C>,
    pub panel_rho: Vec<f64>,
    /// ρ(t_i).
    pub rho: Vec<f64>,
    /// Re S(t_i) relative to the first finite node.
    pub re_action: Vec<f64>,
    /// log Ψ^W(γ(t_i)), normalised so that Ψ^W(γ(0)) = 1, or Ψ^W ~ x^{ℓ+1} at the origin.
    pub log_wkb: Vec<C>,
    /// ρ over the stretch beyond the last node (unbounded curves).
    pub rho_tail: f64,
}

fn cluster(m: usize, j: usize) -> f64 {
    0.5 * (1.0 - (PI * j as f64 / m as f64).cos())
}

impl CurveGrid {
    pub fn build(p: &OscillatorParams, curve: &Curve, opts: &GridOptions) -> Result<Self> {
        curve.validate()?;
        let n = curve.pieces();
        let nodes = curve.nodes();
        let m = opts.nodes_per_piece.max(8);
        let mut t = Vec::new();
        let mut locs: Vec<(usize, f64)> = Vec::new();
        for i in 0..n {
            let last = i + 1 == n;
            let top = if curve.piece_unbounded(i) { m - 1 } else if last { m } else { m - 1 };
            for j in 0..=top {
                let u = cluster(m, j);
                locs.push((i, u));
                t.push((i as f64 + u) / n as f64);
            }
        }
        let lam = p.lambda();
        let mut x = Vec::with_capacity(t.len());
        let mut vel = Vec::with_capacity(t.len());
        let mut sq: Vec<C> = Vec::with_capacity(t.len());
        let mut g = Vec::with_capacity(t.len());
        let origin = curve.starts_at_origin();
        for (k, &(i, u)) in locs.iter().enumerate() {
            let (xi, vi) = curve.local(&nodes, i, u);
            let vi = vi * n as f64;
            let (v, v1, v2) = if origin && k == 0 {
                (C::new(f64::INFINITY, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0))
            } else {
                model::reduced_with_derivatives(p, &xi)?
            };
            let root = if origin && k == 0 {
                C::new(f64::INFINITY, 0.0)
            } else if k == 0 || (origin && k == 1) {
                let guess = if origin { lam / xi.to_complex() } else { v.sqrt() };
                sqrt_near(v, guess)
            } else {
                sqrt_near(v, sq[k - 1])
            };
            let gi = if origin && k == 0 {
                C::new(0.0, 0.0)
            } else {
                if v.norm() < 1e-14 * (1.0 + p.energy.norm() + xi.powf(2.0 * p.alpha).norm()) {
                    return Err(Error::Singular(format!("curve meets a turning point at {:?}", xi.to_complex())));
                }
                model::forcing_from_parts(xi.to_complex(), v, v1, v2, root) * vi
            };
            x.push(xi);
            vel.push(vi);
            sq.push(root);
            g.push(gi);
        }

        // panel integrals of √V dγ (regularised at the origin) and |F||dγ|
        let qo = QuadOptions { abs_tol: opts.panel_tol, rel_tol: opts.panel_tol, max_intervals: 200 };
        let npan = t.len() - 1;
        let mut pa = Vec::with_capacity(npan);
        let mut pr = Vec::with_capacity(npan);
        let mut preg = Vec::with_capacity(npan);
        for k in 0..npan {
            let (i0, u0) = locs[k];
            let (i1, u1) = locs[k + 1];
            let (piece, ua, ub) = if i0 == i1 { (i0, u0, u1) } else { (i0, u0, 1.0) };
            let reference = if origin && k == 0 { sq[1] } else { sq[k] };
            let sv = |u: f64| -> Result<(C, C, CoverPoint)> {
                let (xx, dx) = curve.local(&nodes, piece, u);
                let v = model::eval_reduced(p, &xx)?;
                Ok((sqrt_near(v, reference), dx, xx))
            };
            let f_action = |u: f64| match sv(u) {
                Ok((r, dx, xx)) => {
                    if origin {
                        (r - lam / xx.to_complex()) * dx
                    } else {
                        r * dx
                    }
                }
                Err(_) => C::new(f64::NAN, f64::NAN),
            };
            let f_rho = |u: f64| match sv(u) {
                Ok((r, dx, xx)) => match model::reduced_with_derivatives(p, &xx) {
                    Ok((v, v1, v2)) => C::new((model::forcing_from_parts(xx.to_complex(), v, v1, v2, r) * dx).norm(), 0.0),
                    Err(_) => C::new(f64::NAN, 0.0),
                },
                Err(_) => C::new(f64::NAN, 0.0),
            };
            let a = quad::integrate(f_action, ua, ub, &qo)?.value;
            let r = quad::integrate(f_rho, ua, ub, &qo)?.value.re;
            preg.push(a);
            if origin {
                // add back ∫ λ/x dx = λ log(x_b/x_a)
                if k == 0 {
                    pa.push(C::new(f64::INFINITY, 0.0));
                } else {
                    pa.push(a + lam * (x[k + 1].ln() - x[k].ln()));
                }
            } else {
                pa.push(a);
            }
            pr.push(r);
        }

        // orientation: Re S should increase along the curve
        let total: f64 = pa.iter().filter(|a| a.re.is_finite()).map(|a| a.re).sum();
        if !origin && total < 0.0 {
            for v in sq.iter_mut() {
                *v = -*v;
            }
            for v in g.iter_mut() {
                *v = -*v;
            }
            for v in pa.iter_mut() {
                *v = -*v;
            }
            for v in preg.iter_mut() {
                *v = -*v;
            }
        }

        let mut rho = vec![0.0];
        for r in &pr {
            rho.push(rho.last().unwrap() + r);
        }
        let first = if origin { 1 } else { 0 };
        let mut re_action = vec![0.0; t.len()];
        let mut s = C::new(0.0, 0.0);
        for k in first..npan {
            s += pa[k];
            re_action[k + 1] = s.re;
        }
        if origin {
            re_action[0] = f64::NEG_INFINITY;
        }

        // log Ψ^W along the grid, with a continuous log of √V
        let mut log_wkb = vec![C::new(0.0, 0.0); t.len()];
        if origin {
            let mut sreg = C::new(0.0, 0.0);
            log_wkb[0] = C::new(f64::NEG_INFINITY, 0.0);
            for k in 1..t.len() {
                sreg += preg[k - 1];
                let xk = x[k].to_complex();
                log_wkb[k] = (p.ell + 1.0) * x[k].ln() + sreg - 0.5 * (sq[k] * xk / lam).ln();
            }
        } else {
            let mut lsq = C::new(0.0, 0.0);
            let mut s = C::new(0.0, 0.0);
            for k in 1..t.len() {
                s += pa[k - 1];
                lsq += (sq[k] / sq[k - 1]).ln();
                log_wkb[k] = s - 0.5 * lsq;
            }
        }

        let rho_tail = if curve.is_unbounded() {
            let (i, u) = *locs.last().unwrap();
            let f = |uu: f64| {
                let (xx, dx) = curve.local(&nodes, i, uu);
                match model::reduced_with_derivatives(p, &xx) {
                    Ok((v, v1, v2)) => {
                        let r = v.sqrt();
                        C::new((model::forcing_from_parts(xx.to_complex(), v, v1, v2, r) * dx).norm(), 0.0)
                    }
                    Err(_) => C::new(f64::NAN, 0.0),
                }
            };
            quad::integrate(f, u, 1.0, &qo)?.value.re
        } else {
            0.0
        };

        Ok(CurveGrid {
            params: *p,
            curve: curve.clone(),
            t,
            x,
            velocity: vel,
            sqrt_v: sq,
            g,
            panel_action: pa,
            panel_rho: pr,
            rho,
            re_action,
            log_wkb,
            rho_tail,
        })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// ρ_γ(1) including the tail beyond the last node.
    pub fn rho_total(&self) -> f64 {
        self.rho.last().copied().unwrap_or(0.0) + self.rho_tail
    }

    /// β_γ = inf over s ≤ t of Re(S(t) − S(s)) on the grid (never positive).
    pub fn beta(&self) -> f64 {
        let mut best = f64::NEG_INFINITY;
        let mut beta = 0.0f64;
        for &r in &self.re_action {
            if r.is_finite() {
                best = best.max(r);
                beta = beta.min(r - best);
            }
        }
        beta
    }

    /// True when Re S strictly increases from node to node.
    pub fn strictly_increasing(&self) -> bool {
        self.panel_action.iter().all(|a| a.re > 0.0)
    }

    fn panel_of(&self, s: f64) -> usize {
        match self.t.binary_search_by(|v| v.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(self.t.len() - 1),
            Err(i) => i.saturating_sub(1),
        }
    }

    /// ∫ √V dγ from node `k` to global parameter `s` inside panel k.
    fn partial_action(&self, k: usize, s: f64) -> Result<C> {
        if s <= self.t[k] {
            return Ok(C::new(0.0, 0.0));
        }
        let n = self.curve.pieces() as f64;
        let nodes = self.curve.nodes();
        let piece = ((self.t[k] * n).floor() as usize).min(self.curve.pieces() - 1);
        let ua = self.t[k] * n - piece as f64;
        let ub = s * n - piece as f64;
        let reference = self.sqrt_v[k];
        if !reference.re.is_finite() {
            return Err(Error::domain("action from the origin diverges"));
        }
        let f = |u: f64| {
            let (xx, dx) = self.curve.local(&nodes, piece, u);
            match model::eval_reduced(&self.params, &xx) {
                Ok(v) => sqrt_near(v, reference) * dx,
                Err(_) => C::new(f64::NAN, f64::NAN),
            }
        };
        Ok(quad::integrate(f, ua, ub, &QuadOptions::default())?.value)
    }

    /// S(t) − S(s) along the curve for s ≤ t.
    pub fn action_between(&self, s: f64, t: f64) -> Result<C> {
        if s > t {
            return Err(Error::domain("kernel needs s <= t"));
        }
        if s == t {
            return Ok(C::new(0.0, 0.0));
        }
        let ks = self.panel_of(s);
        let kt = self.panel_of(t);
        if self.curve.starts_at_origin() && s <= self.t[1] && ks == 0 && s == 0.0 {
            return Ok(C::new(f64::INFINITY, 0.0));
        }
        let mut total = C::new(0.0, 0.0);
        for k in ks..kt {
            total += self.panel_action[k];
        }
        Ok(total - self.partial_action(ks, s)? + self.partial_action(kt, t)?)
    }

    /// B(t, s) = (e^{−2(S(t) − S(s))} − 1)/2.
    pub fn kernel(&self, s: f64, t: f64) -> Result<C> {
        let d = self.action_between(s, t)?;
        if d.re == f64::INFINITY {
            return Ok(C::new(-0.5, 0.0));
        }
        Ok(0.5 * ((-2.0 * d).exp() - 1.0))
    }
}

/// B(t, s) on the default grid for `curve`.
pub fn kernel_b(p: &OscillatorParams, curve: &Curve, s: f64, t: f64) -> Result<C> {
    if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&t) || s > t {
        return Err(Error::domain("kernel needs 0 <= s <= t <= 1"));
    }
    CurveGrid::build(p, curve, &GridOptions::default())?.kernel(s, t)
}

/// (ρ_γ, β_γ).
pub fn error_functionals(p: &OscillatorParams, curve: &Curve) -> Result<(f64, f64)> {
    let g = CurveGrid::build(p, curve, &GridOptions::default())?;
    let rho = g.rho_total();
    if !rho.is_finite() {
        return Err(Error::no_convergence("rho diverges: curve is not admissible"));
    }
    Ok((rho, g.beta()))
}

#[derive(Debug, Clone, Copy)]
pub struct VolterraOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub grid: GridOptions,
    /// Test hook: replace F by zero.
    pub zero_forcing: bool,
}

impl Default for VolterraOptions {
    fn default() -> Self {
        VolterraOptions { tol: 1e-13, max_iter: 200, grid: GridOptions::default(), zero_forcing: false }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VolterraRun {
    pub curve: Curve,
    /// (t, z(t)) on the grid.
    pub samples: Vec<(f64, C)>,
    /// ρ_γ(t) at the samples.
    pub rho_samples: Vec<f64>,
    pub rho: f64,
    pub beta: f64,
    /// exp(ρ (1 + e^{−β})/2) − 1.
    pub bound: f64,
    /// exp(ρ̃) − 1 with ρ̃ = ∫|B(1, s) F γ'| ds, measured at the last node.
    pub refined_bound: f64,
    pub iterations: usize,
    /// sup |z_k − z_{k−1}| for each sweep.
    pub iterate_changes: Vec<f64>,
}

/// exp(ρ (1 + e^{−β})/2) − 1.
pub fn certified_bound(rho: f64, beta: f64) -> f64 {
    (rho * 0.5 * (1.0 + (-beta).exp())).exp_m1()
}

/// ∫_0^1 e^{−κ(1−u)} (f0 (1 − u) + f1 u) du as weights on (f0, f1).
fn exp_weights(kappa: C) -> (C, C) {
    if kappa.re == f64::INFINITY {
        return (C::new(0.0, 0.0), C::new(0.0, 0.0));
    }
    if kappa.norm() < 1e-3 {
        let k2 = kappa * kappa;
        let k3 = k2 * kappa;
        let w0 = 0.5 - kappa / 3.0 + k2 / 8.0 - k3 / 30.0;
        let w1 = 0.5 - kappa / 6.0 + k2 / 24.0 - k3 / 120.0;
        return (w0, w1);
    }
    let e = (-kappa).exp();
    let phi = (1.0 - e) / kappa;
    let w0 = (1.0 - e * (1.0 + kappa)) / (kappa * kappa);
    (w0, phi - w0)
}

/// Solve for z by Picard iteration on the grid.
pub fn volterra_solve_on(grid: &CurveGrid, opts: &VolterraOptions) -> Result<VolterraRun> {
    let n = grid.len();
    let g: Vec<C> = if opts.zero_forcing { vec![C::new(0.0, 0.0); n] } else { grid.g.clone() };
    let weights: Vec<(C, C, C)> = (0..n - 1)
        .map(|k| {
            let kappa = 2.0 * grid.panel_action[k];
            let (w0, w1) = exp_weights(kappa);
            let decay = if kappa.re == f64::INFINITY { C::new(0.0, 0.0) } else { (-kappa).exp() };
            (decay, w0, w1)
        })
        .collect();
    let mut z = vec![C::new(1.0, 0.0); n];
    let mut changes = Vec::new();
    for it in 1..=opts.max_iter {
        let mut next = vec![C::new(1.0, 0.0); n];
        let mut acc_exp = C::new(0.0, 0.0);
        let mut acc_flat = C::new(0.0, 0.0);
        for k in 0..n - 1 {
            let h = grid.t[k + 1] - grid.t[k];
            let f0 = g[k] * z[k];
            let f1 = g[k + 1] * z[k + 1];
            let (decay, w0, w1) = weights[k];
            acc_exp = decay * acc_exp + h * (w0 * f0 + w1 * f1);
            acc_flat += 0.5 * h * (f0 + f1);
            next[k + 1] = 1.0 + 0.5 * (acc_exp - acc_flat);
        }
        let change = z.iter().zip(&next).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        changes.push(change);
        z = next;
        if !change.is_finite() {
            return Err(Error::no_convergence("Volterra iteration produced non-finite values"));
        }
        if change < opts.tol {
            let rho = grid.rho_total();
            let beta = grid.beta();
            let refined = refined_rho(grid, &g);
            return Ok(VolterraRun {
                curve: grid.curve.clone(),
                samples: grid.t.iter().copied().zip(z.iter().copied()).collect(),
                rho_samples: grid.rho.clone(),
                rho,
                beta,
                bound: certified_bound(rho, beta),
                refined_bound: refined.exp_m1(),
                iterations: it,
                iterate_changes: changes,
            });
        }
    }
    Err(Error::no_convergence(format!(
        "no contraction after {} sweeps (rho = {:.3e}, beta = {:.3e})",
        opts.max_iter,
        grid.rho_total(),
        grid.beta()
    )))
}

/// ρ̃ = ∫|B(t_end, s) g(s)| ds by the trapezoid rule on the grid.
fn refined_rho(grid: &CurveGrid, g: &[C]) -> f64 {
    let n = grid.len();
    let mut s_from_end = C::new(0.0, 0.0);
    let mut vals = vec![0.0; n];
    for k in (0..n).rev() {
        if k + 1 < n {
            s_from_end += grid.panel_action[k];
        }
        let b = if s_from_end.re == f64::INFINITY { C::new(-0.5, 0.0) } else { 0.5 * ((-2.0 * s_from_end).exp() - 1.0) };
        vals[k] = (b * g[k]).norm();
    }
    (0..n - 1).map(|k| 0.5 * (grid.t[k + 1] - grid.t[k]) * (vals[k] + vals[k + 1])).sum()
}

pub fn volterra_solve(p: &OscillatorParams, curve: &Curve, tol: f64, max_iter: usize) -> Result<VolterraRun> {
    let opts = VolterraOptions { tol, max_iter, ..Default::default() };
    let grid = CurveGrid::build(p, curve, &opts.grid)?;
    volterra_solve_on(&grid, &opts)
}
