//! Seeds for the Sibuya solutions Ψ_k, subdominant on the ray
//! arg x = kπ/(α+1) and normalised by Ψ_k x^{α/2} e^{(−1)^k R(x)} → 1.
//!
//! Two seeds are offered. The leading one uses the asymptotic form itself.
//! The refined one sums the Riccati (higher-order WKB) series for ψ'/ψ by
//! Taylor-jet arithmetic, and fixes the value at the seed point by
//! integrating the correction to the asymptotic log-derivative out to
//! infinity along the ray.

use super::{SeedTag, SolutionState};
use crate::cover::{sqrt_near, CoverPoint};
use crate::error::{Error, Result};
use crate::integrate::taylor::potential_coefficients;
use crate::model::OscillatorParams;
use crate::quad::{self, QuadOptions};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

type C = Complex64;

/// Coefficients of the large-x expansion of √V and the exponents that
/// control its remainder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RExpansion {
    /// Taylor coefficients of √(1−t), c_0 = 1, up to index K+1.
    pub coefficients: Vec<f64>,
    /// K = ⌊(1+α)/(2α)⌋.
    pub terms: usize,
    /// True when α = 1/(2m−1): the k = K term integrates to a logarithm.
    pub log_flag: bool,
    pub d_alpha: f64,
    pub e_alpha: f64,
}

impl RExpansion {
    pub fn new(alpha: f64) -> Self {
        let k = ((1.0 + alpha) / (2.0 * alpha) + 1e-12).floor() as usize;
        let mut c = vec![1.0];
        for j in 1..=k + 1 {
            let prev = c[j - 1];
            c.push(prev * (j as f64 - 1.5) / j as f64);
        }
        let log_flag = k >= 1 && (alpha * (1.0 - 2.0 * k as f64) + 1.0).abs() < 1e-12;
        let d_alpha = alpha * (1.0 + 2.0 * k as f64) - 1.0;
        RExpansion { coefficients: c, terms: k, log_flag, d_alpha, e_alpha: d_alpha.min(alpha + 1.0) }
    }
}

/// R(x) and R'(x).
pub fn big_r_with_derivative(p: &OscillatorParams, ex: &RExpansion, x: &CoverPoint) -> (C, C) {
    let a = p.alpha;
    let mut r = x.powf(a + 1.0) / (a + 1.0);
    let mut dr = C::new(0.0, 0.0);
    let mut ek = C::new(1.0, 0.0);
    for k in 0..=ex.terms {
        let ck = ex.coefficients[k];
        let s = a * (1.0 - 2.0 * k as f64);
        dr += ck * ek * x.powf(s);
        if k >= 1 {
            if ex.log_flag && k == ex.terms {
                r += ck * ek * x.ln();
            } else {
                r += ck * ek * x.powf(s + 1.0) / (s + 1.0);
            }
        }
        ek *= p.energy;
    }
    (r, dr)
}

pub fn big_r(p: &OscillatorParams, x: &CoverPoint) -> C {
    big_r_with_derivative(p, &RExpansion::new(p.alpha), x).0
}

fn sigma(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Ray argument of the k-th Stokes sector.
pub fn ray_arg(alpha: f64, k: i64) -> f64 {
    k as f64 * PI / (alpha + 1.0)
}

/// Leading-order seed Ψ_k ≈ x^{−α/2} e^{−(−1)^k R(x)} at x_max e^{ikπ/(α+1)}.
pub fn sibuya_seed(p: &OscillatorParams, k: i64, x_max: f64) -> Result<SolutionState> {
    if !(x_max > 0.0) {
        return Err(Error::domain("x_max must be positive"));
    }
    let x = CoverPoint::new(x_max, ray_arg(p.alpha, k));
    let ex = RExpansion::new(p.alpha);
    let (r, dr) = big_r_with_derivative(p, &ex, &x);
    let s = sigma(k);
    let log_psi = -s * r - 0.5 * p.alpha * x.ln();
    let dlog = -s * dr - 0.5 * p.alpha / x.to_complex();
    Ok(state_from_log(x, log_psi, dlog, k))
}

fn state_from_log(x: CoverPoint, log_psi: C, dlog: C, k: i64) -> SolutionState {
    let phase = C::from_polar(1.0, log_psi.im);
    SolutionState { location: x, value: phase, derivative: phase * dlog, log_scale: log_psi.re, seed: SeedTag::Sibuya(k) }
        .normalized()
}

/// Default leading-seed radius: max(20, 3 x_+) with x_+ ≈ |E|^{1/(2α)}.
pub fn default_seed_radius(p: &OscillatorParams) -> f64 {
    let xp = match (p.is_real(), crate::model::real_turning_pair(p.alpha, p.energy.re, p.ell.re)) {
        (true, Ok(Some((_, xp)))) => xp,
        _ => p.energy.norm().powf(0.5 / p.alpha).max(p.lambda().norm().powf(1.0 / (p.alpha + 1.0))),
    };
    (3.0 * xp).max(20.0)
}

// ---- jets: Taylor coefficients in τ with x = x0 (1 + τ) ----

fn jet_mul(a: &[C], b: &[C]) -> Vec<C> {
    let n = a.len().min(b.len());
    (0..n).map(|i| (0..=i).map(|j| a[j] * b[i - j]).sum()).collect()
}

fn jet_div(a: &[C], b: &[C]) -> Vec<C> {
    let n = a.len().min(b.len());
    let mut q: Vec<C> = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = a[i];
        for j in 0..i {
            acc -= q[j] * b[i - j];
        }
        q.push(acc / b[0]);
    }
    q
}

fn jet_sqrt(a: &[C], s0: C) -> Vec<C> {
    let mut s = Vec::with_capacity(a.len());
    s.push(s0);
    for i in 1..a.len() {
        let mut acc = a[i];
        for j in 1..i {
            acc -= s[j] * s[i - j];
        }
        s.push(acc / (2.0 * s0));
    }
    s
}

fn jet_deriv(a: &[C], x0: C) -> Vec<C> {
    (1..a.len()).map(|j| a[j] * (j as f64) / x0).collect()
}

/// Result of summing the Riccati series at one point.
#[derive(Debug, Clone, Copy)]
pub struct RiccatiSum {
    /// ψ'/ψ.
    pub log_derivative: C,
    /// Σ_{n ≥ 1} y_n (the corrections beyond the first two terms).
    pub higher: C,
    /// √U on the branch ≈ x^α.
    pub sqrt_u: C,
    /// Size of the smallest term kept, relative to |ψ'/ψ|.
    pub accuracy: f64,
    pub terms: usize,
}

pub const RICCATI_MAX_TERMS: usize = 30;

/// Sum y = Σ_{n ≥ −1} y_n for Ψ_k at x, truncating at the smallest term.
pub fn riccati_sum(p: &OscillatorParams, k: i64, x: &CoverPoint) -> RiccatiSum {
    let m = RICCATI_MAX_TERMS + 3;
    let x0 = x.to_complex();
    let mut u = Vec::new();
    potential_coefficients(p, x, x0, m - 1, &mut u);
    let branch = sqrt_near(u[0], x.powf(p.alpha));
    let root = jet_sqrt(&u, branch);
    let s = sigma(k);
    let ym1: Vec<C> = root.iter().map(|r| -s * r).collect();
    let two_ym1: Vec<C> = ym1.iter().map(|v| 2.0 * v).collect();
    let mut ys: Vec<Vec<C>> = Vec::new();
    let d = jet_deriv(&ym1, x0);
    ys.push(jet_div(&d.iter().map(|v| -v).collect::<Vec<_>>(), &two_ym1));
    let mut total = ym1[0] + ys[0][0];
    let mut higher = C::new(0.0, 0.0);
    let mut last = ys[0][0].norm();
    let mut accuracy = last / total.norm();
    let mut terms = 1;
    for n in 1..=RICCATI_MAX_TERMS {
        let prev = &ys[n - 1];
        if prev.len() < 2 {
            break;
        }
        let mut num = jet_deriv(prev, x0);
        for j in 0..n {
            let prod = jet_mul(&ys[j], &ys[n - 1 - j]);
            for (i, v) in num.iter_mut().enumerate() {
                if i < prod.len() {
                    *v += prod[i];
                }
            }
        }
        let neg: Vec<C> = num.iter().map(|v| -v).collect();
        let yn = jet_div(&neg, &two_ym1);
        let size = yn[0].norm();
        if size > last {
            break;
        }
        total += yn[0];
        higher += yn[0];
        last = size;
        accuracy = size / total.norm();
        terms = n + 1;
        ys.push(yn);
        if accuracy < 1e-17 {
            break;
        }
    }
    RiccatiSum { log_derivative: total, higher, sqrt_u: branch, accuracy, terms }
}

/// y + α/(2x) + (−1)^k R'(x), written without cancellation.
fn log_derivative_correction(p: &OscillatorParams, ex: &RExpansion, k: i64, x: &CoverPoint) -> C {
    let rs = riccati_sum(p, k, x);
    let s = sigma(k);
    let a = p.alpha;
    let xa = x.powf(a);
    let x2a = x.powf(2.0 * a);
    let inv2 = x.powf(-2.0);
    let w = p.energy / x2a;
    // D(w) = P(w)² − (1 − w) for the truncated series P
    let kk = ex.terms;
    // with K = 0 (α > 1) P = 1 and the linear term of 1 − w is left over
    let mut dw = if kk == 0 { w } else { C::new(0.0, 0.0) };
    for j in kk + 1..=2 * kk {
        let mut cj = 0.0;
        for i in j - kk..=kk {
            cj += ex.coefficients[i] * ex.coefficients[j - i];
        }
        dw += cj * w.powu(j as u32);
    }
    let mut rprime = C::new(0.0, 0.0);
    let mut wk = C::new(1.0, 0.0);
    for kx in 0..=kk {
        rprime += ex.coefficients[kx] * wk;
        wk *= w;
    }
    rprime *= xa;
    let l2 = p.centrifugal();
    let sqrt_minus_r = (l2 * inv2 - x2a * dw) / (rs.sqrt_u + rprime);
    let u_val = x2a - p.energy + l2 * inv2;
    let y0_plus = (-2.0 * a * p.energy + (2.0 * a + 2.0) * l2 * inv2) / (4.0 * x.to_complex() * u_val);
    -s * sqrt_minus_r + y0_plus + rs.higher
}

#[derive(Debug, Clone, Copy)]
pub struct SibuyaOptions {
    /// Required relative size of the smallest Riccati term at the seed point.
    pub series_tol: f64,
    pub quad_tol: f64,
    /// Optional fixed seed radius; otherwise grown until `series_tol` is met.
    pub x_max: Option<f64>,
}

impl Default for SibuyaOptions {
    fn default() -> Self {
        SibuyaOptions { series_tol: 1e-15, quad_tol: 1e-14, x_max: None }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RefinedSeedInfo {
    pub x_max: f64,
    pub series_accuracy: f64,
    pub tail_integral: C,
    pub tail_error: f64,
}

/// Seed Ψ_k with the Riccati-corrected log-derivative and exact normalisation.
pub fn sibuya_seed_refined(p: &OscillatorParams, k: i64, opts: &SibuyaOptions) -> Result<(SolutionState, RefinedSeedInfo)> {
    let arg = ray_arg(p.alpha, k);
    let scale = p.energy.norm().powf(0.5 / p.alpha).max(p.lambda().norm().powf(1.0 / (p.alpha + 1.0))).max(1.0);
    let mut r = opts.x_max.unwrap_or(1.5 * scale);
    let mut rs;
    loop {
        rs = riccati_sum(p, k, &CoverPoint::new(r, arg));
        if opts.x_max.is_some() || rs.accuracy < opts.series_tol {
            break;
        }
        r *= 1.2;
        if r > 1e4 * scale {
            return Err(Error::no_convergence("Riccati series never reached the requested accuracy"));
        }
    }
    let x = CoverPoint::new(r, arg);
    let ex = RExpansion::new(p.alpha);
    let (big, _) = big_r_with_derivative(p, &ex, &x);
    let s = sigma(k);

    // T = ∫_x^∞ correction ds along the ray, with s = x t^{−q}
    let d = ex.d_alpha.max(1e-3);
    let q = 2.0 / d;
    let s_cut: f64 = 1e30;
    let t_cut = (s_cut / r).powf(-1.0 / q);
    let x0 = x.to_complex();
    let integrand = |t: f64| -> C {
        let st = x.scale(t.powf(-q));
        let f = log_derivative_correction(p, &ex, k, &st);
        f * x0 * (q * t.powf(-q - 1.0))
    };
    let qo = QuadOptions { abs_tol: opts.quad_tol, rel_tol: 1e-13, max_intervals: 400 };
    let res = quad::integrate(integrand, t_cut, 1.0, &qo)?;
    // analytic remainder beyond |s| = s_cut from the leading term −σ c_{K+1} E^{K+1} s^{−1−d}
    let sc = CoverPoint::new(s_cut, arg);
    let ck1 = ex.coefficients[ex.terms + 1];
    let rem = -s * ck1 * p.energy.powu(ex.terms as u32 + 1) * sc.powf(-ex.d_alpha) / ex.d_alpha;
    let tail = res.value + rem;

    let log_psi = -s * big - 0.5 * p.alpha * x.ln() - tail;
    let st = state_from_log(x, log_psi, rs.log_derivative, k);
    Ok((st, RefinedSeedInfo { x_max: r, series_accuracy: rs.accuracy, tail_integral: tail, tail_error: res.error }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_constants() {
        let e = RExpansion::new(1.0);
        assert_eq!(e.terms, 1);
        assert!(e.log_flag);
        assert_eq!(e.coefficients[1], -0.5);
        assert_eq!(e.coefficients[2], -0.125);
        assert_eq!(e.d_alpha, 2.0);
        assert_eq!(e.e_alpha, 2.0);
        let e2 = RExpansion::new(2.0);
        assert_eq!(e2.terms, 0);
        assert!(!e2.log_flag);
        assert_eq!(e2.d_alpha, 1.0);
        for &a in &[0.3, 0.5, 0.7, 1.0, 1.5, 3.0] {
            let e = RExpansion::new(a);
            assert!(e.d_alpha > 0.0 && e.d_alpha <= 2.0 * a + 1e-12, "{a}");
        }
    }

    #[test]
    fn harmonic_r_has_log_branch() {
        let p = OscillatorParams::real(1.0, 3.0, 0.0).unwrap();
        let x = CoverPoint::real(5.0);
        let r = big_r(&p, &x);
        assert!((r.re - (12.5 - 1.5 * 5f64.ln())).abs() < 1e-13);
    }

    #[test]
    fn riccati_matches_exact_gaussian() {
        // α=1, ℓ=0, E=1: U = x² − 1, Ψ_0 = e^{−x²/2} exactly, y = −x
        let p = OscillatorParams::real(1.0, 1.0, 0.0).unwrap();
        let rs = riccati_sum(&p, 0, &CoverPoint::real(8.0));
        assert!((rs.log_derivative + 8.0).norm() < 1e-13, "{:?}", rs.log_derivative);
    }

    #[test]
    fn refined_seed_is_exact_for_gaussian() {
        // same case: R = x²/2 − (1/2) log x, so Ψ_0 = x^{−1/2} e^{−R} = e^{−x²/2}
        let p = OscillatorParams::real(1.0, 1.0, 0.0).unwrap();
        let (st, info) = sibuya_seed_refined(&p, 0, &SibuyaOptions::default()).unwrap();
        let x = info.x_max;
        assert!((st.log_psi().re + 0.5 * x * x).abs() < 1e-10, "{} vs {}", st.log_psi(), -0.5 * x * x);
    }
}
