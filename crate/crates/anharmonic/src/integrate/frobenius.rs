//! The solution χ₊ ~ x^{ℓ+1} at the origin as the convergent double series
//! χ₊ = x^{ℓ+1}(1 + Σ c_{m,n} (x²E)^m (x^{2α+2})^n).
//!
//! Substituting into the equation gives
//! μ(μ + 2ℓ + 1) c_{m,n} = c_{m,n−1} − c_{m−1,n}, μ = 2m + (2α+2)n.

use super::{SeedTag, SolutionState};
use crate::cover::CoverPoint;
use crate::error::{Error, Result};
use crate::model::OscillatorParams;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrobeniusSeed {
    pub order: usize,
    /// `coefficients[m][n] = c_{m,n}`.
    pub coefficients: Vec<Vec<Complex64>>,
    pub radius: f64,
    pub tail_estimate: f64,
}

const MAX_ORDER: usize = 400;

pub fn exponent(alpha: f64, m: usize, n: usize) -> f64 {
    2.0 * m as f64 + (2.0 * alpha + 2.0) * n as f64
}

/// Table of c_{m,n} for m, n ≤ order.
pub fn coefficient_table(alpha: f64, ell: Complex64, order: usize) -> Vec<Vec<Complex64>> {
    let mut c = vec![vec![Complex64::new(0.0, 0.0); order + 1]; order + 1];
    c[0][0] = Complex64::new(1.0, 0.0);
    let two_l1 = 2.0 * ell + 1.0;
    for m in 0..=order {
        for n in 0..=order {
            if m == 0 && n == 0 {
                continue;
            }
            let mu = exponent(alpha, m, n);
            let mut rhs = Complex64::new(0.0, 0.0);
            if n > 0 {
                rhs += c[m][n - 1];
            }
            if m > 0 {
                rhs -= c[m - 1][n];
            }
            c[m][n] = rhs / (mu * (mu + two_l1));
        }
    }
    c
}

/// Sum the series and its x-derivative at `x`; the x^{ℓ+1} prefactor is
/// returned separately as `(series, d series/dx)`.
fn sum_series(
    alpha: f64,
    energy: Complex64,
    c: &[Vec<Complex64>],
    x: &CoverPoint,
) -> (Complex64, Complex64, f64) {
    let order = c.len() - 1;
    let a = x.powf(2.0) * energy;
    let b = x.powf(2.0 * alpha + 2.0);
    let xc = x.to_complex();
    let mut s = Complex64::new(0.0, 0.0);
    let mut ds = Complex64::new(0.0, 0.0);
    let mut edge = 0.0f64;
    let mut am = Complex64::new(1.0, 0.0);
    for (m, row) in c.iter().enumerate() {
        let mut bn = Complex64::new(1.0, 0.0);
        for (n, cmn) in row.iter().enumerate() {
            let term = cmn * am * bn;
            s += term;
            ds += term * exponent(alpha, m, n);
            if m == order || n == order {
                edge = edge.max(term.norm());
            }
            bn *= b;
        }
        am *= a;
    }
    (s, ds / xc, edge)
}

/// χ₊(x0), χ₊'(x0) with truncation order chosen so the tail is below `tol`.
pub fn frobenius_seed(p: &OscillatorParams, x0: &CoverPoint, tol: f64) -> Result<(SolutionState, FrobeniusSeed)> {
    if p.ell.re <= -0.5 {
        return Err(Error::domain("series for chi_+ needs Re(ell) > -1/2"));
    }
    let mut order = 8;
    loop {
        let c = coefficient_table(p.alpha, p.ell, order);
        let (s, ds, edge) = sum_series(p.alpha, p.energy, &c, x0);
        if edge <= tol * s.norm() {
            // χ = x^{ℓ+1} s, χ' = x^{ℓ+1}((ℓ+1) s / x + s')
            let lead = (p.ell + 1.0) * x0.ln();
            let phase = Complex64::from_polar(1.0, lead.im);
            let value = s * phase;
            let derivative = ((p.ell + 1.0) * s / x0.to_complex() + ds) * phase;
            let mut st = SolutionState {
                location: *x0,
                value,
                derivative,
                log_scale: lead.re,
                seed: SeedTag::Frobenius,
            }
            .normalized();
            st.seed = SeedTag::Frobenius;
            let seed = FrobeniusSeed { order, coefficients: c, radius: x0.modulus, tail_estimate: edge / s.norm() };
            return Ok((st, seed));
        }
        if order >= MAX_ORDER {
            return Err(Error::no_convergence(format!(
                "series tail {:.2e} above tolerance at |x0| = {}",
                edge / s.norm(),
                x0.modulus
            )));
        }
        order = (order * 2).min(MAX_ORDER);
    }
}

/// Default seed radius: well inside the smallest turning point.
pub fn default_seed_radius(p: &OscillatorParams) -> f64 {
    let lam = p.lambda().norm();
    let e = p.energy.norm();
    let r_small = if e > 0.0 { (lam * lam / e).sqrt() } else { f64::INFINITY };
    let r_scale = lam.max(0.5).powf(1.0 / (p.alpha + 1.0));
    0.05 * r_small.min(r_scale).min(1.0)
}

/// Seed on the ray `arg` at the default radius.
pub fn frobenius_seed_auto(p: &OscillatorParams, arg: f64, tol: f64) -> Result<SolutionState> {
    let x0 = CoverPoint::new(default_seed_radius(p), arg);
    Ok(frobenius_seed(p, &x0, tol)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recurrence_residual_is_zero() {
        let (alpha, ell) = (1.3, Complex64::new(0.7, 0.2));
        let c = coefficient_table(alpha, ell, 12);
        assert_eq!(c[0][0], Complex64::new(1.0, 0.0));
        for m in 0..=12usize {
            for n in 0..=12usize {
                if m + n == 0 {
                    continue;
                }
                let mu = exponent(alpha, m, n);
                let lhs = c[m][n] * mu * (mu + 2.0 * ell + 1.0);
                let mut rhs = Complex64::new(0.0, 0.0);
                if n > 0 {
                    rhs += c[m][n - 1];
                }
                if m > 0 {
                    rhs -= c[m - 1][n];
                }
                assert!((lhs - rhs).norm() <= 1e-14 * rhs.norm().max(1e-300));
            }
        }
    }

    #[test]
    fn harmonic_ground_state_series() {
        // α=1, ℓ=0, E=3: χ₊ = x e^{−x²/2}
        let p = OscillatorParams::real(1.0, 3.0, 0.0).unwrap();
        let x = 0.3;
        let (st, _) = frobenius_seed(&p, &CoverPoint::real(x), 1e-15).unwrap();
        let exact = x * (-0.5 * x * x).exp();
        let dexact = (1.0 - x * x) * (-0.5 * x * x).exp();
        assert!((st.psi().re - exact).abs() < 1e-15);
        assert!((st.dpsi().re - dexact).abs() < 1e-14);
    }
}
