//! Closed-form leading-order expressions for the phase integrals, their
//! turning points and the eigenvalues, selectable by name.

use crate::error::{Error, Result};
use crate::registry::{Named, Registry};
use num_complex::Complex64;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Γ((1+2α)/2α) / (2√π Γ((1+3α)/2α)), the value J₁(0).
pub fn j1_leading(alpha: f64) -> f64 {
    let a = alpha;
    gamma((1.0 + 2.0 * a) / (2.0 * a)) / (2.0 * PI.sqrt() * gamma((1.0 + 3.0 * a) / (2.0 * a)))
}

/// The constant K with Ê_n ≈ [K(4n+2ℓ+1)]^{2α/(α+1)}; equals 1/(4 J₁(0)).
pub fn large_n_constant(alpha: f64) -> f64 {
    0.25 / j1_leading(alpha)
}

/// Same shape with π/2 in place of √π/2, as the constant is sometimes quoted.
pub fn large_n_constant_pi_half(alpha: f64) -> f64 {
    let a = alpha;
    0.5 * PI * gamma((1.0 + 3.0 * a) / (2.0 * a)) / gamma((1.0 + 2.0 * a) / (2.0 * a))
}

pub fn large_n_energy(alpha: f64, ell: f64, n: f64) -> f64 {
    (large_n_constant(alpha) * (4.0 * n + 2.0 * ell + 1.0)).powf(2.0 * alpha / (alpha + 1.0))
}

/// Harmonic approximation at the bottom of the well for large ℓ.
pub fn fixed_n_large_ell_energy(alpha: f64, ell: f64, n: f64) -> f64 {
    let a = alpha;
    let lead = (a + 1.0) / a.powf(a / (a + 1.0)) * ell.powf(2.0 * a / (a + 1.0));
    lead * (1.0 + 2.0 * a * 2f64.sqrt() / (a + 1.0).sqrt() * (n + 0.5) / ell)
}

/// Residual of the harmonic approximation:
/// α^{α/(α+1)}/(α+1) ℓ^{−2α/(α+1)} E − 1 − 2α√2/√(α+1) (n+1/2)/ℓ.
pub fn harmonic_residual(alpha: f64, ell: f64, n: f64, energy: f64) -> f64 {
    let a = alpha;
    a.powf(a / (a + 1.0)) / (a + 1.0) * ell.powf(-2.0 * a / (a + 1.0)) * energy
        - 1.0
        - 2.0 * a * 2f64.sqrt() / (a + 1.0).sqrt() * (n + 0.5) / ell
}

/// Rescaled turning points ŷ_∓ near the coalescence ν → ν_*.
pub fn coalescing_turning_point(alpha: f64, nu: f64, sign: f64) -> f64 {
    let a = alpha;
    let nu_star = (a + 1.0) / a.powf(a / (a + 1.0));
    let y_star = a.powf(-1.0 / (2.0 * a + 2.0));
    let d = nu - nu_star;
    y_star + sign * a.powf(-1.0 / (a + 1.0)) * (2.0 * a + 2.0).powf(-0.5) * d.sqrt()
        - a.powf(-1.0 / (2.0 * a + 2.0)) * (2.0 * a - 5.0) / 12.0 * d
}

/// Expansions of the turning points of y^{2α} − 1 + (λħ)²/y² for small ħ.
/// `k = 0` with `minus` gives y_-, `k = 0` otherwise y_+, `k = ±1` the
/// off-axis points near e^{±iπ/α}.
pub fn small_hbar_turning_point(alpha: f64, lam_hbar: f64, k: i32, minus: bool) -> Complex64 {
    let eta = lam_hbar * lam_hbar;
    if k == 0 && minus {
        return Complex64::new(lam_hbar * (1.0 + 0.5 * lam_hbar.powf(2.0 * alpha)), 0.0);
    }
    let w = Complex64::from_polar(1.0, k as f64 * PI / alpha);
    w - w.conj() * eta / (2.0 * alpha)
}

pub trait AsymptoticFormula: Named + Send + Sync {
    /// Names of the arguments after α.
    fn args(&self) -> &'static [&'static str];
    fn eval(&self, alpha: f64, args: &[f64]) -> f64;
}

macro_rules! formula {
    ($ty:ident, $name:literal, [$($arg:literal),*], |$a:ident, $v:ident| $body:expr) => {
        struct $ty;
        impl Named for $ty {
            fn name(&self) -> &'static str {
                $name
            }
        }
        impl AsymptoticFormula for $ty {
            fn args(&self) -> &'static [&'static str] {
                &[$($arg),*]
            }
            #[allow(unused_variables)]
            fn eval(&self, $a: f64, $v: &[f64]) -> f64 {
                $body
            }
        }
    };
}

formula!(J1Leading, "J1_leading", [], |a, v| j1_leading(a));
formula!(J1TwoTerm, "J1_two_term", ["u"], |a, v| j1_leading(a) - 0.5 * v[0].abs());
formula!(J2Linear, "J2_linear", ["nu"], |a, v| {
    crate::action::critical_slope(a) * (v[0] - (a + 1.0) / a.powf(a / (a + 1.0)))
});
formula!(J2Large, "J2_large", ["nu"], |a, v| {
    v[0].powf((a + 1.0) / (2.0 * a)) * j1_leading(a) - 0.5
});
formula!(J2DerivativeScale, "J2_derivative_scale", ["nu"], |a, v| v[0].powf((1.0 - a) / (2.0 * a)));
formula!(LargeN, "large_n", ["ell", "n"], |a, v| large_n_energy(a, v[0], v[1]));
formula!(LargeNPiHalf, "large_n_pi_half", ["ell", "n"], |a, v| {
    (large_n_constant_pi_half(a) * (4.0 * v[1] + 2.0 * v[0] + 1.0)).powf(2.0 * a / (a + 1.0))
});
formula!(FixedNLargeEll, "fixed_n_large_ell", ["ell", "n"], |a, v| fixed_n_large_ell_energy(a, v[0], v[1]));
formula!(FixedNLargeEllShifted, "fixed_n_large_ell_shifted", ["ell", "n"], |a, v| {
    fixed_n_large_ell_energy(a, v[0] + 0.5, v[1])
});
formula!(CoalescingMinus, "coalescing_tp_minus", ["nu"], |a, v| coalescing_turning_point(a, v[0], -1.0));
formula!(CoalescingPlus, "coalescing_tp_plus", ["nu"], |a, v| coalescing_turning_point(a, v[0], 1.0));
formula!(SmallHbarMinus, "small_hbar_tp_minus", ["ell", "hbar"], |a, v| {
    small_hbar_turning_point(a, (v[0] + 0.5) * v[1], 0, true).re
});
formula!(SmallHbarPlus, "small_hbar_tp_plus", ["ell", "hbar"], |a, v| {
    small_hbar_turning_point(a, (v[0] + 0.5) * v[1], 0, false).re
});

pub fn registry() -> &'static Registry<dyn AsymptoticFormula> {
    static REG: OnceLock<Registry<dyn AsymptoticFormula>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r: Registry<dyn AsymptoticFormula> = Registry::new();
        r.register(Box::new(J1Leading));
        r.register(Box::new(J1TwoTerm));
        r.register(Box::new(J2Linear));
        r.register(Box::new(J2Large));
        r.register(Box::new(J2DerivativeScale));
        r.register(Box::new(LargeN));
        r.register(Box::new(LargeNPiHalf));
        r.register(Box::new(FixedNLargeEll));
        r.register(Box::new(FixedNLargeEllShifted));
        r.register(Box::new(CoalescingMinus));
        r.register(Box::new(CoalescingPlus));
        r.register(Box::new(SmallHbarMinus));
        r.register(Box::new(SmallHbarPlus));
        r
    })
}

/// Evaluate a named formula.
pub fn asymptotic_reference(name: &str, alpha: f64, args: &[f64]) -> Result<f64> {
    let f = registry().get(name)?;
    if f.args().len() != args.len() {
        return Err(Error::domain(format!(
            "{name} takes {} argument(s) ({}), got {}",
            f.args().len(),
            f.args().join(", "),
            args.len()
        )));
    }
    Ok(f.eval(alpha, args))
}
