//! High-order Taylor series stepper. The potential has closed-form Taylor
//! coefficients about any point off the origin, so each step sums the local
//! power series of the solution directly.

use super::{SolutionState, StepOptions, Stepper};
use crate::cover::CoverPoint;
use crate::error::{Error, Result};
use crate::model::OscillatorParams;
use crate::registry::Named;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy)]
pub struct TaylorStepper {
    pub order: usize,
    /// Step cap as a fraction of |x| (the series radius).
    pub radius_fraction: f64,
}

impl Default for TaylorStepper {
    fn default() -> Self {
        TaylorStepper { order: 30, radius_fraction: 0.5 }
    }
}

impl Named for TaylorStepper {
    fn name(&self) -> &'static str {
        "taylor"
    }
}

/// Scaled Taylor coefficients ũ_j = u_j h^j of U about `x0`.
pub fn potential_coefficients(p: &OscillatorParams, x0: &CoverPoint, h: Complex64, n: usize, out: &mut Vec<Complex64>) {
    out.clear();
    let z = h / x0.to_complex();
    let s1 = 2.0 * p.alpha;
    let mut a = x0.powf(s1);
    let mut b = p.centrifugal() * x0.powf(-2.0);
    out.push(a + b - p.energy);
    for j in 1..=n {
        let jf = j as f64;
        a *= z * ((s1 - jf + 1.0) / jf);
        b *= z * ((-2.0 - jf + 1.0) / jf);
        out.push(a + b);
    }
}

impl TaylorStepper {
    /// One trial step of complex length `h` from (ψ, ψ') at `x0`.
    /// Returns the new state and the truncation error relative to the state size.
    #[allow(clippy::too_many_arguments)]
    pub fn trial(
        &self,
        p: &OscillatorParams,
        x0: &CoverPoint,
        psi: Complex64,
        dpsi: Complex64,
        h: Complex64,
        u: &mut Vec<Complex64>,
        b: &mut Vec<Complex64>,
    ) -> (Complex64, Complex64, f64) {
        let n = self.order;
        potential_coefficients(p, x0, h, n, u);
        b.clear();
        b.push(psi);
        b.push(h * dpsi);
        let h2 = h * h;
        for j in 0..=n - 2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..=j {
                acc += u[i] * b[j - i];
            }
            b.push(h2 * acc / ((j + 2) as f64 * (j + 1) as f64));
        }
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        let mut size = 0.0f64;
        for (j, bj) in b.iter().enumerate().rev() {
            v += bj;
            d += bj * j as f64;
            size = size.max(bj.norm());
        }
        let tail = (b[n - 1].norm() + b[n].norm()) * n as f64;
        let scale = size.max(v.norm()).max(d.norm()).max(f64::MIN_POSITIVE);
        (v, d / h, tail / scale)
    }
}

impl Stepper for TaylorStepper {
    fn chord(
        &self,
        p: &OscillatorParams,
        start: &SolutionState,
        to: &CoverPoint,
        opts: &StepOptions,
        mut trace: Option<&mut Vec<SolutionState>>,
    ) -> Result<SolutionState> {
        let a = start.location;
        let d = to.to_complex() - a.to_complex();
        let len = d.norm();
        if len == 0.0 {
            return Ok(*start);
        }
        let dir = d / len;
        let mut s = 0.0;
        let mut st = *start;
        let mut u = Vec::with_capacity(self.order + 1);
        let mut b = Vec::with_capacity(self.order + 1);
        // initial guess from the local potential size
        let u0 = crate::model::eval_potential(p, &a)?.norm();
        let mut hs = (self.order as f64 / (3.0 * (1.0 + u0.sqrt()))).min(self.radius_fraction * a.modulus);
        let inv_n = 1.0 / self.order as f64;
        for _ in 0..opts.max_steps {
            let remaining = len - s;
            if remaining <= 1e-15 * len {
                break;
            }
            let cap = self.radius_fraction * st.location.modulus;
            let hstep = hs.min(cap).min(remaining);
            let last = hstep >= remaining;
            let h = dir * hstep;
            let (v, dv, err) = self.trial(p, &st.location, st.value, st.derivative, h, &mut u, &mut b);
            if !(err.is_finite() && v.norm().is_finite()) || err > opts.tol {
                let factor = if err.is_finite() && err > 0.0 { (0.9 * (opts.tol / err).powf(inv_n)).clamp(0.2, 0.7) } else { 0.25 };
                hs = hstep * factor;
                if hs < opts.min_step * st.location.modulus.max(1.0) {
                    let x = st.location.to_complex();
                    return Err(Error::StepUnderflow { re: x.re, im: x.im });
                }
                continue;
            }
            s = if last { len } else { s + hstep };
            let loc = if last { *to } else { a.shift(dir * s) };
            st = SolutionState { location: loc, value: v, derivative: dv, log_scale: st.log_scale, seed: st.seed }
                .normalized();
            if let Some(t) = trace.as_deref_mut() {
                t.push(st);
            }
            let grow = if err > 0.0 { (0.9 * (opts.tol / err).powf(inv_n)).min(2.0) } else { 2.0 };
            hs = hstep * grow.max(0.5);
            if last {
                break;
            }
        }
        if len - s > 1e-15 * len {
            return Err(Error::no_convergence("step budget exhausted along chord"));
        }
        st.location = *to;
        Ok(st)
    }
}
