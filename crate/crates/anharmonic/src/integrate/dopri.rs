//! Dormand-Prince 5(4) for complex systems, with a stepper wrapper for the
//! oscillator equation.

use super::{SolutionState, StepOptions, Stepper};
use crate::cover::CoverPoint;
use crate::error::{Error, Result};
use crate::model::{self, OscillatorParams};
use crate::registry::Named;
use num_complex::Complex64;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type C = Complex64;

fn axpy<const N: usize>(y: &[C; N], terms: &[(f64, &[C; N])], h: f64) -> [C; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += k[i] * (c * h);
        }
    }
    out
}

/// One DOPRI5 step of size `h` in the real parameter `t`.
/// Returns the 5th-order solution and an error estimate (max-norm).
pub fn dopri5_step<const N: usize, F>(f: &mut F, t: f64, y: &[C; N], h: f64) -> Result<([C; N], f64)>
where
    F: FnMut(f64, &[C; N]) -> Result<[C; N]>,
{
    let k1 = f(t, y)?;
    let k2 = f(t + C2 * h, &axpy(y, &[(A21, &k1)], h))?;
    let k3 = f(t + C3 * h, &axpy(y, &[(A31, &k1), (A32, &k2)], h))?;
    let k4 = f(t + C4 * h, &axpy(y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h))?;
    let k5 = f(t + C5 * h, &axpy(y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h))?;
    let k6 = f(t + h, &axpy(y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h))?;
    let y5 = axpy(y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
    let k7 = f(t + h, &y5)?;
    let mut err = 0.0f64;
    for i in 0..N {
        let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
        err = err.max(e.norm());
    }
    Ok((y5, err))
}

/// Adaptive integration of `y' = f(t, y)` from `t0` to `t1`, error measured
/// relative to `max(1, |y|)`.
pub fn dopri5_integrate<const N: usize, F>(
    mut f: F,
    t0: f64,
    t1: f64,
    y0: [C; N],
    tol: f64,
    h0: f64,
    max_steps: usize,
) -> Result<[C; N]>
where
    F: FnMut(f64, &[C; N]) -> Result<[C; N]>,
{
    let mut t = t0;
    let mut y = y0;
    let span = t1 - t0;
    let dir = span.signum();
    let mut h = h0.abs().min(span.abs()) * dir;
    for _ in 0..max_steps {
        if (t1 - t) * dir <= 1e-15 * span.abs() {
            return Ok(y);
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        let (yn, err) = dopri5_step(&mut f, t, &y, h)?;
        let size = y.iter().chain(yn.iter()).fold(0.0f64, |m, v| m.max(v.norm())).max(1e-300);
        let r = err / (tol * size);
        if r <= 1.0 && yn.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            t += h;
            y = yn;
            let fac = if r > 0.0 { (0.9 * r.powf(-0.2)).min(5.0) } else { 5.0 };
            h *= fac;
        } else {
            let fac = if r.is_finite() { (0.9 * r.powf(-0.25)).clamp(0.1, 0.5) } else { 0.1 };
            h *= fac;
            if h.abs() < 1e-15 * span.abs() {
                return Err(Error::StepUnderflow { re: t, im: 0.0 });
            }
        }
    }
    Err(Error::no_convergence("dopri5 step budget exhausted"))
}

pub struct DopriStepper;

impl Named for DopriStepper {
    fn name(&self) -> &'static str {
        "dopri5"
    }
}

impl Stepper for DopriStepper {
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
        // split the chord so each piece stays well inside the disc |x − x0| < |x0|
        let mut st = *start;
        let mut s = 0.0;
        while s < len * (1.0 - 1e-15) {
            let here = a.shift(dir * s);
            let piece = (0.5 * here.modulus).min(len - s).max(1e-12 * len);
            let f = |t: f64, y: &[C; 2]| -> Result<[C; 2]> {
                let x = a.shift(dir * t);
                let u = model::eval_potential(p, &x)?;
                Ok([y[1] * dir, u * y[0] * dir])
            };
            let u0 = model::eval_potential(p, &here)?.norm();
            let h0 = (0.1 / (1.0 + u0.sqrt())).min(piece);
            let y = dopri5_integrate(f, s, s + piece, [st.value, st.derivative], opts.tol, h0, opts.max_steps)?;
            s += piece;
            let loc = if s >= len * (1.0 - 1e-15) { *to } else { a.shift(dir * s) };
            st = SolutionState { location: loc, value: y[0], derivative: y[1], log_scale: st.log_scale, seed: st.seed }
                .normalized();
            if let Some(t) = trace.as_deref_mut() {
                t.push(st);
            }
        }
        st.location = *to;
        Ok(st)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let y = dopri5_integrate(
            |_, y: &[C; 1]| Ok([-y[0]]),
            0.0,
            2.0,
            [C::new(1.0, 0.0)],
            1e-12,
            0.1,
            10_000,
        )
        .unwrap();
        assert!((y[0].re - (-2f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn rotation_in_complex_plane() {
        let y = dopri5_integrate(
            |_, y: &[C; 1]| Ok([y[0] * C::new(0.0, 1.0)]),
            0.0,
            std::f64::consts::PI,
            [C::new(1.0, 0.0)],
            1e-12,
            0.1,
            10_000,
        )
        .unwrap();
        assert!((y[0] + 1.0).norm() < 1e-10);
    }
}
