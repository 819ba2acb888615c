//! Initial-value integration of ψ'' = Uψ along paths on the universal cover,
//! and the two families of seeds: the convergent series for χ₊ at the origin
//! and the Sibuya solutions Ψ_k at infinity.

pub mod dopri;
pub mod frobenius;
pub mod sibuya;
pub mod taylor;

use crate::cover::CoverPoint;
use crate::error::{Error, Result};
use crate::model::OscillatorParams;
use crate::path::PathSpec;
use crate::registry::{Named, Registry};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

pub use frobenius::{frobenius_seed, frobenius_seed_auto, FrobeniusSeed};
pub use sibuya::{big_r, sibuya_seed, sibuya_seed_refined, RExpansion, SibuyaOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SeedTag {
    Frobenius,
    Sibuya(i64),
    Custom,
}

/// (ψ, ψ') at a point, stored as mantissas times `e^{log_scale}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionState {
    pub location: CoverPoint,
    pub value: Complex64,
    pub derivative: Complex64,
    pub log_scale: f64,
    pub seed: SeedTag,
}

impl SolutionState {
    pub fn new(location: CoverPoint, value: Complex64, derivative: Complex64, seed: SeedTag) -> Self {
        SolutionState { location, value, derivative, log_scale: 0.0, seed }.normalized()
    }

    /// Pull the larger of |ψ|, |ψ'| into the log-scale.
    pub fn normalized(mut self) -> Self {
        let m = self.value.norm().max(self.derivative.norm());
        if m > 0.0 && m.is_finite() {
            self.value /= m;
            self.derivative /= m;
            self.log_scale += m.ln();
        }
        self
    }

    /// Multiply the solution by a nonzero constant.
    pub fn scaled_by(mut self, c: Complex64) -> Self {
        self.value *= c;
        self.derivative *= c;
        self.normalized()
    }

    /// Unscaled ψ (may overflow).
    pub fn psi(&self) -> Complex64 {
        self.value * self.log_scale.exp()
    }

    pub fn dpsi(&self) -> Complex64 {
        self.derivative * self.log_scale.exp()
    }

    /// log ψ on the principal branch of the imaginary part.
    pub fn log_psi(&self) -> Complex64 {
        self.value.ln() + self.log_scale
    }

    /// |(ψ, ψ')| without overflow, as a log.
    pub fn log_norm(&self) -> f64 {
        (self.value.norm_sqr() + self.derivative.norm_sqr()).sqrt().ln() + self.log_scale
    }
}

/// A complex number `mantissa · e^{log_scale}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaled {
    pub mantissa: Complex64,
    pub log_scale: f64,
}

impl Scaled {
    pub fn to_complex(&self) -> Complex64 {
        self.mantissa * self.log_scale.exp()
    }

    pub fn ln(&self) -> Complex64 {
        self.mantissa.ln() + self.log_scale
    }

    pub fn ratio(&self, other: &Scaled) -> Complex64 {
        self.mantissa / other.mantissa * (self.log_scale - other.log_scale).exp()
    }

    pub fn norm(&self) -> f64 {
        self.mantissa.norm() * self.log_scale.exp()
    }
}

/// Wr[a, b] = a b' − a' b, kept in scaled form.
pub fn wronskian_scaled(a: &SolutionState, b: &SolutionState) -> Result<Scaled> {
    let tol = 1e-9 * a.location.modulus.max(1.0);
    if a.location.dist(&b.location) > tol || (a.location.arg - b.location.arg).abs() > 1e-9 {
        return Err(Error::Mismatch(format!(
            "{:?} vs {:?}",
            a.location.to_complex(),
            b.location.to_complex()
        )));
    }
    Ok(Scaled {
        mantissa: a.value * b.derivative - a.derivative * b.value,
        log_scale: a.log_scale + b.log_scale,
    })
}

pub fn wronskian(a: &SolutionState, b: &SolutionState) -> Result<Complex64> {
    Ok(wronskian_scaled(a, b)?.to_complex())
}

/// Wronskian divided by |(ψ_a, ψ_a')|·|(ψ_b, ψ_b')|: a bounded, smooth measure
/// of linear dependence.
pub fn wronskian_normalized(a: &SolutionState, b: &SolutionState) -> Result<Complex64> {
    let w = wronskian_scaled(a, b)?;
    let na = (a.value.norm_sqr() + a.derivative.norm_sqr()).sqrt();
    let nb = (b.value.norm_sqr() + b.derivative.norm_sqr()).sqrt();
    Ok(w.mantissa / (na * nb))
}

#[derive(Debug, Clone, Copy)]
pub struct StepOptions {
    pub tol: f64,
    pub max_steps: usize,
    pub min_step: f64,
}

impl Default for StepOptions {
    fn default() -> Self {
        StepOptions { tol: 1e-13, max_steps: 200_000, min_step: 1e-14 }
    }
}

/// A one-step method that carries a state along a straight chord.
pub trait Stepper: Named + Send + Sync {
    fn chord(
        &self,
        p: &OscillatorParams,
        start: &SolutionState,
        to: &CoverPoint,
        opts: &StepOptions,
        trace: Option<&mut Vec<SolutionState>>,
    ) -> Result<SolutionState>;
}

pub fn steppers() -> &'static Registry<dyn Stepper> {
    static REG: OnceLock<Registry<dyn Stepper>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r: Registry<dyn Stepper> = Registry::new();
        r.register(Box::new(taylor::TaylorStepper::default()));
        r.register(Box::new(dopri::DopriStepper));
        r
    })
}

pub const DEFAULT_STEPPER: &str = "taylor";

/// Largest arc angle covered by a single chord.
pub const CHORD_ANGLE: f64 = PI / 8.0;

/// Integrate along a path with the named stepper.
pub fn propagate_with(
    stepper: &dyn Stepper,
    p: &OscillatorParams,
    start: &SolutionState,
    path: &PathSpec,
    opts: &StepOptions,
    mut trace: Option<&mut Vec<SolutionState>>,
) -> Result<SolutionState> {
    path.validate()?;
    if start.location.dist(&path.start) > 1e-12 * path.start.modulus.max(1.0) {
        return Err(Error::Mismatch("state does not sit on the path start".into()));
    }
    let chords = path
        .chords(CHORD_ANGLE)
        .ok_or_else(|| Error::domain("cannot propagate along an unbounded path"))?;
    let mut st = *start;
    st.location = chords[0];
    if let Some(t) = trace.as_deref_mut() {
        t.push(st);
    }
    for to in &chords[1..] {
        st = stepper.chord(p, &st, to, opts, trace.as_deref_mut())?;
    }
    Ok(st)
}

pub fn propagate(
    p: &OscillatorParams,
    start: &SolutionState,
    path: &PathSpec,
    opts: &StepOptions,
) -> Result<SolutionState> {
    propagate_with(steppers().get(DEFAULT_STEPPER)?, p, start, path, opts, None)
}

/// Straight-line propagation to `to`.
pub fn propagate_to(
    p: &OscillatorParams,
    start: &SolutionState,
    to: &CoverPoint,
    opts: &StepOptions,
) -> Result<SolutionState> {
    steppers().get(DEFAULT_STEPPER)?.chord(p, start, to, opts, None)
}

/// Radial move to modulus `r` along the current argument.
pub fn propagate_radial(
    p: &OscillatorParams,
    start: &SolutionState,
    r: f64,
    opts: &StepOptions,
) -> Result<SolutionState> {
    let to = CoverPoint::new(r, start.location.arg);
    propagate_to(p, start, &to, opts)
}

/// Move along the circle |x| = const to argument `arg`.
pub fn propagate_arc(
    p: &OscillatorParams,
    start: &SolutionState,
    arg: f64,
    opts: &StepOptions,
) -> Result<SolutionState> {
    if (arg - start.location.arg).abs() < 1e-15 {
        return Ok(*start);
    }
    let path = PathSpec::new(start.location).arc_to(arg);
    propagate(p, start, &path, opts)
}

/// CSV rows (t, Re x, Im x, Re ψ, Im ψ, Re ψ', Im ψ', logscale) for a trace.
pub fn trace_csv(trace: &[SolutionState]) -> String {
    let mut out = String::from("t,re_x,im_x,re_psi,im_psi,re_dpsi,im_dpsi,logscale\n");
    for (i, s) in trace.iter().enumerate() {
        let x = s.location.to_complex();
        out.push_str(&format!(
            "{},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e}\n",
            i, x.re, x.im, s.value.re, s.value.im, s.derivative.re, s.derivative.im, s.log_scale
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(x: f64, v: f64, d: f64) -> SolutionState {
        SolutionState::new(CoverPoint::real(x), Complex64::new(v, 0.0), Complex64::new(d, 0.0), SeedTag::Custom)
    }

    #[test]
    fn wronskian_basics() {
        let f = state(1.0, 2.0, 3.0);
        let g = state(1.0, -1.0, 0.5);
        assert_eq!(wronskian(&f, &f).unwrap(), Complex64::new(0.0, 0.0));
        let w = wronskian(&f, &g).unwrap();
        let w2 = wronskian(&f.scaled_by(Complex64::new(2.0, 0.0)), &g).unwrap();
        assert!((w2 - 2.0 * w).norm() < 1e-14);
        assert!((w - Complex64::new(2.0 * 0.5 + 3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn wronskian_location_mismatch() {
        assert!(matches!(wronskian(&state(1.0, 1.0, 0.0), &state(2.0, 1.0, 0.0)), Err(Error::Mismatch(_))));
    }
}
