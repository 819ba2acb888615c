//! Points on the universal cover of the punctured plane.
//!
//! A point is a modulus together with a continuous argument, so `x` and
//! `x e^{2πi}` are different points. Non-integer powers are taken on the
//! sheet picked out by the stored argument.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverPoint {
    pub modulus: f64,
    pub arg: f64,
}

impl CoverPoint {
    pub fn new(modulus: f64, arg: f64) -> Self {
        CoverPoint { modulus, arg }
    }

    /// Positive real point.
    pub fn real(x: f64) -> Self {
        debug_assert!(x > 0.0);
        CoverPoint { modulus: x, arg: 0.0 }
    }

    /// Lift a complex number using its principal argument.
    pub fn from_principal(z: Complex64) -> Self {
        CoverPoint { modulus: z.norm(), arg: z.arg() }
    }

    /// Lift `z` to the sheet closest to `near`.
    pub fn lift_near(z: Complex64, near: &CoverPoint) -> Self {
        let mut arg = z.arg();
        let k = ((near.arg - arg) / (2.0 * PI)).round();
        arg += 2.0 * PI * k;
        CoverPoint { modulus: z.norm(), arg }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.modulus, self.arg)
    }

    /// `log|x| + i arg x`.
    pub fn ln(&self) -> Complex64 {
        Complex64::new(self.modulus.ln(), self.arg)
    }

    pub fn powf(&self, s: f64) -> Complex64 {
        Complex64::from_polar(self.modulus.powf(s), s * self.arg)
    }

    pub fn powc(&self, s: Complex64) -> Complex64 {
        (s * self.ln()).exp()
    }

    /// Displace by a complex step, continuing the argument along the segment.
    /// Valid as long as the segment `[x, x + d]` avoids the origin.
    pub fn shift(&self, d: Complex64) -> Self {
        let z = self.to_complex();
        let w = z + d;
        let rel = (w / z).arg();
        CoverPoint { modulus: w.norm(), arg: self.arg + rel }
    }

    pub fn scale(&self, s: f64) -> Self {
        CoverPoint { modulus: self.modulus * s, arg: self.arg }
    }

    pub fn rotate(&self, phi: f64) -> Self {
        CoverPoint { modulus: self.modulus, arg: self.arg + phi }
    }

    /// Mirror image under complex conjugation on the cover.
    pub fn conj(&self) -> Self {
        CoverPoint { modulus: self.modulus, arg: -self.arg }
    }

    pub fn dist(&self, other: &CoverPoint) -> f64 {
        (self.to_complex() - other.to_complex()).norm()
    }
}

/// Continue a square root branch: pick the root of `v` closest to `prev`.
pub fn sqrt_near(v: Complex64, prev: Complex64) -> Complex64 {
    let s = v.sqrt();
    if (s - prev).norm_sqr() <= (s + prev).norm_sqr() {
        s
    } else {
        -s
    }
}
