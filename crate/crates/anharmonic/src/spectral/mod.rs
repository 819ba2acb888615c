//! Spectral determinant, Stokes multipliers and Fock-Goncharov coordinates.
//!
//! Every quantity is a ratio of Wronskians, evaluated at one common point
//! after carrying each solution there from its own seed.

pub mod scan;

use crate::action;
use crate::cover::CoverPoint;
use crate::error::{Error, Result};
use crate::integrate::{
    self, frobenius, sibuya, wronskian_normalized, wronskian_scaled, Scaled, SolutionState, StepOptions,
};
use crate::model::{self, OscillatorParams};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;

pub use scan::{
    asymptotic_spectrum, eigenvalues, eigenvalues_with, exact_eigenvalues, spectrum_methods, AsymptoticBranch, ScanOptions,
    SpectrumMethod, SpectrumRecord,
};

type C = Complex64;

/// A solution named by where it is subdominant: the origin (χ₊) or the
/// end of the k-th Stokes ray (Ψ_k).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Origin,
    Ray(i64),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Origin => write!(f, "0_"),
            Label::Ray(k) => write!(f, "{k}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeedMode {
    /// Leading asymptotic form at the default radius. Enough for zeros.
    Leading,
    /// Riccati-corrected and exactly normalised.
    Refined,
}

#[derive(Debug, Clone, Copy)]
pub struct SpectralOptions {
    pub step: StepOptions,
    pub seed: SeedMode,
    pub series_tol: f64,
    /// Override for the Sibuya seed radius.
    pub x_max: Option<f64>,
    /// Override for the Frobenius seed radius.
    pub x0: Option<f64>,
    /// Override for the modulus of the matching point.
    pub match_radius: Option<f64>,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            step: StepOptions::default(),
            seed: SeedMode::Leading,
            series_tol: 1e-15,
            x_max: None,
            x0: None,
            match_radius: None,
        }
    }
}

impl SpectralOptions {
    pub fn refined() -> Self {
        SpectralOptions { seed: SeedMode::Refined, ..Default::default() }
    }
}

/// Default matching radius: x_* above the critical energy, else 1.
pub fn default_match_radius(p: &OscillatorParams) -> f64 {
    if let (Ok(ell), Ok(e)) = (p.real_ell(), p.real_energy()) {
        if let Ok(cd) = model::critical_data_real(p.alpha, ell) {
            if e > cd.e_star {
                return cd.x_star;
            }
        }
    } else if let Ok(cd) = model::critical_data_real(p.alpha, p.ell.re.max(-0.49)) {
        return cd.x_star.max(0.5);
    }
    1.0
}

/// Seeds and transports solutions to a common point, caching each one.
pub struct SolutionBank {
    pub params: OscillatorParams,
    pub at: CoverPoint,
    pub opts: SpectralOptions,
    cache: HashMap<Label, SolutionState>,
}

impl SolutionBank {
    pub fn new(params: OscillatorParams, at: CoverPoint, opts: SpectralOptions) -> Self {
        SolutionBank { params, at, opts, cache: HashMap::new() }
    }

    /// Bank whose common point is the default matching point on the positive axis.
    pub fn on_axis(params: OscillatorParams, opts: SpectralOptions) -> Self {
        let r = opts.match_radius.unwrap_or_else(|| default_match_radius(&params));
        Self::new(params, CoverPoint::real(r), opts)
    }

    pub fn get(&mut self, label: Label) -> Result<SolutionState> {
        if let Some(s) = self.cache.get(&label) {
            return Ok(*s);
        }
        let s = solution_at(&self.params, label, &self.at, &self.opts)?;
        self.cache.insert(label, s);
        Ok(s)
    }

    /// Replace a cached solution by a multiple of itself.
    pub fn rescale(&mut self, label: Label, c: C) -> Result<()> {
        let s = self.get(label)?;
        self.cache.insert(label, s.scaled_by(c));
        Ok(())
    }

    pub fn wronskian(&mut self, a: Label, b: Label) -> Result<Scaled> {
        let sa = self.get(a)?;
        let sb = self.get(b)?;
        wronskian_scaled(&sa, &sb)
    }
}

/// Seed the solution named by `label` and carry it to `at`.
pub fn solution_at(p: &OscillatorParams, label: Label, at: &CoverPoint, opts: &SpectralOptions) -> Result<SolutionState> {
    match label {
        Label::Origin => {
            let r0 = opts.x0.unwrap_or_else(|| frobenius::default_seed_radius(p)).min(0.5 * at.modulus);
            let (seed, _) = frobenius::frobenius_seed(p, &CoverPoint::new(r0, at.arg), opts.series_tol)?;
            integrate::propagate_radial(p, &seed, at.modulus, &opts.step)
        }
        Label::Ray(k) => {
            let seed = match opts.seed {
                SeedMode::Leading => {
                    let x_max = opts.x_max.unwrap_or_else(|| sibuya::default_seed_radius(p)).max(2.0 * at.modulus);
                    sibuya::sibuya_seed(p, k, x_max)?
                }
                SeedMode::Refined => {
                    let so = sibuya::SibuyaOptions { x_max: opts.x_max, ..Default::default() };
                    let (s, _) = sibuya::sibuya_seed_refined(p, k, &so)?;
                    s
                }
            };
            let r = integrate::propagate_radial(p, &seed, at.modulus, &opts.step)?;
            integrate::propagate_arc(p, &r, at.arg, &opts.step)
        }
    }
}

/// Q₊ = Wr[χ₊, Ψ₀], with a bounded real-analytic companion for root finding.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpectralDeterminant {
    pub value: Scaled,
    /// Wronskian divided by the norms of (χ₊, χ₊') and (Ψ₀, Ψ₀') at the matching point.
    pub normalized: C,
    pub match_radius: f64,
}

pub fn spectral_determinant(p: &OscillatorParams) -> Result<SpectralDeterminant> {
    spectral_determinant_with(p, &SpectralOptions::default())
}

pub fn spectral_determinant_with(p: &OscillatorParams, opts: &SpectralOptions) -> Result<SpectralDeterminant> {
    if p.ell.re <= -0.5 {
        return Err(Error::domain("Q_+ needs Re(ell) > -1/2"));
    }
    let mut bank = SolutionBank::on_axis(*p, *opts);
    let chi = bank.get(Label::Origin)?;
    let psi = bank.get(Label::Ray(0))?;
    Ok(SpectralDeterminant {
        value: wronskian_scaled(&chi, &psi)?,
        normalized: wronskian_normalized(&chi, &psi)?,
        match_radius: bank.at.modulus,
    })
}

/// W_a(b, d) = Wr[ψ_a, ψ_b] / Wr[ψ_a, ψ_d], the asymptotic value at `a` of ψ_b/ψ_d.
/// Returns `None` for the value ∞.
pub fn asymptotic_value(bank: &mut SolutionBank, a: Label, b: Label, d: Label) -> Result<Option<C>> {
    let wb = bank.wronskian(a, b)?;
    let wd = bank.wronskian(a, d)?;
    if wd.mantissa.norm() == 0.0 {
        return Ok(None);
    }
    let r = wb.ratio(&wd);
    Ok(if r.re.is_finite() && r.im.is_finite() { Some(r) } else { None })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockGoncharovValue {
    pub indices: [Label; 4],
    pub value: C,
    /// (W_a(b,d), W_c(b,d)).
    pub wronskian_inputs: (C, C),
}

/// R_(a,b,c,d) = −W_a(b,d)/W_c(b,d), evaluated in the given bank.
pub fn fock_goncharov_in(bank: &mut SolutionBank, a: Label, b: Label, c: Label, d: Label) -> Result<FockGoncharovValue> {
    let labels = [a, b, c, d];
    for i in 0..4 {
        for j in i + 1..4 {
            if labels[i] == labels[j] {
                return Err(Error::domain(format!("labels must be distinct, got {a},{b},{c},{d}")));
            }
        }
    }
    let wa = asymptotic_value(bank, a, b, d)?;
    let wc = asymptotic_value(bank, c, b, d)?;
    match (wa, wc) {
        (Some(x), Some(y)) if y.norm() > 0.0 => {
            Ok(FockGoncharovValue { indices: labels, value: -x / y, wronskian_inputs: (x, y) })
        }
        _ => Err(Error::Degenerate(format!("indeterminate cross-ratio R({a},{b},{c},{d})"))),
    }
}

/// Supported labels are the origin and the rays −2..=2.
pub fn fock_goncharov(p: &OscillatorParams, a: Label, b: Label, c: Label, d: Label) -> Result<FockGoncharovValue> {
    for l in [a, b, c, d] {
        if let Label::Ray(k) = l {
            if k.abs() > 2 {
                return Err(Error::domain(format!("ray label {k} outside -2..=2")));
            }
        }
    }
    let mut bank = SolutionBank::on_axis(*p, SpectralOptions::default());
    fock_goncharov_in(&mut bank, a, b, c, d)
}

/// R₀ = R_(0̲,−1,0,1). Equals −1 exactly on the spectrum.
pub fn r_zero(p: &OscillatorParams) -> Result<C> {
    r_zero_with(p, &SpectralOptions::default())
}

pub fn r_zero_with(p: &OscillatorParams, opts: &SpectralOptions) -> Result<C> {
    let mut bank = SolutionBank::on_axis(*p, *opts);
    Ok(fock_goncharov_in(&mut bank, Label::Origin, Label::Ray(-1), Label::Ray(0), Label::Ray(1))?.value)
}

/// σ_k = Wr[Ψ_{k−1}, Ψ_{k+1}] / Wr[Ψ_{k−1}, Ψ_k], from Ψ_{k+1} = Ψ_{k−1} + σ_k Ψ_k.
/// Needs exactly normalised seeds, so the refined seed is always used.
pub fn stokes_multiplier(p: &OscillatorParams, k: i64) -> Result<C> {
    let mut bank = stokes_bank(p, k);
    stokes_multiplier_in(&mut bank, k)
}

/// Bank centred on ray k at a radius near the turning points.
pub fn stokes_bank(p: &OscillatorParams, k: i64) -> SolutionBank {
    let r = default_match_radius(p).max(p.energy.norm().powf(0.5 / p.alpha)).max(1.0);
    SolutionBank::new(*p, CoverPoint::new(r, sibuya::ray_arg(p.alpha, k)), SpectralOptions::refined())
}

pub fn stokes_multiplier_in(bank: &mut SolutionBank, k: i64) -> Result<C> {
    let den = bank.wronskian(Label::Ray(k - 1), Label::Ray(k))?;
    let num = bank.wronskian(Label::Ray(k - 1), Label::Ray(k + 1))?;
    let a = bank.get(Label::Ray(k - 1))?;
    let b = bank.get(Label::Ray(k))?;
    if wronskian_normalized(&a, &b)?.norm() < 1e-13 {
        return Err(Error::Degenerate(format!("Psi_{} and Psi_{} are dependent", k - 1, k)));
    }
    Ok(num.ratio(&den))
}

/// Semiclassical value R₀^W = exp(2πi I(E, ℓ)).
pub fn semiclassical_r_zero(p: &OscillatorParams) -> Result<C> {
    let i = action::wkb_phase(p)?;
    Ok(C::from_polar(1.0, 2.0 * PI * i))
}

/// Orientation of the semiclassical loop relative to R₀: R₀ ≈ exp(sign · 2πi I).
/// Fixed by comparing both orientations on a harmonic case with I = n + 1/4,
/// where the two candidates differ maximally.
pub fn semiclassical_orientation() -> Result<f64> {
    let ell = 10.0;
    // α = 1: I = (E − 2ℓ − 1)/4, so I = 1/4 at E = 2ℓ + 2
    let p = OscillatorParams::real(1.0, 2.0 * ell + 2.0, ell)?;
    let r = r_zero(&p)?;
    let i = action::wkb_phase(&p)?;
    let plus = (r * C::from_polar(1.0, -2.0 * PI * i) - 1.0).norm();
    let minus = (r * C::from_polar(1.0, 2.0 * PI * i) - 1.0).norm();
    Ok(if plus <= minus { 1.0 } else { -1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_ground_state_is_a_zero() {
        let p = OscillatorParams::real(1.0, 3.0, 0.0).unwrap();
        let q = spectral_determinant(&p).unwrap();
        assert!(q.normalized.norm() < 1e-10, "{:?}", q.normalized);
        let off = spectral_determinant(&p.with_energy(C::new(4.0, 0.0))).unwrap();
        assert!(off.normalized.norm() > 1e-3);
    }

    #[test]
    fn r_zero_is_minus_one_on_spectrum() {
        let p = OscillatorParams::real(1.0, 3.0, 0.0).unwrap();
        let r = r_zero(&p).unwrap();
        assert!((r + 1.0).norm() < 1e-7, "{r}");
    }

    #[test]
    fn distinct_labels_required() {
        let p = OscillatorParams::real(1.0, 3.0, 0.0).unwrap();
        assert!(fock_goncharov(&p, Label::Origin, Label::Origin, Label::Ray(0), Label::Ray(1)).is_err());
    }
}
