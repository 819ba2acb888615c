//! Parameters, potentials, forcing term, turning points and the rescaled
//! coordinates used for the semiclassical regimes.

use crate::cover::CoverPoint;
use crate::error::{Error, Result};
use crate::roots;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// The triple (α, E, ℓ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub alpha: f64,
    pub energy: Complex64,
    pub ell: Complex64,
}

impl OscillatorParams {
    pub fn new(alpha: f64, energy: Complex64, ell: Complex64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
        }
        if ell.re < -0.5 {
            return Err(Error::domain(format!("Re(ell) must be >= -1/2, got {}", ell.re)));
        }
        Ok(OscillatorParams { alpha, energy, ell })
    }

    /// Real energy and angular momentum.
    pub fn real(alpha: f64, energy: f64, ell: f64) -> Result<Self> {
        Self::new(alpha, Complex64::new(energy, 0.0), Complex64::new(ell, 0.0))
    }

    /// ℓ + 1/2.
    pub fn lambda(&self) -> Complex64 {
        self.ell + 0.5
    }

    /// ℓ(ℓ+1).
    pub fn centrifugal(&self) -> Complex64 {
        self.ell * (self.ell + 1.0)
    }

    pub fn with_energy(&self, energy: Complex64) -> Self {
        OscillatorParams { energy, ..*self }
    }

    pub fn is_real(&self) -> bool {
        self.energy.im == 0.0 && self.ell.im == 0.0
    }

    pub fn real_ell(&self) -> Result<f64> {
        if self.ell.im != 0.0 {
            return Err(Error::domain("operation requires real ell"));
        }
        Ok(self.ell.re)
    }

    pub fn real_energy(&self) -> Result<f64> {
        if self.energy.im != 0.0 {
            return Err(Error::domain("operation requires real energy"));
        }
        Ok(self.energy.re)
    }
}

fn check_nonzero(x: &CoverPoint) -> Result<()> {
    if !(x.modulus > 0.0) {
        return Err(Error::domain("potential evaluated at x = 0"));
    }
    Ok(())
}

/// U(x) = x^{2α} + ℓ(ℓ+1)/x² − E.
pub fn eval_potential(p: &OscillatorParams, x: &CoverPoint) -> Result<Complex64> {
    check_nonzero(x)?;
    let inv2 = x.powf(-2.0);
    Ok(x.powf(2.0 * p.alpha) + p.centrifugal() * inv2 - p.energy)
}

/// V(x) = x^{2α} − E + (ℓ+1/2)²/x².
pub fn eval_reduced(p: &OscillatorParams, x: &CoverPoint) -> Result<Complex64> {
    check_nonzero(x)?;
    let lam = p.lambda();
    Ok(x.powf(2.0 * p.alpha) - p.energy + lam * lam * x.powf(-2.0))
}

/// V, V', V'' at `x`, from closed-form derivatives.
pub fn reduced_with_derivatives(
    p: &OscillatorParams,
    x: &CoverPoint,
) -> Result<(Complex64, Complex64, Complex64)> {
    check_nonzero(x)?;
    let a = p.alpha;
    let lam2 = p.lambda() * p.lambda();
    let xa = x.powf(2.0 * a);
    let z = x.to_complex();
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let v = xa - p.energy + lam2 * inv2;
    let v1 = 2.0 * a * xa * inv - 2.0 * lam2 * inv2 * inv;
    let v2 = 2.0 * a * (2.0 * a - 1.0) * xa * inv2 + 6.0 * lam2 * inv2 * inv2;
    Ok((v, v1, v2))
}

/// Principal √V at `x`; callers continue the branch themselves.
pub fn sqrt_reduced(p: &OscillatorParams, x: &CoverPoint) -> Result<Complex64> {
    Ok(eval_reduced(p, x)?.sqrt())
}

/// The forcing term F for the branch `sqrt_v` of √V at `x`.
pub fn eval_forcing(p: &OscillatorParams, x: &CoverPoint, sqrt_v: Complex64) -> Result<Complex64> {
    let (v, v1, v2) = reduced_with_derivatives(p, x)?;
    let scale = 1.0 + p.energy.norm() + x.powf(2.0 * p.alpha).norm();
    if v.norm() < 1e-14 * scale {
        return Err(Error::Singular(format!(
            "forcing term at turning point x = {:?}",
            x.to_complex()
        )));
    }
    Ok(forcing_from_parts(x.to_complex(), v, v1, v2, sqrt_v))
}

/// F = V^{-1/2}[V − U + (5V'² − 4V''V)/(16V²)] with V − U = 1/(4x²).
pub fn forcing_from_parts(
    x: Complex64,
    v: Complex64,
    v1: Complex64,
    v2: Complex64,
    sqrt_v: Complex64,
) -> Complex64 {
    let langer = 0.25 / (x * x);
    (langer + (5.0 * v1 * v1 - 4.0 * v2 * v) / (16.0 * v * v)) / sqrt_v
}

/// Critical values of the real potential on the positive axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalData {
    pub e_star: f64,
    pub x_star: f64,
    pub nu_star: f64,
    pub y_star: f64,
}

pub fn critical_data(p: &OscillatorParams) -> Result<CriticalData> {
    let ell = p.real_ell()?;
    critical_data_real(p.alpha, ell)
}

pub fn critical_data_real(alpha: f64, ell: f64) -> Result<CriticalData> {
    if !(ell > -0.5) {
        return Err(Error::domain("critical data needs ell > -1/2"));
    }
    let a = alpha;
    let lam = ell + 0.5;
    let e_star = a.powf(-a / (1.0 + a)) * (1.0 + a) * lam.powf(2.0 * a / (1.0 + a));
    let x_star = a.powf(-1.0 / (2.0 + 2.0 * a)) * lam.powf(1.0 / (1.0 + a));
    let nu_star = (a + 1.0) / a.powf(a / (a + 1.0));
    let y_star = a.powf(-1.0 / (2.0 * a + 2.0));
    Ok(CriticalData { e_star, x_star, nu_star, y_star })
}

/// A located zero of V off the positive real pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorPoint {
    pub location: CoverPoint,
    pub multiplicity: u32,
    pub sector: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct TurningPointSet {
    /// `(x_-, x_+)` for real parameters with `E ≥ E_*`.
    pub real_pair: Option<(f64, f64)>,
    /// True when the real pair has merged into the double point `x_*`.
    pub degenerate: bool,
    pub sector_points: Vec<SectorPoint>,
}

/// Relative tolerance on `|E − E_*|` that selects the double-root branch.
pub const DOUBLE_ROOT_TOL: f64 = 1e-8;

/// Real V restricted to the positive axis.
fn reduced_real(alpha: f64, e: f64, lam: f64, x: f64) -> f64 {
    x.powf(2.0 * alpha) - e + lam * lam / (x * x)
}

fn reduced_real_d(alpha: f64, lam: f64, x: f64) -> f64 {
    2.0 * alpha * x.powf(2.0 * alpha - 1.0) - 2.0 * lam * lam / (x * x * x)
}

/// The positive pair `x_- ≤ x_+`, or `None` below `E_*`.
pub fn real_turning_pair(alpha: f64, energy: f64, ell: f64) -> Result<Option<(f64, f64)>> {
    let crit = critical_data_real(alpha, ell)?;
    let lam = ell + 0.5;
    let e_star = crit.e_star;
    if energy < e_star * (1.0 - DOUBLE_ROOT_TOL) {
        return Ok(None);
    }
    if (energy - e_star).abs() < DOUBLE_ROOT_TOL * e_star {
        return Ok(Some((crit.x_star, crit.x_star)));
    }
    let f = |x: f64| reduced_real(alpha, energy, lam, x);
    let df = |x: f64| reduced_real_d(alpha, lam, x);
    let xs = crit.x_star;
    let mut lo = xs * 0.5;
    while f(lo) <= 0.0 {
        lo *= 0.5;
    }
    let mut hi = xs.max(energy.powf(0.5 / alpha)) * 2.0;
    while f(hi) <= 0.0 {
        hi *= 2.0;
    }
    let polish = |mut x: f64| {
        for _ in 0..2 {
            let d = df(x);
            if d != 0.0 {
                let nx = x - f(x) / d;
                if nx.is_finite() && nx > 0.0 {
                    x = nx;
                }
            }
        }
        x
    };
    let xm = polish(roots::bisect(f, lo, xs, 1e-12)?);
    let xp = polish(roots::bisect(f, xs, hi, 1e-12)?);
    Ok(Some((xm, xp)))
}

fn newton_complex(
    p: &OscillatorParams,
    seed: CoverPoint,
    scale: f64,
    max_iter: usize,
) -> Option<(CoverPoint, u32)> {
    let resid_tol = 1e-12 * scale;
    let mut x = seed;
    let mut fx = eval_reduced(p, &x).ok()?;
    for _ in 0..max_iter {
        if fx.norm() < resid_tol {
            return Some((x, 1));
        }
        let (_, d1, _) = reduced_with_derivatives(p, &x).ok()?;
        if d1.norm() == 0.0 {
            break;
        }
        let mut step = -fx / d1;
        // keep away from the origin and damp until the residual drops
        let mut accepted = false;
        for _ in 0..30 {
            if step.norm() < 0.9 * x.modulus {
                let nx = x.shift(step);
                if let Ok(nf) = eval_reduced(p, &nx) {
                    if nf.norm() < fx.norm() {
                        x = nx;
                        fx = nf;
                        accepted = true;
                        break;
                    }
                }
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if fx.norm() < resid_tol {
        return Some((x, 1));
    }
    // stalled: try the critical point of V nearby (double root)
    let mut y = x;
    for _ in 0..max_iter {
        let (v, d1, d2) = reduced_with_derivatives(p, &y).ok()?;
        if d1.norm() < 1e-13 * scale / y.modulus.max(1e-300) || d2.norm() == 0.0 {
            if v.norm() < 1e-8 * scale {
                return Some((y, 2));
            }
            break;
        }
        let step = -d1 / d2;
        if !(step.norm() < 0.9 * y.modulus) {
            break;
        }
        y = y.shift(step);
    }
    let (v, _, _) = reduced_with_derivatives(p, &y).ok()?;
    if v.norm() < 1e-8 * scale {
        Some((y, 2))
    } else {
        None
    }
}

/// Turning points. The real pair is bracketed; sector points are polished
/// with damped Newton from asymptotic seeds, keeping those whose argument
/// lies in `|arg x − kπ/(α+1)| ≤ π/(2α+2)` for some `k` in `sectors`.
pub fn turning_points(
    p: &OscillatorParams,
    sectors: std::ops::RangeInclusive<i64>,
) -> Result<TurningPointSet> {
    let mut set = TurningPointSet::default();
    if p.is_real() && p.ell.re > -0.5 {
        let pair = real_turning_pair(p.alpha, p.energy.re, p.ell.re)?;
        if let Some((a, b)) = pair {
            set.degenerate = a == b;
            set.real_pair = Some((a, b));
        }
    }
    let a = p.alpha;
    let half = PI / (2.0 * a + 2.0);
    let lo_arg = (2.0 * *sectors.start() as f64 - 1.0) * half;
    let hi_arg = (2.0 * *sectors.end() as f64 + 1.0) * half;
    let e = p.energy;
    let lam = p.lambda();
    let scale = 1.0 + e.norm();

    let mut seeds = Vec::new();
    // large roots near x^{2α} = E and small roots near x² = λ²/E
    let e_mod = e.norm().max(1e-300);
    let e_arg = if e.norm() > 0.0 { e.arg() } else { 0.0 };
    let big_r = e_mod.powf(0.5 / a).max(lam.norm().powf(1.0 / (a + 1.0)));
    let kmax = ((hi_arg.abs().max(lo_arg.abs())) * a / PI).ceil() as i64 + 2;
    for k in -kmax..=kmax {
        let arg = (e_arg + 2.0 * PI * k as f64) / (2.0 * a);
        if arg >= lo_arg - 0.5 && arg <= hi_arg + 0.5 {
            seeds.push(CoverPoint::new(big_r, arg));
        }
    }
    if e.norm() > 0.0 && lam.norm() > 0.0 {
        let small = (lam * lam / e).sqrt();
        let base = small.arg();
        for k in -kmax..=kmax {
            let arg = base + PI * k as f64;
            if arg >= lo_arg - 0.5 && arg <= hi_arg + 0.5 {
                seeds.push(CoverPoint::new(small.norm(), arg));
            }
        }
    }
    // extra seeds on a polar grid catch roots the asymptotics miss
    let n_ang = (((hi_arg - lo_arg) / (PI / 8.0)).ceil() as usize).max(4);
    for i in 0..=n_ang {
        let arg = lo_arg + (hi_arg - lo_arg) * i as f64 / n_ang as f64;
        for r in [0.5 * big_r, big_r, 1.5 * big_r] {
            seeds.push(CoverPoint::new(r, arg));
        }
    }

    let mut found: Vec<SectorPoint> = Vec::new();
    for s in seeds {
        if let Some((x, mult)) = newton_complex(p, s, scale, 50) {
            if x.arg < lo_arg - 1e-12 || x.arg > hi_arg + 1e-12 {
                continue;
            }
            let tol = 1e-6 * x.modulus.max(1e-12);
            if let Some(existing) = found
                .iter_mut()
                .find(|q| q.location.dist(&x) < tol.max(1e-6 * q.location.modulus) && (q.location.arg - x.arg).abs() < 1e-6)
            {
                existing.multiplicity = existing.multiplicity.max(mult);
                continue;
            }
            let sector = (x.arg / (2.0 * half)).round() as i64;
            found.push(SectorPoint { location: x, multiplicity: mult, sector });
        }
    }
    // a double root may show up as two nearby simple ones
    let mut merged: Vec<SectorPoint> = Vec::new();
    for q in found {
        if let Some(m) = merged.iter_mut().find(|m| {
            m.location.dist(&q.location) < 1e-4 * q.location.modulus && (m.location.arg - q.location.arg).abs() < 1e-4
        }) {
            m.multiplicity = 2;
            continue;
        }
        merged.push(q);
    }
    merged.sort_by(|a, b| {
        a.location
            .arg
            .partial_cmp(&b.location.arg)
            .unwrap()
            .then(a.location.modulus.partial_cmp(&b.location.modulus).unwrap())
    });
    set.sector_points = merged;
    Ok(set)
}

/// Which semiclassical rescaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// E = ħ^{−2α/(α+1)}, ℓ fixed.
    LargeEnergy,
    /// ħ = (ℓ+1/2)^{−1}, ν = E ħ^{2α/(α+1)}.
    LargeMomentum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HbarCoords {
    pub regime: Regime,
    pub hbar: f64,
    /// ν in the second regime, 1 in the first.
    pub nu: f64,
    /// x = scale · y with scale = ħ^{−1/(α+1)}.
    pub scale: f64,
}

pub fn to_hbar_coords(p: &OscillatorParams, regime: Regime) -> Result<HbarCoords> {
    let a = p.alpha;
    match regime {
        Regime::LargeEnergy => {
            let e = p.real_energy()?;
            if !(e > 0.0) {
                return Err(Error::domain("first regime needs E > 0"));
            }
            let hbar = e.powf(-(a + 1.0) / (2.0 * a));
            Ok(HbarCoords { regime, hbar, nu: 1.0, scale: hbar.powf(-1.0 / (a + 1.0)) })
        }
        Regime::LargeMomentum => {
            let ell = p.real_ell()?;
            let lam = ell + 0.5;
            if lam == 0.0 {
                return Err(Error::domain("second regime needs ell != -1/2"));
            }
            let e = p.real_energy()?;
            let hbar = 1.0 / lam;
            let nu = e * lam.powf(-2.0 * a / (a + 1.0));
            Ok(HbarCoords { regime, hbar, nu, scale: hbar.powf(-1.0 / (a + 1.0)) })
        }
    }
}

/// Inverse of [`to_hbar_coords`]. The first regime keeps `ell`.
pub fn from_hbar_coords(alpha: f64, c: &HbarCoords, ell: f64) -> Result<OscillatorParams> {
    let a = alpha;
    match c.regime {
        Regime::LargeEnergy => OscillatorParams::real(a, c.hbar.powf(-2.0 * a / (a + 1.0)), ell),
        Regime::LargeMomentum => {
            let lam = 1.0 / c.hbar;
            OscillatorParams::real(a, c.nu * lam.powf(2.0 * a / (a + 1.0)), lam - 0.5)
        }
    }
}
