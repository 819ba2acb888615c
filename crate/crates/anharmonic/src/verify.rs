//! The acceptance checks, shared by the `verify` command and the
//! acceptance test target. Every tolerance is a named constant here.

use crate::action::{self, asymptotic, JKind};
use crate::cover::CoverPoint;
use crate::error::Result;
use crate::geometry::{stokes_complex, StokesOptions};
use crate::model::{self, OscillatorParams};
use crate::path::PathSpec;
use crate::registry::{Named, Registry};
use crate::roots;
use crate::spectral::{self, scan};
use crate::volterra::{check, error_functionals, Curve, GridOptions};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;
use std::time::Instant;

pub const EXACT_SPECTRUM_REL_TOL: f64 = 1e-7;
pub const BS_EXACT_REL_TOL: f64 = 1e-8;
pub const LARGE_N_RATE_SPREAD: f64 = 3.0;
pub const HARMONIC_RATE_SPREAD: f64 = 4.0;
pub const HBAR_SCALING_SPREAD: f64 = 1.1;
pub const R_ZERO_AT_ROOT: f64 = 1e-6;
pub const R_ZERO_OFF_ROOT: f64 = 0.1;
/// Allowed growth of the normalised remainder as the limit is approached.
pub const J_RATE_GROWTH: f64 = 2.0;
/// Semiclassical check: dev(ħ) ≤ SLACK·C·ħ + FLOOR with C fitted at the largest ħ.
pub const SEMICLASSICAL_SLACK: f64 = 1.5;
pub const SEMICLASSICAL_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Profile {
    Quick,
    Full,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub id: u32,
    pub name: String,
    /// The quantity compared against `bound` (smaller is better).
    pub measured: f64,
    pub bound: f64,
    pub seconds: f64,
    pub time_limit: f64,
    pub passed: bool,
    pub detail: String,
}

/// One acceptance criterion.
pub trait Criterion: Named + Send + Sync {
    fn id(&self) -> u32;
    /// Wall-clock budget in seconds.
    fn time_limit(&self) -> f64;
    fn in_quick_profile(&self) -> bool {
        true
    }
    /// Returns (measured, bound, detail); passes when measured ≤ bound.
    fn measure(&self) -> Result<(f64, f64, String)>;

    fn run(&self) -> CheckOutcome {
        let t = Instant::now();
        let r = self.measure();
        let seconds = t.elapsed().as_secs_f64();
        let limit = self.time_limit();
        let (measured, bound, detail, ok) = match r {
            Ok((m, b, d)) => (m, b, d, m <= b),
            Err(e) => (f64::NAN, f64::NAN, format!("error: {e}"), false),
        };
        CheckOutcome {
            id: self.id(),
            name: self.name().to_string(),
            measured,
            bound,
            seconds,
            time_limit: limit,
            passed: ok && seconds <= limit,
            detail,
        }
    }
}

struct ExactSpectrum;
struct BohrSommerfeldExact;
struct LargeNRate;
struct HarmonicRate;
struct FundamentalBound;
struct HbarScaling;
struct SpectralCriterion;
struct SemiclassicalAccuracy;
struct JAsymptotics;
struct StokesRegression;

macro_rules! named {
    ($t:ty, $n:expr) => {
        impl Named for $t {
            fn name(&self) -> &'static str {
                $n
            }
        }
    };
}

named!(ExactSpectrum, "exact-spectrum-alpha1");
named!(BohrSommerfeldExact, "bohr-sommerfeld-alpha1");
named!(LargeNRate, "large-n-rate-alpha2");
named!(HarmonicRate, "harmonic-approximation-rate");
named!(FundamentalBound, "fundamental-wkb-bound");
named!(HbarScaling, "rho-hbar-scaling");
named!(SpectralCriterion, "r-zero-spectral-criterion");
named!(SemiclassicalAccuracy, "r-zero-semiclassical");
named!(JAsymptotics, "j-integral-asymptotics");
named!(StokesRegression, "stokes-complex-trichotomy");

const ELLS_ALPHA1: [f64; 3] = [0.0, 0.5, 2.3];

impl Criterion for ExactSpectrum {
    fn id(&self) -> u32 {
        1
    }
    fn time_limit(&self) -> f64 {
        30.0
    }
    fn measure(&self) -> Result<(f64, f64, String)> {
        let mut worst = 0.0f64;
        for ell in ELLS_ALPHA1 {
            for (n, e) in scan::exact_eigenvalues(1.0, ell, 10, &scan::ScanOptions::default())?.into_iter().enumerate() {
                worst = worst.max((e / (4.0 * n as f64 + 3.0 + 2.0 * ell) - 1.0).abs());
            }
        }
        Ok((worst, EXACT_SPECTRUM_REL_TOL, format!("max relative error {worst:.3e} over ell in {ELLS_ALPHA1:?}, n <= 10")))
    }
}

impl Criterion for BohrSommerfeldExact {
    fn id(&self) -> u32 {
        2
    }
    fn time_limit(&self) -> f64 {
        5.0
    }
    fn measure(&self) -> Result<(f64, f64, String)> {
        let mut worst = 0.0f64;
        for ell in ELLS_ALPHA1 {
            for n in 0..=10u32 {
                let e = action::bohr_sommerfeld_energy(n, 1.0, ell)?;
                worst = worst.max((e / (4.0 * n as f64 + 2.0 * ell + 3.0) - 1.0).abs());
            }
        }
        Ok((worst, BS_EXACT_REL_TOL, format!("max relative error {worst:.3e}")))
    }
}

/// max/min of a positive sequence.
fn spread(v: &[f64]) -> f64 {
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

impl Criterion for LargeNRate {
    fn id(&self) -> u32 {
        3
    }
    fn time_limit(&self) -> f64 {
        600.0
    }
    fn in_quick_profile(&self) -> bool {
        false
    }
    fn measure(&self) -> Result<(f64, f64, String)> {
        let (a, ell) = (2.0, 0.0);
        let e = scan::exact_eigenvalues(a, ell, 60, &scan::ScanOptions::default())?;
        let nd: Vec<f64> = (10..=60)
            .map(|n| n as f64 * (e[n] / asymptotic::large_n_energy(a, ell, n as f64) - 1.0).abs())
            .collect();
        let s = spread(&nd);
        Ok((s, LARGE_N_RATE_SPREAD, format!("n*d_n in [{:.4}, {:.4}] for 10 <= n <= 60", nd.iter().cloned().fold(f64::INFINITY, f64::min), nd.iter().cloned().fold(0.0, f64::max))))
    }
}

impl Criterion for HarmonicRate {
    fn id(&self) -> u32 {
        4
    }
    fn time_limit(&self) -> f64 {
        600.0
    }
    fn in_quick_profile(&self) -> bool {
        false
    }
    fn measure(&self) -> Result<(f64, f64, String)> {
        let mut worst = 0.0f64;
        let mut detail = String::new();
        for a in [1.0, 2.0] {
            let mut v = Vec::new();
            for ell in [25.0, 50.0, 100.0, 200.0] {
                let e0 = scan::exact_eigenvalues(a, ell, 0, &scan::ScanOptions::default())?[0];
                v.push(asymptotic::harmonic_residual(a, ell, 0.0, e0).abs() * ell.powf(1.5));
            }
            let s = spread(&v);
            worst = worst.max(s);
            detail += &format!("alpha={a}: residual*ell^1.5 = {v:.3?} (spread {s:.3}); ");
        }
        Ok((worst, HARMONIC_RATE_SPREAD, detail.trim_end_matches("; ").to_string()))
    }
}

/// The committed strictly admissible curves: (α, E, ℓ, curve).
pub fn committed_curves() -> Vec<(f64, f64, f64, Curve)> {
    vec![
        (1.0, 1.0, 1.0, Curve::Path(PathSpec::new(CoverPoint::real(20.0)).ray_out(0.5))),
        (2.0, 5.0, 1.0, Curve::Path(PathSpec::new(CoverPoint::real(6.0)).ray_out(1.0 / 3.0))),
        (0.5, 1.0, 1.0, Curve::Path(PathSpec::new(CoverPoint::real(20.0)).ray_out(2.0 / 3.0))),
        (1.0, 1.0, 1.0, Curve::Path(PathSpec::new(CoverPoint::new(20.0, 0.2)).ray_out(0.5))),
        (1.0, 1.0, 1.0, Curve::FromOrigin { end: CoverPoint::real(3.0) }),
    ]
}

impl Criterion for FundamentalBound {
    fn id(&self) -> u32 {
        5
    }
    fn time_limit(&self) -> f64 {
        60.0
    }
    fn measure(&self) -> Result<(f64, f64, String)> {
        // measured/bound at the worst sample, and 1 as the threshold
        let mut worst = 0.0f64;
        let mut detail = String::new();
        for (i, (a, e, l, curve)) in committed_curves().into_iter().enumerate() {
            let p = OscillatorParams::real(a, e, l)?;
            let c = check::fundamental_check(&p, &curve, &GridOptions::default())?;
            if !c.strictly_admissible || c.beta < 0.0 {
                return Ok((f64::INFINITY, 1.0, format!("curve {i} is not strictly admissible")));
            }
            let mut r = 0.0f64;
            let mut max_meas = 0.0f64;
            // at β = 0 each sample bound is exp(ρ(t)) − 1
            for s in &c.samples {
                max_meas = max_meas.max(s.measured);
                if s.bound > 0.0 {
                    r = r.max(s.measured / s.bound);
                } else if s.measured > 0.0 {
                    r = f64::INFINITY;
                }
            }
            worst = worst.max(r);
            detail += &format!("curve {i}: max |z-1| {max_meas:.3e}, exp(rho)-1 {:.3e}; ", c.rho.exp_m1());
        }
        Ok((worst, 1.0, detail.trim_end_matches("; ").to_string()))
    }
}

impl Criterion for HbarScaling {
    fn id(&self) -> u32 {
        6
    }
    fn time_limit(&self) -> f64 {
        60.0
    }
    fn measure(&self) -> Result<(f64, f64, String)> {
        let mut worst = 0.0f64;
        let mut detail = String::new();
        for a in [1.0, 2.0] {
            let cd = model::critical_data_real(a, 0.5)?;
            let nu = 2.0 * cd.nu_star;
            let y_plus = roots::bisect(|y| y.powf(2.0 * a) + 1.0 / (y * y) - nu, cd.y_star, 10.0 * nu, 1e-14)?;
            let mut v = Vec::new();
            for hbar in [0.5, 0.25, 0.125] {
                let lam: f64 = 1.0 / hbar;
                let p = OscillatorParams::real(a, nu * lam.powf(2.0 * a / (a + 1.0)), lam - 0.5)?;
                let x0 = 2.0 * y_plus * lam.powf(1.0 / (a + 1.0));
                let curve = Curve::Path(PathSpec::new(CoverPoint::real(x0)).ray_out(1.0 / (a + 1.0)));
                v.push(error_functionals(&p, &curve)?.0 / hbar);
            }
            let s = spread(&v);
            worst = worst.max(s);
            detail += &format!("alpha={a}: rho/hbar = {v:.6?}; ");
        }
        Ok((worst, HBAR_SCALING_SPREAD, detail.trim_end_matches("; ").to_string()))
    }
}

impl Criterion for SpectralCriterion {
    fn id(&self) -> u32 {
        7
    }
    fn time_limit(&self) -> f64 {
        120.0
    }
    fn measure(&self) -> Result<(f64, f64, String)> {
        // report the worse of the two normalised margins
        let mut at_root = 0.0f64;
        let mut off_root = f64::INFINITY;
        for a in [1.0, 2.0] {
            let e = scan::exact_eigenvalues(a, 0.5, 5, &scan::ScanOptions::default())?;
            for (i, &en) in e.iter().enumerate() {
                let p = OscillatorParams::real(a, en, 0.5)?;
                at_root = at_root.max((spectral::r_zero(&p)? + 1.0).norm());
                if i + 1 < e.len() {
                    let q = OscillatorParams::real(a, 0.5 * (en + e[i + 1]), 0.5)?;
                    off_root = off_root.min((spectral::r_zero(&q)? + 1.0).norm());
                }
            }
        }
        let margin = (at_root / R_ZERO_AT_ROOT).max(R_ZERO_OFF_ROOT / off_root);
        Ok((margin, 1.0, format!("max |R0+1| at eigenvalues {at_root:.3e}, min at midpoints {off_root:.3e}")))
    }
}

impl Criterion for SemiclassicalAccuracy {
    fn id(&self) -> u32 {
        8
    }
    fn time_limit(&self) -> f64 {
        120.0
    }
    fn measure(&self) -> Result<(f64, f64, String)> {
        let ells = [5.0, 10.0, 20.0];
        let mut worst = 0.0f64;
        let mut detail = String::new();
        for a in [1.0, 2.0] {
            let mut dev = Vec::new();
            for ell in ells {
                let e = action::bohr_sommerfeld_energy(0, a, ell)?;
                let p = OscillatorParams::real(a, e, ell)?;
                let r = spectral::r_zero(&p)?;
                dev.push((r / spectral::semiclassical_r_zero(&p)? - 1.0).norm());
            }
            let hbar: Vec<f64> = ells.iter().map(|l| 1.0 / (l + 0.5)).collect();
            let c = dev[0] / hbar[0];
            for k in 1..ells.len() {
                worst = worst.max(dev[k] / (SEMICLASSICAL_SLACK * c * hbar[k] + SEMICLASSICAL_FLOOR));
            }
            detail += &format!("alpha={a}: C={c:.3e}, dev={}; ", dev.iter().map(|d| format!("{d:.3e}")).collect::<Vec<_>>().join(", "));
        }
        Ok((worst, 1.0, detail.trim_end_matches("; ").to_string()))
    }
}

/// Normalised remainders along a sequence approaching the limit; returns
/// max / first, which stays O(1) when the stated rate holds.
fn rate_growth(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(0.0, f64::max);
    max / values[0]
}

impl Criterion for JAsymptotics {
    fn id(&self) -> u32 {
        9
    }
    fn time_limit(&self) -> f64 {
        60.0
    }
    fn measure(&self) -> Result<(f64, f64, String)> {
        let mut worst = 0.0f64;
        let mut detail = String::new();
        // small u, one α per branch
        for a in [2.0, 0.5, 0.25] {
            let j0 = asymptotic::j1_leading(a);
            let mut q = Vec::new();
            for k in 0..6 {
                let u = 0.2 / 2f64.powi(k);
                let j = action::reduced_wkb_integral(JKind::J1, u, a)?;
                let rate = if a > 0.5 {
                    u * u
                } else if a == 0.5 {
                    u * u * u.ln().abs()
                } else {
                    u.powf(2.0 * a + 1.0)
                };
                q.push((j - j0 + 0.5 * u).abs() / rate);
            }
            let g = rate_growth(&q);
            worst = worst.max(g);
            detail += &format!("J1 alpha={a}: growth {g:.3}; ");
        }
        // ν ↓ ν_*
        for a in [2.0, 0.5] {
            let ns = model::critical_data_real(a, 0.5)?.nu_star;
            let slope = action::critical_slope(a);
            let mut q = Vec::new();
            for k in 0..6 {
                let d = 0.2 / 2f64.powi(k);
                let j = action::reduced_wkb_integral(JKind::J2, ns + d, a)?;
                q.push((j - slope * d).abs() / d.powf(1.5));
            }
            let g = rate_growth(&q);
            worst = worst.max(g);
            detail += &format!("J2 near nu* alpha={a}: growth {g:.3}; ");
        }
        // ν → ∞
        for a in [2.0, 0.5, 0.25] {
            let j0 = asymptotic::j1_leading(a);
            let mut q = Vec::new();
            for k in 0..6 {
                let nu = 20.0 * 2f64.powi(k);
                let j = action::reduced_wkb_integral(JKind::J2, nu, a)?;
                let rate = if a > 0.5 {
                    nu.powf(-(a + 1.0) / (2.0 * a))
                } else if a == 0.5 {
                    nu.powf(-1.5) * nu.ln()
                } else {
                    nu.powf(-(a + 1.0))
                };
                q.push((j - nu.powf((a + 1.0) / (2.0 * a)) * j0 + 0.5).abs() / rate);
            }
            let g = rate_growth(&q);
            worst = worst.max(g);
            detail += &format!("J2 large nu alpha={a}: growth {g:.3}; ");
        }
        Ok((worst, J_RATE_GROWTH, detail.trim_end_matches("; ").to_string()))
    }
}

/// Edge lists of the α = 1, ℓ = 1/2 complexes for E = 3, 2, 1.
pub const STOKES_ABOVE: [(&str, &str); 8] = [
    ("inf_-1/2", "t1"),
    ("inf_-3/2", "t3"),
    ("inf_1/2", "t1"),
    ("inf_3/2", "t3"),
    ("t0", "t1"),
    ("t0", "t2"),
    ("t0", "t2"),
    ("t2", "t3"),
];
pub const STOKES_CRITICAL: [(&str, &str); 6] = [
    ("inf_-1/2", "t0"),
    ("inf_-3/2", "t1"),
    ("inf_1/2", "t0"),
    ("inf_3/2", "t1"),
    ("t0", "t1"),
    ("t0", "t1"),
];
pub const STOKES_BELOW: [(&str, &str); 8] = [
    ("inf_-1/2", "t1"),
    ("inf_-3/2", "t0"),
    ("inf_1/2", "t2"),
    ("inf_3/2", "t3"),
    ("t0", "t1"),
    ("t0", "t3"),
    ("t1", "t2"),
    ("t2", "t3"),
];

impl Criterion for StokesRegression {
    fn id(&self) -> u32 {
        10
    }
    fn time_limit(&self) -> f64 {
        60.0
    }
    fn measure(&self) -> Result<(f64, f64, String)> {
        let cases: [(f64, &[(&str, &str)]); 3] = [(3.0, &STOKES_ABOVE), (2.0, &STOKES_CRITICAL), (1.0, &STOKES_BELOW)];
        let mut mismatches = 0usize;
        let mut detail = String::new();
        for (e, want) in cases {
            let p = OscillatorParams::real(1.0, e, 0.5)?;
            let got = stokes_complex(&p, &StokesOptions::plane())?.topology();
            let want: Vec<(String, String)> = want.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
            let ok = got == want;
            mismatches += (!ok) as usize;
            detail += &format!("E={e}: {} edges {}; ", got.len(), if ok { "match" } else { "differ" });
        }
        Ok((mismatches as f64, 0.0, detail.trim_end_matches("; ").to_string()))
    }
}

pub fn criteria() -> &'static Registry<dyn Criterion> {
    static REG: OnceLock<Registry<dyn Criterion>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r: Registry<dyn Criterion> = Registry::new();
        r.register(Box::new(ExactSpectrum));
        r.register(Box::new(BohrSommerfeldExact));
        r.register(Box::new(LargeNRate));
        r.register(Box::new(HarmonicRate));
        r.register(Box::new(FundamentalBound));
        r.register(Box::new(HbarScaling));
        r.register(Box::new(SpectralCriterion));
        r.register(Box::new(SemiclassicalAccuracy));
        r.register(Box::new(JAsymptotics));
        r.register(Box::new(StokesRegression));
        r
    })
}

/// Run every criterion in the profile, in id order.
pub fn run_profile(profile: Profile) -> Vec<CheckOutcome> {
    let reg = criteria();
    reg.names()
        .into_iter()
        .filter_map(|n| reg.get(n).ok())
        .filter(|c| profile == Profile::Full || c.in_quick_profile())
        .map(|c| c.run())
        .collect()
}

/// `PASS`/`FAIL` line for one outcome.
pub fn summary_line(o: &CheckOutcome) -> String {
    format!(
        "{} criterion {:>2} {}: measured {:.4e} vs bound {:.4e} in {:.2}s (limit {}s) | {}",
        if o.passed { "PASS" } else { "FAIL" },
        o.id,
        o.name,
        o.measured,
        o.bound,
        o.seconds,
        o.time_limit,
        o.detail
    )
}
