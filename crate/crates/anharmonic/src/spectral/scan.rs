//! Eigenvalue search by bracketing sign changes of the real determinant,
//! with Bohr-Sommerfeld and closed-form columns for comparison.

use super::{spectral_determinant_with, SpectralOptions};
use crate::action::{self, asymptotic, PhaseOptions};
use crate::error::{Error, Result};
use crate::model::{self, OscillatorParams};
use crate::registry::{Named, Registry};
use crate::roots;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub n: u32,
    pub e_exact: f64,
    pub e_bs: f64,
    pub e_asym: f64,
    pub rel_dev_bs: f64,
    pub rel_dev_asym: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    pub spectral: SpectralOptions,
    /// Initial grid step in units of the phase I (spacing 1 between levels).
    pub phase_step: f64,
    pub max_refinements: u32,
    pub root_rel_tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { spectral: SpectralOptions::default(), phase_step: 0.5, max_refinements: 3, root_rel_tol: 1e-13 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AsymptoticBranch {
    /// [K(4n+2ℓ+1)]^{2α/(α+1)} for large n at fixed ℓ.
    LargeN,
    /// Harmonic approximation at the bottom of the well for large ℓ.
    FixedNLargeEll,
}

pub fn asymptotic_spectrum(alpha: f64, ell: f64, n: u32, branch: AsymptoticBranch) -> f64 {
    match branch {
        AsymptoticBranch::LargeN => asymptotic::large_n_energy(alpha, ell, n as f64),
        AsymptoticBranch::FixedNLargeEll => asymptotic::fixed_n_large_ell_energy(alpha, ell, n as f64),
    }
}

/// The real, bounded determinant used for bracketing, with the matching
/// point pinned at x_* for the whole scan.
fn scan_function(alpha: f64, ell: f64, x_star: f64, opts: &SpectralOptions) -> impl Fn(f64) -> Result<f64> + Sync + '_ {
    move |e: f64| {
        let p = OscillatorParams::real(alpha, e, ell)?;
        let o = SpectralOptions { match_radius: Some(opts.match_radius.unwrap_or(x_star)), ..*opts };
        Ok(spectral_determinant_with(&p, &o)?.normalized.re)
    }
}

/// Roots E_0 < … < E_{n_max} of Q₊(·, ℓ).
pub fn exact_eigenvalues(alpha: f64, ell: f64, n_max: u32, opts: &ScanOptions) -> Result<Vec<f64>> {
    if !(ell > -0.5) {
        return Err(Error::domain("eigenvalue scan needs ell > -1/2"));
    }
    let cd = model::critical_data_real(alpha, ell)?;
    let po = PhaseOptions::default();
    let top_n = action::bohr_sommerfeld_energy(n_max, alpha, ell)?;
    let next = action::bohr_sommerfeld_energy(n_max + 1, alpha, ell)?;
    let e_top = top_n + 0.5 * (next - top_n);
    let q = scan_function(alpha, ell, cd.x_star, &opts.spectral);

    let mut step = opts.phase_step;
    let mut last_count = 0;
    for _ in 0..=opts.max_refinements {
        let mut grid = vec![cd.e_star * (1.0 + 1e-9)];
        while *grid.last().unwrap() < e_top {
            let e = *grid.last().unwrap();
            let d = action::phase_derivative(alpha, e, ell, &po)?;
            grid.push((e + step / d).min(e_top));
            if grid.len() > 1_000_000 {
                return Err(Error::no_convergence("scan grid too fine"));
            }
        }
        let values: Vec<f64> = grid.par_iter().map(|&e| q(e)).collect::<Result<_>>()?;
        let mut brackets = Vec::new();
        for i in 0..grid.len() - 1 {
            if values[i] == 0.0 {
                brackets.push((grid[i], grid[i], 0.0, 0.0));
            } else if values[i].signum() != values[i + 1].signum() && values[i + 1] != 0.0 {
                brackets.push((grid[i], grid[i + 1], values[i], values[i + 1]));
            }
        }
        last_count = brackets.len();
        if brackets.len() == n_max as usize + 1 {
            let tol = opts.root_rel_tol;
            return brackets
                .par_iter()
                .map(|&(a, b, fa, fb)| {
                    if a == b {
                        return Ok(a);
                    }
                    let mut err = None;
                    let r = roots::brent(
                        |e| match q(e) {
                            Ok(v) => v,
                            Err(x) => {
                                err = Some(x);
                                f64::NAN
                            }
                        },
                        a,
                        b,
                        fa,
                        fb,
                        tol * b,
                        tol,
                        200,
                    )?;
                    match err {
                        Some(x) => Err(x),
                        None => Ok(r),
                    }
                })
                .collect();
        }
        step *= 0.5;
    }
    Err(Error::MissedRoots(format!(
        "found {last_count} sign changes below E = {e_top}, expected {}",
        n_max + 1
    )))
}

pub fn eigenvalues(ell: f64, n_max: u32, alpha: f64) -> Result<Vec<SpectrumRecord>> {
    eigenvalues_with(ell, n_max, alpha, &ScanOptions::default())
}

pub fn eigenvalues_with(ell: f64, n_max: u32, alpha: f64, opts: &ScanOptions) -> Result<Vec<SpectrumRecord>> {
    let exact = exact_eigenvalues(alpha, ell, n_max, opts)?;
    exact
        .iter()
        .enumerate()
        .map(|(n, &e)| {
            let n = n as u32;
            let e_bs = action::bohr_sommerfeld_energy(n, alpha, ell)?;
            let e_asym = asymptotic_spectrum(alpha, ell, n, AsymptoticBranch::LargeN);
            Ok(SpectrumRecord {
                n,
                e_exact: e,
                e_bs,
                e_asym,
                rel_dev_bs: (e_bs / e - 1.0).abs(),
                rel_dev_asym: (e_asym / e - 1.0).abs(),
            })
        })
        .collect()
}

/// A way of producing the first n_max+1 levels.
pub trait SpectrumMethod: Named + Send + Sync {
    fn energies(&self, alpha: f64, ell: f64, n_max: u32) -> Result<Vec<f64>>;
}

struct Exact;
struct BohrSommerfeld;
struct Asymptotic;

impl Named for Exact {
    fn name(&self) -> &'static str {
        "exact"
    }
}
impl Named for BohrSommerfeld {
    fn name(&self) -> &'static str {
        "bs"
    }
}
impl Named for Asymptotic {
    fn name(&self) -> &'static str {
        "asym"
    }
}

impl SpectrumMethod for Exact {
    fn energies(&self, alpha: f64, ell: f64, n_max: u32) -> Result<Vec<f64>> {
        exact_eigenvalues(alpha, ell, n_max, &ScanOptions::default())
    }
}

impl SpectrumMethod for BohrSommerfeld {
    fn energies(&self, alpha: f64, ell: f64, n_max: u32) -> Result<Vec<f64>> {
        (0..=n_max).into_par_iter().map(|n| action::bohr_sommerfeld_energy(n, alpha, ell)).collect()
    }
}

impl SpectrumMethod for Asymptotic {
    fn energies(&self, alpha: f64, ell: f64, n_max: u32) -> Result<Vec<f64>> {
        Ok((0..=n_max).map(|n| asymptotic_spectrum(alpha, ell, n, AsymptoticBranch::LargeN)).collect())
    }
}

pub fn spectrum_methods() -> &'static Registry<dyn SpectrumMethod> {
    static REG: OnceLock<Registry<dyn SpectrumMethod>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r: Registry<dyn SpectrumMethod> = Registry::new();
        r.register(Box::new(Exact));
        r.register(Box::new(BohrSommerfeld));
        r.register(Box::new(Asymptotic));
        r
    })
}
