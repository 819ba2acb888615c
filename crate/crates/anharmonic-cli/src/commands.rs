//! Subcommands and their dispatch.

use crate::config::{ell_in_range, positive, Common, Format, Tolerances, UsageError};
use crate::output::{emit, fmt_csv_float, to_csv, to_json, Document};
use anharmonic::action::{self, BsOptions, JKind, PhaseOptions};
use anharmonic::geometry::{stokes_complex, StokesOptions};
use anharmonic::spectral::scan::{asymptotic_spectrum, exact_eigenvalues, AsymptoticBranch, ScanOptions, SpectrumRecord};
use anharmonic::verify::{run_profile, summary_line, CheckOutcome, Profile};
use anharmonic::{Error, OscillatorParams};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::f64::consts::PI;

pub const EXIT_OK: u8 = 0;
pub const EXIT_NUMERICAL: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(name = "anharmonic", version, about = "Spectra, WKB integrals and Stokes geometry of x^{2α} + ℓ(ℓ+1)/x² oscillators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues by direct integration, Bohr-Sommerfeld or closed form.
    Spectrum(SpectrumArgs),
    /// The phase integral I(E, ℓ) or its reduced forms J1, J2.
    Wkb(WkbArgs),
    /// Stokes graph (JSON) or edge polylines (CSV).
    Stokes(StokesArgs),
    /// Run the acceptance checks and write a report.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Bs,
    Asym,
    All,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub ell: f64,
    #[arg(long)]
    pub n_max: u32,
    #[arg(long, value_enum, default_value_t = Method::All)]
    pub method: Method,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Kind {
    #[value(name = "I")]
    I,
    #[value(name = "J1")]
    J1,
    #[value(name = "J2")]
    J2,
}

#[derive(Debug, Args)]
pub struct WkbArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, value_enum, ignore_case = true)]
    pub kind: Kind,
    #[arg(long, allow_hyphen_values = true)]
    pub energy: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub ell: Option<f64>,
    #[arg(long)]
    pub u: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct StokesArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub ell: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub energy: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = PI / 2.0)]
    pub theta: f64,
    /// Work on the universal cover, launching from turning points with
    /// argument in [lo, hi]. Without it the plane is used (2α an integer).
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
    pub window: Option<Vec<f64>>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileArg {
    Quick,
    Full,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = ProfileArg::Quick)]
    pub profile: ProfileArg,
    #[command(flatten)]
    pub common: Common,
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Unknown(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Numerical(format!("write failed: {e}"))
    }
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Spectrum(a) => spectrum(&a),
        Command::Wkb(a) => wkb(&a),
        Command::Stokes(a) => stokes(&a),
        Command::Verify(a) => verify(&a),
    }
}

#[derive(Serialize)]
struct SpectrumParams {
    alpha: f64,
    ell: f64,
    n_max: u32,
    method: Method,
    #[serde(flatten)]
    tolerances: Tolerances,
}

pub fn spectrum(a: &SpectrumArgs) -> Result<(), Failure> {
    let tol = a.common.validate()?;
    positive("--alpha", a.alpha)?;
    ell_in_range(a.ell)?;
    let scan = ScanOptions { root_rel_tol: tol.rel_tol, ..ScanOptions::default() };
    let bs = BsOptions { phase: PhaseOptions { abs_tol: tol.abs_tol, rel_tol: tol.rel_tol, ..PhaseOptions::default() }, ..BsOptions::default() };
    let bs_column = || -> Result<Vec<f64>, Error> {
        (0..=a.n_max).map(|n| action::bohr_sommerfeld_energy_with(n, a.alpha, a.ell, &bs)).collect()
    };
    let asym_column = || -> Vec<f64> { (0..=a.n_max).map(|n| asymptotic_spectrum(a.alpha, a.ell, n, AsymptoticBranch::LargeN)).collect() };

    let params = SpectrumParams { alpha: a.alpha, ell: a.ell, n_max: a.n_max, method: a.method, tolerances: tol };
    let text = if a.method == Method::All {
        let exact = exact_eigenvalues(a.alpha, a.ell, a.n_max, &scan)?;
        let (e_bs, e_asym) = (bs_column()?, asym_column());
        let rows: Vec<SpectrumRecord> = (0..exact.len())
            .map(|n| SpectrumRecord {
                n: n as u32,
                e_exact: exact[n],
                e_bs: e_bs[n],
                e_asym: e_asym[n],
                rel_dev_bs: (e_bs[n] / exact[n] - 1.0).abs(),
                rel_dev_asym: (e_asym[n] / exact[n] - 1.0).abs(),
            })
            .collect();
        match a.common.format {
            Format::Json => to_json(&Document::new("spectrum", params, rows)),
            Format::Csv => {
                let cells = rows
                    .iter()
                    .map(|r| {
                        let mut v = vec![r.n.to_string()];
                        v.extend([r.e_exact, r.e_bs, r.e_asym, r.rel_dev_bs, r.rel_dev_asym].map(fmt_csv_float));
                        v
                    })
                    .collect::<Vec<_>>();
                to_csv(&["n", "e_exact", "e_bs", "e_asym", "rel_dev_bs", "rel_dev_asym"], &cells)
            }
        }
    } else {
        let (column, values) = match a.method {
            Method::Exact => ("e_exact", exact_eigenvalues(a.alpha, a.ell, a.n_max, &scan)?),
            Method::Bs => ("e_bs", bs_column()?),
            _ => ("e_asym", asym_column()),
        };
        match a.common.format {
            Format::Json => {
                let rows: Vec<serde_json::Value> =
                    values.iter().enumerate().map(|(n, e)| serde_json::json!({ "n": n, column: e })).collect();
                to_json(&Document::new("spectrum", params, rows))
            }
            Format::Csv => {
                let cells: Vec<Vec<String>> = values.iter().enumerate().map(|(n, &e)| vec![n.to_string(), fmt_csv_float(e)]).collect();
                to_csv(&["n", column], &cells)
            }
        }
    };
    emit(&text, a.common.out.as_deref())?;
    Ok(())
}

#[derive(Serialize)]
struct WkbParams {
    alpha: f64,
    kind: Kind,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ell: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nu: Option<f64>,
    #[serde(flatten)]
    tolerances: Tolerances,
}

fn required(v: Option<f64>, flag: &str, kind: &str) -> Result<f64, UsageError> {
    v.ok_or_else(|| UsageError(format!("--kind {kind} needs {flag}")))
}

pub fn wkb(a: &WkbArgs) -> Result<(), Failure> {
    let tol = a.common.validate()?;
    positive("--alpha", a.alpha)?;
    let opts = PhaseOptions { abs_tol: tol.abs_tol, rel_tol: tol.rel_tol, ..PhaseOptions::default() };
    let value = match a.kind {
        Kind::I => {
            let e = required(a.energy, "--energy", "I")?;
            let ell = required(a.ell, "--ell", "I")?;
            ell_in_range(ell)?;
            action::phase(a.alpha, e, ell, &opts)?
        }
        Kind::J1 => action::reduced_wkb_integral_with(JKind::J1, required(a.u, "--u", "J1")?, a.alpha, &opts)?,
        Kind::J2 => action::reduced_wkb_integral_with(JKind::J2, required(a.nu, "--nu", "J2")?, a.alpha, &opts)?,
    };
    let params = WkbParams { alpha: a.alpha, kind: a.kind, energy: a.energy, ell: a.ell, u: a.u, nu: a.nu, tolerances: tol };
    let text = match a.common.format {
        Format::Json => to_json(&Document::new("wkb", params, serde_json::json!({ "value": value }))),
        Format::Csv => to_csv(&["value"], &[vec![fmt_csv_float(value)]]),
    };
    emit(&text, a.common.out.as_deref())?;
    Ok(())
}

#[derive(Serialize)]
struct StokesParams {
    alpha: f64,
    ell: f64,
    energy: f64,
    theta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    window: Option<(f64, f64)>,
    #[serde(flatten)]
    tolerances: Tolerances,
}

pub fn stokes(a: &StokesArgs) -> Result<(), Failure> {
    let tol = a.common.validate()?;
    positive("--alpha", a.alpha)?;
    ell_in_range(a.ell)?;
    let window = a.window.as_ref().map(|w| (w[0], w[1]));
    let mut opts = match window {
        Some((lo, hi)) if lo < hi => StokesOptions::cover(lo, hi),
        Some(_) => return Err(Failure::Usage("--window needs LO < HI".into())),
        None => {
            if (2.0 * a.alpha).fract() != 0.0 {
                return Err(Failure::Usage("plane mode needs 2α to be an integer; pass --window".into()));
            }
            StokesOptions::plane()
        }
    };
    opts.theta = a.theta;
    opts.tol = tol.rel_tol.max(1e-14);
    let p = OscillatorParams::real(a.alpha, a.energy, a.ell)?;
    let complex = stokes_complex(&p, &opts)?;
    let params = StokesParams { alpha: a.alpha, ell: a.ell, energy: a.energy, theta: a.theta, window, tolerances: tol };
    let text = match a.common.format {
        Format::Json => to_json(&Document::new("stokes", params, complex.graph())),
        Format::Csv => {
            let mut rows = Vec::new();
            for (i, e) in complex.edges.iter().enumerate() {
                for x in &e.trajectory.points {
                    let z = x.to_complex();
                    let sheet = (x.arg / (2.0 * PI)).round() as i64;
                    rows.push(vec![
                        i.to_string(),
                        e.from.to_string(),
                        e.to.to_string(),
                        fmt_csv_float(z.re),
                        fmt_csv_float(z.im),
                        sheet.to_string(),
                    ]);
                }
            }
            to_csv(&["edge", "from", "to", "re", "im", "sheet"], &rows)
        }
    };
    emit(&text, a.common.out.as_deref())?;
    Ok(())
}

#[derive(Serialize)]
struct VerifyParams {
    profile: ProfileArg,
}

#[derive(Serialize)]
struct VerifyReport {
    passed: bool,
    checks: Vec<CheckOutcome>,
}

pub fn verify(a: &VerifyArgs) -> Result<(), Failure> {
    a.common.validate()?;
    let profile = match a.profile {
        ProfileArg::Quick => Profile::Quick,
        ProfileArg::Full => Profile::Full,
    };
    let checks = run_profile(profile);
    for c in &checks {
        eprintln!("{}", summary_line(c));
    }
    let passed = checks.iter().all(|c| c.passed);
    let failed = checks.iter().filter(|c| !c.passed).count();
    let text = match a.common.format {
        Format::Json => to_json(&Document::new("verify", VerifyParams { profile: a.profile }, VerifyReport { passed, checks })),
        Format::Csv => {
            let rows: Vec<Vec<String>> = checks
                .iter()
                .map(|c| {
                    vec![
                        c.id.to_string(),
                        c.name.clone(),
                        fmt_csv_float(c.measured),
                        fmt_csv_float(c.bound),
                        fmt_csv_float(c.seconds),
                        c.passed.to_string(),
                    ]
                })
                .collect();
            to_csv(&["id", "name", "measured", "bound", "seconds", "passed"], &rows)
        }
    };
    emit(&text, a.common.out.as_deref())?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Numerical(format!("{failed} check(s) failed")))
    }
}
