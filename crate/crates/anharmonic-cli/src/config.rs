//! Flags shared by every subcommand and their validation.

use clap::{Args, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Relative tolerance for root finding and quadrature.
    #[arg(long, default_value_t = 1e-13)]
    pub rel_tol: f64,
    /// Absolute tolerance for quadrature.
    #[arg(long, default_value_t = 1e-14)]
    pub abs_tol: f64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

/// Tolerances as recorded in output files.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    pub rel_tol: f64,
    pub abs_tol: f64,
}

/// A rejected argument combination, reported with exit code 64.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl Common {
    pub fn validate(&self) -> Result<Tolerances, UsageError> {
        for (name, v) in [("--rel-tol", self.rel_tol), ("--abs-tol", self.abs_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(UsageError(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Tolerances { rel_tol: self.rel_tol, abs_tol: self.abs_tol })
    }
}

pub fn positive(name: &str, v: f64) -> Result<(), UsageError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(UsageError(format!("{name} must be positive, got {v}")))
    }
}

pub fn ell_in_range(ell: f64) -> Result<(), UsageError> {
    if ell > -0.5 && ell.is_finite() {
        Ok(())
    } else {
        Err(UsageError(format!("--ell must exceed -1/2, got {ell}")))
    }
}
