//! Direct check of the WKB error bound: integrate the ODE along the curve
//! from the normalisation point and compare ψ/Ψ^W with exp(ρ(t)(1+e^{−β})/2) − 1.

use super::{certified_bound, Curve, CurveGrid, GridOptions};
use crate::cover::CoverPoint;
use crate::error::Result;
use crate::integrate::{self, frobenius, SeedTag, SolutionState, StepOptions};
use crate::model::{self, OscillatorParams};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RatioSample {
    pub t: f64,
    pub x: Complex64,
    /// |ψ/Ψ^W − 1| from direct integration.
    pub measured: f64,
    /// exp(ρ(t)(1 + e^{−β})/2) − 1.
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FundamentalCheck {
    pub rho: f64,
    pub beta: f64,
    pub strictly_admissible: bool,
    pub samples: Vec<RatioSample>,
}

impl FundamentalCheck {
    pub fn holds(&self) -> bool {
        self.samples.iter().all(|s| s.measured <= s.bound)
    }

    /// Largest measured/bound over the samples with a nonzero bound.
    pub fn worst_ratio(&self) -> f64 {
        self.samples.iter().filter(|s| s.bound > 0.0).map(|s| s.measured / s.bound).fold(0.0, f64::max)
    }
}

/// Growth of Re S beyond which direct integration stops sampling.
pub const MEASURE_ACTION_CAP: f64 = 400.0;

pub fn fundamental_check(p: &OscillatorParams, curve: &Curve, grid_opts: &GridOptions) -> Result<FundamentalCheck> {
    let grid = CurveGrid::build(p, curve, grid_opts)?;
    let beta = grid.beta();
    let step = StepOptions::default();
    let stepper = integrate::steppers().get(integrate::DEFAULT_STEPPER)?;

    // starting state normalised like Ψ^W at t = 0
    let (first, mut state) = if curve.starts_at_origin() {
        let r0 = frobenius::default_seed_radius(p).min(0.25 * grid.x[1].modulus);
        let x0 = CoverPoint::new(r0, grid.x[1].arg);
        let (seed, _) = frobenius::frobenius_seed(p, &x0, 1e-15)?;
        let s = stepper.chord(p, &seed, &grid.x[1], &step, None)?;
        (1, s)
    } else {
        let x0 = grid.x[0];
        let (v, v1, _) = model::reduced_with_derivatives(p, &x0)?;
        let w = grid.sqrt_v[0] - v1 / (4.0 * v);
        (0, SolutionState::new(x0, Complex64::new(1.0, 0.0), w, SeedTag::Custom))
    };

    let mut samples = Vec::new();
    let start_action = grid.re_action[first];
    for k in first..grid.len() {
        if k > first {
            if grid.re_action[k] - start_action > MEASURE_ACTION_CAP {
                break;
            }
            state = stepper.chord(p, &state, &grid.x[k], &step, None)?;
        }
        let ratio = (state.log_psi() - grid.log_wkb[k]).exp();
        // log_psi is principal in its imaginary part; exp removes the ambiguity
        samples.push(RatioSample {
            t: grid.t[k],
            x: grid.x[k].to_complex(),
            measured: (ratio - 1.0).norm(),
            bound: certified_bound(grid.rho[k], beta),
        });
    }
    Ok(FundamentalCheck { rho: grid.rho_total(), beta, strictly_admissible: grid.strictly_increasing(), samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::PathSpec;

    #[test]
    fn origin_segment_below_bound() {
        let p = OscillatorParams::real(1.0, 1.0, 1.0).unwrap();
        let c = fundamental_check(&p, &Curve::FromOrigin { end: CoverPoint::real(3.0) }, &GridOptions::default()).unwrap();
        assert!(c.strictly_admissible);
        assert!(c.holds(), "worst {}", c.worst_ratio());
    }

    #[test]
    fn real_ray_below_bound() {
        let p = OscillatorParams::real(1.0, 1.0, 1.0).unwrap();
        let curve = Curve::Path(PathSpec::new(CoverPoint::real(20.0)).ray_out(0.5));
        let c = fundamental_check(&p, &curve, &GridOptions::default()).unwrap();
        assert!(c.holds(), "worst {}", c.worst_ratio());
        assert!(c.samples.len() > 10);
    }
}
