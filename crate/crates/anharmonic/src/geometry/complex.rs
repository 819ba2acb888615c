//! Stokes complex: vertical trajectories launched from every turning point
//! in the local fan directions and labelled by where they end.

use super::{action_from_turning_point, trace_with, Differential, Stops, Termination, Trajectory};
use crate::cover::{sqrt_near, CoverPoint};
use crate::error::Result;
use crate::model::{self, OscillatorParams};
use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexLabel {
    TurningPoint(usize),
    Origin,
    /// Infinity along (θ + kπ)/(α+1); for θ = π/2 this is ∞_{k+1/2}.
    Infinity(i64),
    Unresolved,
}

impl std::fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VertexLabel::TurningPoint(i) => write!(f, "t{i}"),
            VertexLabel::Origin => write!(f, "0"),
            VertexLabel::Infinity(k) => write!(f, "inf_{}/2", 2 * k + 1),
            VertexLabel::Unresolved => write!(f, "?"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Vertex {
    pub label: VertexLabel,
    pub location: Option<CoverPoint>,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Edge {
    pub from: VertexLabel,
    pub to: VertexLabel,
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone, Copy)]
pub struct StokesOptions {
    /// π/2 gives the Stokes complex proper.
    pub theta: f64,
    /// Turning points with argument in [lo, hi] launch edges.
    pub window: (f64, f64),
    /// Identify points modulo 2π; requires 2α to be an integer.
    pub plane: bool,
    pub launch_fraction: f64,
    pub exclusion_fraction: f64,
    pub max_steps: usize,
    /// Local error tolerance of the trajectory stepper.
    pub tol: f64,
}

impl StokesOptions {
    /// The whole plane, for potentials that are single valued there.
    pub fn plane() -> Self {
        StokesOptions { theta: PI / 2.0, window: (-PI, PI), plane: true, launch_fraction: 1e-2, exclusion_fraction: 1e-3, max_steps: 20_000, tol: 1e-11 }
    }

    pub fn cover(lo: f64, hi: f64) -> Self {
        StokesOptions { window: (lo, hi), plane: false, ..Self::plane() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StokesComplex {
    pub theta: f64,
    /// Turning points, ordered by argument then modulus.
    pub turning_points: Vec<Vertex>,
    pub edges: Vec<Edge>,
    /// Traces that ended without reaching a vertex.
    pub unresolved: Vec<Trajectory>,
}

impl StokesComplex {
    /// Edges as sorted label pairs, for comparison against fixtures.
    pub fn topology(&self) -> Vec<(String, String)> {
        let mut t: Vec<(String, String)> = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (e.from.to_string(), e.to.to_string());
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        t.sort();
        t
    }

    pub fn degree(&self, label: VertexLabel) -> usize {
        self.edges.iter().map(|e| (e.from == label) as usize + (e.to == label) as usize).sum()
    }

    /// Every turning point in the window has β+2 incident edges.
    pub fn fan_counts_hold(&self, window: (f64, f64)) -> bool {
        self.turning_points.iter().all(|v| {
            let inside = v.location.map(|x| x.arg >= window.0 && x.arg <= window.1).unwrap_or(false);
            !inside || self.degree(v.label) == v.multiplicity as usize + 2
        })
    }

    /// Vertex positions and label pairs, ready for serialisation.
    pub fn graph(&self) -> StokesGraph {
        let vertices = self
            .turning_points
            .iter()
            .map(|v| {
                let z = v.location.map(|x| x.to_complex()).unwrap_or_default();
                GraphVertex { label: v.label.to_string(), re: z.re, im: z.im, multiplicity: v.multiplicity }
            })
            .collect();
        StokesGraph { theta: self.theta, vertices, edges: self.topology(), unresolved: self.unresolved.len() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphVertex {
    pub label: String,
    pub re: f64,
    pub im: f64,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StokesGraph {
    pub theta: f64,
    pub vertices: Vec<GraphVertex>,
    pub edges: Vec<(String, String)>,
    pub unresolved: usize,
}

fn wrap(arg: f64) -> f64 {
    let mut a = arg.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

fn same_point(a: &CoverPoint, b: &CoverPoint, plane: bool) -> bool {
    let tol = 1e-7 * a.modulus.max(b.modulus);
    if plane {
        (a.to_complex() - b.to_complex()).norm() < tol
    } else {
        a.dist(b) < tol && (a.arg - b.arg).abs() < PI
    }
}

/// Zeros of V near the window, with multiplicities.
fn collect_turning_points(p: &OscillatorParams, opts: &StokesOptions) -> Result<Vec<(CoverPoint, u32)>> {
    let a = p.alpha;
    let sector = PI / (a + 1.0);
    let (lo, hi) = if opts.plane { (-PI, PI) } else { (opts.window.0 - sector, opts.window.1 + sector) };
    let k_lo = (lo / sector).floor() as i64 - 1;
    let k_hi = (hi / sector).ceil() as i64 + 1;
    let set = model::turning_points(p, k_lo..=k_hi)?;
    let mut raw: Vec<CoverPoint> = set.sector_points.iter().map(|s| s.location).collect();
    if let Some((xm, xp)) = set.real_pair {
        raw.push(CoverPoint::real(xm));
        raw.push(CoverPoint::real(xp));
    }
    let scale = 1.0 + p.energy.norm();
    let mut out: Vec<(CoverPoint, u32)> = Vec::new();
    for mut x in raw {
        if opts.plane {
            x.arg = wrap(x.arg);
        }
        if x.arg < lo - 1e-12 || x.arg > hi + 1e-12 {
            continue;
        }
        // a near-zero V' marks a double point; polish it as a critical point
        let (_, d1, _) = model::reduced_with_derivatives(p, &x)?;
        let mut mult = 1;
        if d1.norm() * x.modulus < 1e-5 * scale {
            for _ in 0..30 {
                let (_, d1, d2) = model::reduced_with_derivatives(p, &x)?;
                if d2.norm() == 0.0 {
                    break;
                }
                x = x.shift(-d1 / d2);
            }
            mult = 2;
        }
        if let Some(e) = out.iter_mut().find(|(y, _)| same_point(y, &x, opts.plane) || (mult == 2 && y.dist(&x) < 1e-4 * x.modulus)) {
            e.1 = e.1.max(mult);
            continue;
        }
        out.push((x, mult));
    }
    out.sort_by(|u, v| u.0.arg.partial_cmp(&v.0.arg).unwrap().then(u.0.modulus.partial_cmp(&v.0.modulus).unwrap()));
    Ok(out)
}

fn label_of(term: Termination, alpha: f64, theta: f64, plane: bool) -> VertexLabel {
    match term {
        Termination::NearTurningPoint(j) => VertexLabel::TurningPoint(j),
        Termination::HitRadiusMin | Termination::SpiralIntoOrigin => VertexLabel::Origin,
        Termination::EnteredSector(k) => {
            if plane {
                let dir = wrap((theta + k as f64 * PI) / (alpha + 1.0));
                VertexLabel::Infinity((((alpha + 1.0) * dir - theta) / PI).round() as i64)
            } else {
                VertexLabel::Infinity(k)
            }
        }
        _ => VertexLabel::Unresolved,
    }
}

/// Build the complex of θ-trajectories from the turning points in
/// `opts.window`; θ = π/2 is the Stokes complex.
pub fn stokes_complex(p: &OscillatorParams, opts: &StokesOptions) -> Result<StokesComplex> {
    let theta = opts.theta;
    let tps = collect_turning_points(p, opts)?;
    let n = tps.len();
    let spacing: Vec<f64> = (0..n)
        .map(|i| {
            let mut s = tps[i].0.modulus;
            for j in 0..n {
                if j != i {
                    let d = if opts.plane { (tps[i].0.to_complex() - tps[j].0.to_complex()).norm() } else { tps[i].0.dist(&tps[j].0) };
                    s = s.min(d);
                }
            }
            s
        })
        .collect();
    let r_out = tps.iter().map(|t| 10.0 * t.0.modulus).fold(50.0, f64::max);
    let r_in = 1e-4 * tps.iter().map(|t| t.0.modulus).fold(f64::INFINITY, f64::min).min(1.0);
    let base = Stops {
        r_max: r_out,
        r_min: r_in,
        turning_points: tps.iter().map(|t| t.0).collect(),
        exclusion: spacing.iter().map(|s| opts.exclusion_fraction * s).collect(),
        plane: opts.plane,
        max_steps: opts.max_steps,
        tol: opts.tol,
        ..Stops::default()
    };

    let mut launches = Vec::new();
    for (i, &(t, beta)) in tps.iter().enumerate() {
        if t.arg < opts.window.0 || t.arg > opts.window.1 {
            continue;
        }
        for k in 0..beta + 2 {
            launches.push((i, k));
        }
    }

    let traces: Vec<Result<(usize, Trajectory)>> = launches
        .par_iter()
        .map(|&(i, k)| {
            let (t, beta) = tps[i];
            let (_, d1, d2) = model::reduced_with_derivatives(p, &t)?;
            let c = if beta == 1 { d1 } else { 0.5 * d2 };
            let b = beta as f64;
            let phi = 2.0 * (theta - 0.5 * c.arg() + k as f64 * PI) / (b + 2.0);
            let eps = opts.launch_fraction * spacing[i];
            let step = C::from_polar(eps, phi);
            let mut x = t.shift(step);
            // project the launch point onto the level set through t
            let mut sv = sqrt_near(model::eval_reduced(p, &x)?, (c * step.powf(b)).sqrt());
            for _ in 0..4 {
                let ds = action_from_turning_point(p, &t, &x, sv);
                let f = (C::from_polar(1.0, -theta) * ds).im;
                let dx = -f * C::i() * C::from_polar(1.0, theta) / sv;
                if !(dx.norm() < 0.1 * eps) {
                    break;
                }
                x = x.shift(dx);
                sv = sqrt_near(model::eval_reduced(p, &x)?, sv);
            }
            // trace away from t; the tracer starts on the principal root
            let vel = C::from_polar(1.0, theta) / model::eval_reduced(p, &x)?.sqrt();
            let away = (x.to_complex() - t.to_complex()) * vel.conj();
            let dir = if away.re >= 0.0 { 1.0 } else { -1.0 };
            let stops = Stops { source: Some((i, 2.0 * eps)), ..base.clone() };
            let q: &dyn Differential = p;
            Ok((i, trace_with(q, x, theta, dir, &stops)?))
        })
        .collect();

    let mut edges: Vec<Edge> = Vec::new();
    let mut unresolved = Vec::new();
    for r in traces {
        let (i, tr) = r?;
        let from = VertexLabel::TurningPoint(i);
        let to = label_of(tr.termination, p.alpha, theta, opts.plane);
        if to == VertexLabel::Unresolved {
            unresolved.push(tr);
            continue;
        }
        let mid = tr.points[tr.points.len() / 2];
        let duplicate = edges.iter().any(|e| {
            e.from == to
                && e.to == from
                && e.trajectory.points.iter().any(|q| {
                    let close = (q.to_complex() - mid.to_complex()).norm() < 0.05 * mid.modulus;
                    close && (opts.plane || (q.arg - mid.arg).abs() < PI)
                })
        });
        if !duplicate {
            edges.push(Edge { from, to, trajectory: tr });
        }
    }
    let turning_points = tps
        .iter()
        .enumerate()
        .map(|(i, &(t, m))| Vertex { label: VertexLabel::TurningPoint(i), location: Some(t), multiplicity: m })
        .collect();
    Ok(StokesComplex { theta, turning_points, edges, unresolved })
}
