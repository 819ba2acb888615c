//! Oriented piecewise-smooth curves on the universal cover.

use crate::cover::CoverPoint;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Segment {
    /// Straight segment to a point; the sheet follows by continuity.
    Line { to: Complex64 },
    /// Arc about the origin at the current radius, ending at argument `to_arg`.
    OriginArc { to_arg: f64 },
    /// Arc about `center` (typically a turning point) sweeping `sweep` radians.
    /// The radius must stay below half of `|center|`.
    Arc { center: Complex64, sweep: f64 },
    /// Ray out to infinity along the current argument,
    /// x(t) = x_start (1 − t)^{−power} for t in [0, 1).
    RayToInfinity { power: f64 },
}

/// Which root of V the path starts on: `sign · principal √V` at node `node`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchAnchor {
    pub node: usize,
    pub sign: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    pub start: CoverPoint,
    pub segments: Vec<Segment>,
    pub branch: BranchAnchor,
}

impl PathSpec {
    pub fn new(start: CoverPoint) -> Self {
        PathSpec { start, segments: Vec::new(), branch: BranchAnchor { node: 0, sign: 1.0 } }
    }

    pub fn line_to(mut self, to: Complex64) -> Self {
        self.segments.push(Segment::Line { to });
        self
    }

    pub fn arc_to(mut self, to_arg: f64) -> Self {
        self.segments.push(Segment::OriginArc { to_arg });
        self
    }

    pub fn arc_about(mut self, center: Complex64, sweep: f64) -> Self {
        self.segments.push(Segment::Arc { center, sweep });
        self
    }

    pub fn ray_out(mut self, power: f64) -> Self {
        self.segments.push(Segment::RayToInfinity { power });
        self
    }

    pub fn with_branch(mut self, node: usize, sign: f64) -> Self {
        self.branch = BranchAnchor { node, sign: if sign < 0.0 { -1.0 } else { 1.0 } };
        self
    }

    /// Straight line between two cover points.
    pub fn segment(a: CoverPoint, b: CoverPoint) -> Self {
        PathSpec::new(a).line_to(b.to_complex())
    }

    /// Piecewise-linear path through the given points.
    pub fn polyline(points: &[CoverPoint]) -> Self {
        let mut p = PathSpec::new(points[0]);
        for q in &points[1..] {
            p.segments.push(Segment::Line { to: q.to_complex() });
        }
        p
    }

    /// Start point of every segment plus the final end point.
    pub fn nodes(&self) -> Vec<CoverPoint> {
        let mut out = vec![self.start];
        let mut cur = self.start;
        for s in &self.segments {
            cur = s.point(&cur, 1.0).0;
            out.push(cur);
        }
        out
    }

    pub fn end(&self) -> CoverPoint {
        *self.nodes().last().unwrap()
    }

    pub fn is_finite(&self) -> bool {
        !self.segments.iter().any(|s| matches!(s, Segment::RayToInfinity { .. }))
    }

    /// Consecutive nodes distinct and arcs clear of the origin.
    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::domain("path has no segments"));
        }
        if !(self.start.modulus > 0.0) {
            return Err(Error::domain("path starts at the origin"));
        }
        let mut cur = self.start;
        for (i, s) in self.segments.iter().enumerate() {
            match s {
                Segment::Line { to } => {
                    let z0 = cur.to_complex();
                    if (*to - z0).norm() == 0.0 {
                        return Err(Error::domain(format!("segment {i} has zero length")));
                    }
                    // distance from origin to the chord
                    let d = *to - z0;
                    let t = (-(z0.conj() * d).re / d.norm_sqr()).clamp(0.0, 1.0);
                    if (z0 + d * t).norm() == 0.0 {
                        return Err(Error::domain(format!("segment {i} passes through the origin")));
                    }
                }
                Segment::OriginArc { to_arg } => {
                    if *to_arg == cur.arg {
                        return Err(Error::domain(format!("arc {i} has zero sweep")));
                    }
                }
                Segment::Arc { center, sweep } => {
                    let r = (cur.to_complex() - center).norm();
                    if *sweep == 0.0 || r == 0.0 || r >= 0.5 * center.norm() {
                        return Err(Error::domain(format!("arc {i} is degenerate or too wide")));
                    }
                }
                Segment::RayToInfinity { power } => {
                    if i + 1 != self.segments.len() || !(*power > 0.0) {
                        return Err(Error::domain("a ray to infinity must be the last segment"));
                    }
                }
            }
            cur = s.point(&cur, 1.0).0;
        }
        Ok(())
    }

    /// Split into straight chords: arcs become chords of at most `max_angle`.
    /// Returns `None` if the path runs to infinity.
    pub fn chords(&self, max_angle: f64) -> Option<Vec<CoverPoint>> {
        let mut out = vec![self.start];
        let mut cur = self.start;
        for s in &self.segments {
            match s {
                Segment::Line { .. } => {
                    cur = s.point(&cur, 1.0).0;
                    out.push(cur);
                }
                Segment::OriginArc { to_arg } => {
                    let n = ((to_arg - cur.arg).abs() / max_angle).ceil().max(1.0) as usize;
                    let a0 = cur.arg;
                    for j in 1..=n {
                        out.push(CoverPoint::new(cur.modulus, a0 + (to_arg - a0) * j as f64 / n as f64));
                    }
                    cur = *out.last().unwrap();
                }
                Segment::Arc { sweep, .. } => {
                    let n = (sweep.abs() / max_angle).ceil().max(1.0) as usize;
                    let base = cur;
                    for j in 1..=n {
                        out.push(s.point(&base, j as f64 / n as f64).0);
                    }
                    cur = *out.last().unwrap();
                }
                Segment::RayToInfinity { .. } => return None,
            }
        }
        Some(out)
    }

    /// Reverse orientation (finite paths only). Arcs become chords.
    pub fn reversed(&self) -> Option<PathSpec> {
        let mut pts = self.chords(PI / 64.0)?;
        if self.segments.iter().all(|s| matches!(s, Segment::Line { .. })) {
            pts = self.nodes();
        }
        pts.reverse();
        let mut p = PathSpec::polyline(&pts);
        p.branch = self.branch;
        p.branch.node = 0;
        Some(p)
    }
}

impl Segment {
    /// Position and velocity at local parameter `t ∈ [0, 1]`.
    pub fn point(&self, start: &CoverPoint, t: f64) -> (CoverPoint, Complex64) {
        match self {
            Segment::Line { to } => {
                let d = *to - start.to_complex();
                (start.shift(d * t), d)
            }
            Segment::OriginArc { to_arg } => {
                let sweep = to_arg - start.arg;
                let x = CoverPoint::new(start.modulus, start.arg + sweep * t);
                (x, Complex64::new(0.0, sweep) * x.to_complex())
            }
            Segment::Arc { center, sweep } => {
                let z0 = start.to_complex();
                let rel = z0 - center;
                let w = rel * Complex64::from_polar(1.0, sweep * t);
                let x = start.shift(center + w - z0);
                (x, Complex64::new(0.0, *sweep) * w)
            }
            Segment::RayToInfinity { power } => {
                let s = (1.0 - t).powf(-power);
                let x = start.scale(s);
                (x, start.to_complex() * (power * s / (1.0 - t)))
            }
        }
    }
}
