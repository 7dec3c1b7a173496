use std::f64::consts::PI;

use super::{dist, Point2};
use crate::quadrature::gauss_legendre;

const JOIN_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Segment {
    Line { from: Point2, to: Point2 },
    /// Arc of `radius` about `center` from angle `start` through `sweep`
    /// radians (positive is counterclockwise).
    Arc { center: Point2, radius: f64, start: f64, sweep: f64 },
}

impl Segment {
    /// Position at local parameter `s ∈ [0, 1]`.
    pub fn point(&self, s: f64) -> Point2 {
        match *self {
            Segment::Line { from, to } => [from[0] + s * (to[0] - from[0]), from[1] + s * (to[1] - from[1])],
            Segment::Arc { center, radius, start, sweep } => {
                let th = start + s * sweep;
                [center[0] + radius * th.cos(), center[1] + radius * th.sin()]
            }
        }
    }

    /// Derivative of [`Segment::point`] with respect to `s`.
    pub fn velocity(&self, s: f64) -> Point2 {
        match *self {
            Segment::Line { from, to } => [to[0] - from[0], to[1] - from[1]],
            Segment::Arc { radius, start, sweep, .. } => {
                let th = start + s * sweep;
                [-radius * sweep * th.sin(), radius * sweep * th.cos()]
            }
        }
    }

    pub fn start(&self) -> Point2 {
        self.point(0.0)
    }

    pub fn end(&self) -> Point2 {
        self.point(1.0)
    }

    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => dist(from, to),
            Segment::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    pub fn reversed(&self) -> Segment {
        match *self {
            Segment::Line { from, to } => Segment::Line { from: to, to: from },
            Segment::Arc { center, radius, start, sweep } => {
                Segment::Arc { center, radius, start: start + sweep, sweep: -sweep }
            }
        }
    }

    /// `∫ (x dy − y dx) / 2` along the segment, in closed form.
    fn signed_area(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => 0.5 * (from[0] * to[1] - to[0] * from[1]),
            Segment::Arc { center, radius, start, sweep } => {
                let end = start + sweep;
                0.5 * (radius * center[0] * (end.sin() - start.sin()) - radius * center[1] * (end.cos() - start.cos())
                    + radius * radius * sweep)
            }
        }
    }
}

/// Quadrature node on a curve: `∫_γ a ≈ Σ weight · a(point)·tangent`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveNode {
    pub point: Point2,
    pub tangent: Point2,
    pub weight: f64,
}

/// Composite Gauss–Legendre rule: each segment is split into `pieces`
/// panels (arcs into `pieces` per quarter turn) with `order` nodes each.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CurveRule {
    pub order: usize,
    pub pieces: usize,
}

impl Default for CurveRule {
    fn default() -> Self {
        CurveRule { order: 10, pieces: 4 }
    }
}

/// Piecewise line/arc curve, oriented by segment order.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    segments: Vec<Segment>,
    closed: bool,
}

impl Curve {
    /// Open curve. Panics if consecutive segments do not share endpoints.
    pub fn open(segments: Vec<Segment>) -> Curve {
        Curve::checked(segments, false)
    }

    /// Closed curve; the last segment must end where the first starts.
    pub fn closed(segments: Vec<Segment>) -> Curve {
        Curve::checked(segments, true)
    }

    fn checked(segments: Vec<Segment>, closed: bool) -> Curve {
        assert!(!segments.is_empty(), "curve needs at least one segment");
        for w in segments.windows(2) {
            assert!(dist(w[0].end(), w[1].start()) <= JOIN_TOL, "segments do not join");
        }
        if closed {
            let (a, b) = (segments[segments.len() - 1].end(), segments[0].start());
            assert!(dist(a, b) <= JOIN_TOL, "closed curve does not close");
        }
        Curve { segments, closed }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn start(&self) -> Point2 {
        self.segments[0].start()
    }

    pub fn end(&self) -> Point2 {
        self.segments[self.segments.len() - 1].end()
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    /// Same trace, opposite orientation.
    pub fn reversed(&self) -> Curve {
        Curve { segments: self.segments.iter().rev().map(Segment::reversed).collect(), closed: self.closed }
    }

    /// Point at arclength fraction `s ∈ [0, 1]`.
    pub fn point_at(&self, s: f64) -> Point2 {
        let total = self.length();
        let mut remaining = s.clamp(0.0, 1.0) * total;
        for seg in &self.segments {
            let len = seg.length();
            if remaining <= len {
                return seg.point(if len > 0.0 { remaining / len } else { 0.0 });
            }
            remaining -= len;
        }
        self.end()
    }

    /// `n` points at equally spaced arclength fractions including both ends.
    pub fn sample(&self, n: usize) -> Vec<Point2> {
        let n = n.max(2);
        (0..n).map(|i| self.point_at(i as f64 / (n - 1) as f64)).collect()
    }

    /// `∮ (x dy − y dx) / 2`; the enclosed area with sign for closed curves.
    pub fn signed_area(&self) -> f64 {
        self.segments.iter().map(Segment::signed_area).sum()
    }

    pub fn nodes(&self, rule: CurveRule) -> Vec<CurveNode> {
        let (gx, gw) = gauss_legendre(rule.order);
        let mut out = Vec::new();
        for seg in &self.segments {
            let panels = match seg {
                Segment::Line { .. } => rule.pieces,
                Segment::Arc { sweep, .. } => rule.pieces * ((sweep.abs() / (0.5 * PI)).ceil() as usize).max(1),
            };
            let h = 1.0 / panels as f64;
            for p in 0..panels {
                for (x, w) in gx.iter().zip(&gw) {
                    let s = (p as f64 + x) * h;
                    out.push(CurveNode { point: seg.point(s), tangent: seg.velocity(s), weight: w * h });
                }
            }
        }
        out
    }
}
