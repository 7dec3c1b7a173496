//! The planar domain `M` (outer circle minus circular holes), its boundary
//! circles `S_1, …, S_d`, connecting paths between anchors, and quadrature
//! meshes.
//!
//! Boundary circles are indexed from 1 with `S_1` the outer circle; hole `j`
//! in [`DomainM::holes`] (0-based) is `S_{j+2}`.

mod curve;
mod mesh;
mod path;

pub use curve::{Curve, CurveNode, CurveRule, Segment};
pub use mesh::{build_mesh, CurvedTriangle, QuadratureMesh, QuadratureSettings};
pub use path::connecting_path;

use crate::error::{Error, Result};

pub type Point2 = [f64; 2];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circle {
    pub center: Point2,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point2, radius: f64) -> Circle {
        Circle { center, radius }
    }

    pub fn rightmost(&self) -> Point2 {
        [self.center[0] + self.radius, self.center[1]]
    }

    /// Signed distance from the circle, positive outside.
    pub fn signed_distance(&self, p: Point2) -> f64 {
        dist(p, self.center) - self.radius
    }

    /// Radial projection onto the circle.
    pub fn project(&self, p: Point2) -> Point2 {
        let d = dist(p, self.center);
        let s = self.radius / d;
        [self.center[0] + s * (p[0] - self.center[0]), self.center[1] + s * (p[1] - self.center[1])]
    }
}

pub(crate) fn dist(a: Point2, b: Point2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Outer circle minus pairwise disjoint circular holes.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainM {
    outer: Circle,
    holes: Vec<Circle>,
    anchors: Vec<Point2>,
    paths: Vec<(usize, usize, Vec<Point2>)>,
}

const ANCHOR_TOL: f64 = 1e-12;

impl DomainM {
    /// Validates the geometry and places each anchor at the rightmost point
    /// of its circle.
    pub fn new(outer: Circle, holes: Vec<Circle>) -> Result<DomainM> {
        if !(outer.radius > 0.0) {
            return Err(Error::NonPositiveRadius(outer.radius));
        }
        for (j, h) in holes.iter().enumerate() {
            if !(h.radius > 0.0) {
                return Err(Error::NonPositiveRadius(h.radius));
            }
            if dist(h.center, outer.center) + h.radius >= outer.radius {
                return Err(Error::HoleOutsideOuter { hole: j + 2 });
            }
            for (l, g) in holes.iter().enumerate().take(j) {
                if dist(h.center, g.center) <= h.radius + g.radius {
                    return Err(Error::OverlappingHoles { a: l + 2, b: j + 2 });
                }
            }
        }
        let anchors = std::iter::once(outer.rightmost()).chain(holes.iter().map(Circle::rightmost)).collect();
        Ok(DomainM { outer, holes, anchors, paths: Vec::new() })
    }

    pub fn disk(radius: f64) -> Result<DomainM> {
        DomainM::new(Circle::new([0.0, 0.0], radius), vec![])
    }

    /// `{inner ≤ r ≤ outer}` centred at the origin.
    pub fn annulus(inner: f64, outer: f64) -> Result<DomainM> {
        DomainM::new(Circle::new([0.0, 0.0], outer), vec![Circle::new([0.0, 0.0], inner)])
    }

    /// Replace the default anchors; one point per boundary circle, in order.
    pub fn with_anchors(mut self, anchors: Vec<Point2>) -> Result<DomainM> {
        if anchors.len() != self.boundary_count() {
            return Err(Error::AnchorCount { expected: self.boundary_count(), found: anchors.len() });
        }
        for (i, a) in anchors.iter().enumerate() {
            let c = self.circle(i + 1)?;
            let distance = c.signed_distance(*a).abs();
            if distance > ANCHOR_TOL * c.radius {
                return Err(Error::AnchorOffCircle { circle: i + 1, distance });
            }
        }
        self.anchors = anchors;
        Ok(self)
    }

    /// Use the polyline `points` (from `x_i` to `x_k`) as `γ_ik` instead of
    /// the default construction.
    pub fn with_path(mut self, i: usize, k: usize, mut points: Vec<Point2>) -> Result<DomainM> {
        self.check_index(i)?;
        self.check_index(k)?;
        let (i, k) = if i > k {
            points.reverse();
            (k, i)
        } else {
            (i, k)
        };
        self.paths.retain(|(a, b, _)| (*a, *b) != (i, k));
        self.paths.push((i, k, points));
        connecting_path(&self, i, k)?;
        Ok(self)
    }

    pub(crate) fn path_override(&self, i: usize, k: usize) -> Option<&[Point2]> {
        self.paths.iter().find(|(a, b, _)| (*a, *b) == (i, k)).map(|(_, _, p)| p.as_slice())
    }

    pub fn outer(&self) -> &Circle {
        &self.outer
    }

    pub fn holes(&self) -> &[Circle] {
        &self.holes
    }

    /// `d`, the number of boundary circles.
    pub fn boundary_count(&self) -> usize {
        1 + self.holes.len()
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.boundary_count() {
            Err(Error::BoundaryIndex { index: i, count: self.boundary_count() })
        } else {
            Ok(())
        }
    }

    /// `S_i` for `i` in `1..=d`.
    pub fn circle(&self, i: usize) -> Result<&Circle> {
        self.check_index(i)?;
        Ok(if i == 1 { &self.outer } else { &self.holes[i - 2] })
    }

    /// The anchor `x_i ∈ S_i`.
    pub fn anchor(&self, i: usize) -> Result<Point2> {
        self.check_index(i)?;
        Ok(self.anchors[i - 1])
    }

    pub fn area(&self) -> f64 {
        let disk = |c: &Circle| std::f64::consts::PI * c.radius * c.radius;
        disk(&self.outer) - self.holes.iter().map(disk).sum::<f64>()
    }

    /// Distance to `∂M`, positive inside `M` and negative outside.
    pub fn clearance(&self, p: Point2) -> f64 {
        let mut c = -self.outer.signed_distance(p);
        for h in &self.holes {
            c = c.min(h.signed_distance(p));
        }
        c
    }

    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        self.clearance(p) >= -tol
    }

    /// Smallest gap between any two boundary circles.
    pub fn min_gap(&self) -> f64 {
        let mut gap = f64::INFINITY;
        for (j, h) in self.holes.iter().enumerate() {
            gap = gap.min(self.outer.radius - dist(h.center, self.outer.center) - h.radius);
            for g in &self.holes[..j] {
                gap = gap.min(dist(h.center, g.center) - h.radius - g.radius);
            }
        }
        gap
    }

    /// Whether all circles share the outer centre.
    pub fn is_concentric(&self) -> bool {
        self.holes.iter().all(|h| dist(h.center, self.outer.center) <= 1e-12 * self.outer.radius)
    }

    /// `n` deterministic points of the open domain (a Halton sequence in the
    /// bounding square, filtered).
    pub fn sample_interior(&self, n: usize) -> Vec<Point2> {
        let (c, r) = (self.outer.center, self.outer.radius);
        let mut out = Vec::with_capacity(n);
        let mut j = 1u64;
        while out.len() < n {
            let p = [c[0] + r * (2.0 * halton(j, 2) - 1.0), c[1] + r * (2.0 * halton(j, 3) - 1.0)];
            if self.clearance(p) > 1e-9 * r {
                out.push(p);
            }
            j += 1;
        }
        out
    }

    /// `n` equally spaced points on each boundary circle, grouped by circle.
    pub fn sample_boundary(&self, n: usize) -> Vec<(usize, Vec<Point2>)> {
        (1..=self.boundary_count())
            .map(|i| {
                let c = if i == 1 { &self.outer } else { &self.holes[i - 2] };
                let pts = (0..n)
                    .map(|j| {
                        let th = std::f64::consts::TAU * (j as f64 + 0.5) / n as f64;
                        [c.center[0] + c.radius * th.cos(), c.center[1] + c.radius * th.sin()]
                    })
                    .collect();
                (i, pts)
            })
            .collect()
    }

    /// `S_1, …, S_d` carrying the boundary orientation of `M`: the outer
    /// circle counterclockwise, holes clockwise. Each starts at its anchor.
    pub fn boundary_circles(&self) -> Vec<Curve> {
        (1..=self.boundary_count())
            .map(|i| {
                let c = if i == 1 { &self.outer } else { &self.holes[i - 2] };
                let a = self.anchors[i - 1];
                let start = (a[1] - c.center[1]).atan2(a[0] - c.center[0]);
                let sweep = if i == 1 { std::f64::consts::TAU } else { -std::f64::consts::TAU };
                Curve::closed(vec![Segment::Arc { center: c.center, radius: c.radius, start, sweep }])
            })
            .collect()
    }
}

/// Radical inverse of `j` in `base`.
pub fn halton(mut j: u64, base: u64) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while j > 0 {
        f /= base as f64;
        r += f * (j % base) as f64;
        j /= base;
    }
    r
}
