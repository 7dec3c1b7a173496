use std::f64::consts::{PI, TAU};

use super::{dist, Circle, Curve, DomainM, Point2, Segment};
use crate::error::{Error, Result};

const VALIDATION_SAMPLES: usize = 1000;

/// The path `γ_ik` from anchor `x_i` to anchor `x_k`.
///
/// Unless the domain carries an explicit polyline for the pair, the path
/// steps off `x_i` along the inward normal, heads straight for the matching
/// offset point of `x_k`, detours around every hole it would cross along a
/// slightly inflated copy of that hole's circle, and finally steps onto
/// `x_k`. `γ_ki` is `γ_ik` reversed.
pub fn connecting_path(dom: &DomainM, i: usize, k: usize) -> Result<Curve> {
    dom.check_index(i)?;
    dom.check_index(k)?;
    if i == k {
        return Err(fail(i, k, "endpoints must lie on different circles"));
    }
    if i > k {
        return connecting_path(dom, k, i).map(|c| c.reversed());
    }
    let curve = match dom.path_override(i, k) {
        Some(points) => polyline(points, i, k)?,
        None => detour_path(dom, i, k)?,
    };
    validate(dom, &curve, i, k)?;
    Ok(curve)
}

fn fail(i: usize, k: usize, reason: impl Into<String>) -> Error {
    Error::PathConstruction { from: i, to: k, reason: reason.into() }
}

fn polyline(points: &[Point2], i: usize, k: usize) -> Result<Curve> {
    if points.len() < 2 {
        return Err(fail(i, k, "explicit path needs at least two points"));
    }
    let segments = points.windows(2).map(|w| Segment::Line { from: w[0], to: w[1] }).collect();
    Ok(Curve::open(segments))
}

fn inward_normal(dom: &DomainM, i: usize) -> Result<Point2> {
    let c = dom.circle(i)?;
    let a = dom.anchor(i)?;
    let s = if i == 1 { -1.0 } else { 1.0 } / c.radius;
    Ok([s * (a[0] - c.center[0]), s * (a[1] - c.center[1])])
}

fn detour_path(dom: &DomainM, i: usize, k: usize) -> Result<Curve> {
    let min_radius = dom.holes().iter().map(|h| h.radius).fold(dom.outer().radius, f64::min);
    let delta = 0.25 * dom.min_gap().min(min_radius);
    let (xi, xk) = (dom.anchor(i)?, dom.anchor(k)?);
    let (ni, nk) = (inward_normal(dom, i)?, inward_normal(dom, k)?);
    let pi = [xi[0] + delta * ni[0], xi[1] + delta * ni[1]];
    let pk = [xk[0] + delta * nk[0], xk[1] + delta * nk[1]];

    let inflated: Vec<Circle> = dom.holes().iter().map(|h| Circle::new(h.center, h.radius + 0.5 * delta)).collect();
    // Chords of the straight segment pi -> pk through each inflated hole,
    // ordered along the segment.
    let dir = [pk[0] - pi[0], pk[1] - pi[1]];
    let mut chords: Vec<(f64, f64, &Circle)> = inflated
        .iter()
        .filter_map(|c| chord(pi, dir, c).map(|(a, b)| (a, b, c)))
        .collect();
    chords.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut segments = vec![Segment::Line { from: xi, to: pi }];
    let mut cursor = pi;
    let at = |s: f64| [pi[0] + s * dir[0], pi[1] + s * dir[1]];
    for (a, b, c) in chords {
        let (entry, exit) = (at(a), at(b));
        segments.push(Segment::Line { from: cursor, to: entry });
        segments.push(detour_arc(dom, c, entry, exit).ok_or_else(|| fail(i, k, "no arc detour keeps clearance"))?);
        cursor = exit;
    }
    segments.push(Segment::Line { from: cursor, to: pk });
    segments.push(Segment::Line { from: pk, to: xk });
    Ok(Curve::open(merge(segments)))
}

/// Parameter interval `[a, b] ⊂ (0, 1)` where `p + s·dir` is inside `c`.
fn chord(p: Point2, dir: Point2, c: &Circle) -> Option<(f64, f64)> {
    let f = [p[0] - c.center[0], p[1] - c.center[1]];
    let a = dir[0] * dir[0] + dir[1] * dir[1];
    let b = f[0] * dir[0] + f[1] * dir[1];
    let cc = f[0] * f[0] + f[1] * f[1] - c.radius * c.radius;
    let disc = b * b - a * cc;
    if a == 0.0 || disc <= 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let (s0, s1) = ((-b - sq) / a, (-b + sq) / a);
    (s1 > 0.0 && s0 < 1.0).then_some((s0.max(0.0), s1.min(1.0)))
}

/// Arc on `c` from `entry` to `exit`: the shorter way round when it keeps
/// clearance, the longer way otherwise.
fn detour_arc(dom: &DomainM, c: &Circle, entry: Point2, exit: Point2) -> Option<Segment> {
    let start = (entry[1] - c.center[1]).atan2(entry[0] - c.center[0]);
    let end = (exit[1] - c.center[1]).atan2(exit[0] - c.center[0]);
    let mut sweep = (end - start).rem_euclid(TAU);
    if sweep > PI {
        sweep -= TAU;
    }
    [sweep, sweep - TAU.copysign(sweep)].into_iter().map(|sweep| Segment::Arc { center: c.center, radius: c.radius, start, sweep }).find(
        |arc| (0..=64).all(|j| dom.clearance(arc.point(j as f64 / 64.0)) > 0.0),
    )
}

/// Drop degenerate segments and fuse consecutive collinear lines.
fn merge(segments: Vec<Segment>) -> Vec<Segment> {
    let mut out: Vec<Segment> = Vec::new();
    for seg in segments.into_iter().filter(|s| s.length() > 1e-14) {
        if let (Some(Segment::Line { from, to }), Segment::Line { from: _, to: next }) = (out.last().copied(), seg) {
            let (u, v) = ([to[0] - from[0], to[1] - from[1]], [next[0] - to[0], next[1] - to[1]]);
            let cross = u[0] * v[1] - u[1] * v[0];
            let dot = u[0] * v[0] + u[1] * v[1];
            if cross.abs() <= 1e-12 * dist(from, to) * dist(to, next) && dot > 0.0 {
                *out.last_mut().expect("nonempty") = Segment::Line { from, to: next };
                continue;
            }
        }
        out.push(seg);
    }
    out
}

fn validate(dom: &DomainM, curve: &Curve, i: usize, k: usize) -> Result<()> {
    let scale = dom.outer().radius;
    if dist(curve.start(), dom.anchor(i)?) > 1e-10 * scale || dist(curve.end(), dom.anchor(k)?) > 1e-10 * scale {
        return Err(fail(i, k, "path does not join the anchors"));
    }
    let samples = curve.sample(VALIDATION_SAMPLES);
    let last = samples.len() - 1;
    for (n, p) in samples.iter().enumerate() {
        let c = dom.clearance(*p);
        let interior = n != 0 && n != last;
        if c < -1e-12 * scale || (interior && c <= 0.0) {
            return Err(fail(i, k, format!("point ({}, {}) leaves M (clearance {c:e})", p[0], p[1])));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_holes() -> DomainM {
        DomainM::new(
            Circle::new([0.0, 0.0], 3.0),
            vec![Circle::new([-1.2, 0.0], 0.6), Circle::new([1.2, 0.0], 0.6)],
        )
        .unwrap()
    }

    #[test]
    fn annulus_path_is_radial_segment() {
        let dom = DomainM::annulus(1.0, 2.0).unwrap();
        let p = connecting_path(&dom, 1, 2).unwrap();
        assert_eq!(p.segments(), &[Segment::Line { from: [2.0, 0.0], to: [1.0, 0.0] }]);
        let q = connecting_path(&dom, 2, 1).unwrap();
        assert_eq!(q, p.reversed());
    }

    #[test]
    fn obstructed_path_detours_with_clearance() {
        let dom = two_holes();
        // x_2 = (-0.6, 0) and x_3 = (1.8, 0): the straight line crosses hole 3.
        let p = connecting_path(&dom, 2, 3).unwrap();
        assert!(p.segments().iter().any(|s| matches!(s, Segment::Arc { .. })));
        let min = p.sample(1000)[1..999].iter().map(|q| dom.clearance(*q)).fold(f64::INFINITY, f64::min);
        assert!(min > 0.0);
        let back = connecting_path(&dom, 3, 2).unwrap();
        for s in [0.1, 0.5, 0.9] {
            assert!(dist(back.point_at(s), p.point_at(1.0 - s)) < 1e-9);
        }
    }

    #[test]
    fn same_circle_is_rejected() {
        assert!(matches!(connecting_path(&two_holes(), 2, 2), Err(Error::PathConstruction { .. })));
    }

    #[test]
    fn explicit_polyline_is_validated() {
        let dom = DomainM::annulus(1.0, 2.0).unwrap();
        let ok = dom.clone().with_path(1, 2, vec![[2.0, 0.0], [1.5, 0.2], [1.0, 0.0]]).unwrap();
        assert_eq!(connecting_path(&ok, 1, 2).unwrap().segments().len(), 2);
        let through_hole = dom.with_path(1, 2, vec![[2.0, 0.0], [0.0, 0.0], [1.0, 0.0]]);
        assert!(matches!(through_hole, Err(Error::PathConstruction { .. })));
    }
}
