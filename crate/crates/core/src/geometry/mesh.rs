use std::f64::consts::TAU;

use spade::{ConstrainedDelaunayTriangulation, Triangulation};

use super::{CurveRule, DomainM, Point2};
use crate::error::{Error, Result};
use crate::quadrature::{triangle_rule, CircleRule};

/// Refinement level and rule sizes for `M`, `S¹` and curves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureSettings {
    pub level: usize,
    pub n_t: usize,
    pub curve: CurveRule,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings { level: 4, n_t: 16, curve: CurveRule::default() }
    }
}

/// Quadratic triangle: corners `v0, v1, v2` then the midpoints of edges
/// `01, 12, 20`. Midpoints of boundary edges sit on their circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvedTriangle {
    pub nodes: [Point2; 6],
}

impl CurvedTriangle {
    /// Position and Jacobian determinant at reference point `(ξ, η)`.
    pub fn map(&self, xi: f64, eta: f64) -> (Point2, f64) {
        let l0 = 1.0 - xi - eta;
        let n = [
            l0 * (2.0 * l0 - 1.0),
            xi * (2.0 * xi - 1.0),
            eta * (2.0 * eta - 1.0),
            4.0 * l0 * xi,
            4.0 * xi * eta,
            4.0 * eta * l0,
        ];
        let dxi = [-(4.0 * l0 - 1.0), 4.0 * xi - 1.0, 0.0, 4.0 * (l0 - xi), 4.0 * eta, -4.0 * eta];
        let deta = [-(4.0 * l0 - 1.0), 0.0, 4.0 * eta - 1.0, -4.0 * xi, 4.0 * xi, 4.0 * (l0 - eta)];
        let mut p = [0.0; 2];
        let mut j = [[0.0; 2]; 2];
        for (a, node) in self.nodes.iter().enumerate() {
            for c in 0..2 {
                p[c] += n[a] * node[c];
                j[c][0] += dxi[a] * node[c];
                j[c][1] += deta[a] * node[c];
            }
        }
        (p, j[0][0] * j[1][1] - j[0][1] * j[1][0])
    }
}

/// Quadrature data for `M`, `S¹` and curves.
#[derive(Clone, Debug)]
pub struct QuadratureMesh {
    triangles: Vec<CurvedTriangle>,
    base_count: usize,
    settings: QuadratureSettings,
    points: Vec<Point2>,
    weights: Vec<f64>,
}

impl QuadratureMesh {
    pub fn triangles(&self) -> &[CurvedTriangle] {
        &self.triangles
    }

    /// Triangle count before refinement.
    pub fn base_count(&self) -> usize {
        self.base_count
    }

    pub fn settings(&self) -> QuadratureSettings {
        self.settings
    }

    pub fn level(&self) -> usize {
        self.settings.level
    }

    /// Quadrature points on `M`, seven per triangle in triangle order.
    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Points per triangle in [`QuadratureMesh::points`].
    pub const POINTS_PER_TRIANGLE: usize = 7;

    pub fn circle_rule(&self) -> CircleRule {
        CircleRule::new(self.settings.n_t)
    }

    pub fn curve_rule(&self) -> CurveRule {
        self.settings.curve
    }

    /// Sum of the `M` weights.
    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }
}

#[derive(Clone, Copy)]
struct Tri {
    v: [Point2; 3],
    /// Circle index (1-based) of each boundary edge `01, 12, 20`.
    edge: [Option<usize>; 3],
}

/// Constrained Delaunay triangulation of boundary points and a hexagonal
/// interior lattice, then `level` rounds of red refinement with boundary
/// midpoints snapped onto their circles.
pub fn build_mesh(dom: &DomainM, settings: QuadratureSettings) -> Result<QuadratureMesh> {
    if settings.n_t == 0 {
        return Err(Error::Meshing("S¹ rule needs at least one node".into()));
    }
    let mut tris = base_triangulation(dom)?;
    let base_count = tris.len();
    for _ in 0..settings.level {
        tris = tris.iter().flat_map(|t| refine(dom, t)).collect();
    }
    let triangles: Vec<CurvedTriangle> = tris
        .iter()
        .map(|t| CurvedTriangle {
            nodes: [t.v[0], t.v[1], t.v[2], midpoint(dom, t, 0), midpoint(dom, t, 1), midpoint(dom, t, 2)],
        })
        .collect();
    let rule = triangle_rule();
    let mut points = Vec::with_capacity(triangles.len() * rule.len());
    let mut weights = Vec::with_capacity(points.capacity());
    for tri in &triangles {
        for &(xi, eta, w) in &rule {
            let (p, det) = tri.map(xi, eta);
            if !(det > 0.0) {
                return Err(Error::Meshing(format!("inverted element near ({}, {})", p[0], p[1])));
            }
            points.push(p);
            weights.push(w * det);
        }
    }
    Ok(QuadratureMesh { triangles, base_count, settings, points, weights })
}

fn midpoint(dom: &DomainM, t: &Tri, e: usize) -> Point2 {
    let (a, b) = (t.v[e], t.v[(e + 1) % 3]);
    let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
    match t.edge[e] {
        Some(c) => dom.circle(c).expect("valid circle index").project(m),
        None => m,
    }
}

fn refine(dom: &DomainM, t: &Tri) -> [Tri; 4] {
    let [v0, v1, v2] = t.v;
    let [b01, b12, b20] = t.edge;
    let (m01, m12, m20) = (midpoint(dom, t, 0), midpoint(dom, t, 1), midpoint(dom, t, 2));
    [
        Tri { v: [v0, m01, m20], edge: [b01, None, b20] },
        Tri { v: [m01, v1, m12], edge: [b01, b12, None] },
        Tri { v: [m20, m12, v2], edge: [None, b12, b20] },
        Tri { v: [m01, m12, m20], edge: [None, None, None] },
    ]
}

fn base_triangulation(dom: &DomainM) -> Result<Vec<Tri>> {
    let outer = dom.outer();
    let mut h = outer.radius / 3.0;
    if !dom.holes().is_empty() {
        h = h.min(dom.min_gap() / 1.5);
    }

    // (circle, index along circle, points on circle)
    type OnCircle = Option<(usize, usize, usize)>;
    let mut verts: Vec<(Point2, OnCircle)> = Vec::new();
    let mut spacing = Vec::new();
    for c in 1..=dom.boundary_count() {
        let circle = dom.circle(c)?;
        let n = ((TAU * circle.radius / h).ceil() as usize).max(12);
        spacing.push(TAU * circle.radius / n as f64);
        for j in 0..n {
            let th = TAU * j as f64 / n as f64;
            let p = [circle.center[0] + circle.radius * th.cos(), circle.center[1] + circle.radius * th.sin()];
            verts.push((p, Some((c, j, n))));
        }
    }
    let row = h * 3f64.sqrt() / 2.0;
    let rows = (outer.radius / row).ceil() as i64;
    let cols = (outer.radius / h).ceil() as i64 + 1;
    for r in -rows..=rows {
        let shift = if r.rem_euclid(2) == 1 { 0.5 * h } else { 0.0 };
        for c in -cols..=cols {
            let p = [outer.center[0] + c as f64 * h + shift, outer.center[1] + r as f64 * row];
            let far = (1..=dom.boundary_count()).all(|i| {
                let circle = dom.circle(i).expect("valid index");
                circle.signed_distance(p).abs() >= 0.7 * spacing[i - 1]
            });
            if far && dom.clearance(p) > 0.0 {
                verts.push((p, None));
            }
        }
    }

    let mut cdt = ConstrainedDelaunayTriangulation::<spade::Point2<f64>>::new();
    let mut handles = Vec::with_capacity(verts.len());
    for (p, _) in &verts {
        let handle = cdt.insert(spade::Point2::new(p[0], p[1])).map_err(|e| Error::Meshing(format!("{e:?}")))?;
        handles.push(handle);
    }
    let mut owner = vec![usize::MAX; cdt.num_vertices()];
    for (n, handle) in handles.iter().enumerate() {
        owner[handle.index()] = n;
    }
    let mut start = 0;
    for c in 1..=dom.boundary_count() {
        let n = verts[start..].iter().take_while(|(_, tag)| matches!(tag, Some((cc, _, _)) if *cc == c)).count();
        for j in 0..n {
            cdt.add_constraint(handles[start + j], handles[start + (j + 1) % n]);
        }
        start += n;
    }

    let mut tris = Vec::new();
    for face in cdt.inner_faces() {
        let ids = face.vertices().map(|v| owner[v.fix().index()]);
        let mut v = ids.map(|i| verts[i].0);
        let centroid = [(v[0][0] + v[1][0] + v[2][0]) / 3.0, (v[0][1] + v[1][1] + v[2][1]) / 3.0];
        if dom.clearance(centroid) <= 0.0 {
            continue;
        }
        let mut tags = ids.map(|i| verts[i].1);
        let orient = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[1][1] - v[0][1]) * (v[2][0] - v[0][0]);
        if orient < 0.0 {
            v.swap(1, 2);
            tags.swap(1, 2);
        }
        let mut edge = [None; 3];
        for (e, slot) in edge.iter_mut().enumerate() {
            if let (Some((c, i, n)), Some((c2, j, _))) = (tags[e], tags[(e + 1) % 3]) {
                if c == c2 {
                    if (i + 1) % n == j || (j + 1) % n == i {
                        *slot = Some(c);
                    } else if c != 1 {
                        return Err(Error::Meshing(format!("chord across hole S_{c} in the base mesh")));
                    }
                }
            }
        }
        tris.push(Tri { v, edge });
    }
    if tris.is_empty() {
        return Err(Error::Meshing("empty triangulation".into()));
    }
    Ok(tris)
}
