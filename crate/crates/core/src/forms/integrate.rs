use rayon::prelude::*;

use super::{FormOnM, FormOnQ};
use crate::error::{Error, Result};
use crate::expr::Tape;
use crate::geometry::{Curve, CurveRule, Point2, QuadratureMesh};
use crate::quadrature::CircleRule;

/// How per-element partial sums are produced. Both modes add the partial
/// sums in element order, so their results are bit-identical.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Reduction {
    #[default]
    Ordered,
    Parallel,
}

/// Integration domains. The dimension must match the form degree.
#[derive(Clone, Copy, Debug)]
pub enum Region<'a> {
    /// `M` itself (2-forms on `M`).
    M(&'a QuadratureMesh),
    /// The slice `M × {t}` (2-forms on `Q`).
    Slice(&'a QuadratureMesh, f64),
    /// All of `Q` (3-forms).
    Q(&'a QuadratureMesh),
    /// `γ × {t}` (1-forms; `t` is ignored for forms on `M`).
    Curve { curve: &'a Curve, t: f64, rule: CurveRule },
    /// The fiber `{p} × S¹`, oriented by increasing `t` (1-forms on `Q`).
    Fiber { point: Point2, rule: CircleRule },
    /// The cylinder `γ × S¹` with orientation `(∂_s, ∂_t)` (2-forms on `Q`).
    Product { curve: &'a Curve, rule: CurveRule, circle: CircleRule },
}

/// `Σ_e partial(e)` over `n` elements, reduced in element order.
fn reduce(n: usize, mode: Reduction, partial: impl Fn(usize) -> Result<f64> + Sync) -> Result<f64> {
    let parts: Vec<f64> = match mode {
        Reduction::Ordered => (0..n).map(&partial).collect::<Result<_>>()?,
        Reduction::Parallel => (0..n).into_par_iter().map(&partial).collect::<Result<_>>()?,
    };
    Ok(parts.iter().sum())
}

/// `∫_M g(x, y) dx dy` for a function of `(x, y)` given as a closure.
pub(crate) fn integrate_m_with(mesh: &QuadratureMesh, mode: Reduction, g: impl Fn(Point2) -> Result<f64> + Sync) -> Result<f64> {
    let k = QuadratureMesh::POINTS_PER_TRIANGLE;
    let (pts, wts) = (mesh.points(), mesh.weights());
    reduce(pts.len() / k, mode, |e| {
        let mut s = 0.0;
        for j in e * k..(e + 1) * k {
            s += wts[j] * g(pts[j])?;
        }
        Ok(s)
    })
}

fn t_nodes(rule: CircleRule) -> (Vec<f64>, Vec<f64>) {
    rule.nodes().unzip()
}

/// `Σ_j w_j c_r(p, t_j)` for every root `r` of the tape.
fn fiber_sums(tape: &Tape, p: Point2, ts: &[f64], tw: &[f64]) -> Result<Vec<f64>> {
    let mut vals = Vec::new();
    tape.eval_fiber(p[0], p[1], ts, &mut vals)?;
    Ok(vals.chunks(ts.len()).map(|col| col.iter().zip(tw).map(|(v, w)| v * w).sum()).collect())
}

impl FormOnQ {
    pub fn integrate(&self, region: Region<'_>, mode: Reduction) -> Result<f64> {
        let c = self.coeffs();
        match region {
            Region::M(_) => Err(Error::RegionMismatch { degree: self.degree(), region: "M (use a slice of Q)" }),
            Region::Slice(mesh, t0) => {
                self.expect_degree(2)?;
                integrate_m_with(mesh, mode, |p| Ok(c[2].eval([p[0], p[1], t0])?))
            }
            Region::Q(mesh) => {
                self.expect_degree(3)?;
                let (ts, tw) = t_nodes(mesh.circle_rule());
                let tape = Tape::new(&c[..1]);
                integrate_m_with(mesh, mode, |p| Ok(fiber_sums(&tape, p, &ts, &tw)?[0]))
            }
            Region::Curve { curve, t, rule } => {
                self.expect_degree(1)?;
                let mut s = 0.0;
                for n in curve.nodes(rule) {
                    let p = [n.point[0], n.point[1], t];
                    s += n.weight * (c[0].eval(p)? * n.tangent[0] + c[1].eval(p)? * n.tangent[1]);
                }
                Ok(s)
            }
            Region::Fiber { point, rule } => {
                self.expect_degree(1)?;
                let (ts, tw) = t_nodes(rule);
                Ok(fiber_sums(&Tape::new(&c[2..]), point, &ts, &tw)?[0])
            }
            Region::Product { curve, rule, circle } => {
                self.expect_degree(2)?;
                let (ts, tw) = t_nodes(circle);
                let tape = Tape::new(&c[..2]);
                let mut s = 0.0;
                for n in curve.nodes(rule) {
                    // B(γ', ∂_t) = b_yt γ'_y − b_tx γ'_x
                    let b = fiber_sums(&tape, n.point, &ts, &tw)?;
                    s += n.weight * (b[0] * n.tangent[1] - b[1] * n.tangent[0]);
                }
                Ok(s)
            }
        }
    }
}

impl FormOnM {
    pub fn integrate(&self, region: Region<'_>, mode: Reduction) -> Result<f64> {
        let c = self.coeffs();
        match region {
            Region::M(mesh) => {
                self.expect_degree(2)?;
                integrate_m_with(mesh, mode, |p| Ok(c[0].eval([p[0], p[1], 0.0])?))
            }
            Region::Curve { curve, rule, .. } => {
                self.expect_degree(1)?;
                let mut s = 0.0;
                for n in curve.nodes(rule) {
                    let p = [n.point[0], n.point[1], 0.0];
                    s += n.weight * (c[0].eval(p)? * n.tangent[0] + c[1].eval(p)? * n.tangent[1]);
                }
                Ok(s)
            }
            _ => Err(Error::RegionMismatch { degree: self.degree(), region: "a region of Q" }),
        }
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::expr::{parse, Expr};
    use crate::geometry::{build_mesh, connecting_path, DomainM, QuadratureSettings};

    fn setup() -> (DomainM, QuadratureMesh) {
        let dom = DomainM::annulus(1.0, 2.0).unwrap();
        let mesh = build_mesh(&dom, QuadratureSettings { level: 2, ..Default::default() }).unwrap();
        (dom, mesh)
    }

    #[test]
    fn area_of_annulus() {
        let (_, mesh) = setup();
        let v = FormOnM::area(Expr::one()).integrate(Region::M(&mesh), Reduction::Ordered).unwrap();
        assert!((v - 3.0 * PI).abs() < 1e-5);
    }

    #[test]
    fn x_dy_around_outer_circle() {
        let (dom, _) = setup();
        let s1 = &dom.boundary_circles()[0];
        let a = FormOnM::one_form(Expr::zero(), Expr::x());
        let v = a.integrate(Region::Curve { curve: s1, t: 0.0, rule: CurveRule::default() }, Reduction::Ordered).unwrap();
        assert!((v - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn area_form_has_no_flux_through_radial_cylinder() {
        let (dom, _) = setup();
        let gamma = connecting_path(&dom, 1, 2).unwrap();
        let b = FormOnQ::two_form(Expr::zero(), Expr::zero(), Expr::one());
        let region = Region::Product { curve: &gamma, rule: CurveRule::default(), circle: CircleRule::new(8) };
        assert_eq!(b.integrate(region, Reduction::Ordered).unwrap(), 0.0);
    }

    #[test]
    fn fiber_of_dt_has_unit_length() {
        let v = FormOnQ::dt().integrate(Region::Fiber { point: [2.0, 0.0], rule: CircleRule::new(16) }, Reduction::Ordered);
        assert_eq!(v.unwrap(), 1.0);
    }

    #[test]
    fn parallel_matches_ordered_and_degrees_are_checked() {
        let (_, mesh) = setup();
        let c = FormOnQ::volume(parse("exp(x*y)*(1+sin(2*pi*t)^2)").unwrap());
        let a = c.integrate(Region::Q(&mesh), Reduction::Ordered).unwrap();
        let b = c.integrate(Region::Q(&mesh), Reduction::Parallel).unwrap();
        assert_eq!(a, b);
        assert!(matches!(FormOnQ::dt().integrate(Region::Q(&mesh), Reduction::Ordered), Err(Error::Degree { expected: 3, found: 1 })));
    }
}
