//! Building blocks for admissible normal-form data on a domain.

use crate::expr::Expr;
use crate::geometry::{Circle, DomainM};

fn rho2(c: &Circle) -> Expr {
    let dx = Expr::x().sub(&Expr::constant(c.center[0]));
    let dy = Expr::y().sub(&Expr::constant(c.center[1]));
    dx.powf(2.0).add(&dy.powf(2.0))
}

/// Function vanishing on every boundary circle and positive inside `M`.
pub fn boundary_vanishing(dom: &DomainM) -> Expr {
    let outer = dom.outer();
    let mut phi = Expr::constant(outer.radius * outer.radius).sub(&rho2(outer)).scale(1.0 / (outer.radius * outer.radius));
    for h in dom.holes() {
        phi = phi.mul(&rho2(h).sub(&Expr::constant(h.radius * h.radius)).scale(1.0 / (h.radius * h.radius)));
    }
    phi
}

/// Smooth function equal to 1 on hole `S_i` (`i ≥ 2`) and below `1e-18`
/// on every other boundary circle.
pub fn hole_indicator(dom: &DomainM, i: usize) -> Expr {
    let hole = dom.circle(i).expect("hole index");
    let mut gap = dom.outer().radius - crate::geometry::dist(hole.center, dom.outer().center) - hole.radius;
    for (j, other) in dom.holes().iter().enumerate() {
        if j + 2 != i {
            gap = gap.min(crate::geometry::dist(hole.center, other.center) - hole.radius - other.radius);
        }
    }
    let width = (2.0 * hole.radius * gap + gap * gap) / 6.5;
    let s = rho2(hole).sub(&Expr::constant(hole.radius * hole.radius)).scale(1.0 / width);
    s.powf(2.0).neg().exp()
}

/// `H = Σ_{i ≥ 2} h_i(t)·χ_i + φ·q`, where `χ_i` is [`hole_indicator`] and
/// `φ` is [`boundary_vanishing`]. `boundary[j]` is `h_{j+2}`.
pub fn admissible_hamiltonian(dom: &DomainM, boundary: &[Expr], interior: &Expr) -> Expr {
    assert_eq!(boundary.len(), dom.holes().len(), "one boundary value per hole");
    let mut h = boundary_vanishing(dom).mul(interior);
    for (j, hj) in boundary.iter().enumerate() {
        h = h.add(&hj.mul(&hole_indicator(dom, j + 2)));
    }
    h
}
