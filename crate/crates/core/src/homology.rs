//! Fixed generators for the flux classes and the gauge loops on `∂Q`.

use crate::error::Result;
use crate::forms::{FormOnQ, Reduction, Region};
use crate::geometry::{connecting_path, Curve, CurveRule, DomainM, Point2, QuadratureMesh};
use crate::quadrature::CircleRule;

/// A relative 2-cycle of `Q`.
#[derive(Clone, Debug)]
pub enum Chain {
    /// `M × {t}`, oriented like `M`.
    Slice { t: f64 },
    /// `Π_ik = γ_ik × S¹`, oriented by `(γ', ∂_t)`.
    Product { from: usize, to: usize, path: Curve },
}

impl Chain {
    pub fn product(dom: &DomainM, i: usize, k: usize) -> Result<Chain> {
        Ok(Chain::Product { from: i, to: k, path: connecting_path(dom, i, k)? })
    }

    pub fn label(&self) -> String {
        match self {
            Chain::Slice { t } => format!("M x {{{t}}}"),
            Chain::Product { from, to, .. } => format!("Pi_{from}{to}"),
        }
    }

    /// `∫_chain B` for a 2-form on `Q`.
    pub fn integrate(&self, b: &FormOnQ, mesh: &QuadratureMesh, mode: Reduction) -> Result<f64> {
        match self {
            Chain::Slice { t } => b.integrate(Region::Slice(mesh, *t), mode),
            Chain::Product { path, .. } => {
                b.integrate(Region::Product { curve: path, rule: mesh.curve_rule(), circle: mesh.circle_rule() }, mode)
            }
        }
    }
}

/// `M × {0}` followed by `Π_12, …, Π_1d`.
#[derive(Clone, Debug)]
pub struct ChainBasis {
    pub chains: Vec<Chain>,
}

pub fn kappa_basis(dom: &DomainM) -> Result<ChainBasis> {
    let mut chains = vec![Chain::Slice { t: 0.0 }];
    for k in 2..=dom.boundary_count() {
        chains.push(Chain::product(dom, 1, k)?);
    }
    Ok(ChainBasis { chains })
}

/// A loop on `∂Q`.
#[derive(Clone, Debug)]
pub enum Loop {
    /// `{x_k} × S¹`, oriented by increasing `t`.
    Fiber { circle: usize, point: Point2 },
    /// `S_i × {t}` with the boundary orientation of `M`.
    Boundary { circle: usize, curve: Curve, t: f64 },
}

impl Loop {
    pub fn label(&self) -> String {
        match self {
            Loop::Fiber { circle, .. } => format!("{{x_{circle}}} x S1"),
            Loop::Boundary { circle, t, .. } => format!("S_{circle} x {{{t}}}"),
        }
    }

    pub fn integrate(&self, a: &FormOnQ, curve: CurveRule, circle: CircleRule) -> Result<f64> {
        match self {
            Loop::Fiber { point, .. } => a.integrate(Region::Fiber { point: *point, rule: circle }, Reduction::Ordered),
            Loop::Boundary { curve: c, t, .. } => {
                a.integrate(Region::Curve { curve: c, t: *t, rule: curve }, Reduction::Ordered)
            }
        }
    }
}

/// Generators of the gauge subspace `κ⊥_ℓk`: `{x_k} × S¹` and `S_i × {0}`
/// for every `i ≠ ℓ`.
#[derive(Clone, Debug)]
pub struct GaugeSubspace {
    pub l: usize,
    pub k: usize,
    pub loops: Vec<Loop>,
}

pub fn gauge_loops(dom: &DomainM, l: usize, k: usize) -> Result<GaugeSubspace> {
    dom.check_index(l)?;
    dom.check_index(k)?;
    let circles = dom.boundary_circles();
    let mut loops = vec![Loop::Fiber { circle: k, point: dom.anchor(k)? }];
    for (n, curve) in circles.into_iter().enumerate() {
        let i = n + 1;
        if i != l {
            loops.push(Loop::Boundary { circle: i, curve, t: 0.0 });
        }
    }
    Ok(GaugeSubspace { l, k, loops })
}

/// `∮ A` over each generating loop of `g`.
pub fn periods(a: &FormOnQ, g: &GaugeSubspace, curve: CurveRule, circle: CircleRule) -> Result<Vec<f64>> {
    a.expect_degree(1)?;
    g.loops.iter().map(|l| l.integrate(a, curve, circle)).collect()
}
