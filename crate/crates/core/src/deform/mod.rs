//! Diffeomorphisms of `Q`, helicity-preserving paths, and directional
//! derivatives of functionals along exact variations.

mod derivative;
mod paths;

pub use derivative::{
    derivative_sweep, directional_derivative, estimate_density_ratio, evaluate, probe_set, verify_lemma2,
    Derivative, DensityFit, Functional, VariationForm, PERIOD_TOL, STABILIZER_TOL,
};
pub use paths::{lemma1b_a, path_lemma1a, path_lemma1b, Lemma1bPath, PathSample, ENDPOINT_TOL};

use crate::error::{Error, Result};
use crate::expr::{Expr, Var};
use crate::forms::FormOnQ;
use crate::geometry::{dist, DomainM};
use crate::invariants::sample_q;

/// The flow family a diffeomorphism was built from.
#[derive(Clone, Debug)]
pub enum Family {
    Identity,
    /// `(x, y, t) ↦ (x, y, t + g(x, y))`.
    Shear { g: Expr },
    /// Rotation about `center` by the radial angle `u`.
    Rotation { center: [f64; 2], u: Expr },
    /// `(x, y, t) ↦ (x, y, t + shift)`.
    Fiber { shift: f64 },
}

/// A diffeomorphism of `Q` isotopic to the identity, as three component
/// expressions.
#[derive(Clone, Debug)]
pub struct DiffeoQ {
    map: [Expr; 3],
    family: Family,
}

impl DiffeoQ {
    pub fn identity() -> DiffeoQ {
        DiffeoQ { map: [Expr::x(), Expr::y(), Expr::t()], family: Family::Identity }
    }

    pub fn shear(g: Expr) -> Result<DiffeoQ> {
        if g.depends_on(Var::T) {
            return Err(Error::NotADiffeomorphismOfQ("shear profile must not depend on t".into()));
        }
        Ok(DiffeoQ { map: [Expr::x(), Expr::y(), Expr::t().add(&g)], family: Family::Shear { g } })
    }

    pub fn fiber_rotation(shift: f64) -> DiffeoQ {
        DiffeoQ {
            map: [Expr::x(), Expr::y(), Expr::t().add(&Expr::constant(shift))],
            family: Family::Fiber { shift },
        }
    }

    /// Rotation of each circle about the common centre by `u`, which must be
    /// a function of the radius alone (checked by sampling). Requires all
    /// boundary circles to be concentric.
    pub fn rotation(dom: &DomainM, u: Expr) -> Result<DiffeoQ> {
        if !dom.is_concentric() {
            return Err(Error::NotADiffeomorphismOfQ("radial rotation needs concentric circles".into()));
        }
        if u.depends_on(Var::T) {
            return Err(Error::NotADiffeomorphismOfQ("rotation angle must not depend on t".into()));
        }
        let c = dom.outer().center;
        for p in dom.sample_interior(200) {
            let (r, th) = ((p[0] - c[0]).hypot(p[1] - c[1]), (p[1] - c[1]).atan2(p[0] - c[0]));
            let here = u.eval([p[0], p[1], 0.0])?;
            for k in 1..4 {
                let a = th + k as f64 * 1.7;
                let there = u.eval([c[0] + r * a.cos(), c[1] + r * a.sin(), 0.0])?;
                if (here - there).abs() > 1e-10 * (1.0 + here.abs()) {
                    return Err(Error::NotADiffeomorphismOfQ("rotation angle is not radial".into()));
                }
            }
        }
        let (dx, dy) = (Expr::x().sub(&Expr::constant(c[0])), Expr::y().sub(&Expr::constant(c[1])));
        let (cu, su) = (u.cos(), u.sin());
        let map = [
            Expr::constant(c[0]).add(&dx.mul(&cu)).sub(&dy.mul(&su)),
            Expr::constant(c[1]).add(&dx.mul(&su)).add(&dy.mul(&cu)),
            Expr::t(),
        ];
        Ok(DiffeoQ { map, family: Family::Rotation { center: c, u } })
    }

    pub fn map(&self) -> &[Expr; 3] {
        &self.map
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn apply(&self, p: [f64; 3]) -> Result<[f64; 3]> {
        Ok([self.map[0].eval(p)?, self.map[1].eval(p)?, self.map[2].eval(p)?])
    }

    /// Sampled check that `Q` and each boundary torus are mapped into
    /// themselves.
    pub fn validate(&self, dom: &DomainM) -> Result<()> {
        let scale = dom.outer().radius;
        for p in sample_q(dom, 1000) {
            let q = self.apply(p)?;
            if !dom.contains([q[0], q[1]], 1e-10 * scale) {
                return Err(Error::NotADiffeomorphismOfQ(format!("{p:?} is mapped outside Q")));
            }
        }
        for (i, points) in dom.sample_boundary(64) {
            let c = dom.circle(i)?;
            for (j, b) in points.into_iter().enumerate() {
                let q = self.apply([b[0], b[1], j as f64 / 64.0])?;
                let off = (dist([q[0], q[1]], c.center) - c.radius).abs();
                if off > 1e-10 * scale {
                    return Err(Error::NotADiffeomorphismOfQ(format!("S_{i} is not preserved (offset {off:e})")));
                }
            }
        }
        Ok(())
    }
}

/// `ψ*B`.
pub fn apply_diffeo(psi: &DiffeoQ, b: &FormOnQ) -> FormOnQ {
    b.pullback(psi.map())
}

/// Largest coefficient difference of two forms of equal degree over `n`
/// sample points of `Q`.
pub fn max_difference(a: &FormOnQ, b: &FormOnQ, dom: &DomainM, n: usize) -> Result<f64> {
    a.expect_degree(b.degree())?;
    let mut worst = 0.0f64;
    for p in sample_q(dom, n) {
        for (u, v) in a.eval(p)?.iter().zip(b.eval(p)?) {
            worst = worst.max((u - v).abs());
        }
    }
    Ok(worst)
}
