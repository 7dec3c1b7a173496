//! Flux, gauge-fixed helicity and the Calabi value.

use crate::context::Context;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::forms::{FormOnM, FormOnQ, Region};
use crate::gauge::{vector_potential, ExactField};
use crate::geometry::{halton, DomainM};
use crate::homology::{gauge_loops, Chain, ChainBasis};

/// Sampled tolerance for `dB = 0` and `j*_{∂Q} B = 0`.
pub const ADMISSIBILITY_TOL: f64 = 1e-8;

/// Deterministic sample points of `Q`.
pub fn sample_q(dom: &DomainM, n: usize) -> Vec<[f64; 3]> {
    dom.sample_interior(n).into_iter().enumerate().map(|(j, p)| [p[0], p[1], halton(j as u64 + 1, 5)]).collect()
}

/// Check `dB = 0` inside `Q` and `j*B = 0` on `∂Q` at sample points.
pub fn check_admissible(b: &FormOnQ, dom: &DomainM) -> Result<()> {
    b.expect_degree(2)?;
    let db = b.d()?;
    for p in sample_q(dom, 500) {
        let div = db.eval(p)?[0];
        let scale = 1.0 + b.eval(p)?.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if div.abs() > ADMISSIBILITY_TOL * scale {
            return Err(Error::NotAdmissible(format!("dB = {div:e} at {p:?}")));
        }
    }
    for (i, points) in dom.sample_boundary(48) {
        let c = dom.circle(i)?;
        for (j, q) in points.into_iter().enumerate() {
            let t = j as f64 / 48.0;
            let v = b.eval([q[0], q[1], t])?;
            let tau = [-(q[1] - c.center[1]) / c.radius, (q[0] - c.center[0]) / c.radius];
            // B(τ, ∂_t) = b_yt τ_y − b_tx τ_x
            let tangential = v[0] * tau[1] - v[1] * tau[0];
            let scale = 1.0 + v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if tangential.abs() > ADMISSIBILITY_TOL * scale {
                return Err(Error::NotAdmissible(format!(
                    "j*B = {tangential:e} on S_{i} at ({}, {}, {t})",
                    q[0], q[1]
                )));
            }
        }
    }
    Ok(())
}

/// Check `H ≡ 0` on `S_1 × S¹` and `H(·, t)` constant on each `S_i`.
pub fn check_boundary_values(h: &Expr, dom: &DomainM, tol: f64) -> Result<()> {
    for (i, points) in dom.sample_boundary(48) {
        for j in 0..16 {
            let t = j as f64 / 16.0;
            let vals: Vec<f64> = points.iter().map(|q| h.eval([q[0], q[1], t])).collect::<Result<_, _>>()?;
            let (lo, hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
            if i == 1 {
                let max = lo.abs().max(hi.abs());
                if max > tol {
                    return Err(Error::OuterBoundaryNonzero { max });
                }
            } else if hi - lo > tol {
                return Err(Error::BoundaryNotConstant { circle: i, t, spread: hi - lo });
            }
        }
    }
    Ok(())
}

/// `H̄_i = ∫_{S¹} h_i(t) dt` for each circle, read at the anchors.
pub fn boundary_means(h: &Expr, ctx: &Context) -> Result<Vec<f64>> {
    let dt = FormOnQ::dt().times(h);
    (1..=ctx.domain.boundary_count())
        .map(|i| dt.integrate(Region::Fiber { point: ctx.domain.anchor(i)?, rule: ctx.mesh.circle_rule() }, ctx.reduction))
        .collect()
}

/// `∫_chain B` for each chain of the basis, after the admissibility check.
pub fn flux(b: &FormOnQ, basis: &ChainBasis, ctx: &Context) -> Result<Vec<f64>> {
    check_admissible(b, &ctx.domain)?;
    basis.chains.iter().map(|c| c.integrate(b, &ctx.mesh, ctx.reduction)).collect()
}

/// Flux through `Π_ℓk`.
pub fn flux_through(b: &FormOnQ, l: usize, k: usize, ctx: &Context) -> Result<f64> {
    Chain::product(&ctx.domain, l, k)?.integrate(b, &ctx.mesh, ctx.reduction)
}

/// `∫_Q B ∧ A`.
pub fn pairing(b: &FormOnQ, a: &FormOnQ, ctx: &Context) -> Result<f64> {
    b.wedge(a)?.integrate(Region::Q(&ctx.mesh), ctx.reduction)
}

/// Helicity `∫_Q B ∧ A` with the potential gauge-fixed on `κ⊥_ℓk`.
pub fn helicity(field: &ExactField, l: usize, k: usize, ctx: &Context) -> Result<f64> {
    let g = gauge_loops(&ctx.domain, l, k)?;
    let a = vector_potential(field, &g, ctx)?;
    pairing(&field.b(), &a.form, ctx)
}

/// `H_ℓk` for all gauge choices, row `ℓ`, column `k`.
pub fn helicity_matrix(field: &ExactField, ctx: &Context) -> Result<Vec<Vec<f64>>> {
    let d = ctx.domain.boundary_count();
    (1..=d).map(|l| (1..=d).map(|k| helicity(field, l, k, ctx)).collect()).collect()
}

/// `Cal = ∫_Q H (π*ω) ∧ dt`.
pub fn calabi(omega: &FormOnM, h: &Expr, ctx: &Context) -> Result<f64> {
    omega.expect_degree(2)?;
    FormOnQ::volume(h.mul(&omega.coeffs()[0])).integrate(Region::Q(&ctx.mesh), ctx.reduction)
}
