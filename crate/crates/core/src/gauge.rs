//! Primitives of area forms and gauge-fixed vector potentials.

use std::f64::consts::PI;

use crate::context::Context;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::forms::{make_b, normal_form, FormOnM, FormOnQ};
use crate::geometry::DomainM;
use crate::homology::{periods, GaugeSubspace};

/// An exact field `B = B_{ω,H} + dP` with its data `(ω, H, P)`.
///
/// Every operation is linear in the triple, so scaled and summed fields
/// keep a known potential.
#[derive(Clone, Debug)]
pub struct ExactField {
    omega: FormOnM,
    h: Expr,
    p: FormOnQ,
}

impl ExactField {
    /// Normal-form field after validating `ω > 0` and periodicity of `H`.
    pub fn new(omega: FormOnM, h: Expr, dom: &DomainM) -> Result<ExactField> {
        make_b(&omega, &h, dom)?;
        Ok(ExactField::unchecked(omega, h))
    }

    pub fn unchecked(omega: FormOnM, h: Expr) -> ExactField {
        ExactField { omega, h, p: FormOnQ::zero(1) }
    }

    pub fn omega(&self) -> &FormOnM {
        &self.omega
    }

    pub fn h(&self) -> &Expr {
        &self.h
    }

    pub fn perturbation(&self) -> &FormOnQ {
        &self.p
    }

    /// `B + d(a)`.
    pub fn perturbed(&self, a: &FormOnQ) -> Result<ExactField> {
        Ok(ExactField { omega: self.omega.clone(), h: self.h.clone(), p: self.p.add(a)? })
    }

    pub fn scale(&self, s: f64) -> ExactField {
        ExactField { omega: self.omega.scale(s), h: self.h.scale(s), p: self.p.scale(s) }
    }

    pub fn add(&self, other: &ExactField) -> Result<ExactField> {
        Ok(ExactField {
            omega: FormOnM::area(self.omega.coeffs()[0].add(&other.omega.coeffs()[0])),
            h: self.h.add(&other.h),
            p: self.p.add(&other.p)?,
        })
    }

    pub fn b(&self) -> FormOnQ {
        let base = normal_form(&self.omega.coeffs()[0], &self.h);
        let dp = self.p.d().expect("1-form");
        base.add(&dp).expect("both are 2-forms")
    }
}

/// `dt` and the angle forms `β_j = (1/2π) dθ_j` about each hole centre.
#[derive(Clone, Debug)]
pub struct ClosedFormBasis {
    pub dt: FormOnQ,
    pub betas: Vec<FormOnQ>,
}

/// `(1/2π)(−(y − y_c) dx + (x − x_c) dy) / ρ²`.
pub fn angle_form(center: [f64; 2]) -> FormOnQ {
    let dx = Expr::x().sub(&Expr::constant(center[0]));
    let dy = Expr::y().sub(&Expr::constant(center[1]));
    let r2 = dx.powf(2.0).add(&dy.powf(2.0));
    let k = Expr::constant(0.5 / PI).div(&r2);
    FormOnQ::one_form(dy.neg().mul(&k), dx.mul(&k), Expr::zero())
}

pub fn closed_form_basis(dom: &DomainM) -> ClosedFormBasis {
    ClosedFormBasis { dt: FormOnQ::dt(), betas: dom.holes().iter().map(|h| angle_form(h.center)).collect() }
}

const PRIMITIVE_ROWS: usize = 41;

/// `α = Q_c dy` with `Q_c(x, y) = ∫_{x₀}^x f(s, y) ds`, where `x₀` is the
/// left edge of the outer disk. `f` must be defined on the whole disk.
pub fn primitive_alpha(omega: &FormOnM, dom: &DomainM) -> Result<FormOnM> {
    omega.expect_degree(2)?;
    let f = &omega.coeffs()[0];
    for p in dom.sample_interior(200) {
        let value = f.eval([p[0], p[1], 0.0])?;
        if !(value > 0.0) {
            return Err(Error::NonPositiveOmega { x: p[0], y: p[1], value });
        }
    }
    let outer = dom.outer();
    let x0 = outer.center[0] - outer.radius;
    let q = Expr::x_integral(f, &Expr::constant(x0), &Expr::x(), &Expr::y(), &Expr::zero());
    // Every horizontal chord of the disk, hole rows included, must be
    // integrable.
    let mut rows: Vec<f64> =
        (0..PRIMITIVE_ROWS).map(|j| outer.center[1] + outer.radius * (2.0 * (j as f64 + 0.5) / PRIMITIVE_ROWS as f64 - 1.0)).collect();
    rows.extend(dom.holes().iter().map(|h| h.center[1]));
    for y in rows {
        let half = (outer.radius.powi(2) - (y - outer.center[1]).powi(2)).max(0.0).sqrt();
        let (a, b) = (outer.center[0] - half, outer.center[0] + half);
        let chord = Expr::x_integral(f, &Expr::constant(a), &Expr::constant(b), &Expr::constant(y), &Expr::zero());
        chord.eval([0.0; 3]).map_err(|source| Error::PrimitiveUndefined { x0: a, x1: b, y, source })?;
    }
    Ok(FormOnM::one_form(Expr::zero(), q))
}

/// A gauge-fixed potential `A = α − H dt + P + c₀ dt + Σ_j c_j β_j`.
#[derive(Clone, Debug)]
pub struct Potential {
    pub form: FormOnQ,
    pub c0: f64,
    /// Coefficients of `β_2, …, β_d`.
    pub c: Vec<f64>,
    /// Periods of `form` over the gauge loops after the correction.
    pub periods: Vec<f64>,
}

/// Potential of `field` whose periods over the loops of `g` vanish.
pub fn vector_potential(field: &ExactField, g: &GaugeSubspace, ctx: &Context) -> Result<Potential> {
    let dom = &ctx.domain;
    let (curve, circle) = (ctx.mesh.curve_rule(), ctx.mesh.circle_rule());
    let alpha = primitive_alpha(field.omega(), dom)?;
    let base = alpha.to_q().sub(&FormOnQ::dt().times(field.h()))?.add(field.perturbation())?;
    let basis = closed_form_basis(dom);
    let mut columns = vec![basis.dt.clone()];
    columns.extend(basis.betas.iter().cloned());

    let rhs: Vec<f64> = periods(&base, g, curve, circle)?.iter().map(|p| -p).collect();
    let cols: Vec<Vec<f64>> = columns.iter().map(|c| periods(c, g, curve, circle)).collect::<Result<_>>()?;
    let matrix: Vec<Vec<f64>> = (0..rhs.len()).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
    let coef = solve(matrix, rhs)?;

    let mut form = base;
    for (c, basis_form) in coef.iter().zip(&columns) {
        form = form.add(&basis_form.scale(*c))?;
    }
    let residual = periods(&form, g, curve, circle)?;
    Ok(Potential { form, c0: coef[0], c: coef[1..].to_vec(), periods: residual })
}

/// Gaussian elimination with partial pivoting.
fn solve(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    let scale = m.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs())).max(1.0);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).expect("nonempty");
        if m[piv][col].abs() < 1e-12 * scale {
            return Err(Error::SingularPeriodMatrix { pivot: m[piv][col] });
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / m[r][r];
    }
    Ok(x)
}

/// `max |dA − B|` over `n` interior sample points of `Q`.
pub fn potential_residual(a: &FormOnQ, b: &FormOnQ, dom: &DomainM, n: usize) -> Result<f64> {
    let da = a.d()?;
    let mut worst = 0.0f64;
    for (j, p) in dom.sample_interior(n).into_iter().enumerate() {
        let q = [p[0], p[1], crate::geometry::halton(j as u64 + 1, 5)];
        let (u, v) = (da.eval(q)?, b.eval(q)?);
        for (x, y) in u.iter().zip(&v) {
            worst = worst.max((x - y).abs());
        }
    }
    Ok(worst)
}
