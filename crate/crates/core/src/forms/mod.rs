//! Differential forms with [`Expr`] coefficients on `M` and on
//! `Q = M × S¹`.
//!
//! Forms on `Q` use the coframe `dx, dy, dt` with components
//!
//! * degree 1: `(a_x, a_y, a_t)` for `a_x dx + a_y dy + a_t dt`;
//! * degree 2: `(b_yt, b_tx, b_xy)` for `b_yt dy∧dt + b_tx dt∧dx + b_xy dx∧dy`;
//! * degree 3: `c` for `c dx∧dy∧dt`, which is the positive orientation of `Q`.
//!
//! With this ordering a 2-form behaves like a vector field: `d` of a 1-form
//! is the curl, `d` of a 2-form the divergence, `a ∧ b` of 1-forms the cross
//! product and `B ∧ A` the dot product.

mod integrate;

pub use integrate::{Reduction, Region};

use crate::error::{Error, Result};
use crate::expr::{Expr, Var};

fn cross(a: &[Expr], b: &[Expr]) -> Vec<Expr> {
    vec![
        a[1].mul(&b[2]).sub(&a[2].mul(&b[1])),
        a[2].mul(&b[0]).sub(&a[0].mul(&b[2])),
        a[0].mul(&b[1]).sub(&a[1].mul(&b[0])),
    ]
}

fn dot(a: &[Expr], b: &[Expr]) -> Expr {
    a[0].mul(&b[0]).add(&a[1].mul(&b[1])).add(&a[2].mul(&b[2]))
}

fn components(degree: usize) -> usize {
    if degree == 0 || degree == 3 {
        1
    } else {
        3
    }
}

/// A form of degree 0 to 3 on `Q`.
#[derive(Clone, Debug)]
pub struct FormOnQ {
    degree: usize,
    coeffs: Vec<Expr>,
}

impl FormOnQ {
    /// Build from coefficients in coframe order; panics on a count mismatch.
    pub fn new(degree: usize, coeffs: Vec<Expr>) -> FormOnQ {
        assert!(degree <= 3, "forms on Q have degree at most 3");
        assert_eq!(coeffs.len(), components(degree), "coefficient count for degree {degree}");
        FormOnQ { degree, coeffs }
    }

    pub fn zero(degree: usize) -> FormOnQ {
        FormOnQ::new(degree, vec![Expr::zero(); components(degree)])
    }

    pub fn function(f: Expr) -> FormOnQ {
        FormOnQ::new(0, vec![f])
    }

    pub fn one_form(ax: Expr, ay: Expr, at: Expr) -> FormOnQ {
        FormOnQ::new(1, vec![ax, ay, at])
    }

    pub fn two_form(byt: Expr, btx: Expr, bxy: Expr) -> FormOnQ {
        FormOnQ::new(2, vec![byt, btx, bxy])
    }

    pub fn volume(c: Expr) -> FormOnQ {
        FormOnQ::new(3, vec![c])
    }

    pub fn dx() -> FormOnQ {
        FormOnQ::one_form(Expr::one(), Expr::zero(), Expr::zero())
    }

    pub fn dy() -> FormOnQ {
        FormOnQ::one_form(Expr::zero(), Expr::one(), Expr::zero())
    }

    pub fn dt() -> FormOnQ {
        FormOnQ::one_form(Expr::zero(), Expr::zero(), Expr::one())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Expr] {
        &self.coeffs
    }

    pub fn expect_degree(&self, expected: usize) -> Result<()> {
        if self.degree == expected {
            Ok(())
        } else {
            Err(Error::Degree { expected, found: self.degree })
        }
    }

    fn zip(&self, other: &FormOnQ, op: impl Fn(&Expr, &Expr) -> Expr) -> Result<FormOnQ> {
        other.expect_degree(self.degree)?;
        Ok(FormOnQ::new(self.degree, self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| op(a, b)).collect()))
    }

    pub fn add(&self, other: &FormOnQ) -> Result<FormOnQ> {
        self.zip(other, Expr::add)
    }

    pub fn sub(&self, other: &FormOnQ) -> Result<FormOnQ> {
        self.zip(other, Expr::sub)
    }

    pub fn scale(&self, s: f64) -> FormOnQ {
        self.map(|c| c.scale(s))
    }

    /// Multiply every coefficient by the function `f`.
    pub fn times(&self, f: &Expr) -> FormOnQ {
        self.map(|c| f.mul(c))
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> FormOnQ {
        FormOnQ::new(self.degree, self.coeffs.iter().map(f).collect())
    }

    /// Graded-commutative exterior product.
    pub fn wedge(&self, other: &FormOnQ) -> Result<FormOnQ> {
        let (p, q) = (self.degree, other.degree);
        if p + q > 3 {
            return Err(Error::DegreeOverflow(p, q));
        }
        Ok(match (p, q) {
            (0, _) => other.times(&self.coeffs[0]),
            (_, 0) => self.times(&other.coeffs[0]),
            (1, 1) => FormOnQ::new(2, cross(&self.coeffs, &other.coeffs)),
            // A 1-form and a 2-form commute.
            (1, 2) | (2, 1) => FormOnQ::volume(dot(&self.coeffs, &other.coeffs)),
            _ => unreachable!("degrees checked above"),
        })
    }

    /// Exterior derivative.
    pub fn d(&self) -> Result<FormOnQ> {
        let c = &self.coeffs;
        let p = |e: &Expr, v: Var| e.diff(v);
        Ok(match self.degree {
            0 => FormOnQ::new(1, c[0].grad().to_vec()),
            1 => FormOnQ::two_form(
                p(&c[2], Var::Y).sub(&p(&c[1], Var::T)),
                p(&c[0], Var::T).sub(&p(&c[2], Var::X)),
                p(&c[1], Var::X).sub(&p(&c[0], Var::Y)),
            ),
            2 => FormOnQ::volume(p(&c[0], Var::X).add(&p(&c[1], Var::Y)).add(&p(&c[2], Var::T))),
            _ => return Err(Error::DegreeOverflow(3, 1)),
        })
    }

    /// Pullback by `ψ = (ψ_x, ψ_y, ψ_t)`, using Jacobian minors.
    pub fn pullback(&self, map: &[Expr; 3]) -> FormOnQ {
        let c: Vec<Expr> = self.coeffs.iter().map(|e| e.substitute(map)).collect();
        let grads: Vec<Vec<Expr>> = map.iter().map(|m| m.grad().to_vec()).collect();
        match self.degree {
            0 => FormOnQ::new(0, c),
            1 => {
                let coeffs = (0..3)
                    .map(|v| c[0].mul(&grads[0][v]).add(&c[1].mul(&grads[1][v])).add(&c[2].mul(&grads[2][v])))
                    .collect();
                FormOnQ::new(1, coeffs)
            }
            2 => {
                let pairs = [cross(&grads[1], &grads[2]), cross(&grads[2], &grads[0]), cross(&grads[0], &grads[1])];
                let coeffs = (0..3)
                    .map(|v| c[0].mul(&pairs[0][v]).add(&c[1].mul(&pairs[1][v])).add(&c[2].mul(&pairs[2][v])))
                    .collect();
                FormOnQ::new(2, coeffs)
            }
            _ => FormOnQ::volume(c[0].mul(&dot(&grads[0], &cross(&grads[1], &grads[2])))),
        }
    }

    /// Pullback to `M × {t0}`: substitute `t = t0` and drop `dt` terms.
    pub fn restrict_slice(&self, t0: f64) -> Result<FormOnM> {
        let at = |e: &Expr| e.fix(Var::T, t0);
        Ok(match self.degree {
            0 => FormOnM::function(at(&self.coeffs[0])),
            1 => FormOnM::one_form(at(&self.coeffs[0]), at(&self.coeffs[1])),
            2 => FormOnM::area(at(&self.coeffs[2])),
            _ => return Err(Error::Degree { expected: 2, found: 3 }),
        })
    }

    /// Coefficient values at `p`.
    pub fn eval(&self, p: [f64; 3]) -> Result<Vec<f64>> {
        Ok(self.coeffs.iter().map(|c| c.eval(p)).collect::<Result<Vec<_>, _>>()?)
    }
}

/// A form of degree 0 to 2 on `M`; coefficients never involve `t`.
#[derive(Clone, Debug)]
pub struct FormOnM {
    degree: usize,
    coeffs: Vec<Expr>,
}

impl FormOnM {
    fn checked(degree: usize, coeffs: Vec<Expr>) -> FormOnM {
        assert!(coeffs.iter().all(|c| !c.depends_on(Var::T)), "forms on M cannot depend on t");
        FormOnM { degree, coeffs }
    }

    pub fn function(f: Expr) -> FormOnM {
        FormOnM::checked(0, vec![f])
    }

    /// `p dx + q dy`.
    pub fn one_form(p: Expr, q: Expr) -> FormOnM {
        FormOnM::checked(1, vec![p, q])
    }

    /// `f dx∧dy`.
    pub fn area(f: Expr) -> FormOnM {
        FormOnM::checked(2, vec![f])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Expr] {
        &self.coeffs
    }

    pub fn expect_degree(&self, expected: usize) -> Result<()> {
        if self.degree == expected {
            Ok(())
        } else {
            Err(Error::Degree { expected, found: self.degree })
        }
    }

    pub fn scale(&self, s: f64) -> FormOnM {
        FormOnM { degree: self.degree, coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect() }
    }

    pub fn d(&self) -> Result<FormOnM> {
        let c = &self.coeffs;
        Ok(match self.degree {
            0 => FormOnM::one_form(c[0].diff(Var::X), c[0].diff(Var::Y)),
            1 => FormOnM::area(c[1].diff(Var::X).sub(&c[0].diff(Var::Y))),
            _ => return Err(Error::DegreeOverflow(2, 1)),
        })
    }

    /// `π_M^*`, the pullback along the projection `Q → M`.
    pub fn to_q(&self) -> FormOnQ {
        let c = &self.coeffs;
        match self.degree {
            0 => FormOnQ::function(c[0].clone()),
            1 => FormOnQ::one_form(c[0].clone(), c[1].clone(), Expr::zero()),
            _ => FormOnQ::two_form(Expr::zero(), Expr::zero(), c[0].clone()),
        }
    }

    pub fn eval(&self, p: [f64; 2]) -> Result<Vec<f64>> {
        Ok(self.coeffs.iter().map(|c| c.eval([p[0], p[1], 0.0])).collect::<Result<Vec<_>, _>>()?)
    }
}

const PERIODICITY_TOL: f64 = 1e-10;

/// `B_{ω,H} = π_M^*ω − dH∧dt`, after sampling `ω > 0` on `M` and
/// `H(·, 0) = H(·, 1)`.
pub fn make_b(omega: &FormOnM, h: &Expr, dom: &crate::geometry::DomainM) -> Result<FormOnQ> {
    omega.expect_degree(2)?;
    let f = &omega.coeffs()[0];
    let mut samples = dom.sample_interior(400);
    samples.extend(dom.sample_boundary(32).into_iter().flat_map(|(_, p)| p));
    for p in &samples {
        let value = f.eval([p[0], p[1], 0.0])?;
        if !(value > 0.0) {
            return Err(Error::NonPositiveOmega { x: p[0], y: p[1], value });
        }
        let gap = h.eval([p[0], p[1], 0.0])? - h.eval([p[0], p[1], 1.0])?;
        if gap.abs() > PERIODICITY_TOL {
            return Err(Error::NonPeriodicH { x: p[0], y: p[1], gap });
        }
    }
    Ok(normal_form(f, h))
}

/// `f dx∧dy − dH∧dt` without validation.
pub fn normal_form(f: &Expr, h: &Expr) -> FormOnQ {
    FormOnQ::two_form(h.diff(Var::Y).neg(), h.diff(Var::X), f.clone())
}
