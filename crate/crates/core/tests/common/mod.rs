#![allow(dead_code)]

use std::f64::consts::PI;

use helixforms::expr::{parse, Expr, Var};
use helixforms::fields::admissible_hamiltonian;
use helixforms::forms::FormOnM;
use helixforms::gauge::ExactField;
use helixforms::geometry::{Circle, DomainM, QuadratureSettings};
use helixforms::Context;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn settings(level: usize) -> QuadratureSettings {
    QuadratureSettings { level, ..Default::default() }
}

pub fn annulus() -> DomainM {
    DomainM::annulus(1.0, 2.0).unwrap()
}

/// `R = 3` with holes of radius `0.6` at `(±1.2, 0)`.
pub fn two_hole() -> DomainM {
    DomainM::new(Circle::new([0.0, 0.0], 3.0), vec![Circle::new([-1.2, 0.0], 0.6), Circle::new([1.2, 0.0], 0.6)])
        .unwrap()
}

pub fn ctx(dom: DomainM, level: usize) -> Context {
    Context::new(dom, settings(level)).unwrap()
}

/// `ω = dx∧dy`, `H = (4 − x² − y²)/3` on the annulus `1 ≤ r ≤ 2`.
pub fn annulus_basic(dom: &DomainM) -> ExactField {
    ExactField::new(FormOnM::area(Expr::one()), parse("(4-x^2-y^2)/3").unwrap(), dom).unwrap()
}

/// A non-autonomous field on [`two_hole`] with distinct boundary values.
pub fn two_hole_field(dom: &DomainM) -> ExactField {
    let h = admissible_hamiltonian(
        dom,
        &[parse("1+0.5*sin(2*pi*t)").unwrap(), parse("-0.7").unwrap()],
        &parse("0.02*(1+x*y/9)+0.01*cos(2*pi*t)").unwrap(),
    );
    ExactField::new(FormOnM::area(parse("1+0.2*x").unwrap()), h, dom).unwrap()
}

fn coef(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> Expr {
    Expr::constant(r.gen_range(lo..hi))
}

/// `1 + a sin(bx + cy + φ)` with `|a| ≤ 0.4`.
pub fn random_density(r: &mut ChaCha8Rng) -> Expr {
    let arg = Expr::x().mul(&coef(r, -1.0, 1.0)).add(&Expr::y().mul(&coef(r, -1.0, 1.0))).add(&coef(r, 0.0, 6.0));
    Expr::one().add(&arg.sin().mul(&coef(r, -0.4, 0.4)))
}

/// `p + q sin(2π t + φ)`.
pub fn random_wave(r: &mut ChaCha8Rng) -> Expr {
    let phase = Expr::t().scale(2.0 * PI).add(&coef(r, 0.0, 6.0));
    coef(r, -1.0, 1.0).add(&phase.sin().mul(&coef(r, -0.5, 0.5)))
}

/// Smooth `t`-periodic function on `Q`.
pub fn random_smooth(r: &mut ChaCha8Rng) -> Expr {
    let a = Expr::x().mul(&coef(r, -1.0, 1.0)).add(&Expr::y().mul(&coef(r, -1.0, 1.0)));
    let b = Expr::t().scale(2.0 * PI).add(&coef(r, 0.0, 6.0));
    let c = Expr::x().mul(&Expr::y()).mul(&coef(r, -0.5, 0.5));
    a.sin().mul(&coef(r, -1.0, 1.0)).add(&b.cos().mul(&Expr::x().mul(&coef(r, -1.0, 1.0)))).add(&c).add(&coef(r, -1.0, 1.0))
}

/// Random admissible `(ω, H)` on `dom`.
pub fn random_field(r: &mut ChaCha8Rng, dom: &DomainM) -> ExactField {
    let omega = FormOnM::area(random_density(r));
    let boundary: Vec<Expr> = dom.holes().iter().map(|_| random_wave(r)).collect();
    let interior = random_smooth(r);
    ExactField::new(omega, admissible_hamiltonian(dom, &boundary, &interior), dom).unwrap()
}

/// Random smooth expression tree of the given depth, defined on all of
/// `R³`.
pub fn random_expr(r: &mut ChaCha8Rng, depth: usize) -> Expr {
    if depth == 0 || r.gen_bool(0.2) {
        return match r.gen_range(0..4) {
            0 => Expr::x(),
            1 => Expr::y(),
            2 => Expr::t(),
            _ => Expr::constant((r.gen_range(-2.0..2.0f64) * 8.0).round() / 8.0),
        };
    }
    let a = random_expr(r, depth - 1);
    match r.gen_range(0..11) {
        0 => a.sin(),
        1 => a.cos(),
        2 => a.sin().exp(),
        3 => a.neg(),
        4 => a.powf(2.0),
        5 => Expr::one().add(&a.powf(2.0)).sqrt(),
        6 => Expr::constant(2.0).add(&a.sin()).ln(),
        7 => a.add(&random_expr(r, depth - 1)),
        8 => a.sub(&random_expr(r, depth - 1)),
        9 => a.mul(&random_expr(r, depth - 1)),
        _ => a.div(&Expr::constant(1.5).add(&random_expr(r, depth - 1).cos())),
    }
}

/// Largest `|∂e/∂v − FD|/(1 + |∂e/∂v|)` over `points` with step `h`.
pub fn fd_mismatch(e: &Expr, points: &[[f64; 3]], h: f64) -> f64 {
    let mut worst = 0.0f64;
    for v in [Var::X, Var::Y, Var::T] {
        let d = e.diff(v);
        for p in points {
            let (mut lo, mut hi) = (*p, *p);
            lo[v.index()] -= h;
            hi[v.index()] += h;
            let fd = (e.eval(hi).unwrap() - e.eval(lo).unwrap()) / (2.0 * h);
            let exact = d.eval(*p).unwrap();
            worst = worst.max((exact - fd).abs() / (1.0 + exact.abs()));
        }
    }
    worst
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
