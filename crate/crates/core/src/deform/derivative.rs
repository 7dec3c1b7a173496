use std::f64::consts::TAU;

use super::{apply_diffeo, max_difference, DiffeoQ};
use crate::context::Context;
use crate::error::{Error, Result};
use crate::expr::{Expr, Func};
use crate::forms::FormOnQ;
use crate::gauge::ExactField;
use crate::geometry::{halton, DomainM, Point2};
use crate::homology::{kappa_basis, Loop};
use crate::invariants::{helicity, pairing, sample_q};

/// Tolerance on the `∂Q`-periods of a variation.
pub const PERIOD_TOL: f64 = 1e-8;

/// Tolerance on `‖ψ*B − B‖` for a stabilizer.
pub const STABILIZER_TOL: f64 = 1e-8;

/// A variation 1-form `A′` with all `∂Q`-periods zero.
#[derive(Clone, Debug)]
pub struct VariationForm {
    form: FormOnQ,
    /// Centre and radius of a disk in `M` containing the support, if known.
    support: Option<(Point2, f64)>,
}

impl VariationForm {
    /// `φ(x, y)·(1 + ½ sin 2π(t + phase))·(a dx + b dy + c dt)` with
    /// `φ = pos(1 − ρ²/r²)⁶`, `ρ` the distance to `center`.
    pub fn bump(dom: &DomainM, center: Point2, radius: f64, coeffs: [f64; 3], phase: f64) -> Result<VariationForm> {
        if !(radius > 0.0) || dom.clearance(center) <= radius {
            return Err(Error::NotAdmissible(format!(
                "bump of radius {radius} at ({}, {}) does not fit inside M",
                center[0], center[1]
            )));
        }
        let dx = Expr::x().sub(&Expr::constant(center[0]));
        let dy = Expr::y().sub(&Expr::constant(center[1]));
        let rho2 = dx.powf(2.0).add(&dy.powf(2.0)).scale(1.0 / (radius * radius));
        let phi = Expr::call(Func::Pos, &Expr::one().sub(&rho2)).powf(6.0);
        let wave = Expr::t().add(&Expr::constant(phase)).scale(TAU).sin().scale(0.5).add(&Expr::one());
        let g = phi.mul(&wave);
        let form = FormOnQ::one_form(g.scale(coeffs[0]), g.scale(coeffs[1]), g.scale(coeffs[2]));
        Ok(VariationForm { form, support: Some((center, radius)) })
    }

    /// `A′ = df` for a function `f` on `Q` that is 1-periodic in `t`.
    pub fn exact(f: &Expr) -> VariationForm {
        let [fx, fy, ft] = f.grad();
        VariationForm { form: FormOnQ::one_form(fx, fy, ft), support: None }
    }

    /// An arbitrary 1-form. Periods are not checked here; see
    /// [`VariationForm::check_periods`].
    pub fn from_form(form: FormOnQ) -> Result<VariationForm> {
        form.expect_degree(1)?;
        Ok(VariationForm { form, support: None })
    }

    pub fn form(&self) -> &FormOnQ {
        &self.form
    }

    pub fn support(&self) -> Option<(Point2, f64)> {
        self.support
    }

    /// `αA′ + βA″`.
    pub fn combine(&self, alpha: f64, other: &VariationForm, beta: f64) -> VariationForm {
        let form = self.form.scale(alpha).add(&other.form.scale(beta)).expect("both are 1-forms");
        VariationForm { form, support: None }
    }

    /// `ψ*A′`. Supports are tracked only for maps acting trivially on `M`.
    pub fn pullback(&self, psi: &DiffeoQ) -> VariationForm {
        let keeps_m = matches!(psi.family(), super::Family::Identity | super::Family::Fiber { .. } | super::Family::Shear { .. });
        VariationForm { form: apply_diffeo(psi, &self.form), support: if keeps_m { self.support } else { None } }
    }

    /// Largest `|∮ A′|` over the fibers at the anchors and the boundary
    /// circles at two heights; errors above [`PERIOD_TOL`].
    pub fn check_periods(&self, ctx: &Context) -> Result<f64> {
        let dom = &ctx.domain;
        let mut loops = Vec::new();
        for (n, curve) in dom.boundary_circles().into_iter().enumerate() {
            let i = n + 1;
            loops.push(Loop::Fiber { circle: i, point: dom.anchor(i)? });
            loops.push(Loop::Boundary { circle: i, curve: curve.clone(), t: 0.0 });
            loops.push(Loop::Boundary { circle: i, curve, t: 0.37 });
        }
        let mut worst = 0.0f64;
        for l in &loops {
            let p = l.integrate(&self.form, ctx.mesh.curve_rule(), ctx.mesh.circle_rule())?;
            if p.abs() > PERIOD_TOL {
                return Err(Error::NotAdmissible(format!("variation has period {p:e} over {}", l.label())));
            }
            worst = worst.max(p.abs());
        }
        Ok(worst)
    }
}

/// `n` deterministic bump probes spread over `M`, each keeping `keep`.
pub fn probe_set(dom: &DomainM, n: usize, keep: impl Fn(Point2, f64) -> bool) -> Vec<VariationForm> {
    let scale = dom.outer().radius;
    let min_radius = 0.25 * scale.min(dom.holes().iter().map(|h| h.radius).fold(scale, f64::min)).min(dom.min_gap());
    let mut out = Vec::with_capacity(n);
    let mut j = 0u64;
    while out.len() < n && j < 100_000 {
        j += 1;
        let p = dom.sample_interior(j as usize).pop().expect("one point");
        let radius = (0.8 * dom.clearance(p)).min(0.25 * scale);
        if radius < min_radius || !keep(p, radius) {
            continue;
        }
        let coeffs = [2.0 * halton(j, 7) - 1.0, 2.0 * halton(j, 11) - 1.0, 2.0 * halton(j, 13) - 1.0];
        if let Ok(v) = VariationForm::bump(dom, p, radius, coeffs, halton(j, 17)) {
            out.push(v);
        }
    }
    out
}

/// A functional on exact fields.
#[derive(Clone, Debug, PartialEq)]
pub enum Functional {
    /// `H_ℓk`.
    Helicity { l: usize, k: usize },
    /// Component `index` of the flux over the basis `M × {0}, Π_1k`.
    Flux(usize),
    /// `H_ℓk²`.
    SquaredHelicity { l: usize, k: usize },
    /// `H_ℓk + Σ_i w_i·Flux_i`.
    FluxWeighted { l: usize, k: usize, weights: Vec<f64> },
}

impl Functional {
    pub fn label(&self) -> String {
        match self {
            Functional::Helicity { l, k } => format!("helicity[{l},{k}]"),
            Functional::Flux(i) => format!("flux[{i}]"),
            Functional::SquaredHelicity { l, k } => format!("sq-helicity[{l},{k}]"),
            Functional::FluxWeighted { l, k, .. } => format!("flux-weighted[{l},{k}]"),
        }
    }
}

fn fluxes(b: &FormOnQ, ctx: &Context) -> Result<Vec<f64>> {
    kappa_basis(&ctx.domain)?.chains.iter().map(|c| c.integrate(b, &ctx.mesh, ctx.reduction)).collect()
}

pub fn evaluate(i: &Functional, field: &ExactField, ctx: &Context) -> Result<f64> {
    match i {
        Functional::Helicity { l, k } => helicity(field, *l, *k, ctx),
        Functional::SquaredHelicity { l, k } => Ok(helicity(field, *l, *k, ctx)?.powi(2)),
        Functional::Flux(index) => {
            let all = fluxes(&field.b(), ctx)?;
            all.get(*index).copied().ok_or_else(|| Error::InvalidParameter(format!("flux index {index} out of range 0..{}", all.len())))
        }
        Functional::FluxWeighted { l, k, weights } => {
            let f = fluxes(&field.b(), ctx)?;
            if weights.len() != f.len() {
                return Err(Error::InvalidParameter(format!("{} weights for {} flux components", weights.len(), f.len())));
            }
            Ok(helicity(field, *l, *k, ctx)? + weights.iter().zip(&f).map(|(w, v)| w * v).sum::<f64>())
        }
    }
}

/// Central differences at `h, h/2, h/4` and the Richardson value.
#[derive(Clone, Debug)]
pub struct Derivative {
    pub steps: [f64; 3],
    pub central: [f64; 3],
    /// `(4 D(h/4) − D(h/2)) / 3`.
    pub richardson: f64,
    /// Difference of the two Richardson values of the sweep.
    pub error_estimate: f64,
}

impl Derivative {
    pub fn value(&self) -> f64 {
        self.richardson
    }
}

fn check_nonvanishing(field: &ExactField, a: &FormOnQ, u: f64, dom: &DomainM) -> Result<()> {
    let b = field.perturbed(&a.scale(u))?.b();
    let values: Vec<(_, f64)> = sample_q(dom, 500)
        .into_iter()
        .map(|p| Ok((p, b.eval(p)?.iter().map(|v| v * v).sum::<f64>().sqrt())))
        .collect::<Result<_>>()?;
    let top = values.iter().fold(0.0f64, |m, (_, v)| m.max(*v));
    for (p, v) in values {
        if v <= 1e-10 * top.max(1e-300) {
            return Err(Error::LeavesDomain { u, x: p[0], y: p[1], t: p[2] });
        }
    }
    Ok(())
}

/// `d/du I(B + u dA′)` at `u = 0` by central differences with step sweep
/// `h, h/2, h/4` and Richardson extrapolation.
pub fn directional_derivative(
    i: &Functional,
    field: &ExactField,
    probe: &VariationForm,
    h: f64,
    ctx: &Context,
) -> Result<Derivative> {
    let a = probe.form();
    check_nonvanishing(field, a, h, &ctx.domain)?;
    check_nonvanishing(field, a, -h, &ctx.domain)?;
    let steps = [h, h / 2.0, h / 4.0];
    let mut central = [0.0; 3];
    for (d, s) in central.iter_mut().zip(steps) {
        let plus = evaluate(i, &field.perturbed(&a.scale(s))?, ctx)?;
        let minus = evaluate(i, &field.perturbed(&a.scale(-s))?, ctx)?;
        *d = (plus - minus) / (2.0 * s);
    }
    let r1 = (4.0 * central[1] - central[0]) / 3.0;
    let r2 = (4.0 * central[2] - central[1]) / 3.0;
    Ok(Derivative { steps, central, richardson: r2, error_estimate: (r2 - r1).abs() })
}

/// Sweep of [`directional_derivative`] over several starting steps.
pub fn derivative_sweep(
    i: &Functional,
    field: &ExactField,
    probe: &VariationForm,
    steps: &[f64],
    ctx: &Context,
) -> Result<Vec<Derivative>> {
    steps.iter().map(|h| directional_derivative(i, field, probe, *h, ctx)).collect()
}

/// Least-squares fit of `D_B I(A′_i) ≈ λ̂ ∫_Q B ∧ A′_i`.
#[derive(Clone, Debug)]
pub struct DensityFit {
    pub lambda: f64,
    /// `‖D − λ̂x‖ / ‖x‖`, in units of `λ`.
    pub residual: f64,
    pub pairings: Vec<f64>,
    pub derivatives: Vec<Derivative>,
}

fn check_independent(probes: &[VariationForm], dom: &DomainM) -> Result<()> {
    let points = sample_q(dom, 400);
    let rows: Vec<Vec<f64>> = probes
        .iter()
        .map(|v| {
            let mut row = Vec::with_capacity(3 * points.len());
            for p in &points {
                row.extend(v.form().eval(*p)?);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let n = rows.len();
    let mut g = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in 0..n {
            g[a][b] = rows[a].iter().zip(&rows[b]).map(|(u, v)| u * v).sum();
        }
    }
    // Cholesky pivots relative to the diagonal.
    for c in 0..n {
        let diag = g[c][c];
        let mut s = diag;
        for k in 0..c {
            s -= g[c][k] * g[c][k];
        }
        if !(s > 1e-10 * diag) {
            return Err(Error::DegenerateProbes(format!("probe {c} is dependent on the previous ones")));
        }
        let s = s.sqrt();
        g[c][c] = s;
        for r in c + 1..n {
            let mut v = g[r][c];
            for k in 0..c {
                v -= g[r][k] * g[c][k];
            }
            g[r][c] = v / s;
        }
    }
    Ok(())
}

pub fn estimate_density_ratio(
    i: &Functional,
    field: &ExactField,
    probes: &[VariationForm],
    h: f64,
    ctx: &Context,
) -> Result<DensityFit> {
    if probes.len() < 3 {
        return Err(Error::DegenerateProbes(format!("need at least 3 probes, got {}", probes.len())));
    }
    check_independent(probes, &ctx.domain)?;
    let b = field.b();
    let pairings: Vec<f64> = probes.iter().map(|p| pairing(&b, p.form(), ctx)).collect::<Result<_>>()?;
    let derivatives: Vec<Derivative> =
        probes.iter().map(|p| directional_derivative(i, field, p, h, ctx)).collect::<Result<_>>()?;
    DensityFit::from_values(pairings, derivatives)
}

impl DensityFit {
    /// Fit from precomputed pairings and derivatives, e.g. a subset of
    /// another fit.
    pub fn from_values(pairings: Vec<f64>, derivatives: Vec<Derivative>) -> Result<DensityFit> {
        assert_eq!(pairings.len(), derivatives.len(), "one pairing per derivative");
        let xx: f64 = pairings.iter().map(|x| x * x).sum();
        if !(xx > 0.0) {
            return Err(Error::DegenerateProbes("all pairings with B vanish".into()));
        }
        let lambda = pairings.iter().zip(&derivatives).map(|(x, d)| x * d.value()).sum::<f64>() / xx;
        let res2: f64 = pairings.iter().zip(&derivatives).map(|(x, d)| (d.value() - lambda * x).powi(2)).sum();
        Ok(DensityFit { lambda, residual: (res2 / xx).sqrt(), pairings, derivatives })
    }

    /// The fit restricted to the probes at `indices`.
    pub fn subset(&self, indices: &[usize]) -> Result<DensityFit> {
        DensityFit::from_values(
            indices.iter().map(|&i| self.pairings[i]).collect(),
            indices.iter().map(|&i| self.derivatives[i].clone()).collect(),
        )
    }
}

/// `(D_B I(A′), D_B I(ψ*A′))` for a stabilizer `ψ` of `B`.
pub fn verify_lemma2(
    i: &Functional,
    field: &ExactField,
    psi: &DiffeoQ,
    probe: &VariationForm,
    h: f64,
    ctx: &Context,
) -> Result<(Derivative, Derivative)> {
    let b = field.b();
    let dev = max_difference(&apply_diffeo(psi, &b), &b, &ctx.domain, 1000)?;
    if dev > STABILIZER_TOL {
        return Err(Error::NotAStabilizer(dev));
    }
    let moved = probe.pullback(psi);
    Ok((directional_derivative(i, field, probe, h, ctx)?, directional_derivative(i, field, &moved, h, ctx)?))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::expr::parse;
    use crate::forms::FormOnM;
    use crate::geometry::QuadratureSettings;

    fn setup(level: usize) -> (Context, ExactField) {
        let dom = DomainM::annulus(1.0, 2.0).unwrap();
        let field = ExactField::new(FormOnM::area(Expr::one()), parse("(4-x^2-y^2)/3").unwrap(), &dom).unwrap();
        (Context::new(dom, QuadratureSettings { level, n_t: 8, ..Default::default() }).unwrap(), field)
    }

    #[test]
    fn bump_has_zero_periods_and_compact_support() {
        let (ctx, _) = setup(1);
        let v = VariationForm::bump(&ctx.domain, [1.5, 0.0], 0.4, [1.0, -0.5, 0.3], 0.2).unwrap();
        assert_eq!(v.check_periods(&ctx).unwrap(), 0.0);
        assert_eq!(v.form().eval([1.5, 0.41, 0.3]).unwrap(), vec![0.0; 3]);
        assert!(VariationForm::bump(&ctx.domain, [1.5, 0.0], 0.6, [1.0; 3], 0.0).is_err());
    }

    #[test]
    fn exact_variation_does_not_move_helicity() {
        let (ctx, field) = setup(1);
        let v = VariationForm::exact(&parse("sin(x)*y + cos(2*pi*t)*x").unwrap());
        let d = directional_derivative(&Functional::Helicity { l: 1, k: 1 }, &field, &v, 0.1, &ctx).unwrap();
        assert!(d.value().abs() < 1e-9 * PI, "{d:?}");
    }

    #[test]
    fn probe_set_is_deterministic_and_independent() {
        let (ctx, _) = setup(1);
        let a = probe_set(&ctx.domain, 6, |_, _| true);
        let b = probe_set(&ctx.domain, 6, |_, _| true);
        assert_eq!(a.len(), 6);
        for (u, v) in a.iter().zip(&b) {
            assert_eq!(u.support(), v.support());
        }
        check_independent(&a, &ctx.domain).unwrap();
        let dup = vec![a[0].clone(), a[1].clone(), a[0].combine(2.0, &a[1], -1.0)];
        assert!(matches!(check_independent(&dup, &ctx.domain), Err(Error::DegenerateProbes(_))));
    }

    #[test]
    fn too_few_probes_are_rejected() {
        let (ctx, field) = setup(0);
        let p = probe_set(&ctx.domain, 2, |_, _| true);
        let r = estimate_density_ratio(&Functional::Helicity { l: 1, k: 1 }, &field, &p, 0.1, &ctx);
        assert!(matches!(r, Err(Error::DegenerateProbes(_))));
    }

    #[test]
    fn non_stabilizer_is_rejected() {
        let (ctx, _) = setup(0);
        let field = ExactField::new(
            FormOnM::area(Expr::one()),
            parse("(4-x^2-y^2)/3*(1+0.5*sin(2*pi*t))").unwrap(),
            &ctx.domain,
        )
        .unwrap();
        let p = probe_set(&ctx.domain, 1, |_, _| true).pop().unwrap();
        let r = verify_lemma2(&Functional::Flux(0), &field, &DiffeoQ::fiber_rotation(0.3), &p, 0.1, &ctx);
        assert!(matches!(r, Err(Error::NotAStabilizer(_))));
    }
}
