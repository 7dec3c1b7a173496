use super::{apply_diffeo, max_difference, DiffeoQ};
use crate::context::Context;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::forms::{FormOnM, FormOnQ};
use crate::gauge::{vector_potential, ExactField};
use crate::homology::gauge_loops;
use crate::invariants::{helicity, pairing};

/// Relative tolerance on equal endpoint helicities.
pub const ENDPOINT_TOL: f64 = 1e-5;

/// One sample `(u, B_u, H(B_u))` of a path.
#[derive(Clone, Debug)]
pub struct PathSample {
    pub u: f64,
    pub b: FormOnQ,
    pub helicity: f64,
}

fn uniform(samples: usize) -> Vec<f64> {
    match samples {
        0 => vec![],
        1 => vec![0.0],
        n => (0..n).map(|j| j as f64 / (n - 1) as f64).collect(),
    }
}

fn same_helicity(h0: f64, h1: f64) -> Result<()> {
    if (h0 - h1).abs() > ENDPOINT_TOL * h0.abs().max(h1.abs()) {
        return Err(Error::HelicityMismatch { h0, h1 });
    }
    if h0 == 0.0 {
        return Err(Error::HelicitySignChange { u: 0.0, value: 0.0 });
    }
    Ok(())
}

/// `B_u = ((1−u)B₀ + uB₁)·sqrt(c / H((1−u)B₀ + uB₁))` at `samples` evenly
/// spaced `u ∈ [0, 1]`, with helicity in the gauge `(l, k)`.
pub fn path_lemma1a(
    f0: &ExactField,
    f1: &ExactField,
    samples: usize,
    (l, k): (usize, usize),
    ctx: &Context,
) -> Result<Vec<PathSample>> {
    let c = helicity(f0, l, k, ctx)?;
    same_helicity(c, helicity(f1, l, k, ctx)?)?;
    uniform(samples)
        .into_iter()
        .map(|u| {
            let mix = f0.scale(1.0 - u).add(&f1.scale(u))?;
            let value = helicity(&mix, l, k, ctx)?;
            if !(value * c > 0.0) {
                return Err(Error::HelicitySignChange { u, value });
            }
            let field = mix.scale((c / value).sqrt());
            Ok(PathSample { u, helicity: helicity(&field, l, k, ctx)?, b: field.b() })
        })
        .collect()
}

/// `a(u) = 1/(1 − u + uλ) − u/λ`.
pub fn lemma1b_a(u: f64, lambda: f64) -> f64 {
    1.0 / (1.0 - u + u * lambda) - u / lambda
}

/// The path `B_u = ψ_u* B_{μ(u)ω, a(u)H₀ + uH₁}` with `μ(u) = 1 − u + uλ`.
#[derive(Clone, Debug)]
pub struct Lemma1bPath {
    /// Common endpoint helicity.
    pub c: f64,
    /// Each sample's helicity is `∫_Q ψ_u*(B ∧ A)`, computed on the pulled-back forms.
    pub samples: Vec<PathSample>,
    /// Helicity of the unpulled field at each sample.
    pub unpulled: Vec<f64>,
    /// Largest pointwise deviation from `ψ₀*B_{ω,H₀}` and `ψ₁*B_{λω,H₁}`.
    pub endpoint_error: [f64; 2],
}

#[allow(clippy::too_many_arguments)]
pub fn path_lemma1b(
    omega: &FormOnM,
    h0: &Expr,
    h1: &Expr,
    lambda: f64,
    psi: impl Fn(f64) -> Result<DiffeoQ>,
    samples: usize,
    (l, k): (usize, usize),
    ctx: &Context,
) -> Result<Lemma1bPath> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    let dom = &ctx.domain;
    let start = ExactField::new(omega.clone(), h0.clone(), dom)?;
    let end = ExactField::new(omega.scale(lambda), h1.clone(), dom)?;
    let c = helicity(&start, l, k, ctx)?;
    same_helicity(c, helicity(&end, l, k, ctx)?)?;
    let g = gauge_loops(dom, l, k)?;

    let us = uniform(samples);
    let mut out = Vec::with_capacity(us.len());
    let mut unpulled = Vec::with_capacity(us.len());
    for u in us {
        let mu = 1.0 - u + u * lambda;
        let field = ExactField::unchecked(omega.scale(mu), h0.scale(lemma1b_a(u, lambda)).add(&h1.scale(u)));
        let map = psi(u)?;
        map.validate(dom)?;
        let pot = vector_potential(&field, &g, ctx)?;
        let (b, a) = (apply_diffeo(&map, &field.b()), apply_diffeo(&map, &pot.form));
        unpulled.push(pairing(&field.b(), &pot.form, ctx)?);
        out.push(PathSample { u, helicity: pairing(&b, &a, ctx)?, b });
    }

    let mut endpoint_error = [0.0; 2];
    if let (Some(first), Some(last)) = (out.first(), out.last()) {
        if first.u == 0.0 {
            endpoint_error[0] = max_difference(&first.b, &apply_diffeo(&psi(0.0)?, &start.b()), dom, 1000)?;
        }
        if last.u == 1.0 {
            endpoint_error[1] = max_difference(&last.b, &apply_diffeo(&psi(1.0)?, &end.b()), dom, 1000)?;
        }
    }
    Ok(Lemma1bPath { c, samples: out, unpulled, endpoint_error })
}
