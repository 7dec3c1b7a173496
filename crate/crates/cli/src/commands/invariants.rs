use helixforms::deform::apply_diffeo;
use helixforms::forms::Region;
use helixforms::gauge::vector_potential;
use helixforms::homology::{gauge_loops, kappa_basis};
use helixforms::invariants::{calabi, flux, helicity, helicity_matrix};
use helixforms::Context;
use serde_json::json;

use super::context;
use crate::error::Result;
use crate::report::{Check, Report};
use crate::scenario::Scenario;

#[derive(Clone, Copy, Debug, Default)]
pub struct InvariantsOptions {
    pub gauge: Option<(usize, usize)>,
    pub level: Option<usize>,
    /// Also report `H_ℓk` for every gauge choice.
    pub matrix: bool,
}

struct Values {
    flux: Vec<f64>,
    helicity: f64,
    calabi: f64,
    matrix: Option<Vec<Vec<f64>>>,
}

fn compute(s: &Scenario, ctx: &Context, (l, k): (usize, usize), matrix: bool) -> Result<Values> {
    let f = &s.field;
    Ok(Values {
        flux: flux(&f.b(), &kappa_basis(&ctx.domain)?, ctx)?,
        helicity: helicity(f, l, k, ctx)?,
        calabi: calabi(f.omega(), f.h(), ctx)?,
        matrix: if matrix { Some(helicity_matrix(f, ctx)?) } else { None },
    })
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(u, v)| (u - v).abs()).collect()
}

pub fn cmd_invariants(s: &Scenario, opts: InvariantsOptions) -> Result<Report> {
    let ctx = context(s, opts.level)?;
    let (l, k) = opts.gauge.unwrap_or(s.gauge);
    s.domain.check_index(l)?;
    s.domain.check_index(k)?;
    let level = ctx.mesh.level();
    let fine = compute(s, &ctx, (l, k), opts.matrix)?;
    // Error bars: difference to one level coarser.
    let coarse = match level {
        0 => None,
        _ => Some(compute(s, &context(s, Some(level - 1))?, (l, k), opts.matrix)?),
    };

    let mut r = Report::new("invariants", level);
    let labels: Vec<String> = kappa_basis(&s.domain)?.chains.iter().map(|c| c.label()).collect();
    r.value("flux", json!({
        "chains": labels,
        "values": fine.flux,
        "error_estimate": coarse.as_ref().map(|c| diff(&fine.flux, &c.flux)),
    }));
    r.value("helicity", json!({
        "gauge": [l, k],
        "value": fine.helicity,
        "error_estimate": coarse.as_ref().map(|c| (fine.helicity - c.helicity).abs()),
    }));
    r.value("calabi", json!({
        "value": fine.calabi,
        "error_estimate": coarse.as_ref().map(|c| (fine.calabi - c.calabi).abs()),
    }));
    if let Some(m) = &fine.matrix {
        let err = coarse.as_ref().and_then(|c| c.matrix.as_ref()).map(|cm| {
            m.iter().zip(cm).map(|(a, b)| diff(a, b)).collect::<Vec<_>>()
        });
        r.value("helicity_matrix", json!({ "values": m, "error_estimate": err }));
    }

    if let Some(e) = &s.expected {
        let tol = s.tolerances.expected;
        if let Some(want) = &e.flux {
            if want.len() != fine.flux.len() {
                r.push(Check::skip("expected flux", format!("{} values given, basis has {}", want.len(), fine.flux.len())));
            } else {
                for (j, (got, want)) in fine.flux.iter().zip(want).enumerate() {
                    r.push(Check::relative(format!("flux {}", labels[j]), *got, *want, tol));
                }
            }
        }
        if let Some(want) = e.helicity {
            r.push(Check::relative(format!("helicity H_{l}{k}"), fine.helicity, want, tol));
        }
        if let Some(want) = e.calabi {
            r.push(Check::relative("calabi", fine.calabi, want, tol));
        }
    }

    if let Some(d) = &s.diffeo {
        let psi = d.build(&s.domain, 1.0)?;
        let b = s.field.b();
        let a = vector_potential(&s.field, &gauge_loops(&s.domain, l, k)?, &ctx)?.form;
        let moved = apply_diffeo(&psi, &b.wedge(&a)?).integrate(Region::Q(&ctx.mesh), ctx.reduction)?;
        let tol = s.tolerances.invariance;
        r.push(Check::relative(format!("helicity invariant under {}", d.label()), moved, fine.helicity, tol));
        let moved_flux = flux(&apply_diffeo(&psi, &b), &kappa_basis(&s.domain)?, &ctx)?;
        for (j, (got, want)) in moved_flux.iter().zip(&fine.flux).enumerate() {
            r.push(Check::relative(format!("flux {} invariant under {}", labels[j], d.label()), *got, *want, tol));
        }
    }
    Ok(r)
}
