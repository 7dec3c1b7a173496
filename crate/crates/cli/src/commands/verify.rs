use std::f64::consts::PI;

use helixforms::deform::{
    apply_diffeo, estimate_density_ratio, max_difference, probe_set, verify_lemma2, DiffeoQ, Functional, STABILIZER_TOL,
};
use helixforms::expr::parse;
use helixforms::forms::FormOnQ;
use helixforms::gauge::vector_potential;
use helixforms::geometry::halton;
use helixforms::homology::{gauge_loops, Chain};
use helixforms::invariants::{calabi, flux_through, helicity, helicity_matrix, pairing};
use helixforms::Context;
use serde_json::json;

use super::derivative::{density_checks, fit_json};
use super::paths::run_path;
use super::{context, split_probes, FunctionalArg, Lemma};
use crate::error::Result;
use crate::report::{relative_error, Check, Report};
use crate::scenario::Scenario;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    GaugeShift,
    Identities,
    Paths,
    Lemma2,
    Density,
    All,
}

impl Suite {
    const EACH: [Suite; 5] = [Suite::GaugeShift, Suite::Identities, Suite::Paths, Suite::Lemma2, Suite::Density];

    fn name(self) -> &'static str {
        match self {
            Suite::GaugeShift => "gauge-shift",
            Suite::Identities => "identities",
            Suite::Paths => "paths",
            Suite::Lemma2 => "lemma2",
            Suite::Density => "density",
            Suite::All => "all",
        }
    }
}

/// Number of gauge shifts `A ↦ A + df`.
pub const SHIFTS: usize = 20;

/// Deterministic smooth periodic test function number `j`.
fn shift_function(j: u64) -> String {
    let c = |base| 2.0 * halton(j, base) - 1.0;
    let phase = |base| 2.0 * PI * halton(j, base);
    format!(
        "sin(({})*x+({})*y+({})) + ({})*x*cos(2*pi*t+({})) + ({})*x*y*sin(2*pi*t)",
        c(2),
        c(3),
        phase(5),
        c(7),
        phase(11),
        c(13)
    )
}

fn gauge_shift(s: &Scenario, ctx: &Context, r: &mut Report) -> Result<()> {
    let (l, k) = s.gauge;
    let b = s.field.b();
    let a = vector_potential(&s.field, &gauge_loops(&s.domain, l, k)?, ctx)?.form;
    let base = pairing(&b, &a, ctx)?;
    let mut worst = 0.0f64;
    for j in 1..=SHIFTS as u64 {
        let df = FormOnQ::function(parse(&shift_function(j)).map_err(helixforms::Error::from)?).d()?;
        worst = worst.max(relative_error(pairing(&b, &a.add(&df)?, ctx)?, base));
    }
    r.value("gauge-shift", json!({ "helicity": base, "shifts": SHIFTS, "max_rel_change": worst }));
    r.push(Check::bound(format!("gauge-shift: {SHIFTS} shifts A -> A + df, max rel change"), worst, s.tolerances.gauge_shift));
    Ok(())
}

fn identities(s: &Scenario, ctx: &Context, r: &mut Report) -> Result<()> {
    let d = s.domain.boundary_count();
    let b = s.field.b();
    let hm = helicity_matrix(&s.field, ctx)?;
    let cal = calabi(s.field.omega(), s.field.h(), ctx)?;
    let tol = s.tolerances.identities;
    r.push(Check::relative("identities: H_11 = -2 Cal", hm[0][0], -2.0 * cal, s.tolerances.calabi));
    if d < 2 {
        r.push(Check::skip("identities: gauge pairs", "the domain has a single boundary circle"));
        r.value("identities", json!({ "helicity_matrix": hm, "calabi": cal }));
        return Ok(());
    }
    let phi0 = Chain::Slice { t: 0.0 }.integrate(&b, &ctx.mesh, ctx.reduction)?;
    let mut pairs = Vec::new();
    for l in 1..=d {
        for k in (1..=d).filter(|&k| k != l) {
            let fl = flux_through(&b, l, k, ctx)?;
            let (hll, hkk, hlk) = (hm[l - 1][l - 1], hm[k - 1][k - 1], hm[l - 1][k - 1]);
            let half = 0.5 * (hll - hkk);
            let product = phi0 * fl;
            r.push(Check::relative(format!("identities ({l},{k}): H_lk - H_ll = Flux[M x 0] Flux[Pi_lk]"), hlk - hll, product, tol));
            r.push(Check::relative(format!("identities ({l},{k}): H_lk - H_ll = (H_ll - H_kk)/2"), hlk - hll, half, tol));
            r.push(Check::relative(format!("identities ({l},{k}): (H_ll - H_kk)/2 = Flux[M x 0] Flux[Pi_lk]"), half, product, tol));
            r.push(Check::info(
                format!("identities ({l},{k}): rel error of H_ll - H_lk = Flux[M x 0] Flux[Pi_lk]"),
                relative_error(hll - hlk, product),
            ));
            pairs.push(json!({ "l": l, "k": k, "flux_pi": fl, "H_lk - H_ll": hlk - hll, "(H_ll - H_kk)/2": half }));
        }
    }
    r.value("identities", json!({ "helicity_matrix": hm, "calabi": cal, "flux_slice": phi0, "pairs": pairs }));
    Ok(())
}

fn paths(s: &Scenario, ctx: &Context, samples: usize, r: &mut Report) -> Result<()> {
    let Some(data) = &s.paths else {
        r.push(Check::skip("paths", "the scenario has no [paths] block"));
        return Ok(());
    };
    let mut values = serde_json::Map::new();
    for lemma in [Lemma::A, Lemma::B] {
        let out = run_path(s, data, lemma, samples, ctx)?;
        values.insert(lemma.tag().to_lowercase(), out.values);
        for c in out.checks {
            r.push(c);
        }
    }
    r.value("paths", values);
    Ok(())
}

/// Number of probes of the stabilizer check.
pub const LEMMA2_PROBES: usize = 10;

fn lemma2(s: &Scenario, ctx: &Context, r: &mut Report) -> Result<()> {
    let psi = match &s.diffeo {
        Some(d) => d.build(&s.domain, 1.0)?,
        None => DiffeoQ::fiber_rotation(0.3),
    };
    let b = s.field.b();
    let dev = max_difference(&apply_diffeo(&psi, &b), &b, &s.domain, 1000)?;
    if dev > STABILIZER_TOL {
        r.push(Check::skip("lemma2", format!("the diffeomorphism does not fix B (max deviation {dev:.1e})")));
        return Ok(());
    }
    let (l, k) = s.gauge;
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for p in probe_set(&s.domain, LEMMA2_PROBES, |_, _| true) {
        let (d0, d1) = verify_lemma2(&Functional::Helicity { l, k }, &s.field, &psi, &p, 0.1, ctx)?;
        worst = worst.max(relative_error(d1.value(), d0.value()));
        rows.push([d0.value(), d1.value()]);
    }
    r.value("lemma2", json!({ "stabilizer_deviation": dev, "derivatives": rows }));
    r.push(Check::bound(
        format!("lemma2: D(A') = D(psi* A') over {} probes, max rel difference", rows.len()),
        worst,
        s.tolerances.lemma2,
    ));
    Ok(())
}

/// Probes per side of the density suite.
pub const DENSITY_PROBES_PER_SIDE: usize = 3;

fn density(s: &Scenario, ctx: &Context, r: &mut Report) -> Result<()> {
    let probes = split_probes(s, DENSITY_PROBES_PER_SIDE);
    if probes.len() < 2 * DENSITY_PROBES_PER_SIDE {
        r.push(Check::skip("density", format!("only {} admissible probes", probes.len())));
        return Ok(());
    }
    let gauge = s.gauge;
    let c = helicity(&s.field, gauge.0, gauge.1, ctx)?;
    let step = 0.1;
    let mut values = serde_json::Map::new();
    let mut fits = vec![FunctionalArg::Helicity, FunctionalArg::SqHelicity];
    fits.extend((0..s.domain.boundary_count()).map(FunctionalArg::Flux));
    // Flux derivatives vanish exactly; their noise floor is the scatter of
    // the helicity fit on the same probes and mesh.
    let mut floor = s.tolerances.noise_floor;
    for which in fits {
        let functional = which.functional(gauge);
        let fit = estimate_density_ratio(&functional, &s.field, &probes, step, ctx)?;
        if which == FunctionalArg::Helicity {
            floor = fit.residual;
            let n = DENSITY_PROBES_PER_SIDE;
            let right = fit.subset(&(0..n).collect::<Vec<_>>())?;
            let left = fit.subset(&(n..2 * n).collect::<Vec<_>>())?;
            r.push(
                Check::relative("helicity: disjoint probe subsets agree", left.lambda, right.lambda, s.tolerances.density_subsets)
                    .with_detail(format!("right lambda {}, left lambda {}", right.lambda, left.lambda)),
            );
        }
        for check in density_checks(s, which, &fit, c, floor) {
            r.push(check);
        }
        values.insert(functional.label(), fit_json(&fit));
    }
    values.insert("helicity".into(), json!(c));
    values.insert("step".into(), json!(step));
    values.insert("noise_floor".into(), json!(floor));
    r.value("density", values);
    Ok(())
}

/// Run `suite` (every suite for [`Suite::All`]).
pub fn cmd_verify(s: &Scenario, suite: Suite, level: Option<usize>, samples: usize) -> Result<Report> {
    let ctx = context(s, level)?;
    let mut r = Report::new(format!("verify {}", suite.name()), ctx.mesh.level());
    let run: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    for x in run {
        match x {
            Suite::GaugeShift => gauge_shift(s, &ctx, &mut r)?,
            Suite::Identities => identities(s, &ctx, &mut r)?,
            Suite::Paths => paths(s, &ctx, samples, &mut r)?,
            Suite::Lemma2 => lemma2(s, &ctx, &mut r)?,
            Suite::Density => density(s, &ctx, &mut r)?,
            Suite::All => unreachable!("expanded above"),
        }
    }
    Ok(r)
}
