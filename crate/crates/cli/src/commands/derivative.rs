use std::str::FromStr;

use helixforms::deform::{estimate_density_ratio, probe_set, DensityFit, Functional};
use helixforms::invariants::helicity;
use serde_json::{json, Value};

use super::context;
use crate::error::{CliError, Result};
use crate::report::{Check, Report};
use crate::scenario::Scenario;

/// `helicity`, `sq-helicity` or `flux:IDX`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunctionalArg {
    Helicity,
    SqHelicity,
    Flux(usize),
}

impl FromStr for FunctionalArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "helicity" => Ok(FunctionalArg::Helicity),
            "sq-helicity" => Ok(FunctionalArg::SqHelicity),
            _ => match s.strip_prefix("flux:").map(str::parse) {
                Some(Ok(i)) => Ok(FunctionalArg::Flux(i)),
                _ => Err(format!("expected helicity, sq-helicity or flux:IDX, got {s:?}")),
            },
        }
    }
}

impl FunctionalArg {
    pub fn functional(self, (l, k): (usize, usize)) -> Functional {
        match self {
            FunctionalArg::Helicity => Functional::Helicity { l, k },
            FunctionalArg::SqHelicity => Functional::SquaredHelicity { l, k },
            FunctionalArg::Flux(i) => Functional::Flux(i),
        }
    }
}

pub(super) fn fit_json(fit: &DensityFit) -> Value {
    let probes: Vec<Value> = fit
        .pairings
        .iter()
        .zip(&fit.derivatives)
        .map(|(x, d)| {
            json!({
                "pairing": x,
                "steps": d.steps,
                "central": d.central,
                "derivative": d.value(),
                "error_estimate": d.error_estimate,
            })
        })
        .collect();
    json!({ "lambda": fit.lambda, "residual": fit.residual, "probes": probes })
}

/// Checks of `λ̂` against the expected density of each functional. Flux
/// functionals compare `|λ̂|` with `floor`.
pub(super) fn density_checks(s: &Scenario, which: FunctionalArg, fit: &DensityFit, c: f64, floor: f64) -> Vec<Check> {
    let t = &s.tolerances;
    match which {
        FunctionalArg::Helicity => vec![
            Check::relative("helicity: lambda = 1", fit.lambda, 1.0, t.density),
            Check::bound("helicity: fit residual", fit.residual, t.density_residual),
            Check::info("helicity: lambda - 2", fit.lambda - 2.0),
        ],
        FunctionalArg::SqHelicity => vec![
            Check::relative("sq-helicity: lambda = 2 H(B)", fit.lambda, 2.0 * c, t.sq_helicity),
            Check::info("sq-helicity: lambda / (2 H(B))", fit.lambda / (2.0 * c)),
        ],
        FunctionalArg::Flux(i) => vec![Check::bound(format!("flux:{i}: |lambda| within the noise floor"), fit.lambda.abs(), floor)],
    }
}

pub fn cmd_derivative(s: &Scenario, which: FunctionalArg, probes: usize, step: f64, level: Option<usize>) -> Result<Report> {
    if probes < 3 {
        return Err(CliError::Usage(format!("--probes must be at least 3, got {probes}")));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(CliError::Usage(format!("--step must be positive, got {step}")));
    }
    let ctx = context(s, level)?;
    let set = probe_set(&s.domain, probes, |_, _| true);
    if set.len() < probes {
        return Err(CliError::Usage(format!("only {} admissible probes fit in the domain", set.len())));
    }
    let functional = which.functional(s.gauge);
    let fit = estimate_density_ratio(&functional, &s.field, &set, step, &ctx)?;
    let c = helicity(&s.field, s.gauge.0, s.gauge.1, &ctx)?;

    let mut r = Report::new("derivative", ctx.mesh.level());
    r.value("functional", functional.label());
    r.value("step", step);
    r.value("helicity", c);
    r.value("probe_supports", set.iter().map(|p| p.support()).collect::<Vec<_>>());
    r.value("fit", fit_json(&fit));
    for check in density_checks(s, which, &fit, c, s.tolerances.noise_floor) {
        r.push(check);
    }
    Ok(r)
}
