use std::path::Path;

use helixforms::deform::{path_lemma1a, path_lemma1b, DiffeoQ};
use helixforms::invariants::helicity;
use helixforms::Context;
use serde::Serialize;
use serde_json::json;

use super::{context, tuned};
use crate::error::{CliError, Result};
use crate::report::{relative_error, Check, Report};
use crate::scenario::{PathData, Scenario};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Lemma {
    #[value(name = "1a")]
    A,
    #[value(name = "1b")]
    B,
}

impl Lemma {
    pub(super) fn tag(self) -> &'static str {
        match self {
            Lemma::A => "1A",
            Lemma::B => "1B",
        }
    }
}

/// One sample of a path, as written to reports and CSV tables.
#[derive(Clone, Debug, Serialize)]
pub struct PathRow {
    pub u: f64,
    pub helicity: f64,
    pub rel_deviation: f64,
    /// 1B only: helicity of the field before the pullback by `ψ_u`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unpulled_helicity: Option<f64>,
}

pub(super) struct PathOutcome {
    pub rows: Vec<PathRow>,
    pub values: serde_json::Value,
    pub checks: Vec<Check>,
}

fn rows(c: f64, hs: impl Iterator<Item = (f64, f64, Option<f64>)>) -> Vec<PathRow> {
    hs.map(|(u, h, unpulled)| PathRow { u, helicity: h, rel_deviation: relative_error(h, c), unpulled_helicity: unpulled })
        .collect()
}

fn max_deviation(rows: &[PathRow]) -> f64 {
    rows.iter().map(|r| r.rel_deviation).fold(0.0, f64::max)
}

pub(super) fn run_path(s: &Scenario, data: &PathData, lemma: Lemma, samples: usize, ctx: &Context) -> Result<PathOutcome> {
    let gauge = s.gauge;
    let c = helicity(&s.field, gauge.0, gauge.1, ctx)?;
    let tol = s.tolerances.paths;
    let tag = lemma.tag();
    match lemma {
        Lemma::A => {
            let (f1, scale) = tuned(&data.omega1, &data.h1, c, gauge, ctx)?;
            let path = path_lemma1a(&s.field, &f1, samples, gauge, ctx)?;
            let rows = rows(c, path.iter().map(|p| (p.u, p.helicity, None)));
            let dev = max_deviation(&rows);
            Ok(PathOutcome {
                values: json!({ "c": c, "H1_scale": scale, "samples": rows }),
                checks: vec![Check::bound(format!("{tag}: max rel |H(B_u) - c| over {samples} samples"), dev, tol)],
                rows,
            })
        }
        Lemma::B => {
            let lambda = data.lambda;
            let (_, scale) = tuned(&s.field.omega().scale(lambda), &data.h1, c, gauge, ctx)?;
            let psi = |u: f64| match &s.diffeo {
                Some(d) => d.build(&s.domain, u),
                None => Ok(DiffeoQ::identity()),
            };
            let h1 = data.h1.scale(scale);
            let path = path_lemma1b(s.field.omega(), s.field.h(), &h1, lambda, psi, samples, gauge, ctx)?;
            let rows = rows(c, path.samples.iter().zip(&path.unpulled).map(|(p, q)| (p.u, p.helicity, Some(*q))));
            let dev = max_deviation(&rows);
            let [e0, e1] = path.endpoint_error;
            let etol = s.tolerances.endpoints;
            let family = s.diffeo.as_ref().map_or("identity".to_string(), |d| format!("{} scaled by u", d.label()));
            Ok(PathOutcome {
                values: json!({
                    "c": c,
                    "lambda": lambda,
                    "H1_scale": scale,
                    "psi": family,
                    "endpoint_error": [e0, e1],
                    "samples": rows,
                }),
                checks: vec![
                    Check::bound(format!("{tag}: max rel |H(B_u) - c| over {samples} samples"), dev, tol),
                    Check::bound(format!("{tag}: u = 0 endpoint, max pointwise deviation"), e0, etol),
                    Check::bound(format!("{tag}: u = 1 endpoint, max pointwise deviation"), e1, etol),
                ],
                rows,
            })
        }
    }
}

fn write_csv(path: &Path, rows: &[PathRow]) -> Result<()> {
    let err = |source| CliError::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    w.write_record(["u", "helicity", "rel_deviation", "unpulled_helicity"]).map_err(err)?;
    for r in rows {
        let unpulled = r.unpulled_helicity.map(|v| v.to_string()).unwrap_or_default();
        w.write_record([r.u.to_string(), r.helicity.to_string(), r.rel_deviation.to_string(), unpulled]).map_err(err)?;
    }
    w.flush().map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}

pub fn cmd_path_check(s: &Scenario, lemma: Lemma, samples: usize, level: Option<usize>, csv: Option<&Path>) -> Result<Report> {
    let data = s
        .paths
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("{}: path-check needs a [paths] block", s.path.display())))?;
    if samples < 2 {
        return Err(CliError::Usage(format!("--samples must be at least 2, got {samples}")));
    }
    let ctx = context(s, level)?;
    let out = run_path(s, data, lemma, samples, &ctx)?;
    if let Some(p) = csv {
        write_csv(p, &out.rows)?;
    }
    let mut r = Report::new(format!("path-check {}", lemma.tag()), ctx.mesh.level());
    r.value("path", out.values);
    for c in out.checks {
        r.push(c);
    }
    Ok(r)
}
