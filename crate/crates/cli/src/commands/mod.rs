mod derivative;
mod invariants;
mod paths;
mod verify;

pub use derivative::{cmd_derivative, FunctionalArg};
pub use invariants::{cmd_invariants, InvariantsOptions};
pub use paths::{cmd_path_check, Lemma, PathRow};
pub use verify::{cmd_verify, Suite};

use helixforms::deform::{probe_set, VariationForm};
use helixforms::expr::Expr;
use helixforms::forms::{FormOnM, Reduction};
use helixforms::gauge::ExactField;
use helixforms::geometry::QuadratureSettings;
use helixforms::invariants::helicity;
use helixforms::Context;

use crate::error::Result;
use crate::scenario::Scenario;

/// Quadrature context at the scenario's level or `level`.
pub fn context(s: &Scenario, level: Option<usize>) -> Result<Context> {
    let settings = QuadratureSettings { level: level.unwrap_or(s.settings.level), ..s.settings };
    Ok(Context::new(s.domain.clone(), settings)?.with_reduction(Reduction::Parallel))
}

/// `B_{ω, sH}` with `s` chosen so that its helicity in gauge `(l, k)` is `c`.
fn tuned(omega: &FormOnM, shape: &Expr, c: f64, (l, k): (usize, usize), ctx: &Context) -> Result<(ExactField, f64)> {
    let raw = ExactField::new(omega.clone(), shape.clone(), &ctx.domain)?;
    let s = c / helicity(&raw, l, k, ctx)?;
    if !s.is_finite() {
        return Err(helixforms::Error::HelicitySignChange { u: 1.0, value: 0.0 }.into());
    }
    Ok((ExactField::new(omega.clone(), shape.scale(s), &ctx.domain)?, s))
}

/// Probes left and right of the outer centre, `n` on each side.
fn split_probes(s: &Scenario, n: usize) -> Vec<VariationForm> {
    let cx = s.domain.outer().center[0];
    let mut probes = probe_set(&s.domain, n, |p, r| p[0] - cx > r);
    probes.extend(probe_set(&s.domain, n, |p, r| p[0] - cx < -r));
    probes
}
