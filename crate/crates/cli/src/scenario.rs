//! Scenario files: TOML, versioned by `schema_version`.
//!
//! Loading validates everything eagerly. Errors name the file and the key
//! that caused them.

use std::path::{Path, PathBuf};

use helixforms::deform::DiffeoQ;
use helixforms::expr::{parse, Expr, Var};
use helixforms::fields::admissible_hamiltonian;
use helixforms::forms::FormOnM;
use helixforms::gauge::ExactField;
use helixforms::geometry::{Circle, DomainM, QuadratureSettings};
use helixforms::invariants::check_boundary_values;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Tolerance of the boundary-constancy check on `H`.
pub const BOUNDARY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleSpec {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSpec {
    pub from: usize,
    pub to: usize,
    pub points: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub outer: CircleSpec,
    #[serde(default)]
    pub holes: Vec<CircleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchors: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub paths: Vec<PathSpec>,
}

/// `H` as plain text, or built from per-hole boundary values plus an
/// interior term multiplied by a function vanishing on every circle.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HamiltonianSpec {
    Text(String),
    Built(BuiltHamiltonian),
}

/// `H = Σ_i h_i(t) χ_i + φ q` with `χ_i ≈ 1` near hole `i` and `φ = 0` on
/// every circle.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuiltHamiltonian {
    /// `h_i(t)` for each hole, in order.
    pub boundary: Vec<String>,
    /// `q(x, y, t)`.
    pub interior: String,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeSpec {
    pub l: usize,
    pub k: usize,
}

impl Default for GaugeSpec {
    fn default() -> Self {
        GaugeSpec { l: 1, k: 1 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum DiffeoSpec {
    /// `t ↦ t + g(x, y)`.
    Shear { g: String },
    /// Rotation by the radial angle `u` about the common centre.
    Rotation { u: String },
    /// `t ↦ t + shift`.
    Fiber { shift: f64 },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSpec {
    pub level: usize,
    pub n_t: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        let s = QuadratureSettings::default();
        QuadratureSpec { level: s.level, n_t: s.n_t }
    }
}

/// Relative tolerances of the checks. Absent keys take the defaults.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub expected: f64,
    pub invariance: f64,
    pub gauge_shift: f64,
    pub identities: f64,
    pub calabi: f64,
    pub paths: f64,
    /// Absolute, on the pointwise coefficients.
    pub endpoints: f64,
    pub density: f64,
    pub density_residual: f64,
    pub density_subsets: f64,
    pub sq_helicity: f64,
    /// Absolute bound on `λ̂` for flux functionals in the `derivative`
    /// command. The density suite measures its own floor.
    pub noise_floor: f64,
    pub lemma2: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            expected: 1e-4,
            invariance: 1e-6,
            gauge_shift: 1e-7,
            identities: 1e-4,
            calabi: 1e-5,
            paths: 1e-4,
            endpoints: 1e-9,
            density: 1e-3,
            density_residual: 1e-3,
            density_subsets: 2e-3,
            sq_helicity: 1e-2,
            noise_floor: 1e-4,
            lemma2: 1e-5,
        }
    }
}

/// Reference values, as constant expressions such as `"3*pi"`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedSpec {
    pub flux: Option<Vec<String>>,
    pub helicity: Option<String>,
    pub calabi: Option<String>,
}

/// Second endpoint data for the path checks.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsSpec {
    /// Area density of the 1A endpoint; defaults to `omega`.
    pub omega1: Option<String>,
    /// Shape of the second Hamiltonian. It is rescaled so that the endpoint
    /// helicities agree.
    #[serde(rename = "H1")]
    pub h1: HamiltonianSpec,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
}

fn default_lambda() -> f64 {
    2.0
}

/// The file as written.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub name: String,
    pub omega: String,
    #[serde(rename = "H")]
    pub h: HamiltonianSpec,
    pub domain: DomainSpec,
    #[serde(default)]
    pub gauge: GaugeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diffeo: Option<DiffeoSpec>,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<ExpectedSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<PathsSpec>,
}

/// A diffeomorphism family with parsed parameters.
#[derive(Clone, Debug)]
pub enum Diffeo {
    Shear(Expr),
    Rotation(Expr),
    Fiber(f64),
}

impl Diffeo {
    /// The member of the family with its parameter multiplied by `s`.
    pub fn build(&self, dom: &DomainM, s: f64) -> helixforms::Result<DiffeoQ> {
        match self {
            Diffeo::Shear(g) => DiffeoQ::shear(g.scale(s)),
            Diffeo::Rotation(u) => DiffeoQ::rotation(dom, u.scale(s)),
            Diffeo::Fiber(shift) => Ok(DiffeoQ::fiber_rotation(shift * s)),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Diffeo::Shear(g) => format!("shear g = {g}"),
            Diffeo::Rotation(u) => format!("rotation u = {u}"),
            Diffeo::Fiber(s) => format!("fiber rotation by {s}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Expected {
    pub flux: Option<Vec<f64>>,
    pub helicity: Option<f64>,
    pub calabi: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct PathData {
    pub omega1: FormOnM,
    pub h1: Expr,
    pub lambda: f64,
}

/// A validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub path: PathBuf,
    pub file: ScenarioFile,
    pub domain: DomainM,
    pub field: ExactField,
    pub gauge: (usize, usize),
    pub diffeo: Option<Diffeo>,
    pub settings: QuadratureSettings,
    pub tolerances: Tolerances,
    pub expected: Option<Expected>,
    pub paths: Option<PathData>,
}

struct Loader<'a> {
    path: &'a Path,
}

impl Loader<'_> {
    fn schema(&self, message: impl Into<String>) -> CliError {
        CliError::Schema { path: self.path.to_path_buf(), message: message.into() }
    }

    fn invalid(&self, key: &str, source: impl Into<helixforms::Error>) -> CliError {
        CliError::Invalid { path: self.path.to_path_buf(), key: key.to_string(), source: Box::new(source.into()) }
    }

    fn expr(&self, key: &str, text: &str) -> Result<Expr> {
        parse(text).map_err(|e| self.invalid(key, e))
    }

    fn constant(&self, key: &str, text: &str) -> Result<f64> {
        let e = self.expr(key, text)?;
        if [Var::X, Var::Y, Var::T].iter().any(|v| e.depends_on(*v)) {
            return Err(self.schema(format!("{key}: expected a constant expression, got {text:?}")));
        }
        e.eval([0.0, 0.0, 0.0]).map_err(|err| self.invalid(key, err))
    }

    fn circle(&self, key: &str, c: &CircleSpec) -> Result<Circle> {
        if !(c.radius > 0.0) {
            return Err(self.invalid(key, helixforms::Error::NonPositiveRadius(c.radius)));
        }
        Ok(Circle::new(c.center, c.radius))
    }

    fn domain(&self, spec: &DomainSpec) -> Result<DomainM> {
        let outer = self.circle("domain.outer", &spec.outer)?;
        let holes = spec
            .holes
            .iter()
            .enumerate()
            .map(|(j, h)| self.circle(&format!("domain.holes[{j}]"), h))
            .collect::<Result<Vec<_>>>()?;
        let mut dom = DomainM::new(outer, holes).map_err(|e| self.invalid("domain", e))?;
        if let Some(anchors) = &spec.anchors {
            dom = dom.with_anchors(anchors.clone()).map_err(|e| self.invalid("domain.anchors", e))?;
        }
        for (j, p) in spec.paths.iter().enumerate() {
            dom = dom.with_path(p.from, p.to, p.points.clone()).map_err(|e| self.invalid(&format!("domain.paths[{j}]"), e))?;
        }
        Ok(dom)
    }

    fn hamiltonian(&self, key: &str, spec: &HamiltonianSpec, dom: &DomainM) -> Result<Expr> {
        let h = match spec {
            HamiltonianSpec::Text(text) => self.expr(key, text)?,
            HamiltonianSpec::Built(BuiltHamiltonian { boundary, interior }) => {
                if boundary.len() != dom.holes().len() {
                    return Err(self.schema(format!(
                        "{key}.boundary: {} values for {} holes",
                        boundary.len(),
                        dom.holes().len()
                    )));
                }
                let values = boundary
                    .iter()
                    .enumerate()
                    .map(|(j, b)| self.expr(&format!("{key}.boundary[{j}]"), b))
                    .collect::<Result<Vec<_>>>()?;
                admissible_hamiltonian(dom, &values, &self.expr(&format!("{key}.interior"), interior)?)
            }
        };
        check_boundary_values(&h, dom, BOUNDARY_TOL).map_err(|e| self.invalid(key, e))?;
        Ok(h)
    }

    fn gauge(&self, g: GaugeSpec, dom: &DomainM) -> Result<(usize, usize)> {
        dom.check_index(g.l).map_err(|e| self.invalid("gauge.l", e))?;
        dom.check_index(g.k).map_err(|e| self.invalid("gauge.k", e))?;
        Ok((g.l, g.k))
    }

    fn diffeo(&self, spec: &DiffeoSpec, dom: &DomainM) -> Result<Diffeo> {
        let d = match spec {
            DiffeoSpec::Shear { g } => Diffeo::Shear(self.expr("diffeo.g", g)?),
            DiffeoSpec::Rotation { u } => Diffeo::Rotation(self.expr("diffeo.u", u)?),
            DiffeoSpec::Fiber { shift } => Diffeo::Fiber(*shift),
        };
        let psi = d.build(dom, 1.0).map_err(|e| self.invalid("diffeo", e))?;
        psi.validate(dom).map_err(|e| self.invalid("diffeo", e))?;
        Ok(d)
    }

    fn expected(&self, spec: &ExpectedSpec) -> Result<Expected> {
        let flux = match &spec.flux {
            Some(list) => Some(
                list.iter()
                    .enumerate()
                    .map(|(j, v)| self.constant(&format!("expected.flux[{j}]"), v))
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };
        Ok(Expected {
            flux,
            helicity: spec.helicity.as_deref().map(|v| self.constant("expected.helicity", v)).transpose()?,
            calabi: spec.calabi.as_deref().map(|v| self.constant("expected.calabi", v)).transpose()?,
        })
    }

    fn tolerances(&self, t: &Tolerances) -> Result<()> {
        let all = [
            ("expected", t.expected),
            ("invariance", t.invariance),
            ("gauge_shift", t.gauge_shift),
            ("identities", t.identities),
            ("calabi", t.calabi),
            ("paths", t.paths),
            ("endpoints", t.endpoints),
            ("density", t.density),
            ("density_residual", t.density_residual),
            ("density_subsets", t.density_subsets),
            ("sq_helicity", t.sq_helicity),
            ("noise_floor", t.noise_floor),
            ("lemma2", t.lemma2),
        ];
        match all.iter().find(|(_, v)| !(*v >= 0.0 && v.is_finite())) {
            Some((k, v)) => Err(self.schema(format!("tolerances.{k}: must be a finite non-negative number, got {v}"))),
            None => Ok(()),
        }
    }
}

/// Parse and validate scenario text. `path` is used in error messages.
pub fn parse_scenario(text: &str, path: &Path) -> Result<Scenario> {
    let ld = Loader { path };
    let file: ScenarioFile = toml::from_str(text).map_err(|e| ld.schema(e.to_string().trim_end().to_string()))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(ld.schema(format!(
            "schema_version: unsupported version {} (this build reads {SCHEMA_VERSION})",
            file.schema_version
        )));
    }
    ld.tolerances(&file.tolerances)?;
    let domain = ld.domain(&file.domain)?;
    let omega = FormOnM::area(ld.expr("omega", &file.omega)?);
    let h = ld.hamiltonian("H", &file.h, &domain)?;
    let field = ExactField::new(omega.clone(), h, &domain).map_err(|e| ld.invalid("omega/H", e))?;
    let gauge = ld.gauge(file.gauge, &domain)?;
    let diffeo = file.diffeo.as_ref().map(|d| ld.diffeo(d, &domain)).transpose()?;
    let expected = file.expected.as_ref().map(|e| ld.expected(e)).transpose()?;
    let paths = match &file.paths {
        Some(p) => {
            let omega1 = match &p.omega1 {
                Some(text) => FormOnM::area(ld.expr("paths.omega1", text)?),
                None => omega.clone(),
            };
            let h1 = ld.hamiltonian("paths.H1", &p.h1, &domain)?;
            ExactField::new(omega1.clone(), h1.clone(), &domain).map_err(|e| ld.invalid("paths", e))?;
            if !(p.lambda > 0.0) {
                return Err(ld.schema(format!("paths.lambda: must be positive, got {}", p.lambda)));
            }
            Some(PathData { omega1, h1, lambda: p.lambda })
        }
        None => None,
    };
    let settings = QuadratureSettings { level: file.quadrature.level, n_t: file.quadrature.n_t, ..Default::default() };
    if settings.n_t == 0 {
        return Err(ld.schema("quadrature.n_t: must be at least 1"));
    }
    Ok(Scenario {
        path: path.to_path_buf(),
        tolerances: file.tolerances,
        file,
        domain,
        field,
        gauge,
        diffeo,
        settings,
        expected,
        paths,
    })
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    parse_scenario(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ANNULUS: &str = r#"
schema_version = 1
name = "annulus"
omega = "1"
H = "(4-x^2-y^2)/3"

[domain]
outer = { center = [0.0, 0.0], radius = 2.0 }
holes = [{ center = [0.0, 0.0], radius = 1.0 }]
"#;

    fn load(text: &str) -> Result<Scenario> {
        parse_scenario(text, Path::new("test.toml"))
    }

    #[test]
    fn minimal_annulus() {
        let s = load(ANNULUS).unwrap();
        assert_eq!(s.domain.boundary_count(), 2);
        assert_eq!(s.gauge, (1, 1));
        assert_eq!(s.settings.level, 4);
        assert!(s.diffeo.is_none());
    }

    #[test]
    fn boundary_violation_names_the_circle() {
        let err = load(&ANNULUS.replace("\"(4-x^2-y^2)/3\"", "\"(4-x^2-y^2)*x\"")).unwrap_err().to_string();
        assert!(err.contains("S_2"), "{err}");
        assert!(err.contains("H"), "{err}");
    }

    #[test]
    fn missing_key_and_unknown_key() {
        let err = load(&ANNULUS.replace("omega = \"1\"\n", "")).unwrap_err().to_string();
        assert!(err.contains("missing field `omega`"), "{err}");
        let err = load(&format!("{ANNULUS}\n[quadrature]\nlevels = 3\n")).unwrap_err().to_string();
        assert!(err.contains("levels"), "{err}");
    }

    #[test]
    fn expression_errors_carry_the_key() {
        let err = load(&ANNULUS.replace("omega = \"1\"", "omega = \"1 +* x\"")).unwrap_err();
        assert!(matches!(&err, CliError::Invalid { key, .. } if key == "omega"), "{err}");
    }

    #[test]
    fn built_hamiltonian_and_constants() {
        let text = r#"
schema_version = 1
name = "two"
omega = "1"
H = { boundary = ["1+0.5*sin(2*pi*t)", "-0.7"], interior = "0.02" }

[domain]
outer = { center = [0.0, 0.0], radius = 3.0 }
holes = [{ center = [-1.2, 0.0], radius = 0.6 }, { center = [1.2, 0.0], radius = 0.6 }]

[expected]
calabi = "3*pi/2"
"#;
        let s = load(text).unwrap();
        assert_eq!(s.domain.boundary_count(), 3);
        assert_eq!(s.expected.unwrap().calabi, Some(1.5 * std::f64::consts::PI));
        let bad = text.replace("\"3*pi/2\"", "\"x\"");
        assert!(load(&bad).unwrap_err().to_string().contains("constant"));
    }

    #[test]
    fn bad_diffeo_and_version() {
        let t = format!("{ANNULUS}\n[diffeo]\nfamily = \"shear\"\ng = \"t\"\n");
        assert!(load(&t).unwrap_err().to_string().contains("diffeo"));
        let t = ANNULUS.replace("schema_version = 1", "schema_version = 7");
        assert!(load(&t).unwrap_err().to_string().contains("schema_version"));
    }
}
