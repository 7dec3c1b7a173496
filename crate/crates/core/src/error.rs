use crate::expr::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),

    // geometry
    #[error("circle radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("hole {hole} is not strictly inside the outer circle")]
    HoleOutsideOuter { hole: usize },
    #[error("holes {a} and {b} overlap or touch")]
    OverlappingHoles { a: usize, b: usize },
    #[error("anchor of boundary circle S_{circle} is {distance:e} away from the circle")]
    AnchorOffCircle { circle: usize, distance: f64 },
    #[error("expected {expected} anchors, got {found}")]
    AnchorCount { expected: usize, found: usize },
    #[error("boundary index {index} out of range 1..={count}")]
    BoundaryIndex { index: usize, count: usize },
    #[error("cannot build a path from S_{from} to S_{to}: {reason}")]
    PathConstruction { from: usize, to: usize, reason: String },
    #[error("meshing failed: {0}")]
    Meshing(String),

    // forms
    #[error("wedge of degrees {0} and {1} exceeds 3")]
    DegreeOverflow(usize, usize),
    #[error("expected a {expected}-form, got degree {found}")]
    Degree { expected: usize, found: usize },
    #[error("a {degree}-form cannot be integrated over {region}")]
    RegionMismatch { degree: usize, region: &'static str },
    #[error("area form is not positive at ({x}, {y}): {value}")]
    NonPositiveOmega { x: f64, y: f64, value: f64 },
    #[error("H is not 1-periodic in t at ({x}, {y}): H(t=0) - H(t=1) = {gap:e}")]
    NonPeriodicH { x: f64, y: f64, gap: f64 },
    #[error("H is not constant on S_{circle} (spread {spread:e} at t = {t})")]
    BoundaryNotConstant { circle: usize, t: f64, spread: f64 },
    #[error("H does not vanish on the outer circle S_1 (max |H| = {max:e})")]
    OuterBoundaryNonzero { max: f64 },
    #[error("form is not admissible: {0}")]
    NotAdmissible(String),

    // gauge
    #[error("period matrix is singular (pivot {pivot:e})")]
    SingularPeriodMatrix { pivot: f64 },
    #[error("area density cannot be evaluated on the segment from ({x0}, {y}) to ({x1}, {y}): {source}")]
    PrimitiveUndefined { x0: f64, x1: f64, y: f64, source: EvalError },

    // deform
    #[error("diffeomorphism does not preserve Q: {0}")]
    NotADiffeomorphismOfQ(String),
    #[error("diffeomorphism does not fix B: max deviation {0:e}")]
    NotAStabilizer(f64),
    #[error("endpoint helicities differ: {h0} vs {h1}")]
    HelicityMismatch { h0: f64, h1: f64 },
    #[error("interpolant helicity {value} at u = {u} has the wrong sign or vanishes")]
    HelicitySignChange { u: f64, value: f64 },
    #[error("perturbed field B + u dA' has a zero near ({x}, {y}, {t}) for u = {u}")]
    LeavesDomain { u: f64, x: f64, y: f64, t: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate probe set: {0}")]
    DegenerateProbes(String),
}
