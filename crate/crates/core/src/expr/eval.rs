use std::fmt;

use super::{Expr, Func, Node, Var, XIntegral};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalErrorKind {
    DivisionByZero,
    LogOfNonPositive,
    SqrtOfNegative,
    NegativeBaseFractionalPower,
    Atan2AtOrigin,
    NonFinite,
    IntegralDidNotConverge,
}

/// Domain error raised during evaluation, carrying the offending node.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub node: String,
    pub point: [f64; 3],
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, t] = self.point;
        write!(f, "{:?} in `{}` at (x={x}, y={y}, t={t})", self.kind, self.node)
    }
}

pub(super) fn pow(base: f64, exponent: f64) -> f64 {
    if exponent.fract() == 0.0 && exponent.abs() < i32::MAX as f64 {
        base.powi(exponent as i32)
    } else {
        base.powf(exponent)
    }
}

pub(super) fn func_domain_ok(func: Func, a: f64) -> bool {
    match func {
        Func::Log => a > 0.0,
        Func::Sqrt => a >= 0.0,
        _ => true,
    }
}

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const XINT_RTOL: f64 = 1e-13;
const XINT_MAX_DEPTH: u32 = 40;

impl Expr {
    /// Evaluate at `p = [x, y, t]`.
    pub fn eval(&self, p: [f64; 3]) -> Result<f64, EvalError> {
        match self.node() {
            Node::Const(v) => Ok(*v),
            Node::Var(v) => Ok(p[v.index()]),
            Node::XInt(k) => {
                let v = k.eval(p, || self.fail(EvalErrorKind::IntegralDidNotConverge, p))?;
                self.finite(v, p)
            }
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => self.combine(a.eval(p)?, 0.0, p),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Atan2(a, b) => {
                self.combine(a.eval(p)?, b.eval(p)?, p)
            }
        }
    }

    /// Evaluate along the fiber `{(x, y)} × ts`. Subtrees free of `t`,
    /// including `t`-independent integrals, are evaluated once.
    pub fn eval_fiber(&self, x: f64, y: f64, ts: &[f64]) -> Result<Vec<f64>, EvalError> {
        if ts.is_empty() {
            return Ok(Vec::new());
        }
        Ok(match self.fiber(x, y, ts)? {
            Fiber::Scalar(v) => vec![v; ts.len()],
            Fiber::Values(v) => v,
        })
    }

    fn fiber(&self, x: f64, y: f64, ts: &[f64]) -> Result<Fiber, EvalError> {
        let at = |i: usize| [x, y, ts[i]];
        let (a, b) = match self.node() {
            Node::Const(v) => return Ok(Fiber::Scalar(*v)),
            Node::Var(Var::T) => return Ok(Fiber::Values(ts.to_vec())),
            Node::Var(_) | Node::XInt(_) if !self.depends_on(Var::T) => return self.eval(at(0)).map(Fiber::Scalar),
            Node::Var(_) | Node::XInt(_) => {
                return (0..ts.len()).map(|i| self.eval(at(i))).collect::<Result<_, _>>().map(Fiber::Values)
            }
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => (a.fiber(x, y, ts)?, Fiber::Scalar(0.0)),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Atan2(a, b) => {
                (a.fiber(x, y, ts)?, b.fiber(x, y, ts)?)
            }
        };
        match (a, b) {
            (Fiber::Scalar(a), Fiber::Scalar(b)) => self.combine(a, b, at(0)).map(Fiber::Scalar),
            (a, b) => (0..ts.len()).map(|i| self.combine(a.get(i), b.get(i), at(i))).collect::<Result<_, _>>().map(Fiber::Values),
        }
    }

    fn fail(&self, kind: EvalErrorKind, p: [f64; 3]) -> EvalError {
        EvalError { kind, node: self.to_string(), point: p }
    }

    fn finite(&self, v: f64, p: [f64; 3]) -> Result<f64, EvalError> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.fail(EvalErrorKind::NonFinite, p))
        }
    }

    /// Apply this node's operation to already evaluated operands (`b` is
    /// ignored for unary nodes).
    pub(super) fn combine(&self, a: f64, b: f64, p: [f64; 3]) -> Result<f64, EvalError> {
        let v = match self.node() {
            Node::Neg(_) => -a,
            Node::Add(..) => a + b,
            Node::Sub(..) => a - b,
            Node::Mul(..) => a * b,
            Node::Div(..) => {
                if b == 0.0 {
                    return Err(self.fail(EvalErrorKind::DivisionByZero, p));
                }
                a / b
            }
            Node::Pow(_, n) => {
                if a == 0.0 && *n < 0.0 {
                    return Err(self.fail(EvalErrorKind::DivisionByZero, p));
                }
                if a < 0.0 && n.fract() != 0.0 {
                    return Err(self.fail(EvalErrorKind::NegativeBaseFractionalPower, p));
                }
                pow(a, *n)
            }
            Node::Call(func, _) => {
                if !func_domain_ok(*func, a) {
                    let kind = match func {
                        Func::Log => EvalErrorKind::LogOfNonPositive,
                        _ => EvalErrorKind::SqrtOfNegative,
                    };
                    return Err(self.fail(kind, p));
                }
                func.apply(a)
            }
            Node::Atan2(..) => {
                if a == 0.0 && b == 0.0 {
                    return Err(self.fail(EvalErrorKind::Atan2AtOrigin, p));
                }
                a.atan2(b)
            }
            Node::Const(_) | Node::Var(_) | Node::XInt(_) => unreachable!("leaf nodes have no operands"),
        };
        self.finite(v, p)
    }
}

enum Fiber {
    Scalar(f64),
    Values(Vec<f64>),
}

impl Fiber {
    fn get(&self, i: usize) -> f64 {
        match self {
            Fiber::Scalar(v) => *v,
            Fiber::Values(v) => v[i],
        }
    }
}

impl XIntegral {
    fn eval(&self, p: [f64; 3], stalled: impl Fn() -> EvalError) -> Result<f64, EvalError> {
        let a = self.lower.eval(p)?;
        let b = self.upper.eval(p)?;
        let y = self.y.eval(p)?;
        let t = self.t.eval(p)?;
        if a == b {
            return Ok(0.0);
        }
        let f = |s: f64| self.integrand.eval([s, y, t]);
        let (whole, err) = gk15(&f, a, b)?;
        if err <= XINT_RTOL * whole.abs().max(1e-300) {
            return Ok(whole);
        }
        let scale = whole.abs().max(err);
        adapt(&f, a, b, whole, scale, 0).ok_or_else(stalled)?
    }
}

/// Outer `None` means the subdivision budget ran out.
fn adapt<F>(f: &F, a: f64, b: f64, whole: f64, scale: f64, depth: u32) -> Option<Result<f64, EvalError>>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    let mid = 0.5 * (a + b);
    let (left, el) = match gk15(f, a, mid) {
        Ok(v) => v,
        Err(e) => return Some(Err(e)),
    };
    let (right, er) = match gk15(f, mid, b) {
        Ok(v) => v,
        Err(e) => return Some(Err(e)),
    };
    let sum = left + right;
    if el + er <= XINT_RTOL * scale || (sum - whole).abs() <= XINT_RTOL * scale * 1e-2 {
        return Some(Ok(sum));
    }
    if depth >= XINT_MAX_DEPTH {
        return None;
    }
    let l = match adapt(f, a, mid, left, scale, depth + 1)? {
        Ok(v) => v,
        Err(e) => return Some(Err(e)),
    };
    let r = match adapt(f, mid, b, right, scale, depth + 1)? {
        Ok(v) => v,
        Err(e) => return Some(Err(e)),
    };
    Some(Ok(l + r))
}

fn gk15<F>(f: &F, a: f64, b: f64) -> Result<(f64, f64), EvalError>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let sum = f(c - dx)? + f(c + dx)?;
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    Ok((kronrod * h, ((kronrod - gauss) * h).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn fiber_evaluation_matches_pointwise() {
        let e = parse("xint(1+x^2, 0, x, y, 0)").unwrap();
        let e = e.mul(&parse("sin(2*pi*t)+y/(1+t^2)").unwrap()).add(&parse("exp(x*y)").unwrap());
        let ts: Vec<f64> = (0..8).map(|j| j as f64 / 8.0).collect();
        let fib = e.eval_fiber(0.3, -0.7, &ts).unwrap();
        for (t, v) in ts.iter().zip(&fib) {
            assert_eq!(*v, e.eval([0.3, -0.7, *t]).unwrap());
        }
        let err = parse("1/(t-0.5)").unwrap().eval_fiber(0.0, 0.0, &ts).unwrap_err();
        assert_eq!(err.kind, EvalErrorKind::DivisionByZero);
        assert_eq!(err.point, [0.0, 0.0, 0.5]);
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(parse("x^2+y^2").unwrap().eval([1.0, 2.0, 0.0]).unwrap(), 5.0);
        let s = parse("sin(2*pi*t)").unwrap().eval([0.0, 0.0, 0.25]).unwrap();
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn division_by_zero_names_the_node() {
        let err = parse("1 + 1/x").unwrap().eval([0.0; 3]).unwrap_err();
        assert_eq!(err.kind, EvalErrorKind::DivisionByZero);
        assert_eq!(err.node, "1/x");
    }

    #[test]
    fn log_and_sqrt_domains() {
        let err = parse("log(x)").unwrap().eval([-1.0, 0.0, 0.0]).unwrap_err();
        assert_eq!(err.kind, EvalErrorKind::LogOfNonPositive);
        let err = parse("sqrt(x)").unwrap().eval([-1.0, 0.0, 0.0]).unwrap_err();
        assert_eq!(err.kind, EvalErrorKind::SqrtOfNegative);
        let err = parse("x^0.5").unwrap().eval([-1.0, 0.0, 0.0]).unwrap_err();
        assert_eq!(err.kind, EvalErrorKind::NegativeBaseFractionalPower);
        assert_eq!(parse("x^3").unwrap().eval([-2.0, 0.0, 0.0]).unwrap(), -8.0);
    }

    #[test]
    fn x_integral_matches_antiderivative() {
        // ∫_{-2}^{x} (1 + s^2) ds
        let e = parse("xint(1 + x^2, -2, x, y, t)").unwrap();
        let x: f64 = 0.7;
        let exact = (x + x.powi(3) / 3.0) - (-2.0 - 8.0 / 3.0);
        assert!((e.eval([x, 0.3, 0.0]).unwrap() - exact).abs() < 1e-13);
        // oscillatory integrand forces subdivision
        let e = parse("xint(cos(40*x), 0, x, y, t)").unwrap();
        let exact = (40.0 * 1.3f64).sin() / 40.0;
        assert!((e.eval([1.3, 0.0, 0.0]).unwrap() - exact).abs() < 1e-13);
    }
}
