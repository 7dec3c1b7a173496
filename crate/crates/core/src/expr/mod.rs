//! Scalar expressions in the variables `x`, `y`, `t`.
//!
//! Every coefficient in the form pipeline is an [`Expr`]: area densities,
//! Hamiltonians, diffeomorphism components, potentials. Trees are immutable
//! and reference counted, so cloning is cheap and evaluation is thread safe.
//!
//! Construction always goes through the smart constructors below. They fold
//! constants and drop additive/multiplicative identities, nothing more.

mod diff;
mod eval;
mod parse;
mod print;
mod tape;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

pub use eval::{EvalError, EvalErrorKind};
pub use parse::{parse, ParseError};
pub use tape::Tape;

/// Coordinate on `Q = M × S¹`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
    T,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::X, Var::Y, Var::T];

    pub fn index(self) -> usize {
        match self {
            Var::X => 0,
            Var::Y => 1,
            Var::T => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::T => "t",
        }
    }
}

/// One-argument built-in functions.
///
/// `pos(a) = max(a, 0)` and `step(a) = [a > 0]` exist so that compactly
/// supported bumps such as `pos(1 - x^2)^6` can be written in the grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Pos,
    Step,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Pos => "pos",
            Func::Step => "step",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "pos" => Func::Pos,
            "step" => Func::Step,
            _ => return None,
        })
    }

    /// Unchecked application; domain checks live in the evaluator.
    pub(crate) fn apply(self, a: f64) -> f64 {
        match self {
            Func::Sin => a.sin(),
            Func::Cos => a.cos(),
            Func::Exp => a.exp(),
            Func::Log => a.ln(),
            Func::Sqrt => a.sqrt(),
            Func::Pos => a.max(0.0),
            Func::Step => {
                if a > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// `∫_lower^upper f(s, y, t) ds` with `f` written in `x` (the integration
/// variable), `y` and `t`. The integrand's variables are bound; only the
/// four argument expressions see the outer point.
#[derive(Clone, Debug)]
pub struct XIntegral {
    pub integrand: Expr,
    pub lower: Expr,
    pub upper: Expr,
    pub y: Expr,
    pub t: Expr,
}

#[derive(Debug)]
pub enum Node {
    Const(f64),
    Var(Var),
    Neg(Expr),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    /// Power with a constant exponent.
    Pow(Expr, f64),
    Call(Func, Expr),
    Atan2(Expr, Expr),
    XInt(XIntegral),
}

/// Immutable expression tree.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl Expr {
    fn new(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(v: f64) -> Expr {
        Expr::new(Node::Const(v))
    }

    pub fn zero() -> Expr {
        Expr::constant(0.0)
    }

    pub fn one() -> Expr {
        Expr::constant(1.0)
    }

    pub fn pi() -> Expr {
        Expr::constant(PI)
    }

    pub fn var(v: Var) -> Expr {
        Expr::new(Node::Var(v))
    }

    pub fn x() -> Expr {
        Expr::var(Var::X)
    }

    pub fn y() -> Expr {
        Expr::var(Var::Y)
    }

    pub fn t() -> Expr {
        Expr::var(Var::T)
    }

    pub fn as_const(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn neg(&self) -> Expr {
        match &*self.0 {
            Node::Const(v) => Expr::constant(-v),
            Node::Neg(inner) => inner.clone(),
            _ => Expr::new(Node::Neg(self.clone())),
        }
    }

    pub fn add(&self, rhs: &Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::constant(a + b),
            (Some(a), _) if a == 0.0 => rhs.clone(),
            (_, Some(b)) if b == 0.0 => self.clone(),
            _ => Expr::new(Node::Add(self.clone(), rhs.clone())),
        }
    }

    pub fn sub(&self, rhs: &Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::constant(a - b),
            (Some(a), _) if a == 0.0 => rhs.neg(),
            (_, Some(b)) if b == 0.0 => self.clone(),
            _ => Expr::new(Node::Sub(self.clone(), rhs.clone())),
        }
    }

    pub fn mul(&self, rhs: &Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::constant(a * b),
            (Some(a), _) if a == 0.0 => Expr::zero(),
            (_, Some(b)) if b == 0.0 => Expr::zero(),
            (Some(a), _) if a == 1.0 => rhs.clone(),
            (_, Some(b)) if b == 1.0 => self.clone(),
            _ => Expr::new(Node::Mul(self.clone(), rhs.clone())),
        }
    }

    pub fn div(&self, rhs: &Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) if b != 0.0 => Expr::constant(a / b),
            (Some(a), _) if a == 0.0 => Expr::zero(),
            (_, Some(b)) if b == 1.0 => self.clone(),
            _ => Expr::new(Node::Div(self.clone(), rhs.clone())),
        }
    }

    pub fn powf(&self, exponent: f64) -> Expr {
        if exponent == 1.0 {
            return self.clone();
        }
        if exponent == 0.0 {
            return Expr::one();
        }
        if let Some(a) = self.as_const() {
            let v = eval::pow(a, exponent);
            if v.is_finite() {
                return Expr::constant(v);
            }
        }
        Expr::new(Node::Pow(self.clone(), exponent))
    }

    pub fn call(func: Func, arg: &Expr) -> Expr {
        if let Some(a) = arg.as_const() {
            let v = func.apply(a);
            // log(-1) and friends stay symbolic so the evaluator reports them
            if v.is_finite() && eval::func_domain_ok(func, a) {
                return Expr::constant(v);
            }
        }
        Expr::new(Node::Call(func, arg.clone()))
    }

    pub fn sin(&self) -> Expr {
        Expr::call(Func::Sin, self)
    }

    pub fn cos(&self) -> Expr {
        Expr::call(Func::Cos, self)
    }

    pub fn exp(&self) -> Expr {
        Expr::call(Func::Exp, self)
    }

    pub fn ln(&self) -> Expr {
        Expr::call(Func::Log, self)
    }

    pub fn sqrt(&self) -> Expr {
        Expr::call(Func::Sqrt, self)
    }

    pub fn atan2(&self, other: &Expr) -> Expr {
        if let (Some(a), Some(b)) = (self.as_const(), other.as_const()) {
            if a != 0.0 || b != 0.0 {
                return Expr::constant(a.atan2(b));
            }
        }
        Expr::new(Node::Atan2(self.clone(), other.clone()))
    }

    pub fn scale(&self, s: f64) -> Expr {
        Expr::constant(s).mul(self)
    }

    /// `∫_lower^upper integrand(s, y, t) ds`.
    pub fn x_integral(integrand: &Expr, lower: &Expr, upper: &Expr, y: &Expr, t: &Expr) -> Expr {
        if integrand.is_zero() {
            return Expr::zero();
        }
        Expr::new(Node::XInt(XIntegral {
            integrand: integrand.clone(),
            lower: lower.clone(),
            upper: upper.clone(),
            y: y.clone(),
            t: t.clone(),
        }))
    }

    /// Whether `v` occurs free in the tree.
    pub fn depends_on(&self, v: Var) -> bool {
        match self.node() {
            Node::Const(_) => false,
            Node::Var(w) => *w == v,
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.depends_on(v),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Atan2(a, b) => {
                a.depends_on(v) || b.depends_on(v)
            }
            Node::XInt(k) => {
                k.lower.depends_on(v) || k.upper.depends_on(v) || k.y.depends_on(v) || k.t.depends_on(v)
            }
        }
    }

    /// Number of nodes, counting shared subtrees once per occurrence.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Const(_) | Node::Var(_) => 1,
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => 1 + a.size(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Atan2(a, b) => {
                1 + a.size() + b.size()
            }
            Node::XInt(k) => 1 + k.integrand.size() + k.lower.size() + k.upper.size() + k.y.size() + k.t.size(),
        }
    }

    /// Simultaneous substitution `x ↦ with[0]`, `y ↦ with[1]`, `t ↦ with[2]`.
    pub fn substitute(&self, with: &[Expr; 3]) -> Expr {
        let mut memo = HashMap::new();
        self.subst_memo(with, &mut memo)
    }

    fn subst_memo(&self, with: &[Expr; 3], memo: &mut HashMap<usize, Expr>) -> Expr {
        let key = Arc::as_ptr(&self.0) as usize;
        if let Some(e) = memo.get(&key) {
            return e.clone();
        }
        let out = match self.node() {
            Node::Const(_) => self.clone(),
            Node::Var(v) => with[v.index()].clone(),
            Node::Neg(a) => a.subst_memo(with, memo).neg(),
            Node::Add(a, b) => a.subst_memo(with, memo).add(&b.subst_memo(with, memo)),
            Node::Sub(a, b) => a.subst_memo(with, memo).sub(&b.subst_memo(with, memo)),
            Node::Mul(a, b) => a.subst_memo(with, memo).mul(&b.subst_memo(with, memo)),
            Node::Div(a, b) => a.subst_memo(with, memo).div(&b.subst_memo(with, memo)),
            Node::Pow(a, n) => a.subst_memo(with, memo).powf(*n),
            Node::Call(f, a) => Expr::call(*f, &a.subst_memo(with, memo)),
            Node::Atan2(a, b) => a.subst_memo(with, memo).atan2(&b.subst_memo(with, memo)),
            Node::XInt(k) => Expr::x_integral(
                &k.integrand,
                &k.lower.subst_memo(with, memo),
                &k.upper.subst_memo(with, memo),
                &k.y.subst_memo(with, memo),
                &k.t.subst_memo(with, memo),
            ),
        };
        memo.insert(key, out.clone());
        out
    }

    /// Substitute a single variable by a constant.
    pub fn fix(&self, v: Var, value: f64) -> Expr {
        let mut with = [Expr::x(), Expr::y(), Expr::t()];
        with[v.index()] = Expr::constant(value);
        self.substitute(&with)
    }
}

impl From<f64> for Expr {
    fn from(v: f64) -> Self {
        Expr::constant(v)
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl std::ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$inner(self, rhs)
            }
        }
        impl std::ops::$trait<f64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr::$inner(self, &Expr::constant(rhs))
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}
