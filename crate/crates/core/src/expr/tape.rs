use std::collections::HashMap;
use std::sync::Arc;

use super::{EvalError, Expr, Node, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Kind {
    Const(u64),
    Var(usize),
    Unary(usize),
    Binary(usize, usize),
    /// Evaluated through [`Expr::eval`] as a whole (integrals).
    Whole,
}

#[derive(Clone, Debug)]
struct Op {
    expr: Expr,
    kind: Kind,
    /// Whether the value depends on `t`.
    varies: bool,
}

/// Flattened, deduplicated form of one or more expressions for repeated
/// evaluation. Structurally equal subtrees are computed once, and along a
/// fiber `{(x, y)} × ts` the `t`-free part is computed once per point.
///
/// Results are bit-identical to [`Expr::eval`].
#[derive(Clone, Debug)]
pub struct Tape {
    ops: Vec<Op>,
    roots: Vec<usize>,
    /// Column slot of each varying op.
    slot: Vec<usize>,
    varying: usize,
}

#[derive(Hash, PartialEq, Eq)]
enum Key {
    Shape(u8, Kind),
    Whole(usize),
}

struct Builder {
    ops: Vec<Op>,
    by_ptr: HashMap<usize, usize>,
    by_shape: HashMap<Key, usize>,
}

fn shape_tag(node: &Node) -> u8 {
    match node {
        Node::Const(_) => 0,
        Node::Var(_) => 1,
        Node::Neg(_) => 2,
        Node::Add(..) => 3,
        Node::Sub(..) => 4,
        Node::Mul(..) => 5,
        Node::Div(..) => 6,
        Node::Pow(..) => 7,
        Node::Call(..) => 8,
        Node::Atan2(..) => 9,
        Node::XInt(_) => 10,
    }
}

impl Builder {
    fn push(&mut self, e: &Expr) -> usize {
        let ptr = Arc::as_ptr(&e.0) as usize;
        if let Some(&i) = self.by_ptr.get(&ptr) {
            return i;
        }
        let (kind, varies) = match e.node() {
            Node::Const(v) => (Kind::Const(v.to_bits()), false),
            Node::Var(v) => (Kind::Var(v.index()), *v == Var::T),
            Node::Neg(a) | Node::Call(_, a) | Node::Pow(a, _) => {
                let a = self.push(a);
                (Kind::Unary(a), self.ops[a].varies)
            }
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Atan2(a, b) => {
                let (a, b) = (self.push(a), self.push(b));
                (Kind::Binary(a, b), self.ops[a].varies || self.ops[b].varies)
            }
            Node::XInt(_) => (Kind::Whole, e.depends_on(Var::T)),
        };
        // Unary ops with different functions or exponents must not merge.
        let key = match (e.node(), kind) {
            (Node::XInt(_), _) => Key::Whole(ptr),
            (Node::Call(f, _), Kind::Unary(a)) => Key::Shape(shape_tag(e.node()), Kind::Binary(a, *f as usize)),
            (Node::Pow(_, n), Kind::Unary(a)) => Key::Shape(shape_tag(e.node()), Kind::Binary(a, n.to_bits() as usize)),
            _ => Key::Shape(shape_tag(e.node()), kind),
        };
        let id = match self.by_shape.get(&key) {
            Some(&i) => i,
            None => {
                self.ops.push(Op { expr: e.clone(), kind, varies });
                let i = self.ops.len() - 1;
                self.by_shape.insert(key, i);
                i
            }
        };
        self.by_ptr.insert(ptr, id);
        id
    }
}

impl Tape {
    pub fn new(exprs: &[Expr]) -> Tape {
        let mut b = Builder { ops: Vec::new(), by_ptr: HashMap::new(), by_shape: HashMap::new() };
        let roots = exprs.iter().map(|e| b.push(e)).collect();
        let mut slot = vec![usize::MAX; b.ops.len()];
        let mut varying = 0;
        for (i, op) in b.ops.iter().enumerate() {
            if op.varies {
                slot[i] = varying;
                varying += 1;
            }
        }
        Tape { ops: b.ops, roots, slot, varying }
    }

    /// Number of distinct operations.
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    fn step(&self, op: &Op, a: f64, b: f64, p: [f64; 3]) -> Result<f64, EvalError> {
        match op.kind {
            Kind::Const(bits) => Ok(f64::from_bits(bits)),
            Kind::Var(v) => Ok(p[v]),
            Kind::Whole => op.expr.eval(p),
            Kind::Unary(_) | Kind::Binary(..) => op.expr.combine(a, b, p),
        }
    }

    /// Values of all roots at `p`.
    pub fn eval(&self, p: [f64; 3]) -> Result<Vec<f64>, EvalError> {
        let mut v = vec![0.0; self.ops.len()];
        for (i, op) in self.ops.iter().enumerate() {
            let (a, b) = match op.kind {
                Kind::Unary(a) => (v[a], 0.0),
                Kind::Binary(a, b) => (v[a], v[b]),
                _ => (0.0, 0.0),
            };
            v[i] = self.step(op, a, b, p)?;
        }
        Ok(self.roots.iter().map(|&r| v[r]).collect())
    }

    /// Values of all roots along `{(x, y)} × ts`, root-major:
    /// `out[r * ts.len() + j]`.
    pub fn eval_fiber(&self, x: f64, y: f64, ts: &[f64], out: &mut Vec<f64>) -> Result<(), EvalError> {
        let nt = ts.len();
        out.clear();
        if nt == 0 {
            return Ok(());
        }
        let mut scalar = vec![0.0; self.ops.len()];
        let mut cols = vec![0.0; self.varying * nt];
        for (i, op) in self.ops.iter().enumerate() {
            if !op.varies {
                let (a, b) = match op.kind {
                    Kind::Unary(a) => (scalar[a], 0.0),
                    Kind::Binary(a, b) => (scalar[a], scalar[b]),
                    _ => (0.0, 0.0),
                };
                scalar[i] = self.step(op, a, b, [x, y, ts[0]])?;
                continue;
            }
            let get = |k: usize, j: usize, cols: &[f64]| {
                if self.ops[k].varies {
                    cols[self.slot[k] * nt + j]
                } else {
                    scalar[k]
                }
            };
            let base = self.slot[i] * nt;
            for j in 0..nt {
                let (a, b) = match op.kind {
                    Kind::Unary(a) => (get(a, j, &cols), 0.0),
                    Kind::Binary(a, b) => (get(a, j, &cols), get(b, j, &cols)),
                    _ => (0.0, 0.0),
                };
                cols[base + j] = self.step(op, a, b, [x, y, ts[j]])?;
            }
        }
        for &r in &self.roots {
            if self.ops[r].varies {
                out.extend_from_slice(&cols[self.slot[r] * nt..(self.slot[r] + 1) * nt]);
            } else {
                out.extend(std::iter::repeat_n(scalar[r], nt));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn matches_tree_evaluation_bitwise() {
        let e = parse("sin(x*y+t)^2 + sin(x*y+t)*exp(-y) + xint(1+x^2, -1, x, y, 0)*cos(2*pi*t)").unwrap();
        let d = e.diff(Var::X);
        let tape = Tape::new(&[e.clone(), d.clone()]);
        let ts = [0.0, 0.1, 0.7];
        let mut out = Vec::new();
        tape.eval_fiber(0.3, -0.4, &ts, &mut out).unwrap();
        for (j, t) in ts.iter().enumerate() {
            let p = [0.3, -0.4, *t];
            assert_eq!(out[j], e.eval(p).unwrap());
            assert_eq!(out[3 + j], d.eval(p).unwrap());
            assert_eq!(tape.eval(p).unwrap(), vec![e.eval(p).unwrap(), d.eval(p).unwrap()]);
        }
    }

    #[test]
    fn shared_subtrees_are_merged() {
        let e = parse("sin(x*y)+sin(x*y)").unwrap();
        // x, y, x*y, sin, +
        assert_eq!(Tape::new(&[e]).len(), 5);
        let f = parse("sin(x)+cos(x)+x^2+x^3").unwrap();
        assert_eq!(Tape::new(&[f]).len(), 8);
    }

    #[test]
    fn errors_carry_the_node() {
        let tape = Tape::new(&[parse("1/(t-0.5)").unwrap()]);
        let mut out = Vec::new();
        let err = tape.eval_fiber(0.0, 0.0, &[0.0, 0.5], &mut out).unwrap_err();
        assert_eq!(err.point, [0.0, 0.0, 0.5]);
    }
}
