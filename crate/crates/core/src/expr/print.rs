use std::f64::consts::PI;
use std::fmt;

use super::{Expr, Node};

// Binding strength; atoms bind tightest.
const ADD: u8 = 1;
const MUL: u8 = 2;
const NEG: u8 = 3;
const POW: u8 = 4;
const ATOM: u8 = 5;

fn prec(e: &Expr) -> u8 {
    match e.node() {
        Node::Add(..) | Node::Sub(..) => ADD,
        Node::Mul(..) | Node::Div(..) => MUL,
        Node::Neg(_) => NEG,
        Node::Const(v) if v.is_sign_negative() => NEG,
        Node::Pow(..) => POW,
        _ => ATOM,
    }
}

fn number(v: f64) -> String {
    if v == PI {
        "pi".to_string()
    } else if v == 0.0 || (1e-4..1e16).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Write `e`, parenthesised when it binds looser than `min`.
/// Negations are always parenthesised as operands.
fn operand(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if prec(e) < min || prec(e) == NEG {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(v) if v.is_sign_negative() => write!(f, "-{}", number(-v)),
            Node::Const(v) => f.write_str(&number(*v)),
            Node::Var(v) => f.write_str(v.name()),
            Node::Neg(a) => {
                f.write_str("-")?;
                operand(f, a, POW)
            }
            // Right operands of the same strength are parenthesised so the
            // reparsed tree keeps the original association.
            Node::Add(a, b) => {
                operand(f, a, ADD)?;
                f.write_str("+")?;
                operand(f, b, ADD + 1)
            }
            Node::Sub(a, b) => {
                operand(f, a, ADD)?;
                f.write_str("-")?;
                operand(f, b, ADD + 1)
            }
            Node::Mul(a, b) => {
                operand(f, a, MUL)?;
                f.write_str("*")?;
                operand(f, b, MUL + 1)
            }
            Node::Div(a, b) => {
                operand(f, a, MUL)?;
                f.write_str("/")?;
                operand(f, b, MUL + 1)
            }
            Node::Pow(a, n) => {
                operand(f, a, ATOM)?;
                if n.is_sign_negative() {
                    write!(f, "^(-{})", number(-n))
                } else {
                    write!(f, "^{}", number(*n))
                }
            }
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
            Node::Atan2(a, b) => write!(f, "atan2({a}, {b})"),
            Node::XInt(k) => write!(f, "xint({}, {}, {}, {}, {})", k.integrand, k.lower, k.upper, k.y, k.t),
        }
    }
}
