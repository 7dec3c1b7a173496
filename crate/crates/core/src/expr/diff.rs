use std::collections::HashMap;
use std::sync::Arc;

use super::{Expr, Func, Node, Var};

impl Expr {
    /// Exact symbolic partial derivative with respect to `v`.
    ///
    /// `xint` nodes are differentiated by the Leibniz rule, so the result is
    /// again an exact expression (possibly containing further `xint` nodes).
    pub fn diff(&self, v: Var) -> Expr {
        let mut memo = HashMap::new();
        self.diff_memo(v, &mut memo)
    }

    fn diff_memo(&self, v: Var, memo: &mut HashMap<usize, Expr>) -> Expr {
        let key = Arc::as_ptr(&self.0) as usize;
        if let Some(d) = memo.get(&key) {
            return d.clone();
        }
        let d = match self.node() {
            Node::Const(_) => Expr::zero(),
            Node::Var(w) => {
                if *w == v {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Neg(a) => a.diff_memo(v, memo).neg(),
            Node::Add(a, b) => a.diff_memo(v, memo).add(&b.diff_memo(v, memo)),
            Node::Sub(a, b) => a.diff_memo(v, memo).sub(&b.diff_memo(v, memo)),
            Node::Mul(a, b) => {
                let da = a.diff_memo(v, memo);
                let db = b.diff_memo(v, memo);
                da.mul(b).add(&a.mul(&db))
            }
            Node::Div(a, b) => {
                let da = a.diff_memo(v, memo);
                let db = b.diff_memo(v, memo);
                if db.is_zero() {
                    da.div(b)
                } else {
                    da.mul(b).sub(&a.mul(&db)).div(&b.powf(2.0))
                }
            }
            Node::Pow(a, n) => {
                let da = a.diff_memo(v, memo);
                Expr::constant(*n).mul(&a.powf(n - 1.0)).mul(&da)
            }
            Node::Call(func, a) => {
                let da = a.diff_memo(v, memo);
                if da.is_zero() {
                    Expr::zero()
                } else {
                    let outer = match func {
                        Func::Sin => a.cos(),
                        Func::Cos => a.sin().neg(),
                        Func::Exp => self.clone(),
                        Func::Log => Expr::one().div(a),
                        Func::Sqrt => Expr::constant(0.5).div(self),
                        Func::Pos => Expr::call(Func::Step, a),
                        Func::Step => Expr::zero(),
                    };
                    outer.mul(&da)
                }
            }
            Node::Atan2(a, b) => {
                // d atan2(a, b) = (b da - a db) / (a² + b²)
                let da = a.diff_memo(v, memo);
                let db = b.diff_memo(v, memo);
                let num = b.mul(&da).sub(&a.mul(&db));
                if num.is_zero() {
                    Expr::zero()
                } else {
                    num.div(&a.powf(2.0).add(&b.powf(2.0)))
                }
            }
            Node::XInt(k) => {
                let at = |s: &Expr| k.integrand.substitute(&[s.clone(), k.y.clone(), k.t.clone()]);
                let mut d = Expr::zero();
                let du = k.upper.diff_memo(v, memo);
                if !du.is_zero() {
                    d = d.add(&at(&k.upper).mul(&du));
                }
                let dl = k.lower.diff_memo(v, memo);
                if !dl.is_zero() {
                    d = d.sub(&at(&k.lower).mul(&dl));
                }
                let dy = k.y.diff_memo(v, memo);
                if !dy.is_zero() {
                    let fy = k.integrand.diff(Var::Y);
                    d = d.add(&Expr::x_integral(&fy, &k.lower, &k.upper, &k.y, &k.t).mul(&dy));
                }
                let dt = k.t.diff_memo(v, memo);
                if !dt.is_zero() {
                    let ft = k.integrand.diff(Var::T);
                    d = d.add(&Expr::x_integral(&ft, &k.lower, &k.upper, &k.y, &k.t).mul(&dt));
                }
                d
            }
        };
        memo.insert(key, d.clone());
        d
    }

    /// Gradient `(∂x, ∂y, ∂t)`.
    pub fn grad(&self) -> [Expr; 3] {
        [self.diff(Var::X), self.diff(Var::Y), self.diff(Var::T)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn d(src: &str, v: Var) -> Expr {
        parse(src).unwrap().diff(v)
    }

    #[test]
    fn power_rule() {
        let e = d("x^2+y^2", Var::X);
        for x in [-1.5, 0.0, 2.0] {
            assert_eq!(e.eval([x, 7.0, 0.0]).unwrap(), 2.0 * x);
        }
    }

    #[test]
    fn chain_rule() {
        let e = d("sin(2*pi*t)", Var::T);
        let t: f64 = 0.1;
        let expect = 2.0 * std::f64::consts::PI * (2.0 * std::f64::consts::PI * t).cos();
        assert!((e.eval([0.0, 0.0, t]).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn constant_derivative_is_zero() {
        assert!(d("5", Var::Y).is_zero());
        assert!(d("x*t", Var::Y).is_zero());
    }

    #[test]
    fn leibniz_rule_on_x_integral() {
        // F(x, y) = ∫_{-2}^{x} s*y^2 ds, F_x = x y^2, F_y = 2y (x^2 - 4)/2
        let e = parse("xint(x*y^2, -2, x, y, t)").unwrap();
        let p = [0.4, 1.3, 0.0];
        assert!((e.diff(Var::X).eval(p).unwrap() - 0.4 * 1.3 * 1.3).abs() < 1e-13);
        assert!((e.diff(Var::Y).eval(p).unwrap() - 1.3 * (0.16 - 4.0)).abs() < 1e-13);
        assert!(e.diff(Var::T).is_zero());
    }
}
