mod common;

use common::{fd_mismatch, random_expr, rng};
use helixforms::expr::{parse, Expr, ParseError, Tape, Var};
use proptest::prelude::*;

fn tree(seed: u64) -> Expr {
    random_expr(&mut rng(seed), 5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn symbolic_derivative_matches_central_difference(
        seed in any::<u64>(),
        x in -1.5..1.5f64,
        y in -1.5..1.5f64,
        t in 0.0..1.0f64,
    ) {
        let e = tree(seed);
        let m = fd_mismatch(&e, &[[x, y, t]], 1e-5);
        prop_assert!(m <= 1e-6, "{e}: {m:e}");
    }

    #[test]
    fn print_then_parse_round_trips(seed in any::<u64>(), x in -1.5..1.5f64, y in -1.5..1.5f64, t in 0.0..1.0f64) {
        let e = tree(seed);
        let text = e.to_string();
        let back = parse(&text).unwrap();
        prop_assert_eq!(back.to_string(), text.clone());
        let (u, v) = (e.eval([x, y, t]).unwrap(), back.eval([x, y, t]).unwrap());
        prop_assert!((u - v).abs() <= 1e-12 * (1.0 + u.abs()), "{text}: {u} vs {v}");
    }

    #[test]
    fn tape_agrees_with_tree_evaluation(seed in any::<u64>(), x in -1.5..1.5f64, y in -1.5..1.5f64) {
        let e = tree(seed);
        let d = e.diff(Var::X);
        let tape = Tape::new(&[e.clone(), d.clone()]);
        let ts = [0.0, 0.25, 0.8];
        let mut out = Vec::new();
        tape.eval_fiber(x, y, &ts, &mut out).unwrap();
        for (j, t) in ts.iter().enumerate() {
            prop_assert_eq!(out[j].to_bits(), e.eval([x, y, *t]).unwrap().to_bits());
            prop_assert_eq!(out[3 + j].to_bits(), d.eval([x, y, *t]).unwrap().to_bits());
        }
    }
}

#[test]
fn x_integral_derivatives() {
    // Q(x, y) = ∫_{-1}^{x} (1 + s² y) ds = (x + 1) + y (x³ + 1)/3
    let q = parse("xint(1+x^2*y, -1, x, y, 0)").unwrap();
    let p: [f64; 3] = [0.7, -0.3, 0.0];
    let exact = (p[0] + 1.0) + p[1] * (p[0].powi(3) + 1.0) / 3.0;
    assert!((q.eval(p).unwrap() - exact).abs() < 1e-13);
    assert!((q.diff(Var::X).eval(p).unwrap() - (1.0 + p[0] * p[0] * p[1])).abs() < 1e-13);
    assert!((q.diff(Var::Y).eval(p).unwrap() - (p[0].powi(3) + 1.0) / 3.0).abs() < 1e-13);
    assert!(fd_mismatch(&q, &[p, [0.2, 0.9, 0.5]], 1e-5) < 1e-8);
}

#[test]
fn malformed_input_is_rejected() {
    assert!(matches!(parse("sin(x"), Err(ParseError::Syntax { .. })));
    assert!(matches!(parse("foo(x)"), Err(ParseError::UnknownIdentifier { .. })));
    assert!(matches!(parse("x^y"), Err(ParseError::NonConstantExponent { .. })));
    assert!(parse("").is_err());
}

#[test]
fn domain_errors_report_the_point() {
    let e = parse("log(x)").unwrap();
    let err = e.eval([-1.0, 0.0, 0.0]).unwrap_err();
    assert_eq!(err.point, [-1.0, 0.0, 0.0]);
    assert!(parse("sqrt(y)").unwrap().eval([0.0, -2.0, 0.0]).is_err());
    assert!(parse("1/t").unwrap().eval([0.0, 0.0, 0.0]).is_err());
}
