//! Recursive-descent parser.
//!
//! ```text
//! expr     := term (("+" | "-") term)*
//! term     := unary (("*" | "/") unary)*
//! unary    := "-" unary | power
//! power    := base ("^" unary)?          exponent must fold to a constant
//! base     := number | ident | ident "(" args ")" | "(" expr ")"
//! args     := expr ("," expr)*
//! number   := digits ["." digits] [("e" | "E") ["+" | "-"] digits]
//! ident    := x | y | t | pi | sin | cos | exp | log | sqrt | pos | step
//!           | atan2 | xint
//! ```
//!
//! `atan2(a, b)` takes two arguments; `xint(f, a, b, y, t)` is
//! `∫_a^b f(s, y, t) ds` where `x` inside `f` is the integration variable.

use super::{Expr, Func};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("`{name}` at offset {offset} takes {expected} argument(s), got {found}")]
    Arity { name: String, offset: usize, expected: usize, found: usize },
    #[error("exponent at offset {offset} is not a constant")]
    NonConstantExponent { offset: usize },
    #[error("integrand of `xint` at offset {offset} must not contain another `xint`")]
    NestedIntegral { offset: usize },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokenize(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let (tok, at) = lx.next()?;
            let end = tok == Tok::End;
            out.push((tok, at));
            if end {
                return Ok(out);
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_digit() || c == '.' {
            return self.number(start).map(|v| (Tok::Num(v), start));
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while let Some(c) = self.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            return Ok((Tok::Ident(self.src[start..self.pos].to_string()), start));
        }
        if "+-*/^(),".contains(c) {
            self.pos += 1;
            return Ok((Tok::Sym(c), start));
        }
        Err(ParseError::Syntax { offset: start, message: format!("unexpected character `{c}`") })
    }

    fn number(&mut self, start: usize) -> Result<f64, ParseError> {
        let bytes = self.src.as_bytes();
        let digits = |pos: &mut usize| {
            let from = *pos;
            while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                *pos += 1;
            }
            *pos - from
        };
        let mut pos = self.pos;
        let mut n = digits(&mut pos);
        if pos < bytes.len() && bytes[pos] == b'.' {
            pos += 1;
            n += digits(&mut pos);
        }
        if n == 0 {
            return Err(ParseError::Syntax { offset: start, message: "malformed number".into() });
        }
        if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
            let mut p = pos + 1;
            if p < bytes.len() && (bytes[p] == b'+' || bytes[p] == b'-') {
                p += 1;
            }
            if digits(&mut p) > 0 {
                pos = p;
            }
        }
        self.pos = pos;
        self.src[start..pos]
            .parse()
            .map_err(|_| ParseError::Syntax { offset: start, message: "malformed number".into() })
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

/// Parse an expression in the documented grammar.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: Lexer::tokenize(src)?, at: 0 };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        tok => Err(ParseError::Syntax { offset: p.offset(), message: format!("unexpected {}", describe(tok)) }),
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::End => "end of input".into(),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn offset(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if t.0 != Tok::End {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(ParseError::Syntax {
                offset: self.offset(),
                message: format!("expected `{c}`, found {}", describe(self.peek())),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = lhs.add(&self.term()?);
            } else if self.eat('-') {
                lhs = lhs.sub(&self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = lhs.mul(&self.unary()?);
            } else if self.eat('/') {
                lhs = lhs.div(&self.unary()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let offset = self.offset();
        let exponent = self.unary()?;
        match exponent.as_const() {
            Some(n) => Ok(base.powf(n)),
            None => Err(ParseError::NonConstantExponent { offset }),
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let (tok, offset) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::constant(v)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::Sym('(') {
                    self.at += 1;
                    let args = self.args()?;
                    self.call(&name, offset, args)
                } else {
                    match name.as_str() {
                        "x" => Ok(Expr::x()),
                        "y" => Ok(Expr::y()),
                        "t" => Ok(Expr::t()),
                        "pi" => Ok(Expr::pi()),
                        _ if is_function(&name) => {
                            Err(ParseError::Arity { expected: arity(&name), name, offset, found: 0 })
                        }
                        _ => Err(ParseError::UnknownIdentifier { name, offset }),
                    }
                }
            }
            other => Err(ParseError::Syntax { offset, message: format!("unexpected {}", describe(&other)) }),
        }
    }

    fn args(&mut self) -> Result<Vec<Expr>, ParseError> {
        let mut args = Vec::new();
        if self.eat(')') {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if self.eat(')') {
                return Ok(args);
            }
            self.expect(',')?;
        }
    }

    fn call(&self, name: &str, offset: usize, args: Vec<Expr>) -> Result<Expr, ParseError> {
        if !is_function(name) {
            return Err(ParseError::UnknownIdentifier { name: name.to_string(), offset });
        }
        let expected = arity(name);
        if args.len() != expected {
            return Err(ParseError::Arity { name: name.to_string(), offset, expected, found: args.len() });
        }
        Ok(match name {
            "atan2" => args[0].atan2(&args[1]),
            "xint" => {
                if contains_integral(&args[0]) {
                    return Err(ParseError::NestedIntegral { offset });
                }
                Expr::x_integral(&args[0], &args[1], &args[2], &args[3], &args[4])
            }
            _ => Expr::call(Func::from_name(name).expect("checked by is_function"), &args[0]),
        })
    }
}

fn is_function(name: &str) -> bool {
    Func::from_name(name).is_some() || name == "atan2" || name == "xint"
}

fn arity(name: &str) -> usize {
    match name {
        "atan2" => 2,
        "xint" => 5,
        _ => 1,
    }
}

fn contains_integral(e: &Expr) -> bool {
    use super::Node::*;
    match e.node() {
        Const(_) | Var(_) => false,
        Neg(a) | Pow(a, _) | Call(_, a) => contains_integral(a),
        Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Atan2(a, b) => contains_integral(a) || contains_integral(b),
        XInt(_) => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Node;

    #[test]
    fn standard_precedence() {
        let e = parse("x^2+y^2").unwrap();
        match e.node() {
            Node::Add(a, b) => {
                assert!(matches!(a.node(), Node::Pow(_, n) if *n == 2.0));
                assert!(matches!(b.node(), Node::Pow(_, n) if *n == 2.0));
            }
            other => panic!("unexpected tree {other:?}"),
        }
        assert_eq!(parse("-x^2").unwrap().eval([3.0, 0.0, 0.0]).unwrap(), -9.0);
        assert_eq!(parse("2^3^2").unwrap().as_const(), Some(512.0));
        assert_eq!(parse("1 - 2 - 3").unwrap().as_const(), Some(-4.0));
        assert_eq!(parse("8 / 2 / 2").unwrap().as_const(), Some(2.0));
    }

    #[test]
    fn whitespace_insensitive() {
        let a = parse("sin( 2 * pi * t )").unwrap();
        let b = parse("sin(2*pi*t)").unwrap();
        assert_eq!(a.to_string(), b.to_string());
    }

    #[test]
    fn pi_is_builtin() {
        let e = parse("sin(2*pi*t)").unwrap();
        assert_eq!(e.to_string(), "sin(6.283185307179586*t)");
        assert_eq!(parse("pi").unwrap().as_const(), Some(std::f64::consts::PI));
    }

    #[test]
    fn syntax_error_reports_offset() {
        assert_eq!(
            parse("x +* y").unwrap_err(),
            ParseError::Syntax { offset: 3, message: "unexpected `*`".into() }
        );
        assert!(matches!(parse("(x + y"), Err(ParseError::Syntax { offset: 6, .. })));
        assert!(matches!(parse("x $ y"), Err(ParseError::Syntax { offset: 2, .. })));
    }

    #[test]
    fn identifier_and_arity_errors() {
        assert_eq!(parse("z + 1").unwrap_err(), ParseError::UnknownIdentifier { name: "z".into(), offset: 0 });
        assert_eq!(parse("foo(x)").unwrap_err(), ParseError::UnknownIdentifier { name: "foo".into(), offset: 0 });
        assert_eq!(
            parse("atan2(x)").unwrap_err(),
            ParseError::Arity { name: "atan2".into(), offset: 0, expected: 2, found: 1 }
        );
        assert!(matches!(parse("sin(x, y)"), Err(ParseError::Arity { expected: 1, found: 2, .. })));
        assert!(matches!(parse("x^y"), Err(ParseError::NonConstantExponent { offset: 2 })));
    }

    #[test]
    fn scientific_notation() {
        assert_eq!(parse("1.5e-3").unwrap().as_const(), Some(1.5e-3));
        assert_eq!(parse("2E2").unwrap().as_const(), Some(200.0));
        assert_eq!(parse(".25").unwrap().as_const(), Some(0.25));
    }
}
