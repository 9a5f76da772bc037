//! A small arithmetic expression language used for exponent functions,
//! weights, Young functions and probe functions in experiment configs.
//!
//! Grammar:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Variables: `x1`/`x`, `x2`/`y`, `r` (Euclidean norm of the point) and `t`
//! (the scalar argument of a Young function). Constants: `pi`, `e`.
//! Functions: `abs`, `sqrt`, `exp`, `log`, `sin`, `cos`, `max`, `min`,
//! `step(v)` (1 for v >= 0) and `ind(v, a, b)` (1 for a <= v < b).

use crate::error::{Error, Result};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X1,
    X2,
    R,
    T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Func {
    Abs,
    Sqrt,
    Exp,
    Log,
    Sin,
    Cos,
    Max,
    Min,
    Step,
    Ind,
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    Var(Var),
    Neg(Box<Node>),
    Bin(char, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

/// A parsed expression. Keeps its source text for display and serialization.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    source: String,
    root: Node,
}

/// Values bound to the expression variables.
#[derive(Clone, Copy, Debug, Default)]
pub struct Bindings {
    pub x: [f64; 2],
    pub t: f64,
}

impl Bindings {
    pub fn point(x: &[f64]) -> Self {
        let mut b = Bindings::default();
        for (slot, v) in b.x.iter_mut().zip(x) {
            *slot = *v;
        }
        b
    }

    pub fn scalar(t: f64) -> Self {
        Bindings { x: [0.0; 2], t }
    }

    fn get(&self, v: Var) -> f64 {
        match v {
            Var::X1 => self.x[0],
            Var::X2 => self.x[1],
            Var::R => (self.x[0] * self.x[0] + self.x[1] * self.x[1]).sqrt(),
            Var::T => self.t,
        }
    }
}

impl Expr {
    pub fn parse(source: &str) -> Result<Self> {
        let tokens = tokenize(source)?;
        let mut p = Parser { tokens, pos: 0 };
        let root = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Expression(format!(
                "unexpected token {:?} in '{source}'",
                p.tokens[p.pos]
            )));
        }
        Ok(Expr { source: source.to_string(), root })
    }

    pub fn constant(value: f64) -> Self {
        Expr { source: format!("{value}"), root: Node::Num(value) }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, b: &Bindings) -> f64 {
        eval(&self.root, b)
    }

    pub fn eval_point(&self, x: &[f64]) -> f64 {
        self.eval(&Bindings::point(x))
    }

    pub fn eval_scalar(&self, t: f64) -> f64 {
        self.eval(&Bindings::scalar(t))
    }

    /// True when the expression does not reference any variable.
    pub fn is_constant(&self) -> bool {
        fn walk(n: &Node) -> bool {
            match n {
                Node::Num(_) => true,
                Node::Var(_) => false,
                Node::Neg(a) => walk(a),
                Node::Bin(_, a, b) => walk(a) && walk(b),
                Node::Call(_, args) => args.iter().all(walk),
            }
        }
        walk(&self.root)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

fn eval(n: &Node, b: &Bindings) -> f64 {
    match n {
        Node::Num(v) => *v,
        Node::Var(v) => b.get(*v),
        Node::Neg(a) => -eval(a, b),
        Node::Bin(op, l, r) => {
            let (l, r) = (eval(l, b), eval(r, b));
            match op {
                '+' => l + r,
                '-' => l - r,
                '*' => l * r,
                '/' => l / r,
                _ => l.powf(r),
            }
        }
        Node::Call(func, args) => {
            let a: Vec<f64> = args.iter().map(|x| eval(x, b)).collect();
            match func {
                Func::Abs => a[0].abs(),
                Func::Sqrt => a[0].sqrt(),
                Func::Exp => a[0].exp(),
                Func::Log => a[0].ln(),
                Func::Sin => a[0].sin(),
                Func::Cos => a[0].cos(),
                Func::Max => a.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                Func::Min => a.iter().cloned().fold(f64::INFINITY, f64::min),
                Func::Step => {
                    if a[0] >= 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                }
                Func::Ind => {
                    if a[0] >= a[1] && a[0] < a[2] {
                        1.0
                    } else {
                        0.0
                    }
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent part, e.g. 1e-3
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let save = i;
                i += 1;
                if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                    i += 1;
                }
                if i < chars.len() && chars[i].is_ascii_digit() {
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                } else {
                    i = save;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| Error::Expression(format!("bad number '{text}'")))?;
            out.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else {
            let t = match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                _ => return Err(Error::Expression(format!("unexpected character '{c}'"))),
            };
            out.push(t);
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if let Some(Tok::Op('+')) = self.peek() {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Node::Bin('^', Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.next() {
            Some(Tok::Num(v)) => Ok(Node::Num(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(Error::Expression("missing ')'".into())),
                }
            }
            Some(Tok::Ident(name)) => {
                if let Some(Tok::LParen) = self.peek() {
                    self.pos += 1;
                    let mut args = vec![self.expr()?];
                    loop {
                        match self.next() {
                            Some(Tok::Comma) => args.push(self.expr()?),
                            Some(Tok::RParen) => break,
                            _ => return Err(Error::Expression(format!("bad call to '{name}'"))),
                        }
                    }
                    let (func, arity) = match name.as_str() {
                        "abs" => (Func::Abs, Some(1)),
                        "sqrt" => (Func::Sqrt, Some(1)),
                        "exp" => (Func::Exp, Some(1)),
                        "log" | "ln" => (Func::Log, Some(1)),
                        "sin" => (Func::Sin, Some(1)),
                        "cos" => (Func::Cos, Some(1)),
                        "step" => (Func::Step, Some(1)),
                        "ind" => (Func::Ind, Some(3)),
                        "max" => (Func::Max, None),
                        "min" => (Func::Min, None),
                        _ => return Err(Error::Expression(format!("unknown function '{name}'"))),
                    };
                    if let Some(n) = arity {
                        if args.len() != n {
                            return Err(Error::Expression(format!(
                                "'{name}' takes {n} argument(s), got {}",
                                args.len()
                            )));
                        }
                    }
                    Ok(Node::Call(func, args))
                } else {
                    match name.as_str() {
                        "x" | "x1" => Ok(Node::Var(Var::X1)),
                        "y" | "x2" => Ok(Node::Var(Var::X2)),
                        "r" => Ok(Node::Var(Var::R)),
                        "t" => Ok(Node::Var(Var::T)),
                        "pi" => Ok(Node::Num(std::f64::consts::PI)),
                        "e" => Ok(Node::Num(std::f64::consts::E)),
                        "inf" => Ok(Node::Num(f64::INFINITY)),
                        _ => Err(Error::Expression(format!("unknown variable '{name}'"))),
                    }
                }
            }
            other => Err(Error::Expression(format!("unexpected token {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, x: f64) -> f64 {
        Expr::parse(s).unwrap().eval_point(&[x])
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1 + 2 * 3", 0.0), 7.0);
        assert_eq!(ev("-x^2", 3.0), -9.0);
        assert_eq!(ev("2^3^2", 0.0), 512.0);
        assert_eq!(ev("(1 + 2) * 3", 0.0), 9.0);
        assert_eq!(ev("8 / 2 / 2", 0.0), 2.0);
        assert_eq!(ev("1e-3 * 1000", 0.0), 1.0);
    }

    #[test]
    fn functions() {
        assert_eq!(ev("abs(x)", -2.5), 2.5);
        assert_eq!(ev("max(1, abs(x))^0.5", 4.0), 2.0);
        assert_eq!(ev("ind(x, 0, 1)", 0.5), 1.0);
        assert_eq!(ev("ind(x, 0, 1)", 1.0), 0.0);
        assert!((ev("log(e)", 0.0) - 1.0).abs() < 1e-15);
        assert_eq!(ev("min(3, x, 5)", 1.0), 1.0);
    }

    #[test]
    fn two_dimensional_and_radial() {
        let e = Expr::parse("r").unwrap();
        assert_eq!(e.eval_point(&[3.0, 4.0]), 5.0);
        let e = Expr::parse("x1 * x2").unwrap();
        assert_eq!(e.eval_point(&[3.0, 4.0]), 12.0);
    }

    #[test]
    fn rejects_garbage() {
        assert!(Expr::parse("1 +").is_err());
        assert!(Expr::parse("foo(1)").is_err());
        assert!(Expr::parse("z").is_err());
        assert!(Expr::parse("ind(1, 2)").is_err());
        assert!(Expr::parse("1 $ 2").is_err());
    }

    #[test]
    fn constant_detection() {
        assert!(Expr::parse("2 + 3").unwrap().is_constant());
        assert!(!Expr::parse("2 + x").unwrap().is_constant());
    }
}
