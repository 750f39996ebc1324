//! Small arithmetic expression language for closed-form fields.
//!
//! Grammar: `+ - * / ^`, parentheses, numbers, the constants `e` and `pi`,
//! the variables `x1..xn` and `t`, and the functions `min`, `max` (two or
//! more arguments), `abs`, `sqrt`, `exp`, `ln`/`log`. `^` is right
//! associative and binds tighter than unary minus, so `-2^2 = -4`.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    Var(Var),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Var {
    T,
    X(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Func {
    Min,
    Max,
    Abs,
    Sqrt,
    Exp,
    Ln,
}

/// A parsed expression in the variables `x1..xn` and `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    source: String,
    root: Node,
    max_x: usize,
    uses_t: bool,
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        let tokens = tokenize(src)?;
        let mut p = Parser { toks: &tokens, pos: 0 };
        let root = p.expr()?;
        if p.pos != tokens.len() {
            return Err(parse_err(format!("unexpected trailing input in '{src}'")));
        }
        let mut max_x = 0;
        let mut uses_t = false;
        visit(&root, &mut |v| match v {
            Var::T => uses_t = true,
            Var::X(i) => max_x = max_x.max(i),
        });
        Ok(Expr {
            source: src.to_string(),
            root,
            max_x,
            uses_t,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Highest spatial variable index referenced (0 when none).
    pub fn max_spatial_var(&self) -> usize {
        self.max_x
    }

    pub fn uses_t(&self) -> bool {
        self.uses_t
    }

    /// Evaluates with spatial coordinates `x` (x1 = x[0]) and `t`.
    /// Missing coordinates evaluate as zero.
    pub fn eval<T: Real>(&self, x: &[T], t: T) -> T {
        eval_node(&self.root, x, t)
    }
}

fn visit(n: &Node, f: &mut impl FnMut(Var)) {
    match n {
        Node::Num(_) => {}
        Node::Var(v) => f(*v),
        Node::Neg(a) => visit(a, f),
        Node::Bin(_, a, b) => {
            visit(a, f);
            visit(b, f);
        }
        Node::Call(_, args) => args.iter().for_each(|a| visit(a, f)),
    }
}

fn eval_node<T: Real>(n: &Node, x: &[T], t: T) -> T {
    match n {
        Node::Num(v) => T::lit(*v),
        Node::Var(Var::T) => t,
        Node::Var(Var::X(i)) => x.get(i - 1).copied().unwrap_or_else(T::zero),
        Node::Neg(a) => -eval_node(a, x, t),
        Node::Bin(op, a, b) => {
            let (a, b) = (eval_node(a, x, t), eval_node(b, x, t));
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
                BinOp::Pow => a.powf(b),
            }
        }
        Node::Call(f, args) => {
            let mut it = args.iter().map(|a| eval_node(a, x, t));
            match f {
                Func::Min => it.fold(T::infinity(), |m, v| m.min(v)),
                Func::Max => it.fold(T::neg_infinity(), |m, v| m.max(v)),
                Func::Abs => it.next().unwrap().abs(),
                Func::Sqrt => it.next().unwrap().sqrt(),
                Func::Exp => it.next().unwrap().exp(),
                Func::Ln => it.next().unwrap().ln(),
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

fn parse_err(msg: String) -> Error {
    Error::Parse { line: 1, msg }
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
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
            // exponent part, e.g. 1e-3; `e` alone is the constant
            if i + 1 < chars.len()
                && (chars[i] == 'e' || chars[i] == 'E')
                && (chars[i + 1].is_ascii_digit()
                    || ((chars[i + 1] == '-' || chars[i + 1] == '+')
                        && i + 2 < chars.len()
                        && chars[i + 2].is_ascii_digit()))
            {
                i += 2;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v: f64 = s
                .parse()
                .map_err(|_| parse_err(format!("bad number '{s}'")))?;
            out.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else {
            out.push(match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                _ => return Err(parse_err(format!("unexpected character '{c}'"))),
            });
            i += 1;
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        match self.next() {
            Some(t) if t == want => Ok(()),
            other => Err(parse_err(format!("expected {want:?}, found {other:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Node::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.next() {
            Some(Tok::Num(v)) => Ok(Node::Num(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if let Some(Tok::LParen) = self.peek() {
                    self.pos += 1;
                    let mut args = vec![self.expr()?];
                    while let Some(Tok::Comma) = self.peek() {
                        self.pos += 1;
                        args.push(self.expr()?);
                    }
                    self.expect(Tok::RParen)?;
                    let (func, arity_ok) = match name.as_str() {
                        "min" => (Func::Min, args.len() >= 2),
                        "max" => (Func::Max, args.len() >= 2),
                        "abs" => (Func::Abs, args.len() == 1),
                        "sqrt" => (Func::Sqrt, args.len() == 1),
                        "exp" => (Func::Exp, args.len() == 1),
                        "ln" | "log" => (Func::Ln, args.len() == 1),
                        _ => return Err(parse_err(format!("unknown function '{name}'"))),
                    };
                    if !arity_ok {
                        return Err(parse_err(format!(
                            "wrong number of arguments to '{name}'"
                        )));
                    }
                    return Ok(Node::Call(func, args));
                }
                match name.as_str() {
                    "t" => Ok(Node::Var(Var::T)),
                    "e" => Ok(Node::Num(std::f64::consts::E)),
                    "pi" => Ok(Node::Num(std::f64::consts::PI)),
                    s if s.starts_with('x') && s.len() > 1 => {
                        let idx: usize = s[1..]
                            .parse()
                            .map_err(|_| parse_err(format!("unknown variable '{s}'")))?;
                        if idx == 0 {
                            return Err(parse_err("variables start at x1".into()));
                        }
                        Ok(Node::Var(Var::X(idx)))
                    }
                    _ => Err(parse_err(format!("unknown identifier '{name}'"))),
                }
            }
            other => Err(parse_err(format!("unexpected token {other:?}"))),
        }
    }
}
