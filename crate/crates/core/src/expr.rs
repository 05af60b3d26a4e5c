//! A small differentiable expression language.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?          right associative
//! atom  := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! Functions: `sin cos sinh cosh exp log sqrt`. The identifier `pi` is a
//! constant. Variables are fixed when parsing, so evaluation is a plain
//! slice lookup and works for any [`Real`] scalar, including dual numbers.

use std::fmt;

use thiserror::Error;

use crate::real::{seed, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("domain error: {func} of {arg}")]
    Domain { func: &'static str, arg: f64 },
}

impl ExprError {
    /// Byte offset of a parse error, if any.
    pub fn offset(&self) -> Option<usize> {
        match self {
            ExprError::Syntax { offset, .. } | ExprError::UnknownIdentifier { offset, .. } => {
                Some(*offset)
            }
            ExprError::Domain { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    fn apply<T: Real>(self, x: T) -> T {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Exp => x.exp(),
            Func::Log => x.ln(),
            Func::Sqrt => x.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// A parsed expression together with the names of its variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Node,
    vars: Vec<String>,
    source: String,
}

impl Expr {
    pub fn parse(text: &str, vars: &[&str]) -> Result<Expr, ExprError> {
        let mut p = Parser { src: text, bytes: text.as_bytes(), pos: 0, vars };
        let root = p.expr()?;
        p.skip_ws();
        if p.pos < p.bytes.len() {
            return Err(p.err(format!("unexpected `{}`", p.bytes[p.pos] as char)));
        }
        Ok(Expr {
            root,
            vars: vars.iter().map(|s| s.to_string()).collect(),
            source: text.to_string(),
        })
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Evaluates with `args[i]` bound to the i-th declared variable.
    pub fn eval<T: Real>(&self, args: &[T]) -> T {
        eval_node(&self.root, args)
    }

    /// Like [`Expr::eval`] but reports domain violations and non-finite values.
    pub fn eval_checked<T: Real>(&self, args: &[T]) -> Result<T, ExprError> {
        eval_checked(&self.root, args)
    }

    /// Value and first two derivatives of a single-variable expression at `x`.
    pub fn derivs2(&self, x: f64) -> Result<(f64, f64, f64), ExprError> {
        let (x1, _) = seed(x, 0.0);
        let (x2, _) = seed(x1, crate::real::Dual::constant(0.0));
        let r = self.eval_checked(&[x2])?;
        Ok((r.re.re, r.du.re, r.du.du))
    }

    /// Canonical, fully parenthesised text that reparses to the same tree.
    pub fn pretty(&self) -> String {
        let mut s = String::new();
        write_node(&self.root, &self.vars, &mut s);
        s
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

fn eval_node<T: Real>(n: &Node, args: &[T]) -> T {
    match n {
        Node::Num(c) => T::cst(*c),
        Node::Var(i) => args[*i],
        Node::Neg(a) => -eval_node(a, args),
        Node::Bin(op, a, b) => {
            let x = eval_node(a, args);
            match op {
                BinOp::Add => x + eval_node(b, args),
                BinOp::Sub => x - eval_node(b, args),
                BinOp::Mul => x * eval_node(b, args),
                BinOp::Div => x / eval_node(b, args),
                BinOp::Pow => match integer_exponent(b) {
                    Some(k) => x.powi(k),
                    None => x.powf(eval_node(b, args)),
                },
            }
        }
        Node::Call(f, a) => f.apply(eval_node(a, args)),
    }
}

fn integer_exponent(n: &Node) -> Option<i32> {
    let v = match n {
        Node::Num(c) => *c,
        Node::Neg(inner) => match **inner {
            Node::Num(c) => -c,
            _ => return None,
        },
        _ => return None,
    };
    (v.fract() == 0.0 && v.abs() <= 64.0).then_some(v as i32)
}

fn eval_checked<T: Real>(n: &Node, args: &[T]) -> Result<T, ExprError> {
    let out = match n {
        Node::Num(_) | Node::Var(_) => eval_node(n, args),
        Node::Neg(a) => -eval_checked(a, args)?,
        Node::Bin(op, a, b) => {
            let x = eval_checked(a, args)?;
            let y = eval_checked(b, args)?;
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y.value() == 0.0 {
                        return Err(ExprError::Domain { func: "division", arg: 0.0 });
                    }
                    x / y
                }
                BinOp::Pow => match integer_exponent(b) {
                    Some(k) => {
                        if k < 0 && x.value() == 0.0 {
                            return Err(ExprError::Domain { func: "negative power", arg: 0.0 });
                        }
                        x.powi(k)
                    }
                    None => {
                        if x.value() <= 0.0 {
                            return Err(ExprError::Domain { func: "real power", arg: x.value() });
                        }
                        x.powf(y)
                    }
                },
            }
        }
        Node::Call(f, a) => {
            let x = eval_checked(a, args)?;
            match f {
                Func::Log if x.value() <= 0.0 => {
                    return Err(ExprError::Domain { func: "log", arg: x.value() })
                }
                Func::Sqrt if x.value() < 0.0 => {
                    return Err(ExprError::Domain { func: "sqrt", arg: x.value() })
                }
                _ => f.apply(x),
            }
        }
    };
    if !out.value().is_finite() {
        return Err(ExprError::Domain { func: "non-finite result", arg: out.value() });
    }
    Ok(out)
}

fn write_node(n: &Node, vars: &[String], s: &mut String) {
    match n {
        Node::Num(c) => s.push_str(&format!("{c:?}")),
        Node::Var(i) => s.push_str(&vars[*i]),
        Node::Neg(a) => {
            s.push_str("(-");
            write_node(a, vars, s);
            s.push(')');
        }
        Node::Bin(op, a, b) => {
            s.push('(');
            write_node(a, vars, s);
            s.push(' ');
            s.push(op.symbol());
            s.push(' ');
            write_node(b, vars, s);
            s.push(')');
        }
        Node::Call(f, a) => {
            s.push_str(f.name());
            s.push('(');
            write_node(a, vars, s);
            s.push(')');
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn err(&self, message: String) -> ExprError {
        ExprError::Syntax { offset: self.pos, message }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ExprError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Node::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ExprError> {
        match self.peek() {
            None => Err(self.err("unexpected end of input".into())),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            Some(c) => Err(self.err(format!("unexpected `{}`", c as char))),
        }
    }

    fn number(&mut self) -> Result<Node, ExprError> {
        let start = self.pos;
        let b = self.bytes;
        let digits = |p: &mut usize| {
            while *p < b.len() && b[*p].is_ascii_digit() {
                *p += 1;
            }
        };
        let mut p = self.pos;
        digits(&mut p);
        if p < b.len() && b[p] == b'.' {
            p += 1;
            digits(&mut p);
        }
        if p < b.len() && (b[p] == b'e' || b[p] == b'E') {
            let mut q = p + 1;
            if q < b.len() && (b[q] == b'+' || b[q] == b'-') {
                q += 1;
            }
            if q < b.len() && b[q].is_ascii_digit() {
                digits(&mut q);
                p = q;
            }
        }
        let text = &self.src[start..p];
        match text.parse::<f64>() {
            Ok(v) => {
                self.pos = p;
                Ok(Node::Num(v))
            }
            Err(_) => Err(self.err(format!("malformed number `{text}`"))),
        }
    }

    fn ident(&mut self) -> Result<Node, ExprError> {
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = &self.src[start..self.pos];
        if let Some(f) = Func::from_name(name) {
            if self.peek() != Some(b'(') {
                return Err(self.err(format!("expected `(` after `{name}`")));
            }
            self.pos += 1;
            let arg = self.expr()?;
            self.expect(b')')?;
            return Ok(Node::Call(f, Box::new(arg)));
        }
        if let Some(i) = self.vars.iter().position(|v| *v == name) {
            return Ok(Node::Var(i));
        }
        if name == "pi" {
            return Ok(Node::Num(std::f64::consts::PI));
        }
        Err(ExprError::UnknownIdentifier { name: name.to_string(), offset: start })
    }
}
