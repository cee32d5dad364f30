//! Text syntax for functions, vector fields and algebra files.
//!
//! ```text
//! expression := ['-'] term (('+' | '-') term)*
//! term       := factor ('*' factor)*
//! factor     := atom ('^' nat)?
//! atom       := int ['/' posint] | 'i' | 'x' | 'y' | 'Dx' | 'Dy'
//!             | 'exp' '(' expression ')' | '(' expression ')'
//! ```
//!
//! `exp` arguments must be linear forms `λ*x + μ*y`. Every additive summand of a
//! field must carry exactly one of `Dx`/`Dy`. The printer emits canonical text
//! that this parser maps back to the identical value.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::coeffring::{ExpMonomial, ExpPoly, Var};
use crate::fields::VectorField;
use crate::scalar::GaussianRational;

const MAX_EXPONENT: u32 = 256;
const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    /// An `exp` argument that is not a linear form in x and y.
    RingViolation,
    /// A summand multiplying `Dx` by `Dy` (or a basis symbol by itself).
    MixedBasis,
    EmptyInput,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{kind:?} at line {line}, column {column}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(kind: ParseErrorKind, pos: Pos, message: impl Into<String>) -> Self {
        Self {
            kind,
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(&'static str),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "{n}"),
            Tok::Ident(s) => f.write_str(s),
            Tok::Plus => f.write_str("+"),
            Tok::Minus => f.write_str("-"),
            Tok::Star => f.write_str("*"),
            Tok::Slash => f.write_str("/"),
            Tok::Caret => f.write_str("^"),
            Tok::LParen => f.write_str("("),
            Tok::RParen => f.write_str(")"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                s.push(d);
                chars.next();
                column += 1;
            }
            out.push((Tok::Int(s.parse().expect("digits")), pos));
            continue;
        }
        if c.is_alphabetic() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_alphanumeric() || **d == '_') {
                s.push(d);
                chars.next();
                column += 1;
            }
            let id = match s.as_str() {
                "x" => "x",
                "y" => "y",
                "i" => "i",
                "exp" => "exp",
                "Dx" => "Dx",
                "Dy" => "Dy",
                _ => {
                    return Err(ParseError::new(
                        ParseErrorKind::Syntax,
                        pos,
                        format!("unknown identifier `{s}`"),
                    ))
                }
            };
            out.push((Tok::Ident(id), pos));
            continue;
        }
        let t = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => {
                return Err(ParseError::new(
                    ParseErrorKind::Syntax,
                    pos,
                    format!("unexpected character {c:?}"),
                ))
            }
        };
        chars.next();
        column += 1;
        out.push((t, pos));
    }
    out.push((Tok::Eof, Pos { line, column }));
    Ok(out)
}

/// Parsed expression before type checking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxTree {
    pub node: Node,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    /// Signed summands; `true` means subtracted.
    Sum(Vec<(bool, SyntaxTree)>),
    Product(Vec<SyntaxTree>),
    Scalar(GaussianRational),
    Variable(Var),
    Exp(Box<SyntaxTree>),
    Power(Box<SyntaxTree>, u32),
    Basis(Var),
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::new(
            ParseErrorKind::Syntax,
            self.pos(),
            format!("expected {wanted}, found `{}`", self.peek()),
        )
    }

    fn expression(&mut self) -> Result<SyntaxTree, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError::new(ParseErrorKind::Syntax, self.pos(), "nesting too deep"));
        }
        let pos = self.pos();
        let mut items = Vec::new();
        let mut neg = false;
        if *self.peek() == Tok::Minus {
            self.bump();
            neg = true;
        }
        items.push((neg, self.term()?));
        loop {
            let neg = match self.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => break,
            };
            self.bump();
            items.push((neg, self.term()?));
        }
        self.depth -= 1;
        if items.len() == 1 && !items[0].0 {
            return Ok(items.pop().unwrap().1);
        }
        Ok(SyntaxTree {
            node: Node::Sum(items),
            pos,
        })
    }

    fn term(&mut self) -> Result<SyntaxTree, ParseError> {
        let pos = self.pos();
        let mut factors = vec![self.factor()?];
        while *self.peek() == Tok::Star {
            self.bump();
            factors.push(self.factor()?);
        }
        if factors.len() == 1 {
            return Ok(factors.pop().unwrap());
        }
        Ok(SyntaxTree {
            node: Node::Product(factors),
            pos,
        })
    }

    fn factor(&mut self) -> Result<SyntaxTree, ParseError> {
        let mut base = self.atom()?;
        while *self.peek() == Tok::Caret {
            self.bump();
            let pos = self.pos();
            let Tok::Int(n) = self.peek().clone() else {
                return Err(self.unexpected("a non-negative integer exponent"));
            };
            self.bump();
            let e = n
                .to_u32()
                .filter(|&e| e <= MAX_EXPONENT)
                .ok_or_else(|| ParseError::new(ParseErrorKind::Syntax, pos, format!("exponent {n} too large")))?;
            let p = base.pos;
            base = SyntaxTree {
                node: Node::Power(Box::new(base), e),
                pos: p,
            };
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<SyntaxTree, ParseError> {
        let pos = self.pos();
        let node = match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                if *self.peek() == Tok::Slash {
                    self.bump();
                    let dpos = self.pos();
                    let Tok::Int(d) = self.peek().clone() else {
                        return Err(self.unexpected("a positive integer denominator"));
                    };
                    self.bump();
                    if d.is_zero() {
                        return Err(ParseError::new(ParseErrorKind::Syntax, dpos, "zero denominator"));
                    }
                    Node::Scalar(GaussianRational::from_rational(BigRational::new(n, d)))
                } else {
                    Node::Scalar(GaussianRational::from_rational(BigRational::from_integer(n)))
                }
            }
            Tok::Ident(id) => {
                self.bump();
                match id {
                    "x" => Node::Variable(Var::X),
                    "y" => Node::Variable(Var::Y),
                    "i" => Node::Scalar(GaussianRational::i()),
                    "Dx" => Node::Basis(Var::X),
                    "Dy" => Node::Basis(Var::Y),
                    "exp" => {
                        if *self.peek() != Tok::LParen {
                            return Err(self.unexpected("`(` after exp"));
                        }
                        self.bump();
                        let arg = self.expression()?;
                        if *self.peek() != Tok::RParen {
                            return Err(self.unexpected("`)`"));
                        }
                        self.bump();
                        Node::Exp(Box::new(arg))
                    }
                    _ => unreachable!("lexer only yields known identifiers"),
                }
            }
            Tok::LParen => {
                self.bump();
                let e = self.expression()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                return Ok(SyntaxTree { node: e.node, pos });
            }
            _ => return Err(self.unexpected("a number, variable, `exp`, `Dx`, `Dy` or `(`")),
        };
        Ok(SyntaxTree { node, pos })
    }
}

/// Parse text into an untyped syntax tree.
pub fn parse_tree(text: &str) -> Result<SyntaxTree, ParseError> {
    let toks = lex(text)?;
    if toks.len() == 1 {
        return Err(ParseError::new(ParseErrorKind::EmptyInput, toks[0].1, "empty expression"));
    }
    let mut p = Parser { toks, at: 0, depth: 0 };
    let tree = p.expression()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(tree)
}

enum Value {
    Func(ExpPoly),
    Field(VectorField),
}

fn lower(t: &SyntaxTree) -> Result<Value, ParseError> {
    match &t.node {
        Node::Scalar(c) => Ok(Value::Func(ExpPoly::constant(c.clone()))),
        Node::Variable(Var::X) => Ok(Value::Func(ExpPoly::x())),
        Node::Variable(Var::Y) => Ok(Value::Func(ExpPoly::y())),
        Node::Basis(Var::X) => Ok(Value::Field(VectorField::dx())),
        Node::Basis(Var::Y) => Ok(Value::Field(VectorField::dy())),
        Node::Exp(arg) => {
            let Value::Func(f) = lower(arg)? else {
                return Err(ParseError::new(ParseErrorKind::MixedBasis, arg.pos, "basis symbol inside exp"));
            };
            let mut lam = GaussianRational::zero();
            let mut mu = GaussianRational::zero();
            for (m, c) in f.terms() {
                if m == &ExpMonomial::poly(1, 0) {
                    lam = c.clone();
                } else if m == &ExpMonomial::poly(0, 1) {
                    mu = c.clone();
                } else {
                    return Err(ParseError::new(
                        ParseErrorKind::RingViolation,
                        arg.pos,
                        format!("exp argument `{}` is not a linear form in x and y", print_function(&f)),
                    ));
                }
            }
            Ok(Value::Func(ExpPoly::monomial(ExpMonomial::new(0, 0, lam, mu))))
        }
        Node::Power(base, e) => match lower(base)? {
            Value::Func(f) => Ok(Value::Func(f.pow(*e))),
            Value::Field(v) if *e == 1 => Ok(Value::Field(v)),
            Value::Field(_) => Err(ParseError::new(
                ParseErrorKind::MixedBasis,
                t.pos,
                "power of a basis symbol",
            )),
        },
        Node::Product(fs) => {
            let mut acc = Value::Func(ExpPoly::one());
            for f in fs {
                acc = match (acc, lower(f)?) {
                    (Value::Func(a), Value::Func(b)) => Value::Func(a.mul(&b)),
                    (Value::Func(a), Value::Field(v)) | (Value::Field(v), Value::Func(a)) => {
                        Value::Field(v.mul_fn(&a))
                    }
                    (Value::Field(_), Value::Field(_)) => {
                        return Err(ParseError::new(
                            ParseErrorKind::MixedBasis,
                            f.pos,
                            "a summand multiplies two basis symbols",
                        ))
                    }
                };
            }
            Ok(acc)
        }
        Node::Sum(items) => {
            let mut func = ExpPoly::zero();
            let mut field: Option<VectorField> = None;
            let mut bare: Option<Pos> = None;
            for (neg, it) in items {
                match lower(it)? {
                    Value::Func(f) => {
                        if !f.is_zero() && bare.is_none() {
                            bare = Some(it.pos);
                        }
                        func = if *neg { func.sub(&f) } else { func.add(&f) };
                    }
                    Value::Field(v) => {
                        let acc = field.take().unwrap_or_default();
                        field = Some(if *neg { acc.sub(&v) } else { acc.add(&v) });
                    }
                }
            }
            match (field, bare) {
                (None, _) => Ok(Value::Func(func)),
                (Some(v), None) => Ok(Value::Field(v)),
                (Some(_), Some(pos)) => Err(ParseError::new(
                    ParseErrorKind::Syntax,
                    pos,
                    "summand has no Dx or Dy factor",
                )),
            }
        }
    }
}

/// Parse a vector field such as `(x + y^2)*Dx + Dy`. The literal `0` is the zero field.
pub fn parse_field(text: &str) -> Result<VectorField, ParseError> {
    let tree = parse_tree(text)?;
    match lower(&tree)? {
        Value::Field(v) => Ok(v),
        Value::Func(f) if f.is_zero() => Ok(VectorField::zero()),
        Value::Func(_) => Err(ParseError::new(
            ParseErrorKind::Syntax,
            tree.pos,
            "expected a vector field (no Dx or Dy factor)",
        )),
    }
}

/// Parse a coefficient function (no basis symbols).
pub fn parse_function(text: &str) -> Result<ExpPoly, ParseError> {
    let tree = parse_tree(text)?;
    match lower(&tree)? {
        Value::Func(f) => Ok(f),
        Value::Field(_) => Err(ParseError::new(
            ParseErrorKind::MixedBasis,
            tree.pos,
            "expected a function, found a vector field",
        )),
    }
}

/// One field per non-empty line; `#` starts a comment. An empty result is
/// returned as-is; callers decide whether that is an error.
pub fn parse_algebra_file(text: &str) -> Result<Vec<VectorField>, ParseError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let v = parse_field(line).map_err(|mut e| {
            e.line = k + 1;
            e
        })?;
        out.push(v);
    }
    Ok(out)
}

/// Scalar literal as it appears inside an expression. Non-real values with
/// both parts nonzero are parenthesized.
fn print_scalar(c: &GaussianRational) -> String {
    if c.is_real() || c.re().is_zero() {
        c.to_string()
    } else {
        let s = c.to_string();
        // Display writes `a+b*i` / `a-b*i`; the last sign separates the parts
        let k = s.rfind(['+', '-']).expect("complex display has a sign");
        format!("({} {} {})", &s[..k], &s[k..k + 1], &s[k + 1..])
    }
}

fn print_monomial(m: &ExpMonomial) -> String {
    let mut parts = Vec::new();
    let pw = |v: &str, d: u32| if d == 1 { v.to_string() } else { format!("{v}^{d}") };
    if m.xdeg > 0 {
        parts.push(pw("x", m.xdeg));
    }
    if m.ydeg > 0 {
        parts.push(pw("y", m.ydeg));
    }
    if !m.xfreq.is_zero() || !m.yfreq.is_zero() {
        let arg = ExpPoly::from_terms([
            (m.xfreq.clone(), ExpMonomial::poly(1, 0)),
            (m.yfreq.clone(), ExpMonomial::poly(0, 1)),
        ]);
        parts.push(format!("exp({})", print_function(&arg)));
    }
    parts.join("*")
}

/// `c * mono` with an optional trailing factor such as `Dx`.
fn print_term(c: &GaussianRational, m: &ExpMonomial, tail: Option<&str>) -> String {
    let mut factors = Vec::new();
    let mono = print_monomial(m);
    if !mono.is_empty() {
        factors.push(mono);
    }
    if let Some(t) = tail {
        factors.push(t.to_string());
    }
    let body = factors.join("*");
    if body.is_empty() {
        return print_scalar(c);
    }
    if c.is_one() {
        body
    } else if c == &GaussianRational::from_int(-1) {
        format!("-{body}")
    } else {
        format!("{}*{body}", print_scalar(c))
    }
}

fn join_signed(parts: Vec<String>) -> String {
    let mut out = String::new();
    for (k, p) in parts.into_iter().enumerate() {
        if k == 0 {
            out.push_str(&p);
        } else if let Some(rest) = p.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(&p);
        }
    }
    out
}

/// Canonical rendering, e.g. `(3/2 + 1/2*i)*x^2*y*exp(2*y)`.
pub fn print_function(p: &ExpPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    join_signed(p.terms().map(|(m, c)| print_term(c, m, None)).collect())
}

fn print_component(p: &ExpPoly, basis: &str) -> Option<String> {
    match p.len() {
        0 => None,
        1 => {
            let (m, c) = p.terms().next().unwrap();
            Some(print_term(c, m, Some(basis)))
        }
        _ => Some(format!("({})*{basis}", print_function(p))),
    }
}

/// Canonical rendering, e.g. `(x + y^2)*Dx + Dy`.
pub fn print_field(v: &VectorField) -> String {
    let parts: Vec<String> = [print_component(&v.p, "Dx"), print_component(&v.q, "Dy")]
        .into_iter()
        .flatten()
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        join_signed(parts)
    }
}
