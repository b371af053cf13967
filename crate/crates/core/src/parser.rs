//! Text front-end and canonical printer.
//!
//! Grammar (EBNF):
//! ```text
//! expr     = term { ("+" | "-") term } ;
//! term     = unary { ("*" | "/") unary } ;
//! unary    = "-" unary | postfix ;
//! postfix  = atom [ "^" exponent ] ;
//! atom     = number | "y" | ("log" | "ln") "(" expr ")" | "(" expr ")" ;
//! exponent = unary ;   (* must fold to an exact rational *)
//! number   = digits [ "." digits ] ;
//! ```
//! `^` binds tightest and is right-associative; unary minus sits between
//! `^` and `*`/`/`. Numbers are exact rationals: decimal literals convert
//! exactly (0.1 = 1/10) and never become floats. There is no implicit
//! multiplication and `y` is the only variable.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{rational_pow, Exponent, Rat};
use crate::expr::{CExpr, CTerm, SubExpr};

/// Source position (1-based line and column).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl core::fmt::Display for Span {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Raw parse tree; every node carries the span where it started.
#[derive(Clone, Debug, PartialEq)]
pub struct Ast {
    pub node: AstNode,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AstNode {
    Number(Rat),
    Y,
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    /// Exponents are folded to exact rationals during parsing.
    Pow(Box<Ast>, Exponent),
    Log(Box<Ast>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownIdentifier(String),
    NonRationalExponent,
    ExponentTooLarge,
}

impl core::fmt::Display for ParseError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match &self.kind {
            ParseErrorKind::Syntax(msg) => write!(f, "{}: syntax error: {}", self.span, msg),
            ParseErrorKind::UnknownIdentifier(name) => {
                write!(f, "{}: unknown identifier `{}`", self.span, name)
            }
            ParseErrorKind::NonRationalExponent => {
                write!(f, "{}: exponent does not fold to an exact rational", self.span)
            }
            ParseErrorKind::ExponentTooLarge => {
                write!(f, "{}: exponent out of supported range", self.span)
            }
        }
    }
}

#[cfg(test)]
impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(Rat),
    Y,
    Log,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Clone, Debug)]
struct SpannedToken {
    tok: Token,
    span: Span,
}

fn lex(src: &str) -> Result<Vec<SpannedToken>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1u32;
    let mut col = 1u32;
    let bytes = src.as_bytes();
    let mut i = 0usize;
    while i < bytes.len() {
        let span = Span { line, col };
        let c = bytes[i];
        match c {
            b'\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            b' ' | b'\t' | b'\r' => {
                i += 1;
                col += 1;
                continue;
            }
            b'+' => out.push(SpannedToken { tok: Token::Plus, span }),
            b'-' => out.push(SpannedToken { tok: Token::Minus, span }),
            b'*' => out.push(SpannedToken { tok: Token::Star, span }),
            b'/' => out.push(SpannedToken { tok: Token::Slash, span }),
            b'^' => out.push(SpannedToken { tok: Token::Caret, span }),
            b'(' => out.push(SpannedToken { tok: Token::LParen, span }),
            b')' => out.push(SpannedToken { tok: Token::RParen, span }),
            b'0'..=b'9' | b'.' => {
                let start = i;
                let mut seen_dot = false;
                let mut digits = 0usize;
                while i < bytes.len() {
                    match bytes[i] {
                        b'0'..=b'9' => {
                            digits += 1;
                            i += 1;
                        }
                        b'.' if !seen_dot => {
                            seen_dot = true;
                            i += 1;
                        }
                        _ => break,
                    }
                }
                if digits == 0 {
                    return Err(ParseError {
                        kind: ParseErrorKind::Syntax("number with no digits".into()),
                        span,
                    });
                }
                let text = &src[start..i];
                let value = parse_decimal(text).ok_or(ParseError {
                    kind: ParseErrorKind::Syntax(format!("bad number `{text}`")),
                    span,
                })?;
                col += (i - start) as u32;
                out.push(SpannedToken { tok: Token::Num(value), span });
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let name = &src[start..i];
                let tok = match name {
                    "y" => Token::Y,
                    "log" | "ln" => Token::Log,
                    _ => {
                        return Err(ParseError {
                            kind: ParseErrorKind::UnknownIdentifier(name.into()),
                            span,
                        })
                    }
                };
                col += (i - start) as u32;
                out.push(SpannedToken { tok, span });
                continue;
            }
            _ => {
                return Err(ParseError {
                    kind: ParseErrorKind::Syntax(format!(
                        "unexpected character `{}`",
                        &src[i..].chars().next().map(String::from).unwrap_or_default()
                    )),
                    span,
                })
            }
        }
        i += 1;
        col += 1;
    }
    Ok(out)
}

/// Exact rational from a decimal literal.
fn parse_decimal(text: &str) -> Option<Rat> {
    let (int_part, frac_part) = match text.split_once('.') {
        Some((a, b)) => (a, b),
        None => (text, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let mut digits = String::new();
    digits.push_str(int_part);
    digits.push_str(frac_part);
    let num: BigInt = digits.parse().ok()?;
    let den = num_traits::pow(BigInt::from(10u8), frac_part.len());
    Some(Rat::new(num, den))
}

struct Parser<'a> {
    toks: &'a [SpannedToken],
    pos: usize,
    end_span: Span,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&SpannedToken> {
        self.toks.get(self.pos)
    }

    fn span_here(&self) -> Span {
        self.peek().map(|t| t.span).unwrap_or(self.end_span)
    }

    fn bump(&mut self) -> Option<SpannedToken> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Token, what: &str) -> Result<Span, ParseError> {
        match self.bump() {
            Some(t) if t.tok == tok => Ok(t.span),
            Some(t) => Err(ParseError {
                kind: ParseErrorKind::Syntax(format!("expected {what}")),
                span: t.span,
            }),
            None => Err(ParseError {
                kind: ParseErrorKind::Syntax(format!("expected {what}, found end of input")),
                span: self.end_span,
            }),
        }
    }

    fn parse_expr(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.parse_term()?;
        loop {
            match self.peek().map(|t| t.tok.clone()) {
                Some(Token::Plus) => {
                    let span = self.bump().unwrap().span;
                    let rhs = self.parse_term()?;
                    lhs = Ast { node: AstNode::Add(Box::new(lhs), Box::new(rhs)), span };
                }
                Some(Token::Minus) => {
                    let span = self.bump().unwrap().span;
                    let rhs = self.parse_term()?;
                    lhs = Ast { node: AstNode::Sub(Box::new(lhs), Box::new(rhs)), span };
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.parse_unary()?;
        loop {
            match self.peek().map(|t| t.tok.clone()) {
                Some(Token::Star) => {
                    let span = self.bump().unwrap().span;
                    let rhs = self.parse_unary()?;
                    lhs = Ast { node: AstNode::Mul(Box::new(lhs), Box::new(rhs)), span };
                }
                Some(Token::Slash) => {
                    let span = self.bump().unwrap().span;
                    let rhs = self.parse_unary()?;
                    lhs = Ast { node: AstNode::Div(Box::new(lhs), Box::new(rhs)), span };
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_unary(&mut self) -> Result<Ast, ParseError> {
        if let Some(Token::Minus) = self.peek().map(|t| t.tok.clone()) {
            let span = self.bump().unwrap().span;
            let inner = self.parse_unary()?;
            return Ok(Ast { node: AstNode::Neg(Box::new(inner)), span });
        }
        self.parse_postfix()
    }

    fn parse_postfix(&mut self) -> Result<Ast, ParseError> {
        let base = self.parse_atom()?;
        if let Some(Token::Caret) = self.peek().map(|t| t.tok.clone()) {
            let caret = self.bump().unwrap().span;
            let exp_ast = self.parse_unary()?;
            let q = fold_exponent(&exp_ast).ok_or(ParseError {
                kind: ParseErrorKind::NonRationalExponent,
                span: exp_ast.span,
            })?;
            let q = rat_to_exponent(&q).ok_or(ParseError {
                kind: ParseErrorKind::ExponentTooLarge,
                span: exp_ast.span,
            })?;
            return Ok(Ast { node: AstNode::Pow(Box::new(base), q), span: caret });
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Ast, ParseError> {
        let t = self.bump().ok_or(ParseError {
            kind: ParseErrorKind::Syntax("unexpected end of input".into()),
            span: self.end_span,
        })?;
        match t.tok {
            Token::Num(r) => Ok(Ast { node: AstNode::Number(r), span: t.span }),
            Token::Y => Ok(Ast { node: AstNode::Y, span: t.span }),
            Token::Log => {
                self.expect(Token::LParen, "`(` after log")?;
                let arg = self.parse_expr()?;
                self.expect(Token::RParen, "`)` closing log")?;
                Ok(Ast { node: AstNode::Log(Box::new(arg)), span: t.span })
            }
            Token::LParen => {
                let inner = self.parse_expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            other => Err(ParseError {
                kind: ParseErrorKind::Syntax(format!("unexpected token {other:?}")),
                span: t.span,
            }),
        }
    }
}

/// Constant-folds an exponent subtree to an exact rational.
fn fold_exponent(ast: &Ast) -> Option<Rat> {
    match &ast.node {
        AstNode::Number(r) => Some(r.clone()),
        AstNode::Neg(a) => Some(-fold_exponent(a)?),
        AstNode::Add(a, b) => Some(fold_exponent(a)? + fold_exponent(b)?),
        AstNode::Sub(a, b) => Some(fold_exponent(a)? - fold_exponent(b)?),
        AstNode::Mul(a, b) => Some(fold_exponent(a)? * fold_exponent(b)?),
        AstNode::Div(a, b) => {
            let d = fold_exponent(b)?;
            if d.is_zero() {
                None
            } else {
                Some(fold_exponent(a)? / d)
            }
        }
        AstNode::Pow(a, q) => rational_pow(&fold_exponent(a)?, *q),
        AstNode::Y | AstNode::Log(_) => None,
    }
}

fn rat_to_exponent(r: &Rat) -> Option<Exponent> {
    let n = r.numer().to_i64()?;
    let d = r.denom().to_i64()?;
    Some(Ratio::new(n, d))
}

/// Parses source text into a raw AST. Total: any byte string yields either
/// a tree or a `ParseError` with a span.
pub fn parse(src: &str) -> Result<Ast, ParseError> {
    let toks = lex(src)?;
    let end_span = {
        let mut line = 1u32;
        let mut col = 1u32;
        for ch in src.chars() {
            if ch == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        Span { line, col }
    };
    if toks.is_empty() {
        return Err(ParseError {
            kind: ParseErrorKind::Syntax("empty input".into()),
            span: end_span,
        });
    }
    let mut p = Parser { toks: &toks, pos: 0, end_span };
    let ast = p.parse_expr()?;
    if let Some(t) = p.peek() {
        return Err(ParseError {
            kind: ParseErrorKind::Syntax("trailing input".into()),
            span: t.span,
        });
    }
    Ok(ast)
}

// ---------------------------------------------------------------------------
// Canonical printer
// ---------------------------------------------------------------------------

/// Where a subexpression sits, for parenthesization.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    /// Operand of a sum, or the whole expression.
    Sum,
    /// Left operand of * or /.
    ProductLeft,
    /// Right operand of * or /: associativity forces parens on * and /.
    ProductRight,
    /// Base of ^.
    PowBase,
}

fn print_sub_ctx(e: &SubExpr, ctx: Ctx, out: &mut String) {
    match e {
        SubExpr::Rational(r) => {
            let atom = r.denom().is_one() && !r.is_negative();
            if atom || ctx == Ctx::Sum {
                if r.denom().is_one() {
                    out.push_str(&r.numer().to_string());
                } else {
                    out.push_str(&format!("{}/{}", r.numer(), r.denom()));
                }
            } else {
                out.push('(');
                if r.denom().is_one() {
                    out.push_str(&r.numer().to_string());
                } else {
                    out.push_str(&format!("{}/{}", r.numer(), r.denom()));
                }
                out.push(')');
            }
        }
        SubExpr::Y => out.push('y'),
        SubExpr::Add(a, b) | SubExpr::Sub(a, b) => {
            let parens = ctx != Ctx::Sum;
            if parens {
                out.push('(');
            }
            print_sub_ctx(a, Ctx::Sum, out);
            out.push_str(if matches!(e, SubExpr::Add(_, _)) { " + " } else { " - " });
            // right-nested sums keep explicit parens so reparsing preserves shape
            match &**b {
                SubExpr::Add(_, _) | SubExpr::Sub(_, _) => {
                    out.push('(');
                    print_sub_ctx(b, Ctx::Sum, out);
                    out.push(')');
                }
                _ => print_sub_ctx(b, Ctx::Sum, out),
            }
            if parens {
                out.push(')');
            }
        }
        SubExpr::Mul(a, b) => {
            let parens = ctx == Ctx::PowBase || ctx == Ctx::ProductRight;
            if parens {
                out.push('(');
            }
            print_sub_ctx(a, Ctx::ProductLeft, out);
            out.push('*');
            print_sub_ctx(b, Ctx::ProductRight, out);
            if parens {
                out.push(')');
            }
        }
        SubExpr::Div(a, b) => {
            let parens = ctx == Ctx::PowBase || ctx == Ctx::ProductRight;
            if parens {
                out.push('(');
            }
            print_sub_ctx(a, Ctx::ProductLeft, out);
            out.push('/');
            print_sub_ctx(b, Ctx::ProductRight, out);
            if parens {
                out.push(')');
            }
        }
        SubExpr::Pow(a, q) => {
            print_sub_ctx(a, Ctx::PowBase, out);
            out.push('^');
            if q.denom().is_one() && !q.numer().is_negative() {
                out.push_str(&q.numer().to_string());
            } else if q.denom().is_one() {
                out.push_str(&format!("({})", q.numer()));
            } else {
                out.push_str(&format!("({}/{})", q.numer(), q.denom()));
            }
        }
    }
}

/// Renders a log-free expression.
pub fn print_sub(e: &SubExpr) -> String {
    let mut s = String::new();
    print_sub_ctx(e, Ctx::Sum, &mut s);
    s
}

/// Splits a leading rational sign off a factor, for `a - b` style sums.
fn split_sign(factor: &Arc<SubExpr>) -> (bool, Arc<SubExpr>) {
    match &**factor {
        SubExpr::Rational(r) if r.is_negative() => (true, SubExpr::rational(-r.clone())),
        SubExpr::Mul(a, b) => {
            if let SubExpr::Rational(r) = &**a {
                if r.is_negative() {
                    return (true, crate::expr::mul(SubExpr::rational(-r.clone()), b.clone()));
                }
            }
            (false, factor.clone())
        }
        _ => (false, factor.clone()),
    }
}

fn print_term(t: &CTerm, out: &mut String) {
    let one_factor = matches!(&*t.factor, SubExpr::Rational(r) if r.is_one());
    if !one_factor || t.logs.is_empty() {
        print_sub_ctx(&t.factor, if t.logs.is_empty() { Ctx::Sum } else { Ctx::ProductLeft }, out);
        if !t.logs.is_empty() {
            out.push('*');
        }
    }
    for (i, g) in t.logs.iter().enumerate() {
        if i > 0 {
            out.push('*');
        }
        out.push_str("log(");
        print_sub_ctx(g, Ctx::Sum, out);
        out.push(')');
    }
}

/// Canonical rendering: `normalize(parse(print_canonical(e)))` reproduces
/// `e` structurally. The zero expression prints as "0".
pub fn print_canonical(e: &CExpr) -> String {
    if e.terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, t) in e.terms.iter().enumerate() {
        let (neg, mag) = split_sign(&t.factor);
        let t = CTerm { factor: mag, logs: t.logs.clone() };
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        print_term(&t, &mut out);
    }
    out
}

impl core::fmt::Display for CExpr {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&print_canonical(self))
    }
}
