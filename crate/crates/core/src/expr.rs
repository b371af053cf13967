//! Two-layer expression AST: a log-free layer (`SubExpr`) and the full
//! layer (`CExpr`) of finite sums of terms `factor * prod log(arg)`, with
//! every log argument itself log-free. Log depth is therefore at most one
//! by construction: `SubExpr` has no logarithm node at all.
//!
//! `normalize` turns a raw parse tree with free arithmetic over logs into
//! this shape by distributing products over sums, expanding small integer
//! powers of log-bearing expressions into repeated products, and rejecting
//! everything outside the class (nested logs, division by logs, fractional
//! powers of logs).

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::arith::{exponent_to_rat, rational_pow, Exponent, Rat};
use crate::constants::Constant;
use crate::error::{Error, Result};
use crate::parser::{Ast, AstNode, Span};

/// Log-free expressions: the subanalytic layer.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SubExpr {
    Rational(Rat),
    Y,
    Add(Arc<SubExpr>, Arc<SubExpr>),
    Sub(Arc<SubExpr>, Arc<SubExpr>),
    Mul(Arc<SubExpr>, Arc<SubExpr>),
    Div(Arc<SubExpr>, Arc<SubExpr>),
    /// base^q with q an exact rational.
    Pow(Arc<SubExpr>, Exponent),
}

impl SubExpr {
    pub fn rational(r: Rat) -> Arc<SubExpr> {
        Arc::new(SubExpr::Rational(r))
    }

    pub fn integer(n: i64) -> Arc<SubExpr> {
        Self::rational(Rat::from_integer(n.into()))
    }

    pub fn y() -> Arc<SubExpr> {
        Arc::new(SubExpr::Y)
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        match self {
            SubExpr::Rational(r) => Some(r),
            _ => None,
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, SubExpr::Rational(r) if r.is_zero())
    }

    fn is_one(&self) -> bool {
        matches!(self, SubExpr::Rational(r) if r.is_one())
    }
}

/// Smart constructors: light constant folding that keeps rewrites (shift,
/// derivative) in a stable canonical form.
pub fn add(a: Arc<SubExpr>, b: Arc<SubExpr>) -> Arc<SubExpr> {
    if a.is_zero() {
        return b;
    }
    if b.is_zero() {
        return a;
    }
    if let (SubExpr::Rational(x), SubExpr::Rational(y)) = (&*a, &*b) {
        return SubExpr::rational(x + y);
    }
    // fold (r1 + (r2 + rest)) so repeated shifts stay flat
    if let (SubExpr::Rational(x), SubExpr::Add(l, r)) = (&*a, &*b) {
        if let SubExpr::Rational(y) = &**l {
            return add(SubExpr::rational(x + y), r.clone());
        }
    }
    Arc::new(SubExpr::Add(a, b))
}

pub fn sub(a: Arc<SubExpr>, b: Arc<SubExpr>) -> Arc<SubExpr> {
    if b.is_zero() {
        return a;
    }
    if let (SubExpr::Rational(x), SubExpr::Rational(y)) = (&*a, &*b) {
        return SubExpr::rational(x - y);
    }
    if a.is_zero() {
        return mul(SubExpr::integer(-1), b);
    }
    Arc::new(SubExpr::Sub(a, b))
}

pub fn mul(a: Arc<SubExpr>, b: Arc<SubExpr>) -> Arc<SubExpr> {
    if a.is_zero() || b.is_zero() {
        return SubExpr::integer(0);
    }
    if a.is_one() {
        return b;
    }
    if b.is_one() {
        return a;
    }
    if let (SubExpr::Rational(x), SubExpr::Rational(y)) = (&*a, &*b) {
        return SubExpr::rational(x * y);
    }
    // keep rational coefficients at the head: r1 * (r2 * rest) -> (r1 r2) * rest
    if let (SubExpr::Rational(x), SubExpr::Mul(l, r)) = (&*a, &*b) {
        if let SubExpr::Rational(y) = &**l {
            return mul(SubExpr::rational(x * y), r.clone());
        }
    }
    if let (SubExpr::Mul(l, r), SubExpr::Rational(_)) = (&*a, &*b) {
        if let SubExpr::Rational(_) = &**l {
            return mul(b, Arc::new(SubExpr::Mul(l.clone(), r.clone())));
        }
    }
    if matches!(&*b, SubExpr::Rational(_)) {
        return mul(b, a);
    }
    Arc::new(SubExpr::Mul(a, b))
}

pub fn div(a: Arc<SubExpr>, b: Arc<SubExpr>) -> Arc<SubExpr> {
    if a.is_zero() && !b.is_zero() {
        return SubExpr::integer(0);
    }
    if b.is_one() {
        return a;
    }
    if let SubExpr::Rational(y) = &*b {
        if !y.is_zero() {
            return mul(SubExpr::rational(y.recip()), a);
        }
    }
    Arc::new(SubExpr::Div(a, b))
}

pub fn pow(a: Arc<SubExpr>, q: Exponent) -> Arc<SubExpr> {
    if q.is_zero() {
        return SubExpr::integer(1);
    }
    if q.is_one() {
        return a;
    }
    if let SubExpr::Rational(r) = &*a {
        if r.is_positive() || (q.denom().is_one() && !r.is_zero()) {
            if let Some(v) = rational_pow(r, q) {
                return SubExpr::rational(v);
            }
        }
    }
    Arc::new(SubExpr::Pow(a, q))
}

/// One summand: a log-free factor times a product of logs of log-free
/// arguments.
#[derive(Clone, Debug, PartialEq)]
pub struct CTerm {
    pub factor: Arc<SubExpr>,
    pub logs: Vec<Arc<SubExpr>>,
}

/// A constructible expression: a finite sum of [`CTerm`]s. The empty sum
/// is the canonical zero.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct CExpr {
    pub terms: Vec<CTerm>,
}

/// Structural errors raised while normalizing a raw parse tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormalizeError {
    /// log applied to an expression that already contains a log.
    NestedLog { span: Span },
    /// Division by a log-bearing expression (including negative integer
    /// powers of logs).
    DivisionByLog { span: Span },
    /// A non-integer power of a log-bearing expression.
    PowerOfLog { span: Span },
    /// Integer powers of log-bearing expressions are expanded as repeated
    /// products only up to this bound.
    LogPowerTooLarge { span: Span, max: u32 },
}

impl core::fmt::Display for NormalizeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            NormalizeError::NestedLog { span } => {
                write!(f, "{}: log of a log-bearing expression", span)
            }
            NormalizeError::DivisionByLog { span } => {
                write!(f, "{}: division by a log-bearing expression", span)
            }
            NormalizeError::PowerOfLog { span } => {
                write!(f, "{}: non-integer power of a log-bearing expression", span)
            }
            NormalizeError::LogPowerTooLarge { span, max } => {
                write!(f, "{}: integer power of a log expression exceeds {}", span, max)
            }
        }
    }
}

/// Largest integer power of a log-bearing expression expanded by normalize.
pub const MAX_LOG_POWER: u32 = 32;

impl CExpr {
    pub fn zero() -> Self {
        CExpr { terms: Vec::new() }
    }

    pub fn is_zero_form(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn from_sub(factor: Arc<SubExpr>) -> Self {
        let mut e = CExpr::zero();
        e.push_term(CTerm { factor, logs: Vec::new() });
        e
    }

    pub fn from_rational(r: Rat) -> Self {
        CExpr::from_sub(SubExpr::rational(r))
    }

    fn push_term(&mut self, t: CTerm) {
        if !t.factor.is_zero() {
            self.terms.push(t);
        }
    }

    pub fn add(&self, other: &CExpr) -> CExpr {
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        out
    }

    pub fn neg(&self) -> CExpr {
        let mut out = CExpr::zero();
        for t in &self.terms {
            out.push_term(CTerm {
                factor: mul(SubExpr::integer(-1), t.factor.clone()),
                logs: t.logs.clone(),
            });
        }
        out
    }

    pub fn sub(&self, other: &CExpr) -> CExpr {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &CExpr) -> CExpr {
        let mut out = CExpr::zero();
        for a in &self.terms {
            for b in &other.terms {
                let mut logs = a.logs.clone();
                logs.extend(b.logs.iter().cloned());
                out.push_term(CTerm { factor: mul(a.factor.clone(), b.factor.clone()), logs });
            }
        }
        out
    }

    /// Total number of log factors across all terms.
    pub fn log_factor_count(&self) -> usize {
        self.terms.iter().map(|t| t.logs.len()).sum()
    }

    /// Largest number of log factors in a single term (the bound on the
    /// power of |log y| in the prepared form).
    pub fn max_log_depth(&self) -> usize {
        self.terms.iter().map(|t| t.logs.len()).max().unwrap_or(0)
    }

    /// Divide every term by y (used by the difference quotient).
    pub fn div_by_y(&self) -> CExpr {
        let mut out = CExpr::zero();
        for t in &self.terms {
            out.push_term(CTerm {
                factor: div(t.factor.clone(), SubExpr::y()),
                logs: t.logs.clone(),
            });
        }
        out
    }
}

/// Embeds a ring constant as a constructible expression: each monomial
/// coeff * L_{q1}^{e1} ... becomes coeff * log(q1)^{e1} * ... with rational
/// log arguments.
pub fn cexpr_from_constant(c: &Constant) -> CExpr {
    let mut out = CExpr::zero();
    for (m, coeff) in c.terms() {
        let mut logs = Vec::new();
        for &(p, e) in m.atoms() {
            for _ in 0..e {
                logs.push(SubExpr::rational(Rat::from_integer((p as i64).into())));
            }
        }
        out.push_term(CTerm { factor: SubExpr::rational(coeff.clone()), logs });
    }
    out
}

/// Rewrites a raw parse tree into the sum-of-products normal form.
pub fn normalize(ast: &Ast) -> core::result::Result<CExpr, NormalizeError> {
    match &ast.node {
        AstNode::Number(r) => Ok(CExpr::from_rational(r.clone())),
        AstNode::Y => Ok(CExpr::from_sub(SubExpr::y())),
        AstNode::Neg(a) => Ok(normalize(a)?.neg()),
        AstNode::Add(a, b) => Ok(normalize(a)?.add(&normalize(b)?)),
        AstNode::Sub(a, b) => Ok(normalize(a)?.sub(&normalize(b)?)),
        AstNode::Mul(a, b) => Ok(normalize(a)?.mul(&normalize(b)?)),
        AstNode::Div(a, b) => {
            let na = normalize(a)?;
            let nb = normalize(b)?;
            if nb.terms.iter().any(|t| !t.logs.is_empty()) {
                return Err(NormalizeError::DivisionByLog { span: ast.span });
            }
            let denom = sum_of_factors(&nb);
            let mut out = CExpr::zero();
            for t in &na.terms {
                out.push_term(CTerm {
                    factor: div(t.factor.clone(), denom.clone()),
                    logs: t.logs.clone(),
                });
            }
            Ok(out)
        }
        AstNode::Pow(a, q) => {
            let na = normalize(a)?;
            let log_free = na.terms.iter().all(|t| t.logs.is_empty());
            if log_free {
                let base = sum_of_factors(&na);
                return Ok(CExpr::from_sub(pow(base, *q)));
            }
            if !q.denom().is_one() {
                return Err(NormalizeError::PowerOfLog { span: ast.span });
            }
            let n = *q.numer();
            if n < 0 {
                return Err(NormalizeError::DivisionByLog { span: ast.span });
            }
            if n as u64 > MAX_LOG_POWER as u64 {
                return Err(NormalizeError::LogPowerTooLarge { span: ast.span, max: MAX_LOG_POWER });
            }
            let mut acc = CExpr::from_rational(Rat::one());
            for _ in 0..n {
                acc = acc.mul(&na);
            }
            Ok(acc)
        }
        AstNode::Log(g) => {
            let ng = normalize(g)?;
            if ng.terms.iter().any(|t| !t.logs.is_empty()) {
                return Err(NormalizeError::NestedLog { span: ast.span });
            }
            let arg = sum_of_factors(&ng);
            Ok(CExpr {
                terms: alloc::vec![CTerm {
                    factor: SubExpr::integer(1),
                    logs: alloc::vec![arg],
                }],
            })
        }
    }
}

/// Collapse a log-free CExpr back into a single SubExpr (sum of factors).
fn sum_of_factors(e: &CExpr) -> Arc<SubExpr> {
    debug_assert!(e.terms.iter().all(|t| t.logs.is_empty()));
    let mut acc = SubExpr::integer(0);
    for t in &e.terms {
        acc = add(acc, t.factor.clone());
    }
    acc
}

/// d/dy on the log-free layer.
fn derive_sub(e: &SubExpr) -> Arc<SubExpr> {
    match e {
        SubExpr::Rational(_) => SubExpr::integer(0),
        SubExpr::Y => SubExpr::integer(1),
        SubExpr::Add(a, b) => add(derive_sub(a), derive_sub(b)),
        SubExpr::Sub(a, b) => sub(derive_sub(a), derive_sub(b)),
        SubExpr::Mul(a, b) => add(
            mul(derive_sub(a), b.clone()),
            mul(a.clone(), derive_sub(b)),
        ),
        SubExpr::Div(a, b) => div(
            sub(mul(derive_sub(a), b.clone()), mul(a.clone(), derive_sub(b))),
            pow(b.clone(), Exponent::new(2, 1)),
        ),
        SubExpr::Pow(a, q) => mul(
            mul(
                SubExpr::rational(exponent_to_rat(*q)),
                pow(a.clone(), q - Exponent::new(1, 1)),
            ),
            derive_sub(a),
        ),
    }
}

/// Symbolic derivative: linearity, the product rule across the factor and
/// the log list, d(log g) = g'/g folded into the factor, d(g^q) = q g^(q-1) g'.
/// The output is again a well-formed `CExpr`.
pub fn derivative_symbolic(e: &CExpr) -> CExpr {
    let mut out = CExpr::zero();
    for t in &e.terms {
        let df = simplify(&derive_sub(&t.factor));
        if !df.is_zero() {
            out.push_term(CTerm { factor: df, logs: t.logs.clone() });
        }
        for (j, g) in t.logs.iter().enumerate() {
            let dg = derive_sub(g);
            if dg.is_zero() {
                continue;
            }
            let extra = div(dg, g.clone());
            let factor = simplify(&mul(t.factor.clone(), extra));
            if factor.is_zero() {
                continue;
            }
            let mut logs = t.logs.clone();
            logs.remove(j);
            out.push_term(CTerm { factor, logs });
        }
    }
    out
}

/// Substitution y -> t0 + y across both layers. Requires t0 > 0 so that the
/// germ stays on the right-hand side of the singular point.
pub fn shift(e: &CExpr, t0: &Rat) -> Result<CExpr> {
    if !t0.is_positive() {
        return Err(Error::PointOutsideDomain);
    }
    let repl = add(SubExpr::rational(t0.clone()), SubExpr::y());
    let mut out = CExpr::zero();
    for t in &e.terms {
        out.push_term(CTerm {
            factor: substitute_y(&t.factor, &repl),
            logs: t.logs.iter().map(|g| substitute_y(g, &repl)).collect(),
        });
    }
    Ok(out)
}

fn substitute_y(e: &SubExpr, repl: &Arc<SubExpr>) -> Arc<SubExpr> {
    match e {
        SubExpr::Rational(r) => SubExpr::rational(r.clone()),
        SubExpr::Y => repl.clone(),
        SubExpr::Add(a, b) => add(substitute_y(a, repl), substitute_y(b, repl)),
        SubExpr::Sub(a, b) => sub(substitute_y(a, repl), substitute_y(b, repl)),
        SubExpr::Mul(a, b) => mul(substitute_y(a, repl), substitute_y(b, repl)),
        SubExpr::Div(a, b) => div(substitute_y(a, repl), substitute_y(b, repl)),
        SubExpr::Pow(a, q) => pow(substitute_y(a, repl), *q),
    }
}

/// Light algebraic simplification: constant folding plus power-product
/// flattening with combination of structurally equal bases. This is what
/// turns the product rule's y * (1/y) into 1 without attempting full
/// rational-function canonicalization.
pub fn simplify(e: &SubExpr) -> Arc<SubExpr> {
    match e {
        SubExpr::Rational(_) | SubExpr::Y => Arc::new(e.clone()),
        SubExpr::Add(a, b) => add(simplify(a), simplify(b)),
        SubExpr::Sub(a, b) => sub(simplify(a), simplify(b)),
        SubExpr::Mul(_, _) | SubExpr::Div(_, _) | SubExpr::Pow(_, _) => {
            let mut coeff = Rat::one();
            let mut factors: Vec<(Arc<SubExpr>, Exponent)> = Vec::new();
            if !flatten_product(e, Exponent::new(1, 1), &mut coeff, &mut factors) {
                // a zero coefficient annihilates the product
                return SubExpr::integer(0);
            }
            rebuild_product(coeff, factors)
        }
    }
}

/// Collects `e^outer` into coeff * prod base^exp. Returns false when the
/// product is exactly zero.
fn flatten_product(
    e: &SubExpr,
    outer: Exponent,
    coeff: &mut Rat,
    factors: &mut Vec<(Arc<SubExpr>, Exponent)>,
) -> bool {
    match e {
        SubExpr::Rational(r) => {
            if r.is_zero() {
                if *outer.numer() > 0 {
                    return false; // a zero factor annihilates the product
                }
                // 0^(-q) stays explicit so the domain error surfaces later
                push_factor(factors, SubExpr::rational(r.clone()), outer);
                return true;
            }
            match rational_pow(r, outer) {
                Some(v) => *coeff *= v,
                None => push_factor(factors, SubExpr::rational(r.clone()), outer),
            }
            true
        }
        SubExpr::Mul(a, b) => {
            flatten_product(a, outer, coeff, factors) && flatten_product(b, outer, coeff, factors)
        }
        SubExpr::Div(a, b) => {
            flatten_product(a, outer, coeff, factors) && flatten_product(b, -outer, coeff, factors)
        }
        SubExpr::Pow(a, q) => {
            let inner = simplify(a);
            push_factor(factors, inner, *q * outer);
            true
        }
        SubExpr::Y => {
            push_factor(factors, SubExpr::y(), outer);
            true
        }
        SubExpr::Add(_, _) | SubExpr::Sub(_, _) => {
            push_factor(factors, simplify(e), outer);
            true
        }
    }
}

fn push_factor(factors: &mut Vec<(Arc<SubExpr>, Exponent)>, base: Arc<SubExpr>, q: Exponent) {
    if q.is_zero() {
        return;
    }
    for (b, e) in factors.iter_mut() {
        if **b == *base {
            *e += q;
            return;
        }
    }
    factors.push((base, q));
}

fn rebuild_product(coeff: Rat, mut factors: Vec<(Arc<SubExpr>, Exponent)>) -> Arc<SubExpr> {
    factors.retain(|(_, q)| !q.is_zero());
    if coeff.is_zero() {
        return SubExpr::integer(0);
    }
    factors.sort_by(|(a, _), (b, _)| a.cmp(b));
    let mut num: Vec<Arc<SubExpr>> = Vec::new();
    let mut den: Vec<Arc<SubExpr>> = Vec::new();
    for (base, q) in factors {
        if q == Exponent::new(1, 1) {
            num.push(base);
        } else if q == Exponent::new(-1, 1) {
            den.push(base);
        } else {
            num.push(pow(base, q));
        }
    }
    let mut acc = SubExpr::rational(coeff);
    for f in num {
        acc = mul(acc, f);
    }
    let mut dacc: Option<Arc<SubExpr>> = None;
    for f in den {
        dacc = Some(match dacc {
            None => f,
            Some(d) => mul(d, f),
        });
    }
    match dacc {
        None => acc,
        Some(d) => div(acc, d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat_from_i64, rat_of};
    use crate::parser::parse;

    fn norm(s: &str) -> CExpr {
        normalize(&parse(s).unwrap()).unwrap()
    }

    #[test]
    fn normalize_distributes_products_over_sums() {
        // (log y)(log y + 1) y = y log^2 y + y log y
        let e = norm("(log(y))*(log(y)+1)*y");
        assert_eq!(e.terms.len(), 2);
        let depths: Vec<usize> = e.terms.iter().map(|t| t.logs.len()).collect();
        assert!(depths.contains(&2) && depths.contains(&1));
    }

    #[test]
    fn normalize_rejections() {
        let nested = normalize(&parse("log(log(y))").unwrap());
        assert!(matches!(nested, Err(NormalizeError::NestedLog { .. })));
        let div_log = normalize(&parse("1/log(y)").unwrap());
        assert!(matches!(div_log, Err(NormalizeError::DivisionByLog { .. })));
        let neg_pow = normalize(&parse("log(y)^(-2)").unwrap());
        assert!(matches!(neg_pow, Err(NormalizeError::DivisionByLog { .. })));
        let frac_pow = normalize(&parse("log(y)^(1/2)").unwrap());
        assert!(matches!(frac_pow, Err(NormalizeError::PowerOfLog { .. })));
    }

    #[test]
    fn integer_log_powers_expand() {
        let e = norm("log(y)^2");
        assert_eq!(e.terms.len(), 1);
        assert_eq!(e.terms[0].logs.len(), 2);
        let z = norm("log(y)^0");
        assert_eq!(z.terms.len(), 1);
        assert!(z.terms[0].logs.is_empty());
    }

    #[test]
    fn zero_literals_normalize_to_empty_sum() {
        assert!(norm("0").is_zero_form());
        assert!(norm("0*log(y)").is_zero_form());
        assert!(!norm("y-y").is_zero_form()); // structural zero is not folded
    }

    #[test]
    fn derivative_examples() {
        // d log y = 1/y with empty logs
        let d = derivative_symbolic(&norm("log(y)"));
        assert_eq!(d.terms.len(), 1);
        assert!(d.terms[0].logs.is_empty());
        assert_eq!(
            *d.terms[0].factor,
            SubExpr::Div(SubExpr::integer(1), SubExpr::y())
        );

        // d (y log y) = log y + 1
        let d2 = derivative_symbolic(&norm("y*log(y)"));
        assert_eq!(d2.terms.len(), 2);
        assert_eq!(d2.terms[0].logs.len(), 1);
        assert!(d2.terms[0].factor.is_one());
        assert!(d2.terms[1].logs.is_empty());
        assert!(d2.terms[1].factor.is_one());

        // d (1+y)^(1/2) = (1/2)(1+y)^(-1/2)
        let d3 = derivative_symbolic(&norm("(1+y)^(1/2)"));
        assert_eq!(d3.terms.len(), 1);
        let f = &*d3.terms[0].factor;
        match f {
            SubExpr::Mul(c, p) => {
                assert_eq!(**c, SubExpr::Rational(rat_of(1, 2)));
                assert!(matches!(&**p, SubExpr::Pow(_, q) if *q == Exponent::new(-1, 2)));
            }
            other => panic!("unexpected shape: {other:?}"),
        }
    }

    #[test]
    fn shift_examples() {
        // shift(y^2, 1/3) = (1/3 + y)^2
        let s = shift(&norm("y^2"), &rat_of(1, 3)).unwrap();
        assert_eq!(s.terms.len(), 1);
        assert!(matches!(&*s.terms[0].factor, SubExpr::Pow(b, q)
            if *q == Exponent::new(2, 1) && matches!(&**b, SubExpr::Add(_, _))));

        // shift(log y, 1/2) = log(1/2 + y)
        let s2 = shift(&norm("log(y)"), &rat_of(1, 2)).unwrap();
        assert_eq!(s2.terms[0].logs.len(), 1);

        // the boundary point 0 is rejected
        assert!(matches!(
            shift(&norm("1/y"), &rat_from_i64(0)),
            Err(Error::PointOutsideDomain)
        ));
    }

    #[test]
    fn shift_composes_additively() {
        for src in ["y^2", "log(y)*y + 1/y", "(1+y)^(1/2)"] {
            let e = norm(src);
            let a = rat_of(1, 4);
            let b = rat_of(1, 3);
            let lhs = shift(&shift(&e, &a).unwrap(), &b).unwrap();
            let rhs = shift(&e, &(a + b)).unwrap();
            assert_eq!(lhs, rhs, "shift composition on {src}");
        }
    }

    #[test]
    fn simplify_cancels_power_products() {
        // y * (1/y) = 1
        let e = mul(SubExpr::y(), div(SubExpr::integer(1), SubExpr::y()));
        assert!(simplify(&e).is_one());
        // (1+y) * (1+y)^(-1) = 1
        let b = add(SubExpr::integer(1), SubExpr::y());
        let e2 = mul(b.clone(), pow(b, Exponent::new(-1, 1)));
        assert!(simplify(&e2).is_one());
    }

    #[test]
    fn constant_embedding_round_trips_structure() {
        // -L2 embeds as (-1) * log(2)
        let c = Constant::atom(2).neg();
        let e = cexpr_from_constant(&c);
        assert_eq!(e.terms.len(), 1);
        assert_eq!(e.terms[0].logs.len(), 1);
        assert_eq!(*e.terms[0].factor, SubExpr::Rational(rat_from_i64(-1)));
        // and 3 (no atoms) embeds with no logs
        let e3 = cexpr_from_constant(&Constant::from_integer(3));
        assert_eq!(e3.terms.len(), 1);
        assert!(e3.terms[0].logs.is_empty());
    }

    #[test]
    fn derivative_of_embedded_constant_is_zero() {
        let c = Constant::atom(2).scale(&rat_of(3, 2)).add(&Constant::from_integer(1));
        let e = cexpr_from_constant(&c);
        assert!(derivative_symbolic(&e).is_zero_form());
    }
}
