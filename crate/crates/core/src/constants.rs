//! Exact arithmetic in the coefficient ring Q[L2, L3, L5, ...], where the
//! atom `L<q>` stands for log q with q prime.
//!
//! Every coefficient the engine manipulates lives here: logarithms of
//! positive rationals decompose over prime atoms via factorization
//! (log(9/2) = 2 L3 - L2), and ring arithmetic is exact. Zero-testing
//! treats the atoms as algebraically independent indeterminates. For
//! Q-linear combinations this is unconditionally sound (logs of primes are
//! linearly independent over Q); for higher-degree monomials independence
//! is conjectural, and the formal semantics is taken as the engine's
//! definition. The numeric backend can confirm a sign but never refute a
//! formal zero.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{factor_biguint, Rat};
use crate::error::{Error, Result};
use crate::interval::{ln_rat, Interval};

/// A monomial in the log-atoms: a finite multiset of primes with positive
/// exponents, kept sorted. The empty monomial is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    atoms: Vec<(u64, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { atoms: Vec::new() }
    }

    pub fn atom(prime: u64) -> Self {
        Monomial { atoms: alloc::vec![(prime, 1)] }
    }

    pub fn is_one(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.atoms.iter().map(|&(_, e)| e).sum()
    }

    pub fn atoms(&self) -> &[(u64, u32)] {
        &self.atoms
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out: Vec<(u64, u32)> = Vec::with_capacity(self.atoms.len() + other.atoms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.atoms.len() && j < other.atoms.len() {
            match self.atoms[i].0.cmp(&other.atoms[j].0) {
                Ordering::Less => {
                    out.push(self.atoms[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.atoms[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.atoms[i].0, self.atoms[i].1 + other.atoms[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.atoms[i..]);
        out.extend_from_slice(&other.atoms[j..]);
        Monomial { atoms: out }
    }
}

/// Graded order with a reversed lexicographic tie-break, so iterating a
/// key-ascending map in reverse lists monomials by descending degree and,
/// within a degree, by ascending atoms (L2 before L3). The constant
/// monomial sorts first.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.atoms.cmp(&self.atoms))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        for (i, (p, e)) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "L{p}")?;
            } else {
                write!(f, "L{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sign of a `Constant`, as decided within a precision budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignResult {
    Positive,
    Negative,
    Zero,
    Undecided,
}

/// An exact element of Q[L2, L3, L5, ...] in canonical sparse form:
/// no stored coefficient is zero, monomial keys are strictly ordered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constant {
    terms: BTreeMap<Monomial, Rat>,
}

impl Constant {
    pub fn zero() -> Self {
        Constant { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Constant::from_rational(Rat::one())
    }

    pub fn from_rational(r: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(Monomial::one(), r);
        }
        Constant { terms }
    }

    pub fn from_integer(n: i64) -> Self {
        Constant::from_rational(Rat::from_integer(BigInt::from(n)))
    }

    /// A single atom L<prime> (caller guarantees primality).
    pub fn atom(prime: u64) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::atom(prime), Rat::one());
        Constant { terms }
    }

    /// log r expanded over prime atoms, for exact rational r > 0.
    pub fn log_of_rational(r: &Rat) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::NonPositiveArgument);
        }
        let mut terms: BTreeMap<Monomial, Rat> = BTreeMap::new();
        let side = |n: &BigInt, sign: i64, terms: &mut BTreeMap<Monomial, Rat>| -> Result<()> {
            let mag = n.magnitude();
            if mag.is_one() {
                return Ok(());
            }
            let factors = factor_biguint(mag).ok_or(Error::AtomTooLarge)?;
            for (p, e) in factors {
                let coeff = Rat::from_integer(BigInt::from(sign * e as i64));
                let entry = terms.entry(Monomial::atom(p)).or_insert_with(Rat::zero);
                *entry += coeff;
                if entry.is_zero() {
                    terms.remove(&Monomial::atom(p));
                }
            }
            Ok(())
        };
        side(r.numer(), 1, &mut terms)?;
        side(r.denom(), -1, &mut terms)?;
        Ok(Constant { terms })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value as a plain rational, when no log-atoms occur.
    pub fn as_rational(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                if m.is_one() {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Constant) -> Constant {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let entry = terms.entry(m.clone()).or_insert_with(Rat::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(m);
            }
        }
        Constant { terms }
    }

    pub fn neg(&self) -> Constant {
        Constant {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Constant) -> Constant {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Constant) -> Constant {
        let mut terms: BTreeMap<Monomial, Rat> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let entry = terms.entry(m.clone()).or_insert_with(Rat::zero);
                *entry += ca * cb;
                if entry.is_zero() {
                    terms.remove(&m);
                }
            }
        }
        Constant { terms }
    }

    pub fn scale(&self, r: &Rat) -> Constant {
        if r.is_zero() {
            return Constant::zero();
        }
        Constant {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * r)).collect(),
        }
    }

    /// Multiplicative inverse, defined only for nonzero rationals
    /// (the ring's units).
    pub fn invert(&self) -> Result<Constant> {
        match self.as_rational() {
            Some(r) if !r.is_zero() => Ok(Constant::from_rational(r.recip())),
            Some(_) => Err(Error::ExactZero),
            None => Err(Error::NonConstantLeading),
        }
    }

    /// Rigorous interval enclosure of the real value at the given precision.
    pub fn eval(&self, bits: u32) -> Interval {
        let bits = bits.max(2);
        if self.terms.is_empty() {
            return Interval::zero();
        }
        let work = bits + 8 + (self.terms.len() as u32).next_power_of_two().trailing_zeros();
        let mut acc = Interval::zero();
        for (m, c) in &self.terms {
            let mut t = Interval::point(c.clone());
            for &(p, e) in m.atoms() {
                let lq = ln_rat(&Rat::from_integer(BigInt::from(p)), work);
                let powed = lq.powi(e as i64).expect("ln of prime is positive");
                t = t.mul(&powed);
            }
            acc = acc.add(&t);
        }
        acc.round_out(bits)
    }

    /// Sign decision by interval refinement up to `max_bits` of precision.
    ///
    /// Exact (budget-independent) for zero and for plain rationals; a
    /// nonzero polynomial in logs can be arbitrarily tiny, so the numeric
    /// route may return `Undecided` when the budget runs out.
    pub fn sign(&self, max_bits: u32) -> SignResult {
        if self.is_zero() {
            return SignResult::Zero;
        }
        if let Some(r) = self.as_rational() {
            return if r.is_positive() { SignResult::Positive } else { SignResult::Negative };
        }
        let mut bits = 32u32;
        loop {
            let e = self.eval(bits);
            if e.is_strictly_positive() {
                return SignResult::Positive;
            }
            if e.is_strictly_negative() {
                return SignResult::Negative;
            }
            if bits >= max_bits {
                return SignResult::Undecided;
            }
            bits = (bits * 2).min(max_bits);
        }
    }
}

/// Canonical rendering, e.g. "2*L2 - L3 + 1/2": monomials in descending
/// graded order, so the constant term comes last.
impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

/// Convenience: the canonical string form used by serialization.
pub fn constant_to_string(c: &Constant) -> String {
    use alloc::format;
    format!("{c}")
}

/// Reads back `p` from a spot-check float for tests and reports.
pub fn rat_approx_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat_from_i64, rat_of};

    #[test]
    fn log_of_rational_factorizes() {
        // log 1 = 0
        assert!(Constant::log_of_rational(&rat_from_i64(1)).unwrap().is_zero());
        // log 8 = 3 L2
        let l8 = Constant::log_of_rational(&rat_from_i64(8)).unwrap();
        assert_eq!(l8, Constant::atom(2).scale(&rat_from_i64(3)));
        // log(9/2) = 2 L3 - L2
        let l = Constant::log_of_rational(&rat_of(9, 2)).unwrap();
        let expect = Constant::atom(3).scale(&rat_from_i64(2)).sub(&Constant::atom(2));
        assert_eq!(l, expect);
        // non-positive arguments are rejected
        assert_eq!(
            Constant::log_of_rational(&rat_from_i64(0)),
            Err(Error::NonPositiveArgument)
        );
        assert_eq!(
            Constant::log_of_rational(&rat_from_i64(-3)),
            Err(Error::NonPositiveArgument)
        );
    }

    #[test]
    fn log_homomorphism_on_positives() {
        let cases = [(rat_of(3, 4), rat_of(14, 9)), (rat_from_i64(10), rat_of(1, 10))];
        for (r, s) in cases {
            let lhs = Constant::log_of_rational(&(&r * &s)).unwrap();
            let rhs = Constant::log_of_rational(&r)
                .unwrap()
                .add(&Constant::log_of_rational(&s).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn ring_arithmetic_canonical() {
        let l2 = Constant::atom(2);
        let l3 = Constant::atom(3);
        // additive inverse collapses to the canonical zero
        assert!(l2.add(&l2.neg()).is_zero());
        // commutativity gives identical canonical forms
        assert_eq!(l2.mul(&l3), l3.mul(&l2));
        // distributivity with a rational factor: 2 * (L2 + 1/2) = 2 L2 + 1
        let two = Constant::from_integer(2);
        let sum = l2.add(&Constant::from_rational(rat_of(1, 2)));
        let got = two.mul(&sum);
        let expect = l2.scale(&rat_from_i64(2)).add(&Constant::one());
        assert_eq!(got, expect);
    }

    #[test]
    fn zero_testing_is_formal() {
        let l2 = Constant::atom(2);
        let l3 = Constant::atom(3);
        assert!(l2.sub(&l2).is_zero());
        assert!(l2.mul(&l3).sub(&l3.mul(&l2)).is_zero());
        assert!(!l2.sub(&l3).is_zero());
    }

    #[test]
    fn sign_decisions() {
        let l2 = Constant::atom(2);
        let l3 = Constant::atom(3);
        assert_eq!(l2.sign(128), SignResult::Positive);
        assert_eq!(l2.sub(&l3).sign(128), SignResult::Negative);
        assert_eq!(Constant::zero().sign(128), SignResult::Zero);
        // rational fast path is exact even with a tiny budget
        assert_eq!(Constant::from_rational(rat_of(-1, 7)).sign(2), SignResult::Negative);
    }

    #[test]
    fn eval_enclosures() {
        // 0 -> [0,0]
        let z = Constant::zero().eval(64);
        assert!(z.lo.is_zero() && z.hi.is_zero());
        // L2 at 64 bits contains 0.6931...
        let e = Constant::atom(2).eval(64);
        assert!(e.contains(&rat_of(693147, 1000000)) || (e.lo < rat_of(6932, 10000) && e.hi > rat_of(6931, 10000)));
        assert!(e.lo > rat_of(69314, 100000) && e.hi < rat_of(69315, 100000));
        // 3 + 0*L2 evaluates to exactly 3
        let three = Constant::from_integer(3).add(&Constant::atom(2).scale(&Rat::zero()));
        let e3 = three.eval(64);
        assert!(e3.contains(&rat_from_i64(3)));
        assert!(e3.width().is_zero());
    }

    #[test]
    fn sign_consistent_with_eval() {
        let c = Constant::atom(2).scale(&rat_of(3, 1)).sub(&Constant::atom(3)); // 3 ln2 - ln3 > 0
        assert_eq!(c.sign(128), SignResult::Positive);
        let e = c.eval(128);
        assert!(e.is_strictly_positive());
    }

    #[test]
    fn canonical_display() {
        let c = Constant::atom(2)
            .scale(&rat_from_i64(2))
            .sub(&Constant::atom(3))
            .add(&Constant::from_rational(rat_of(1, 2)));
        assert_eq!(alloc::format!("{c}"), "2*L2 - L3 + 1/2");
        assert_eq!(alloc::format!("{}", Constant::zero()), "0");
        let m = Constant::atom(2).mul(&Constant::atom(2)).mul(&Constant::atom(3));
        assert_eq!(alloc::format!("{m}"), "L2^2*L3");
    }
}
