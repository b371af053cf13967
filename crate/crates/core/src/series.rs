//! Lazy Puiseux series over the exact constant ring.
//!
//! A series is a deterministic producer of (exponent, coefficient) pairs
//! with exponents on an ascending (1/d)Z grid, bounded below. Terms are
//! computed on demand and memoized; re-reading a series always yields the
//! same sequence, and concurrent forcing of the same slot is idempotent
//! (the memo behaves as a linearizable cache).
//!
//! Zero-testing a lazy series is only semi-decidable. Operations that must
//! locate a nonzero leading term take a [`Budget`] and report
//! [`Error::LeadingTermUndecided`] rather than looping; series with known
//! finite support carry an exhaustion bound that makes exact-zero
//! decidable for them.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};
use spin::Mutex;

use crate::arith::{binomial_row, exponent_to_rat, lcm_u32, rational_pow, Exponent, Rat};
use crate::budget::Budget;
use crate::constants::Constant;
use crate::error::{Error, Result};

/// A lazily evaluated Puiseux series.
///
/// Cloning is cheap and shares the underlying memo.
#[derive(Clone)]
pub struct PuiseuxSeries {
    inner: Arc<Inner>,
}

struct Inner {
    /// Exponent denominator d: supported exponents are start/d, (start+1)/d, ...
    ram: u32,
    /// Lower bound on the support, in grid slots (exponent = slot / ram).
    start: i64,
    /// When set, the support is known to lie in [start, end]; end may be
    /// below start for the exactly-zero series.
    end: Option<i64>,
    /// Coefficients for slots start, start+1, ... (filled prefix).
    memo: Mutex<Vec<Constant>>,
    source: Source,
}

enum Source {
    /// Explicit finite support, keys in grid slots, values nonzero.
    Finite(BTreeMap<i64, Constant>),
    Add(PuiseuxSeries, PuiseuxSeries),
    Mul(PuiseuxSeries, PuiseuxSeries),
    Scale(PuiseuxSeries, Constant),
    /// Multiplicative inverse; `lead` is the certified leading slot of `a`
    /// (in a's grid) and `lead_inv` the inverse of its rational coefficient.
    Inv { a: PuiseuxSeries, lead: i64, lead_inv: Rat },
    /// (1 + eps)^q for eps of strictly positive order, via the binomial series.
    PowUnit { eps: UnitPowers, q: Rat },
    /// log(1 + eps) for eps of strictly positive order (Mercator series).
    LogUnit { eps: UnitPowers },
    /// Coefficient at exponent p gets multiplied by p.
    ExpWeight(PuiseuxSeries),
    /// View of `a` restricted to slots [lo, hi]; coefficients outside are 0.
    /// Also used to tighten a support bound that is known by construction.
    Slice { a: PuiseuxSeries, lo: i64, hi: Option<i64> },
}

/// Lazily extended powers eps^0, eps^1, ... sharing one memo per power.
struct UnitPowers {
    eps: PuiseuxSeries,
    pows: Mutex<Vec<PuiseuxSeries>>,
}

impl UnitPowers {
    fn new(eps: PuiseuxSeries) -> Self {
        debug_assert!(eps.inner.start >= 1);
        UnitPowers { pows: Mutex::new(alloc::vec![PuiseuxSeries::one(), eps.clone()]), eps }
    }

    fn pow(&self, j: usize) -> PuiseuxSeries {
        let mut pows = self.pows.lock();
        while pows.len() <= j {
            let next = PuiseuxSeries::mul_unchecked(pows.last().unwrap(), &self.eps);
            pows.push(next);
        }
        pows[j].clone()
    }
}

/// Outcome of a leading-term search under a budget.
#[derive(Clone, Debug, PartialEq)]
pub enum LeadingTerm {
    Term { exponent: Exponent, coeff: Constant },
    ExactZero,
    Undecided { scanned: u32 },
}

/// A series factored as coeff * y^exponent * unit, with the unit normalized
/// to leading term (0, 1).
pub struct Factored {
    pub coeff: Constant,
    pub exponent: Exponent,
    pub unit: Unit,
}

/// A series with certified leading term (0, 1): the computational stand-in
/// for a strong unit.
#[derive(Clone)]
pub struct Unit(PuiseuxSeries);

impl Unit {
    pub fn one() -> Self {
        Unit(PuiseuxSeries::one())
    }

    pub fn series(&self) -> &PuiseuxSeries {
        &self.0
    }

    pub fn into_series(self) -> PuiseuxSeries {
        self.0
    }

    /// True when this is literally the constant 1.
    pub fn is_one(&self) -> bool {
        matches!(self.0.inner.end, Some(e) if e <= 0)
    }

    /// The unit minus 1, with its support bound tightened to order > 0.
    pub fn fractional_part(&self) -> PuiseuxSeries {
        let minus_one = PuiseuxSeries::constant(Constant::from_integer(-1));
        let diff = PuiseuxSeries::add_unchecked(&self.0, &minus_one);
        diff.slice(1, None)
    }
}

impl PuiseuxSeries {
    fn from_parts(ram: u32, start: i64, end: Option<i64>, source: Source) -> Self {
        PuiseuxSeries {
            inner: Arc::new(Inner { ram, start, end, memo: Mutex::new(Vec::new()), source }),
        }
    }

    pub fn zero() -> Self {
        Self::finite_from_slots(BTreeMap::new(), 1)
    }

    pub fn one() -> Self {
        Self::constant(Constant::one())
    }

    pub fn constant(c: Constant) -> Self {
        Self::monomial(Exponent::new(0, 1), c)
    }

    /// The variable y.
    pub fn y() -> Self {
        Self::monomial(Exponent::new(1, 1), Constant::one())
    }

    /// c * y^e as an exhausted single-term series.
    pub fn monomial(e: Exponent, c: Constant) -> Self {
        let mut map = BTreeMap::new();
        if !c.is_zero() {
            map.insert(*e.numer(), c);
        }
        Self::finite_from_slots(map, *e.denom() as u32)
    }

    fn finite_from_slots(map: BTreeMap<i64, Constant>, ram: u32) -> Self {
        let map: BTreeMap<i64, Constant> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let start = map.keys().next().copied().unwrap_or(0);
        let end = map.keys().next_back().copied().unwrap_or(start - 1);
        Self::from_parts(ram, start, Some(end), Source::Finite(map))
    }

    /// Builds a polynomial from explicit (exponent, coefficient) terms.
    pub fn from_terms(terms: &[(Exponent, Constant)]) -> Result<Self> {
        let mut ram = 1u32;
        for (e, _) in terms {
            ram = lcm_u32(ram, *e.denom() as u32);
        }
        let mut map: BTreeMap<i64, Constant> = BTreeMap::new();
        for (e, c) in terms {
            let slot = e
                .numer()
                .checked_mul(ram as i64 / *e.denom())
                .ok_or(Error::ExponentOverflow { at: *e })?;
            let entry = map.entry(slot).or_insert_with(Constant::zero);
            *entry = entry.add(c);
        }
        Ok(Self::finite_from_slots(map, ram))
    }

    pub fn ramification(&self) -> u32 {
        self.inner.ram
    }

    /// Lower bound on the support.
    pub fn order_bound(&self) -> Exponent {
        Exponent::new(self.inner.start, self.inner.ram as i64)
    }

    /// True when the support is known finite (possibly empty).
    pub fn is_exhausted(&self) -> bool {
        self.inner.end.is_some()
    }

    fn check_ram(ram: u64, budget: &Budget) -> Result<u32> {
        if ram > budget.ram_cap as u64 {
            Err(Error::RamificationCapExceeded { needed: ram.min(u32::MAX as u64) as u32, cap: budget.ram_cap })
        } else {
            Ok(ram as u32)
        }
    }

    pub fn add(&self, other: &Self, budget: &Budget) -> Result<Self> {
        let ram = Self::check_ram(
            (self.inner.ram as u64) * (other.inner.ram as u64)
                / num_integer::gcd(self.inner.ram as u64, other.inner.ram as u64),
            budget,
        )?;
        Ok(Self::add_with_ram(self, other, ram))
    }

    fn add_unchecked(a: &Self, b: &Self) -> Self {
        let ram = lcm_u32(a.inner.ram, b.inner.ram);
        Self::add_with_ram(a, b, ram)
    }

    fn add_with_ram(a: &Self, b: &Self, ram: u32) -> Self {
        let sa = (ram / a.inner.ram) as i64;
        let sb = (ram / b.inner.ram) as i64;
        let start = (a.inner.start * sa).min(b.inner.start * sb);
        let end = match (a.inner.end, b.inner.end) {
            (Some(x), Some(y)) => Some((x * sa).max(y * sb)),
            _ => None,
        };
        Self::from_parts(ram, start, end, Source::Add(a.clone(), b.clone()))
    }

    pub fn sub(&self, other: &Self, budget: &Budget) -> Result<Self> {
        self.add(&other.scale(&Constant::from_integer(-1)), budget)
    }

    pub fn scale(&self, c: &Constant) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_parts(
            self.inner.ram,
            self.inner.start,
            self.inner.end,
            Source::Scale(self.clone(), c.clone()),
        )
    }

    pub fn mul(&self, other: &Self, budget: &Budget) -> Result<Self> {
        let ram = Self::check_ram(
            (self.inner.ram as u64) * (other.inner.ram as u64)
                / num_integer::gcd(self.inner.ram as u64, other.inner.ram as u64),
            budget,
        )?;
        Ok(Self::mul_with_ram(self, other, ram))
    }

    fn mul_unchecked(a: &Self, b: &Self) -> Self {
        let ram = lcm_u32(a.inner.ram, b.inner.ram);
        Self::mul_with_ram(a, b, ram)
    }

    fn mul_with_ram(a: &Self, b: &Self, ram: u32) -> Self {
        let sa = (ram / a.inner.ram) as i64;
        let sb = (ram / b.inner.ram) as i64;
        let start = a.inner.start * sa + b.inner.start * sb;
        let end = match (a.inner.end, b.inner.end) {
            (Some(x), Some(y)) => Some(x * sa + y * sb),
            _ => None,
        };
        Self::from_parts(ram, start, end, Source::Mul(a.clone(), b.clone()))
    }

    /// View restricted to slots [lo, hi] of this series' own grid. Sound to
    /// use for tightening a bound only when the hidden coefficients are
    /// known to vanish.
    fn slice(&self, lo: i64, hi: Option<i64>) -> Self {
        let start = self.inner.start.max(lo);
        let end = match (self.inner.end, hi) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (Some(a), None) => Some(a),
            (None, b) => b,
        };
        Self::from_parts(self.inner.ram, start, end, Source::Slice { a: self.clone(), lo, hi })
    }

    /// Coefficient weighting c_p -> p * c_p (the series derivative times y).
    pub fn exponent_weight(&self) -> Self {
        Self::from_parts(
            self.inner.ram,
            self.inner.start,
            self.inner.end,
            Source::ExpWeight(self.clone()),
        )
    }

    /// Shift all exponents by e (multiplication by y^e).
    pub fn shift_exponent(&self, e: Exponent) -> Self {
        Self::mul_unchecked(self, &Self::monomial(e, Constant::one()))
    }

    /// Coefficient at grid slot k of this series' own grid.
    fn coeff_slot(&self, k: i64) -> Constant {
        let inner = &*self.inner;
        if k < inner.start {
            return Constant::zero();
        }
        if let Some(e) = inner.end {
            if k > e {
                return Constant::zero();
            }
        }
        let idx = (k - inner.start) as usize;
        loop {
            let next = {
                let memo = inner.memo.lock();
                if memo.len() > idx {
                    return memo[idx].clone();
                }
                memo.len()
            };
            // Compute without holding the lock; children may take theirs.
            let c = self.compute_slot(inner.start + next as i64);
            let mut memo = inner.memo.lock();
            if memo.len() == next {
                memo.push(c);
            }
        }
    }

    /// Coefficient at an arbitrary exponent (zero off the grid).
    pub fn coeff_at(&self, e: Exponent) -> Constant {
        let ram = self.inner.ram as i64;
        if ram % *e.denom() != 0 {
            return Constant::zero();
        }
        let slot = *e.numer() as i128 * (ram / *e.denom()) as i128;
        if slot < i64::MIN as i128 || slot > i64::MAX as i128 {
            return Constant::zero();
        }
        self.coeff_slot(slot as i64)
    }

    fn coeff_at_scaled(&self, slot_in: i64, scale: i64) -> Constant {
        // slot_in is in a grid `scale` times finer than ours.
        if slot_in.rem_euclid(scale) != 0 {
            return Constant::zero();
        }
        self.coeff_slot(slot_in.div_euclid(scale))
    }

    fn compute_slot(&self, k: i64) -> Constant {
        let inner = &*self.inner;
        match &inner.source {
            Source::Finite(map) => map.get(&k).cloned().unwrap_or_else(Constant::zero),
            Source::Add(a, b) => {
                let sa = (inner.ram / a.inner.ram) as i64;
                let sb = (inner.ram / b.inner.ram) as i64;
                a.coeff_at_scaled(k, sa).add(&b.coeff_at_scaled(k, sb))
            }
            Source::Scale(a, c) => a.coeff_slot(k).mul(c),
            Source::Mul(a, b) => {
                let sa = (inner.ram / a.inner.ram) as i64;
                let sb = (inner.ram / b.inner.ram) as i64;
                let mut acc = Constant::zero();
                let ja_lo = a.inner.start;
                let mut ja_hi = div_floor(k - b.inner.start * sb, sa);
                if let Some(ae) = a.inner.end {
                    ja_hi = ja_hi.min(ae);
                }
                for ja in ja_lo..=ja_hi {
                    let rem = k - ja * sa;
                    if rem.rem_euclid(sb) != 0 {
                        continue;
                    }
                    let jb = rem.div_euclid(sb);
                    if let Some(be) = b.inner.end {
                        if jb > be {
                            continue;
                        }
                    }
                    let ca = a.coeff_slot(ja);
                    if ca.is_zero() {
                        continue;
                    }
                    let cb = b.coeff_slot(jb);
                    if cb.is_zero() {
                        continue;
                    }
                    acc = acc.add(&ca.mul(&cb));
                }
                acc
            }
            Source::Inv { a, lead, lead_inv } => {
                // self and a share one grid; self.start = -lead.
                let n = k + *lead;
                debug_assert!(n >= 0);
                if n == 0 {
                    return Constant::from_rational(lead_inv.clone());
                }
                let mut acc = Constant::zero();
                for t in 1..=n {
                    let at = a.coeff_slot(lead + t);
                    if at.is_zero() {
                        continue;
                    }
                    let ut = self.coeff_slot(k - t);
                    if ut.is_zero() {
                        continue;
                    }
                    acc = acc.add(&at.mul(&ut));
                }
                acc.scale(&-lead_inv.clone())
            }
            Source::PowUnit { eps, q } => {
                if k < 0 {
                    return Constant::zero();
                }
                let jmax = (k / eps.eps.inner.start.max(1)) as usize;
                let binoms = binomial_row(q, jmax);
                let mut acc = Constant::zero();
                for (j, b) in binoms.iter().enumerate() {
                    if b.is_zero() {
                        continue;
                    }
                    let c = eps.pow(j).coeff_slot(k);
                    if c.is_zero() {
                        continue;
                    }
                    acc = acc.add(&c.scale(b));
                }
                acc
            }
            Source::LogUnit { eps } => {
                if k < 1 {
                    return Constant::zero();
                }
                let jmax = (k / eps.eps.inner.start.max(1)) as usize;
                let mut acc = Constant::zero();
                for j in 1..=jmax {
                    let c = eps.pow(j).coeff_slot(k);
                    if c.is_zero() {
                        continue;
                    }
                    // (-1)^(j+1) / j
                    let sign = if j % 2 == 1 { 1 } else { -1 };
                    acc = acc.add(&c.scale(&Rat::new((sign).into(), (j as i64).into())));
                }
                acc
            }
            Source::ExpWeight(a) => {
                let c = a.coeff_slot(k);
                if c.is_zero() {
                    c
                } else {
                    c.scale(&Rat::new(k.into(), (inner.ram as i64).into()))
                }
            }
            Source::Slice { a, lo, hi } => {
                if k < *lo {
                    return Constant::zero();
                }
                if let Some(h) = hi {
                    if k > *h {
                        return Constant::zero();
                    }
                }
                a.coeff_slot(k)
            }
        }
    }

    /// First nonzero term, scanning at most `budget.zero_terms` slots beyond
    /// the known prefix. Series with a known exhaustion bound are scanned in
    /// full (their support is provably finite), so exact zero is decidable
    /// for them regardless of the budget.
    pub fn leading_term(&self, budget: &Budget) -> LeadingTerm {
        let inner = &*self.inner;
        match inner.end {
            Some(e) => {
                for k in inner.start..=e {
                    let c = self.coeff_slot(k);
                    if !c.is_zero() {
                        return LeadingTerm::Term {
                            exponent: Exponent::new(k, inner.ram as i64),
                            coeff: c,
                        };
                    }
                }
                LeadingTerm::ExactZero
            }
            None => {
                for i in 0..budget.zero_terms {
                    let k = inner.start + i as i64;
                    let c = self.coeff_slot(k);
                    if !c.is_zero() {
                        return LeadingTerm::Term {
                            exponent: Exponent::new(k, inner.ram as i64),
                            coeff: c,
                        };
                    }
                }
                LeadingTerm::Undecided { scanned: budget.zero_terms }
            }
        }
    }

    /// Factor as coeff * y^p * unit. The leading coefficient must be a plain
    /// rational (a unit of the constant ring) for the normalization to stay
    /// inside the ring.
    pub fn factor_leading(&self, budget: &Budget) -> Result<Factored> {
        match self.leading_term(budget) {
            LeadingTerm::ExactZero => Err(Error::ExactZero),
            LeadingTerm::Undecided { scanned } => Err(Error::LeadingTermUndecided { scanned }),
            LeadingTerm::Term { exponent, coeff } => {
                let c = coeff.as_rational().ok_or(Error::NonConstantLeading)?;
                debug_assert!(!c.is_zero());
                let inv = Constant::from_rational(c.recip());
                let normalized = Self::mul_unchecked(
                    self,
                    &Self::monomial(-exponent, inv),
                );
                // Slots below 0 are certified zero by the leading-term scan.
                let unit = normalized.slice(0, None);
                Ok(Factored { coeff, exponent, unit: Unit(unit) })
            }
        }
    }

    /// Multiplicative inverse. The leading coefficient must be rational.
    pub fn inv(&self, budget: &Budget) -> Result<Self> {
        match self.leading_term(budget) {
            LeadingTerm::ExactZero => Err(Error::ExactZero),
            LeadingTerm::Undecided { scanned } => Err(Error::LeadingTermUndecided { scanned }),
            LeadingTerm::Term { exponent, coeff } => {
                let c = coeff.as_rational().ok_or(Error::NonConstantLeading)?;
                let lead = *exponent.numer() * (self.inner.ram as i64 / *exponent.denom());
                if let Some(e) = self.inner.end {
                    // Exhausted monomial: the inverse is again a monomial.
                    if self.support_is_single_slot(lead, e) {
                        return Ok(Self::monomial(
                            Exponent::new(-lead, self.inner.ram as i64),
                            Constant::from_rational(c.recip()),
                        ));
                    }
                }
                Ok(Self::from_parts(
                    self.inner.ram,
                    -lead,
                    None,
                    Source::Inv { a: self.clone(), lead, lead_inv: c.recip() },
                ))
            }
        }
    }

    fn support_is_single_slot(&self, lead: i64, end: i64) -> bool {
        for k in (lead + 1)..=end {
            if !self.coeff_slot(k).is_zero() {
                return false;
            }
        }
        true
    }

    /// Rational power. Integer exponents need no leading-term analysis when
    /// nonnegative; fractional exponents factor the leading term, which must
    /// be a positive rational with a rational q-th power.
    pub fn pow_rational(&self, q: Exponent, budget: &Budget) -> Result<Self> {
        if q.is_zero() {
            return Ok(Self::one());
        }
        if q.denom().is_one() {
            let n = *q.numer();
            if n > 0 {
                return Ok(self.powi(n as u64));
            }
            let inv = self.inv(budget)?;
            return Ok(inv.powi(n.unsigned_abs()));
        }
        let f = self.factor_leading(budget)?;
        let c = f.coeff.as_rational().expect("factor_leading yields rational");
        if !c.is_positive() {
            return Err(Error::NegativeLeading);
        }
        let croot = rational_pow(&c, q).ok_or(Error::NonRationalRadicand)?;
        let new_exp = f.exponent * q;
        let ram = Self::check_ram(
            lcm_u32(self.inner.ram, *new_exp.denom() as u32) as u64,
            budget,
        )?;
        let _ = ram;
        let eps = f.unit.fractional_part();
        let powed = Self::from_parts(
            eps.inner.ram,
            0,
            None,
            Source::PowUnit { eps: UnitPowers::new(eps), q: exponent_to_rat(q) },
        );
        Ok(Self::mul_unchecked(
            &Self::monomial(new_exp, Constant::from_rational(croot)),
            &powed,
        ))
    }

    fn powi(&self, n: u64) -> Self {
        if n == 0 {
            return Self::one();
        }
        let mut base = self.clone();
        let mut n = n;
        let mut acc: Option<Self> = None;
        loop {
            if n & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => Self::mul_unchecked(&a, &base),
                });
            }
            n >>= 1;
            if n == 0 {
                break;
            }
            base = Self::mul_unchecked(&base, &base);
        }
        acc.unwrap()
    }

    /// Logarithm of an order-zero series with positive rational leading
    /// coefficient c: returns (log c over prime atoms, log(1 + eps/c)).
    pub fn log_unit(&self, budget: &Budget) -> Result<(Constant, Self)> {
        let f = self.factor_leading(budget)?;
        if !f.exponent.is_zero() {
            return Err(Error::NonZeroOrder);
        }
        let c = f.coeff.as_rational().ok_or(Error::NonConstantLeading)?;
        if !c.is_positive() {
            return Err(Error::NonPositiveLeading);
        }
        let log_c = Constant::log_of_rational(&c)?;
        let eps = f.unit.fractional_part();
        let series = Self::from_parts(
            eps.inner.ram,
            eps.inner.start.max(1),
            if eps.inner.end == Some(eps.inner.start - 1) { Some(0) } else { None },
            Source::LogUnit { eps: UnitPowers::new(eps) },
        );
        Ok((log_c, series))
    }

    /// First `max_terms` nonzero terms. Scanning stops early when the
    /// support is exhausted, or when `budget.zero_terms` consecutive zero
    /// slots pass without a find (unbounded supports only).
    pub fn truncate(&self, max_terms: usize, budget: &Budget) -> Vec<(Exponent, Constant)> {
        let inner = &*self.inner;
        let mut out = Vec::new();
        if max_terms == 0 {
            return out;
        }
        let mut k = inner.start;
        let mut zero_run = 0u32;
        loop {
            if let Some(e) = inner.end {
                if k > e {
                    break;
                }
            } else if zero_run >= budget.zero_terms {
                break;
            }
            let c = self.coeff_slot(k);
            if c.is_zero() {
                zero_run += 1;
            } else {
                zero_run = 0;
                out.push((Exponent::new(k, inner.ram as i64), c));
                if out.len() == max_terms {
                    break;
                }
            }
            k += 1;
        }
        out
    }

    /// All nonzero terms with exponent <= bound: a total, exact scan over a
    /// bounded grid range.
    pub fn terms_up_to(&self, bound: Exponent) -> Vec<(Exponent, Constant)> {
        let inner = &*self.inner;
        // Convert the bound to this grid, rounding down.
        let hi = {
            let num = *bound.numer() as i128 * inner.ram as i128;
            let den = *bound.denom() as i128;
            num.div_euclid(den).clamp(i64::MIN as i128, i64::MAX as i128) as i64
        };
        let top = match inner.end {
            Some(e) => e.min(hi),
            None => hi,
        };
        let mut out = Vec::new();
        for k in inner.start..=top {
            let c = self.coeff_slot(k);
            if !c.is_zero() {
                out.push((Exponent::new(k, inner.ram as i64), c));
            }
        }
        out
    }
}

fn div_floor(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

impl core::fmt::Debug for PuiseuxSeries {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("PuiseuxSeries")
            .field("ram", &self.inner.ram)
            .field("start", &self.inner.start)
            .field("end", &self.inner.end)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_of;

    fn b() -> Budget {
        Budget::default()
    }

    fn ci(n: i64) -> Constant {
        Constant::from_integer(n)
    }

    fn cr(n: i64, d: i64) -> Constant {
        Constant::from_rational(rat_of(n, d))
    }

    fn e(n: i64, d: i64) -> Exponent {
        Exponent::new(n, d)
    }

    /// Independent oracle: long division of 1 by (1 - y), integer coefficients.
    fn geometric_oracle(n: usize) -> Vec<i64> {
        let mut rem = alloc::vec![0i64; n + 1];
        rem[0] = 1;
        let mut out = Vec::new();
        for i in 0..n {
            let q = rem[i];
            out.push(q);
            rem[i + 1] += q; // bring down the (1 - y) multiple
        }
        out
    }

    fn one_plus_y() -> PuiseuxSeries {
        PuiseuxSeries::from_terms(&[(e(0, 1), ci(1)), (e(1, 1), ci(1))]).unwrap()
    }

    fn one_minus_y() -> PuiseuxSeries {
        PuiseuxSeries::from_terms(&[(e(0, 1), ci(1)), (e(1, 1), ci(-1))]).unwrap()
    }

    #[test]
    fn add_and_mul_basics() {
        // (1 + y) + (-1 + y) = 2y
        let a = one_plus_y();
        let bseries =
            PuiseuxSeries::from_terms(&[(e(0, 1), ci(-1)), (e(1, 1), ci(1))]).unwrap();
        let sum = a.add(&bseries, &b()).unwrap();
        assert_eq!(sum.truncate(4, &b()), alloc::vec![(e(1, 1), ci(2))]);

        // (1 - y)(1 + y) = 1 - y^2
        let prod = one_minus_y().mul(&one_plus_y(), &b()).unwrap();
        assert_eq!(
            prod.truncate(4, &b()),
            alloc::vec![(e(0, 1), ci(1)), (e(2, 1), ci(-1))]
        );

        // y^(1/2) * y^(1/3) = y^(5/6), ramification 6
        let ya = PuiseuxSeries::monomial(e(1, 2), ci(1));
        let yb = PuiseuxSeries::monomial(e(1, 3), ci(1));
        let p = ya.mul(&yb, &b()).unwrap();
        assert_eq!(p.ramification(), 6);
        assert_eq!(p.truncate(2, &b()), alloc::vec![(e(5, 6), ci(1))]);
    }

    #[test]
    fn inversion_matches_long_division() {
        let inv = one_minus_y().inv(&b()).unwrap();
        let oracle = geometric_oracle(8);
        let got = inv.truncate(8, &b());
        for (i, (exp, c)) in got.iter().enumerate() {
            assert_eq!(*exp, e(i as i64, 1));
            assert_eq!(*c, ci(oracle[i]));
        }

        // inv(y) = y^-1 stays finite
        let iy = PuiseuxSeries::y().inv(&b()).unwrap();
        assert!(iy.is_exhausted());
        assert_eq!(iy.truncate(3, &b()), alloc::vec![(e(-1, 1), ci(1))]);

        // inv(2) = 1/2
        let two = PuiseuxSeries::constant(ci(2));
        assert_eq!(two.inv(&b()).unwrap().truncate(2, &b()), alloc::vec![(e(0, 1), cr(1, 2))]);
    }

    #[test]
    fn mul_by_inverse_is_one() {
        let cases = [
            one_minus_y(),
            PuiseuxSeries::from_terms(&[(e(0, 1), ci(2)), (e(1, 1), ci(3)), (e(3, 1), ci(-1))])
                .unwrap(),
            PuiseuxSeries::from_terms(&[(e(-2, 1), ci(1)), (e(0, 1), ci(5))]).unwrap(),
        ];
        for a in cases {
            let prod = a.mul(&a.inv(&b()).unwrap(), &b()).unwrap();
            assert_eq!(prod.truncate(32, &b()), alloc::vec![(e(0, 1), ci(1))]);
        }
    }

    #[test]
    fn exact_zero_and_budget_semantics() {
        // (1 + y) - 1 - y cancels with known finite support
        let s = one_plus_y()
            .sub(&PuiseuxSeries::one(), &b())
            .unwrap()
            .sub(&PuiseuxSeries::y(), &b())
            .unwrap();
        assert_eq!(s.leading_term(&b()), LeadingTerm::ExactZero);

        // y^3 - y^2 leads with (2, -1)
        let t = PuiseuxSeries::from_terms(&[(e(3, 1), ci(1)), (e(2, 1), ci(-1))]).unwrap();
        assert_eq!(
            t.leading_term(&b()),
            LeadingTerm::Term { exponent: e(2, 1), coeff: ci(-1) }
        );

        // an unbounded all-zero stream: inv(1-y) - inv(1-y) has no exhaustion
        // flag, so a zero budget must answer Undecided
        let g = one_minus_y().inv(&b()).unwrap();
        let z = g.sub(&g, &b()).unwrap();
        assert!(!z.is_exhausted());
        assert_eq!(
            z.leading_term(&b().with_zero_terms(0)),
            LeadingTerm::Undecided { scanned: 0 }
        );
        // and stays undecided under any finite budget
        assert_eq!(
            z.leading_term(&b().with_zero_terms(17)),
            LeadingTerm::Undecided { scanned: 17 }
        );
    }

    #[test]
    fn pow_rational_cases() {
        // (4y)^(1/2) = 2 y^(1/2)
        let fy = PuiseuxSeries::monomial(e(1, 1), ci(4));
        let r = fy.pow_rational(e(1, 2), &b()).unwrap();
        assert_eq!(r.truncate(3, &b()), alloc::vec![(e(1, 2), ci(2))]);

        // (1 + y)^(1/2) = 1 + y/2 - y^2/8 + y^3/16 - ...
        let s = one_plus_y().pow_rational(e(1, 2), &b()).unwrap();
        let got = s.truncate(4, &b());
        assert_eq!(
            got,
            alloc::vec![
                (e(0, 1), ci(1)),
                (e(1, 1), cr(1, 2)),
                (e(2, 1), cr(-1, 8)),
                (e(3, 1), cr(1, 16)),
            ]
        );

        // (y^2)^(-3) = y^-6
        let y2 = PuiseuxSeries::monomial(e(2, 1), ci(1));
        let p = y2.pow_rational(e(-3, 1), &b()).unwrap();
        assert_eq!(p.truncate(2, &b()), alloc::vec![(e(-6, 1), ci(1))]);

        // 2^(1/2) is irrational
        let two = PuiseuxSeries::constant(ci(2));
        assert!(matches!(two.pow_rational(e(1, 2), &b()), Err(Error::NonRationalRadicand)));

        // (-y)^(1/2) has a negative leading coefficient
        let neg_y = PuiseuxSeries::monomial(e(1, 1), ci(-1));
        assert!(matches!(neg_y.pow_rational(e(1, 2), &b()), Err(Error::NegativeLeading)));

        // integer powers of a negative-leading series are fine
        let sq = neg_y.pow_rational(e(2, 1), &b()).unwrap();
        assert_eq!(sq.truncate(2, &b()), alloc::vec![(e(2, 1), ci(1))]);
    }

    #[test]
    fn pow_additivity_in_exponent() {
        let a = PuiseuxSeries::from_terms(&[(e(0, 1), ci(1)), (e(1, 1), ci(2)), (e(2, 1), ci(1))])
            .unwrap();
        for (q1, q2) in [(e(1, 2), e(1, 2)), (e(1, 3), e(-1, 2)), (e(2, 1), e(1, 2))] {
            let lhs = a.pow_rational(q1 + q2, &b()).unwrap();
            let rhs = a
                .pow_rational(q1, &b())
                .unwrap()
                .mul(&a.pow_rational(q2, &b()).unwrap(), &b())
                .unwrap();
            let diff = lhs.sub(&rhs, &b()).unwrap();
            for (_, c) in diff.truncate(16, &b().with_zero_terms(16 * 6)) {
                assert!(c.is_zero(), "pow additivity violated");
            }
        }
    }

    #[test]
    fn log_unit_cases() {
        // log(1 + y) = y - y^2/2 + y^3/3 - ... (Mercator)
        let (c, s) = one_plus_y().log_unit(&b()).unwrap();
        assert!(c.is_zero());
        assert_eq!(
            s.truncate(3, &b()),
            alloc::vec![(e(1, 1), ci(1)), (e(2, 1), cr(-1, 2)), (e(3, 1), cr(1, 3))]
        );

        // log 2 = L2 with zero series part
        let (c2, s2) = PuiseuxSeries::constant(ci(2)).log_unit(&b()).unwrap();
        assert_eq!(c2, Constant::atom(2));
        assert!(s2.truncate(3, &b()).is_empty());

        // log(2 + 2y) = L2 + log(1 + y)
        let a = PuiseuxSeries::from_terms(&[(e(0, 1), ci(2)), (e(1, 1), ci(2))]).unwrap();
        let (c3, s3) = a.log_unit(&b()).unwrap();
        assert_eq!(c3, Constant::atom(2));
        assert_eq!(
            s3.truncate(2, &b()),
            alloc::vec![(e(1, 1), ci(1)), (e(2, 1), cr(-1, 2))]
        );

        // order must be zero
        assert!(matches!(PuiseuxSeries::y().log_unit(&b()), Err(Error::NonZeroOrder)));
        // leading coefficient must be positive
        let neg = PuiseuxSeries::constant(ci(-2));
        assert!(matches!(neg.log_unit(&b()), Err(Error::NonPositiveLeading)));
    }

    #[test]
    fn truncate_budgets() {
        let g = one_minus_y().inv(&b()).unwrap();
        assert_eq!(
            g.truncate(3, &b()),
            alloc::vec![(e(0, 1), ci(1)), (e(1, 1), ci(1)), (e(2, 1), ci(1))]
        );
        let five = PuiseuxSeries::constant(ci(5));
        assert_eq!(five.truncate(3, &b()), alloc::vec![(e(0, 1), ci(5))]);
        assert!(PuiseuxSeries::zero().truncate(3, &b()).is_empty());
    }

    #[test]
    fn ramification_cap_enforced() {
        let tight = Budget::default().with_ram_cap(3);
        let ya = PuiseuxSeries::monomial(e(1, 2), ci(1));
        let yb = PuiseuxSeries::monomial(e(1, 3), ci(1));
        match ya.mul(&yb, &tight) {
            Err(Error::RamificationCapExceeded { needed: 6, cap: 3 }) => {}
            other => panic!("expected cap error, got {:?}", other.map(|s| s.truncate(1, &b()))),
        }
    }

    #[test]
    fn memoization_is_deterministic_across_readers() {
        let s = one_minus_y().inv(&b()).unwrap();
        let s2 = s.clone();
        let t1 = s.truncate(10, &b());
        let t2 = s2.truncate(10, &b());
        assert_eq!(t1, t2);
        // interleaved forcing from two threads sees one consistent stream
        let h1 = {
            let s = s.clone();
            std::thread::spawn(move || s.truncate(24, &Budget::default()))
        };
        let h2 = {
            let s = s.clone();
            std::thread::spawn(move || s.truncate(24, &Budget::default()))
        };
        let r1 = h1.join().unwrap();
        let r2 = h2.join().unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn series_are_send_and_sync() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<PuiseuxSeries>();
        assert_send_sync::<Constant>();
    }
}
