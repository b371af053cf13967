//! Rational-endpoint interval arithmetic with rigorous enclosures of
//! logarithms and rational powers.
//!
//! Endpoints are exact big rationals. Field operations on intervals are
//! therefore exact; width enters only through the transcendental
//! enclosures (`ln_rat`) and root extraction, which are computed to a
//! requested number of bits. After wide operations, endpoints are rounded
//! outward to dyadic rationals so that numerators and denominators stay
//! bounded by the working precision.

use alloc::string::String;
use alloc::string::ToString;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, Zero};

use crate::arith::Rat;

/// A closed interval [lo, hi] with rational endpoints, guaranteed to
/// contain the exact value it encloses.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
}

impl Interval {
    pub fn point(v: Rat) -> Self {
        Interval { lo: v.clone(), hi: v }
    }

    pub fn new(lo: Rat, hi: Rat) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn zero() -> Self {
        Interval::point(Rat::zero())
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rat {
        (&self.lo + &self.hi) / Rat::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, v: &Rat) -> bool {
        self.lo <= *v && *v <= self.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Distance between two intervals; zero when they intersect.
    pub fn gap(&self, other: &Interval) -> Rat {
        if self.intersects(other) {
            Rat::zero()
        } else if self.hi < other.lo {
            &other.lo - &self.hi
        } else {
            &self.lo - &other.hi
        }
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_strictly_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Largest absolute value attained on the interval.
    pub fn abs_sup(&self) -> Rat {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        Interval::new(&self.lo - &other.hi, &self.hi - &other.lo)
    }

    pub fn neg(&self) -> Interval {
        Interval::new(-self.hi.clone(), -self.lo.clone())
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if *c < lo {
                lo = c.clone();
            }
            if *c > hi {
                hi = c.clone();
            }
        }
        Interval::new(lo, hi)
    }

    pub fn scale(&self, r: &Rat) -> Interval {
        if r.is_negative() {
            Interval::new(&self.hi * r, &self.lo * r)
        } else {
            Interval::new(&self.lo * r, &self.hi * r)
        }
    }

    /// None when the divisor interval contains zero.
    pub fn div(&self, other: &Interval) -> Option<Interval> {
        if other.lo.is_positive() || other.hi.is_negative() {
            let inv = Interval::new(other.hi.recip(), other.lo.recip());
            Some(self.mul(&inv))
        } else {
            None
        }
    }

    /// Integer power, handling sign-straddling bases for even exponents.
    pub fn powi(&self, n: i64) -> Option<Interval> {
        if n == 0 {
            return Some(Interval::point(Rat::one()));
        }
        if n < 0 {
            return Interval::point(Rat::one()).div(&self.powi(-n)?);
        }
        let n = n as usize;
        let plo = num_traits::pow(self.lo.clone(), n);
        let phi = num_traits::pow(self.hi.clone(), n);
        if n % 2 == 1 {
            Some(Interval::new(plo, phi))
        } else if !self.lo.is_negative() {
            Some(Interval::new(plo, phi))
        } else if !self.hi.is_positive() {
            Some(Interval::new(phi, plo))
        } else {
            let hi = if plo > phi { plo } else { phi };
            Some(Interval::new(Rat::zero(), hi))
        }
    }

    /// Round endpoints outward to dyadics with about `bits` significant bits.
    pub fn round_out(&self, bits: u32) -> Interval {
        Interval::new(round_dyadic(&self.lo, bits, false), round_dyadic(&self.hi, bits, true))
    }

    /// Decimal rendering of the midpoint, for reports.
    pub fn mid_decimal(&self, digits: usize) -> String {
        rat_to_decimal(&self.mid(), digits)
    }
}

/// floor(log2 |r|) for r != 0.
fn ilog2_abs(r: &Rat) -> i64 {
    let n = r.numer().magnitude().bits() as i64;
    let d = r.denom().magnitude().bits() as i64;
    // 2^(n-d-1) <= |r| < 2^(n-d+1); refine by one comparison.
    let e = n - d;
    let two_e = pow2_rat(e);
    if r.abs() >= two_e {
        e
    } else {
        e - 1
    }
}

fn pow2_rat(e: i64) -> Rat {
    if e >= 0 {
        Rat::from_integer(BigInt::from(1u8) << e as usize)
    } else {
        Rat::new(BigInt::one(), BigInt::from(1u8) << (-e) as usize)
    }
}

/// Round to a dyadic rational with ~`bits` significant bits; `up` selects the
/// rounding direction.
fn round_dyadic(r: &Rat, bits: u32, up: bool) -> Rat {
    if r.is_zero() {
        return Rat::zero();
    }
    let mag = ilog2_abs(r);
    let shift = bits as i64 - mag;
    if shift <= 0 {
        // Already an integer scale; integers are exact enough here.
        return r.clone();
    }
    let scaled = r * pow2_rat(shift);
    let fl = scaled.floor();
    let scaled_int = if up && scaled != fl {
        fl + Rat::one()
    } else {
        fl
    };
    scaled_int * pow2_rat(-shift)
}

/// Decimal string of a rational with a fixed number of fractional digits
/// (truncated toward zero).
pub fn rat_to_decimal(r: &Rat, digits: usize) -> String {
    let neg = r.is_negative();
    let a = r.abs();
    let scale = num_traits::pow(BigInt::from(10u8), digits);
    let scaled = (&a * Rat::from_integer(scale)).floor();
    let s = scaled.to_integer().magnitude().to_string();
    let s = if s.len() <= digits {
        let mut t = String::new();
        for _ in 0..(digits + 1 - s.len()) {
            t.push('0');
        }
        t.push_str(&s);
        t
    } else {
        s
    };
    let (int_part, frac_part) = s.split_at(s.len() - digits);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(int_part);
    if digits > 0 {
        out.push('.');
        out.push_str(frac_part);
    }
    out
}

/// Rigorous enclosure of ln(x) for rational x > 0, with width <= 2^-bits.
///
/// Uses ln x = k ln 2 + ln m for x = m 2^k with m in [1, 2), and the
/// atanh series ln m = 2 atanh((m-1)/(m+1)) whose argument is below 1/3,
/// so the tail is geometrically bounded.
pub fn ln_rat(x: &Rat, bits: u32) -> Interval {
    debug_assert!(x.is_positive());
    let work = bits + 8;
    let mut k: i64 = ilog2_abs(x);
    let mut m = x / pow2_rat(k);
    if m < Rat::one() {
        // ilog2 can land one low on exact powers boundaries.
        k -= 1;
        m = x / pow2_rat(k);
    }
    debug_assert!(m >= Rat::one() && m < Rat::from_integer(BigInt::from(2)));
    let ln_m = atanh_series_ln(&m, work);
    let result = if k == 0 {
        ln_m
    } else {
        let ln2 = ln_two(work);
        ln_m.add(&ln2.scale(&Rat::from_integer(BigInt::from(k))))
    };
    result.round_out(bits + 4)
}

/// ln 2 = 2 atanh(1/3).
fn ln_two(bits: u32) -> Interval {
    atanh_ln_from_z(&Rat::new(BigInt::one(), BigInt::from(3u8)), bits)
}

/// ln m for m in [1, 2) via z = (m-1)/(m+1) in [0, 1/3).
fn atanh_series_ln(m: &Rat, bits: u32) -> Interval {
    let z = (m - Rat::one()) / (m + Rat::one());
    if z.is_zero() {
        return Interval::zero();
    }
    atanh_ln_from_z(&z, bits)
}

/// 2 atanh(z) = 2 (z + z^3/3 + z^5/5 + ...) for 0 < z <= 1/3, enclosed with
/// the exact geometric tail bound.
fn atanh_ln_from_z(z: &Rat, bits: u32) -> Interval {
    let z2 = z * z;
    let target = pow2_rat(-(bits as i64));
    let mut sum = Rat::zero();
    let mut pow = z.clone(); // z^(2n+1)
    let mut n: u64 = 0;
    loop {
        sum += &pow / Rat::from_integer(BigInt::from(2 * n + 1));
        // tail after this term: sum_{j>n} z^(2j+1)/(2j+1)
        //   <= z^(2n+3) / ((2n+3)(1 - z^2))
        pow *= &z2;
        n += 1;
        let tail = &pow / (Rat::from_integer(BigInt::from(2 * n + 1)) * (Rat::one() - &z2));
        if tail < target {
            let two = Rat::from_integer(BigInt::from(2));
            let lo = &sum * &two;
            let hi = (&sum + &tail) * &two;
            return Interval::new(lo, hi).round_out(bits + 4);
        }
    }
}

/// Rigorous enclosure of x^(1/n) for rational x > 0 and n >= 1, width ~2^-bits.
pub fn nth_root_rat(x: &Rat, n: u32, bits: u32) -> Interval {
    debug_assert!(x.is_positive() && n >= 1);
    if n == 1 {
        return Interval::point(x.clone());
    }
    let s = bits as usize + 4;
    // A = floor(x * 2^(n*s)); f = floor(A^(1/n)) gives
    //   f / 2^s <= x^(1/n) < (f+1) / 2^s.
    let scaled = x * pow2_rat((n as i64) * (s as i64));
    let a = scaled.floor().to_integer();
    let a_mag: BigUint = a.magnitude().clone();
    let f = a_mag.nth_root(n);
    let denom = BigUint::one() << s;
    let lo = Rat::new(BigInt::from_biguint(Sign::Plus, f.clone()), BigInt::from_biguint(Sign::Plus, denom.clone()));
    let hi = Rat::new(
        BigInt::from_biguint(Sign::Plus, f + BigUint::one()),
        BigInt::from_biguint(Sign::Plus, denom),
    );
    Interval::new(lo, hi)
}

/// Rigorous enclosure of x^(p/q) for rational x > 0.
pub fn pow_rat(x: &Rat, numer: i64, denom: u32, bits: u32) -> Interval {
    debug_assert!(x.is_positive());
    if numer == 0 {
        return Interval::point(Rat::one());
    }
    let root = nth_root_rat(x, denom, bits + 8);
    let powed = root.powi(numer).expect("positive base");
    powed.round_out(bits + 4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat_from_i64, rat_of};

    fn rat_from_decimal(s: &str) -> Rat {
        // test helper: "0.6931" -> 6931/10^4
        let neg = s.starts_with('-');
        let s = s.trim_start_matches('-');
        let (int, frac) = match s.split_once('.') {
            Some((a, b)) => (a, b),
            None => (s, ""),
        };
        let digits: String = alloc::format!("{int}{frac}");
        let num: BigInt = digits.parse().unwrap();
        let den = num_traits::pow(BigInt::from(10u8), frac.len());
        let r = Rat::new(num, den);
        if neg {
            -r
        } else {
            r
        }
    }

    #[test]
    fn ln_two_and_three_match_reference_digits() {
        // reference: ln 2 = 0.69314718055994530941723..., ln 3 = 1.09861228866810969139525...
        // The true values lie strictly inside these 20-digit brackets, so a
        // 2^-90-wide enclosure must land inside them too.
        let ln2 = ln_rat(&rat_from_i64(2), 96);
        let lo = rat_from_decimal("0.69314718055994530941");
        let hi = rat_from_decimal("0.69314718055994530942");
        assert!(ln2.lo >= lo && ln2.hi <= hi, "ln2 enclosure off: {ln2:?}");
        assert!(ln2.width() < pow2_rat(-90));

        let ln3 = ln_rat(&rat_from_i64(3), 96);
        let lo3 = rat_from_decimal("1.09861228866810969139");
        let hi3 = rat_from_decimal("1.09861228866810969140");
        assert!(ln3.lo >= lo3 && ln3.hi <= hi3, "ln3 enclosure off: {ln3:?}");
        assert!(ln3.width() < pow2_rat(-90));
    }

    #[test]
    fn ln_of_one_is_zero() {
        let e = ln_rat(&rat_from_i64(1), 64);
        assert!(e.contains(&Rat::zero()));
        assert!(e.width() < pow2_rat(-60));
    }

    #[test]
    fn ln_homomorphism_numeric() {
        let a = rat_of(7, 2);
        let b = rat_of(5, 3);
        let lab = ln_rat(&(&a * &b), 80);
        let sum = ln_rat(&a, 80).add(&ln_rat(&b, 80));
        assert!(lab.intersects(&sum));
    }

    #[test]
    fn roots_enclose_true_values() {
        // sqrt(2) = 1.41421356237309504880...
        let r = nth_root_rat(&rat_from_i64(2), 2, 80);
        assert!(r.contains(&rat_from_decimal("1.414213562373095048801688724209698")));
        assert!(r.width() <= pow2_rat(-79));
        // exact case: 4^(1/2)
        let r4 = nth_root_rat(&rat_from_i64(4), 2, 64);
        assert!(r4.contains(&rat_from_i64(2)));
        // 8^(2/3) = 4
        let p = pow_rat(&rat_from_i64(8), 2, 3, 64);
        assert!(p.contains(&rat_from_i64(4)));
        // negative exponent: 4^(-1/2) = 1/2
        let q = pow_rat(&rat_from_i64(4), -1, 2, 64);
        assert!(q.contains(&rat_of(1, 2)));
    }

    #[test]
    fn rounding_is_outward_and_monotone() {
        let v = Interval::new(rat_of(1, 3), rat_of(2, 3));
        let r = v.round_out(32);
        assert!(r.lo <= v.lo && r.hi >= v.hi);
        assert!(r.width() - v.width() < pow2_rat(-28));
        // doubling precision never widens beyond rounding slack
        let r2 = v.round_out(64);
        assert!(r2.width() <= r.width());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(rat_to_decimal(&rat_of(1, 2), 3), "0.500");
        assert_eq!(rat_to_decimal(&rat_of(-22, 7), 4), "-3.1428");
        assert_eq!(rat_to_decimal(&rat_from_i64(3), 2), "3.00");
    }

    #[test]
    fn interval_ops_sound_spot_checks() {
        let a = Interval::new(rat_of(-1, 2), rat_of(3, 2));
        let b = Interval::new(rat_of(2, 1), rat_of(3, 1));
        let c = a.mul(&b);
        assert!(c.contains(&rat_of(-1, 1))); // -1/2 * 2
        assert!(c.contains(&rat_of(9, 2))); // 3/2 * 3
        assert!(a.powi(2).unwrap().contains(&Rat::zero()));
        assert!(a.div(&b).unwrap().contains(&rat_of(-1, 4)));
        assert!(b.div(&a).is_none());
    }
}
