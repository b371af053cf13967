//! Shared exact-arithmetic helpers: big rationals, prime factorization,
//! exact roots and rational binomial coefficients.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exponents of series terms and power operators: small exact rationals.
pub type Exponent = Ratio<i64>;

/// Coefficient-level rationals: exact and unbounded.
pub type Rat = BigRational;

pub fn rat_from_i64(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_of(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn exponent_to_rat(e: Exponent) -> Rat {
    Rat::new(BigInt::from(*e.numer()), BigInt::from(*e.denom()))
}

/// Largest prime checked by trial division before switching to Pollard rho.
const TRIAL_LIMIT: u64 = 1 << 16;

/// Deterministic Miller-Rabin for u64 (valid for all 64-bit inputs with
/// these witnesses).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Pollard rho with Brent cycle detection; `n` must be composite, odd and
/// not a prime power handled elsewhere. Returns a nontrivial factor.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        let f = |v: u64| (mul_mod(v, v, n) + c) % n;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Full prime factorization of a u64 ≥ 1, exponents collected, primes ascending.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    let push = |p: u64, out: &mut Vec<(u64, u32)>| {
        match out.iter_mut().find(|(q, _)| *q == p) {
            Some((_, e)) => *e += 1,
            None => out.push((p, 1)),
        }
    };
    let mut p = 2u64;
    while p * p <= n && p <= TRIAL_LIMIT {
        while n % p == 0 {
            push(p, &mut out);
            n /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    // Remaining cofactor: prime, or composite with large factors.
    let mut stack: Vec<u64> = Vec::new();
    if n > 1 {
        stack.push(n);
    }
    while let Some(m) = stack.pop() {
        if is_prime_u64(m) {
            push(m, &mut out);
        } else {
            let d = pollard_rho(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    out.sort_unstable_by_key(|&(q, _)| q);
    out
}

/// Factors a positive BigUint whose prime factors all fit in u64.
/// Returns None when a cofactor is too large to factor here.
pub fn factor_biguint(n: &BigUint) -> Option<Vec<(u64, u32)>> {
    if n.is_zero() {
        return None;
    }
    match n.to_u64() {
        Some(v) => Some(factor_u64(v)),
        None => {
            // Peel small factors, then insist the rest fits in u64.
            let mut n = n.clone();
            let mut out: Vec<(u64, u32)> = Vec::new();
            let mut p = 2u64;
            while p <= TRIAL_LIMIT {
                let bp = BigUint::from(p);
                while (&n % &bp).is_zero() {
                    match out.iter_mut().find(|(q, _)| *q == p) {
                        Some((_, e)) => *e += 1,
                        None => out.push((p, 1)),
                    }
                    n /= &bp;
                }
                if let Some(v) = n.to_u64() {
                    let mut rest = factor_u64(v);
                    out.append(&mut rest);
                    // Merge duplicates that can appear at the boundary.
                    out.sort_unstable_by_key(|&(q, _)| q);
                    let mut merged: Vec<(u64, u32)> = Vec::new();
                    for (q, e) in out {
                        match merged.last_mut() {
                            Some((lq, le)) if *lq == q => *le += e,
                            _ => merged.push((q, e)),
                        }
                    }
                    return Some(merged);
                }
                p += if p == 2 { 1 } else { 2 };
            }
            None
        }
    }
}

/// Exact n-th root of a nonnegative BigInt if it is a perfect power.
pub fn exact_nth_root(v: &BigInt, n: u32) -> Option<BigInt> {
    if v.is_negative() {
        return None;
    }
    let r = v.nth_root(n);
    if num_traits::pow(r.clone(), n as usize) == *v {
        Some(r)
    } else {
        None
    }
}

/// c^q for rational c > 0 and rational q, when the result is rational.
/// `None` when the radicand is irrational (e.g. 2^(1/2)).
pub fn rational_pow(c: &Rat, q: Exponent) -> Option<Rat> {
    debug_assert!(c.is_positive() || q.denom().is_one());
    let n = *q.numer();
    let d = *q.denom() as u32;
    let root = if d == 1 {
        c.clone()
    } else {
        let rn = exact_nth_root(c.numer(), d)?;
        let rd = exact_nth_root(c.denom(), d)?;
        Rat::new(rn, rd)
    };
    let mag = num_traits::pow(root, n.unsigned_abs() as usize);
    if n >= 0 {
        Some(mag)
    } else if mag.is_zero() {
        None
    } else {
        Some(mag.recip())
    }
}

/// Generalized binomial coefficients C(q, 0..=n) for rational q.
pub fn binomial_row(q: &Rat, n: usize) -> Vec<Rat> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = Rat::one();
    out.push(acc.clone());
    for j in 1..=n {
        let factor = (q - rat_from_i64(j as i64 - 1)) / rat_from_i64(j as i64);
        acc *= factor;
        out.push(acc.clone());
    }
    out
}

/// lcm of two ramifications.
pub fn lcm_u32(a: u32, b: u32) -> u32 {
    (a as u64).lcm(&(b as u64)) as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_small_and_mixed() {
        assert_eq!(factor_u64(1), vec![]);
        assert_eq!(factor_u64(8), vec![(2, 3)]);
        assert_eq!(factor_u64(360), vec![(2, 3), (3, 2), (5, 1)]);
        // product of two primes beyond the trial limit
        let n = 1_000_003u64 * 1_000_033u64;
        assert_eq!(factor_u64(n), vec![(1_000_003, 1), (1_000_033, 1)]);
    }

    #[test]
    fn primality_spot_checks() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(97));
        assert!(is_prime_u64(1_000_003));
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(561)); // Carmichael
        assert!(!is_prime_u64(1_000_005));
    }

    #[test]
    fn rational_pow_exactness() {
        let four = rat_from_i64(4);
        assert_eq!(
            rational_pow(&four, Exponent::new(1, 2)),
            Some(rat_from_i64(2))
        );
        let two = rat_from_i64(2);
        assert_eq!(rational_pow(&two, Exponent::new(1, 2)), None);
        let nine_fourths = rat_of(9, 4);
        assert_eq!(
            rational_pow(&nine_fourths, Exponent::new(-1, 2)),
            Some(rat_of(2, 3))
        );
        assert_eq!(
            rational_pow(&rat_of(27, 8), Exponent::new(2, 3)),
            Some(rat_of(9, 4))
        );
    }

    #[test]
    fn binomial_row_matches_hand_values() {
        // (1+y)^(1/2): 1, 1/2, -1/8, 1/16, -5/128
        let row = binomial_row(&rat_of(1, 2), 4);
        assert_eq!(row[0], rat_from_i64(1));
        assert_eq!(row[1], rat_of(1, 2));
        assert_eq!(row[2], rat_of(-1, 8));
        assert_eq!(row[3], rat_of(1, 16));
        assert_eq!(row[4], rat_of(-5, 128));
    }
}
