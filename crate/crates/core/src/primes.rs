//! Deterministic primality and factorization of elementary divisors.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const TRIAL_LIMIT: u64 = 1_000_000;
// deterministic witness set for all n < 2^64
const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
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

/// Miller–Rabin with a witness set that is exact below 2^64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn require_prime(p: u64) -> Result<u64> {
    if is_prime(p) {
        Ok(p)
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Modular inverse of `a` modulo the prime `p`.
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

pub(crate) fn mul_mod_p(a: u64, b: u64, p: u64) -> u64 {
    mul_mod(a, b, p)
}

/// Distinct prime factors of `|n|`; empty for 0 and ±1.
pub fn prime_factors(n: &BigInt) -> Result<BTreeSet<u64>> {
    let mut out = BTreeSet::new();
    let mut rest = n.abs();
    if rest.is_zero() {
        return Ok(out);
    }
    let mut d = 2u64;
    while d <= TRIAL_LIMIT && !rest.is_one() {
        let big_d = BigInt::from(d);
        if (&big_d * &big_d) > rest {
            break;
        }
        if rest.is_multiple_of(&big_d) {
            out.insert(d);
            while rest.is_multiple_of(&big_d) {
                rest /= &big_d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest.is_one() {
        return Ok(out);
    }
    let cofactor = rest.to_u64().ok_or_else(|| Error::FactorizationTooLarge(rest.to_string()))?;
    split_u64(cofactor, &mut out);
    Ok(out)
}

fn split_u64(n: u64, out: &mut BTreeSet<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.insert(n);
        return;
    }
    let f = pollard_rho(n);
    split_u64(f, out);
    split_u64(n / f, out);
}

fn pollard_rho(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    for c in 1u64.. {
        let step = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = step(x);
            y = step(step(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!("pollard rho always finds a factor of a composite")
}
