//! Integer utilities: primality, factorization, modular arithmetic, sieves.

use crate::error::{Error, Result};
use crate::rat::gcd;
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

const SMALL_PRIMES: [u64; 24] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89];

#[inline]
pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

/// Inverse of a modulo m, if it exists.
pub fn invmod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES[..12] {
        if n % p == 0 {
            return n == p;
        }
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'witness: for &a in &SMALL_PRIMES[..12] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin with the first 24 prime bases; deterministic below 2^64.
pub fn is_prime(n: &BigInt) -> bool {
    if n.sign() != Sign::Plus {
        return false;
    }
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    for &p in &SMALL_PRIMES {
        if (n % p).is_zero() {
            return false;
        }
    }
    let nm1: BigInt = n - 1;
    let s = nm1.trailing_zeros().unwrap();
    let d = &nm1 >> s;
    'witness: for &a in &SMALL_PRIMES {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return vec![];
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u64).collect()
}

pub fn next_prime_u64(n: u64) -> u64 {
    let mut c = n.max(2);
    while !is_prime_u64(c) {
        c += 1;
    }
    c
}

fn rho_u64(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    for c in 1u64.. {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let (mut y, mut r, mut q, m) = (2u64, 1u64, 1u64, 128u64);
        let mut g = 1;
        let mut x = 0;
        let mut ys = 0;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mulmod(q, x.abs_diff(y), n);
                }
                g = num_integer::gcd(q, n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = num_integer::gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

fn rho_big(n: &BigInt, budget: &mut u64) -> Option<BigInt> {
    for c in 1u64..64 {
        let c = BigInt::from(c);
        let f = |x: &BigInt| (x * x + &c) % n;
        let (mut y, mut r, mut q) = (BigInt::from(2), 1u64, BigInt::one());
        let m = 128u64;
        let mut g = BigInt::one();
        let mut x = BigInt::zero();
        let mut ys = BigInt::zero();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    q = (&q * (&x - &y).abs()) % n;
                }
                g = gcd(&q, n);
                k += m;
                if *budget < m {
                    return None;
                }
                *budget -= m;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                g = gcd(&(&x - &ys).abs(), n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
    }
    None
}

fn split_into(n: BigInt, out: &mut Vec<BigInt>, budget: &mut u64) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    if is_prime(&n) {
        out.push(n);
        return Ok(());
    }
    if let Some(v) = n.to_u64() {
        let d = rho_u64(v);
        split_into(BigInt::from(d), out, budget)?;
        return split_into(BigInt::from(v / d), out, budget);
    }
    let r = n.sqrt();
    if &r * &r == n {
        split_into(r.clone(), out, budget)?;
        return split_into(r, out, budget);
    }
    match rho_big(&n, budget) {
        Some(d) => {
            let q = &n / &d;
            split_into(d, out, budget)?;
            split_into(q, out, budget)
        }
        None => Err(Error::FactorizationBudget(n.to_string())),
    }
}

/// Prime factorization of |n| as sorted (prime, exponent) pairs. n = 0 has no factorization.
pub fn factor(n: &BigInt) -> Result<Vec<(BigInt, u32)>> {
    let mut m = n.abs();
    if m.is_zero() {
        return Err(Error::InvalidInput("cannot factor zero".into()));
    }
    let mut primes: Vec<BigInt> = Vec::new();
    let mut p = 2u64;
    while p < 10_000 {
        if m.is_one() {
            break;
        }
        while (&m % p).is_zero() {
            primes.push(BigInt::from(p));
            m /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut budget = 50_000_000u64;
    split_into(m, &mut primes, &mut budget)?;
    primes.sort();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    for q in primes {
        match out.last_mut() {
            Some((r, e)) if *r == q => *e += 1,
            _ => out.push((q, 1)),
        }
    }
    Ok(out)
}

/// Exponent of the prime p in the nonzero integer n.
pub fn ord_p(n: &BigInt, p: &BigInt) -> u64 {
    assert!(!n.is_zero());
    let mut n = n.clone();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return k;
        }
        n = q;
        k += 1;
    }
}

pub fn ord_p_u64(mut n: u64, p: u64) -> u32 {
    let mut k = 0;
    while n != 0 && n % p == 0 {
        n /= p;
        k += 1;
    }
    k
}

/// Inverse of a modulo m for arbitrary integers.
pub fn invmod_big(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let (g, s, _) = crate::rat::ext_gcd(&a.mod_floor(m), m);
    if g.is_one() {
        Some(s.mod_floor(m))
    } else {
        None
    }
}

pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

pub fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_mixed_sizes() {
        let n = BigInt::from(2u64.pow(5)) * BigInt::from(1_000_000_007u64) * BigInt::from(998_244_353u64) * 49;
        let f = factor(&n).unwrap();
        let want: Vec<(BigInt, u32)> = vec![(2.into(), 5), (7.into(), 2), (998_244_353.into(), 1), (1_000_000_007.into(), 1)];
        assert_eq!(f, want);
        let big = BigInt::from(4_294_967_311u64) * BigInt::from(4_294_967_357u64) * BigInt::from(18_446_744_073_709_551_557u64);
        let f = factor(&big).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.iter().map(|(p, e)| num_traits::pow(p.clone(), *e as usize)).product::<BigInt>(), big);
    }

    #[test]
    fn primality_agrees_with_sieve() {
        let ps = primes_up_to(20_000);
        for n in 0..20_000u64 {
            assert_eq!(is_prime_u64(n), ps.binary_search(&n).is_ok(), "n = {n}");
        }
        assert!(is_prime(&BigInt::from(2u32).pow(127u32).checked_sub(&BigInt::one()).unwrap()));
        assert!(!is_prime(&(BigInt::from(2u32).pow(128u32) + 1)));
    }

    #[test]
    fn small_helpers() {
        assert_eq!(euler_phi(12), 4);
        assert_eq!(invmod(3, 7), Some(5));
        assert_eq!(invmod(2, 4), None);
        assert_eq!(ord_p(&BigInt::from(48), &BigInt::from(2)), 4);
        assert!(is_square(&BigInt::from(144)));
    }
}
