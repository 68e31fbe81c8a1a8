//! Polynomials over F_p for word-size p: arithmetic, distinct-degree and
//! equal-degree (Cantor-Zassenhaus) factorization.

use crate::intarith::{invmod, mulmod};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type FpPoly = Vec<u64>;

fn trim(mut a: FpPoly) -> FpPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn deg(a: &FpPoly) -> isize {
    a.len() as isize - 1
}

/// Reduces integer coefficients modulo p.
pub fn from_ints(c: &[num_bigint::BigInt], p: u64) -> FpPoly {
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    let pb = num_bigint::BigInt::from(p);
    trim(c.iter().map(|v| v.mod_floor(&pb).to_u64().unwrap()).collect())
}

pub fn add(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p).collect())
}

pub fn sub(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p).collect())
}

pub fn mul(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut r = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + mulmod(x, y, p)) % p;
        }
    }
    trim(r)
}

pub fn scale(a: &FpPoly, k: u64, p: u64) -> FpPoly {
    trim(a.iter().map(|&x| mulmod(x, k, p)).collect())
}

pub fn make_monic(a: &FpPoly, p: u64) -> FpPoly {
    match a.last() {
        None => vec![],
        Some(&l) => scale(a, invmod(l, p).expect("nonzero leading coefficient"), p),
    }
}

pub fn divrem(a: &FpPoly, b: &FpPoly, p: u64) -> (FpPoly, FpPoly) {
    assert!(!b.is_empty(), "division by zero polynomial");
    if a.len() < b.len() {
        return (vec![], a.clone());
    }
    let db = b.len() - 1;
    let inv = invmod(*b.last().unwrap(), p).unwrap();
    let mut r = a.clone();
    let mut q = vec![0u64; a.len() - db];
    for k in (0..q.len()).rev() {
        let t = mulmod(r[k + db], inv, p);
        if t != 0 {
            for (j, &bj) in b.iter().enumerate() {
                r[k + j] = (r[k + j] + p - mulmod(t, bj, p)) % p;
            }
        }
        q[k] = t;
    }
    r.truncate(db);
    (trim(q), trim(r))
}

pub fn rem(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    divrem(a, b, p).1
}

pub fn gcd(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    make_monic(&a, p)
}

pub fn derivative(a: &FpPoly, p: u64) -> FpPoly {
    trim(a.iter().enumerate().skip(1).map(|(i, &x)| mulmod(x, i as u64 % p, p)).collect())
}

/// base^e mod m.
pub fn powmod(base: &FpPoly, mut e: u128, m: &FpPoly, p: u64) -> FpPoly {
    let mut r: FpPoly = rem(&vec![1], m, p);
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            r = rem(&mul(&r, &b, p), m, p);
        }
        b = rem(&mul(&b, &b, p), m, p);
        e >>= 1;
    }
    r
}

pub fn eval(a: &FpPoly, x: u64, p: u64) -> u64 {
    a.iter().rev().fold(0, |acc, &c| (mulmod(acc, x, p) + c) % p)
}

pub fn is_squarefree(f: &FpPoly, p: u64) -> bool {
    let d = derivative(f, p);
    if d.is_empty() {
        return deg(f) <= 0;
    }
    deg(&gcd(f, &d, p)) == 0
}

/// Distinct-degree factorization of a monic squarefree f: (degree, product of factors of that degree).
pub fn ddf(f: &FpPoly, p: u64) -> Vec<(usize, FpPoly)> {
    let mut out = Vec::new();
    let mut f = make_monic(f, p);
    let x: FpPoly = vec![0, 1];
    let mut h = rem(&x, &f, p);
    let mut d = 0;
    while deg(&f) >= 2 * (d as isize + 1) {
        d += 1;
        h = powmod(&h, p as u128, &f, p);
        let g = gcd(&f, &sub(&h, &x, p), p);
        if deg(&g) > 0 {
            out.push((d, g.clone()));
            f = divrem(&f, &g, p).0;
            h = rem(&h, &f, p);
        }
    }
    if deg(&f) > 0 {
        out.push((deg(&f) as usize, f));
    }
    out
}

/// Residue degrees of the irreducible factors of a squarefree f, sorted.
pub fn degree_pattern(f: &FpPoly, p: u64) -> Vec<usize> {
    let mut v = Vec::new();
    for (d, g) in ddf(f, p) {
        for _ in 0..(deg(&g) as usize / d) {
            v.push(d);
        }
    }
    v.sort();
    v
}

fn edf(g: &FpPoly, d: usize, p: u64, rng: &mut ChaCha8Rng, out: &mut Vec<FpPoly>) {
    let n = deg(g) as usize;
    if n == d {
        out.push(make_monic(g, p));
        return;
    }
    loop {
        let a: FpPoly = trim((0..n).map(|_| rng.gen_range(0..p)).collect());
        if deg(&a) < 1 {
            continue;
        }
        let b = if p == 2 {
            // trace map a + a^2 + ... + a^(2^(d-1))
            let mut t = a.clone();
            let mut s = a.clone();
            for _ in 1..d {
                t = rem(&mul(&t, &t, p), g, p);
                s = add(&s, &t, p);
            }
            s
        } else {
            // a^((p^d - 1)/2) = (a * a^p * ... * a^(p^(d-1)))^((p - 1)/2)
            let mut t = a.clone();
            let mut norm = a.clone();
            for _ in 1..d {
                t = powmod(&t, p as u128, g, p);
                norm = rem(&mul(&norm, &t, p), g, p);
            }
            sub(&powmod(&norm, ((p - 1) / 2) as u128, g, p), &vec![1], p)
        };
        let h = gcd(g, &b, p);
        if deg(&h) > 0 && deg(&h) < n as isize {
            let q = divrem(g, &h, p).0;
            edf(&h, d, p, rng, out);
            edf(&q, d, p, rng, out);
            return;
        }
    }
}

/// Monic irreducible factors of a squarefree polynomial, sorted by (degree, coefficients).
pub fn factor_squarefree(f: &FpPoly, p: u64) -> Vec<FpPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ p);
    let mut out = Vec::new();
    for (d, g) in ddf(f, p) {
        edf(&g, d, p, &mut rng, &mut out);
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.iter().rev().cmp(b.iter().rev())));
    out
}
