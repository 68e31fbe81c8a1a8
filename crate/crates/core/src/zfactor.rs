//! Irreducibility of monic integer polynomials at small degree.
//!
//! Order of attack: square-free part, integer roots, degree patterns modulo
//! several primes, then a combinatorial search over the factors modulo one
//! prime larger than twice the Landau-Mignotte bound.

use crate::error::{Error, Result};
use crate::intarith::{factor, is_prime_u64};
use crate::modp;
use crate::poly::QPoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeSet;

fn divisors_of(n: &BigInt, limit: usize) -> Option<Vec<BigInt>> {
    if n.bits() > 200 {
        return None;
    }
    let fac = factor(n).ok()?;
    let mut divs = vec![BigInt::one()];
    for (p, e) in fac {
        let mut next = Vec::new();
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divs = next;
        if divs.len() > limit {
            return None;
        }
    }
    Some(divs)
}

fn subset_sums(pattern: &[usize]) -> BTreeSet<usize> {
    let mut s = BTreeSet::from([0usize]);
    for &d in pattern {
        let add: Vec<usize> = s.iter().map(|v| v + d).collect();
        s.extend(add);
    }
    s
}

fn exact_div_z(f: &[BigInt], g: &[BigInt]) -> Option<Vec<BigInt>> {
    let fq = QPoly::from_bigints(f);
    let gq = QPoly::from_bigints(g);
    let (q, r) = fq.divrem(&gq);
    if !r.is_zero() {
        return None;
    }
    q.to_ints()
}

/// Searches for a nontrivial monic factor of the monic integer polynomial f.
/// Returns None when f is irreducible over Q.
pub fn find_factor(f: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    let n = f.len() - 1;
    if n <= 1 {
        return Ok(None);
    }
    debug_assert!(f[n].is_one());
    let fq = QPoly::from_bigints(f);
    let g = fq.gcd(&fq.derivative());
    if g.deg() > 0 {
        // g is monic with integer coefficients by Gauss's lemma
        return Ok(Some(g.to_ints().expect("monic factor of monic integer polynomial is integral")));
    }
    if f[0].is_zero() {
        return Ok(Some(vec![BigInt::zero(), BigInt::one()]));
    }
    if let Some(divs) = divisors_of(&f[0], 20_000) {
        for d in divs {
            for r in [d.clone(), -d] {
                if fq.eval(&r.clone().into()).is_zero() {
                    return Ok(Some(vec![-r, BigInt::one()]));
                }
            }
        }
        if n <= 3 {
            return Ok(None);
        }
    }

    let disc = fq.discriminant();
    let mut allowed: BTreeSet<usize> = (0..=n).collect();
    let mut p = 3u64;
    let mut tried = 0;
    while tried < 12 && p < 10_000 {
        if is_prime_u64(p) && !(disc.numer() % p).is_zero() {
            let fp = modp::from_ints(f, p);
            let pat = modp::degree_pattern(&fp, p);
            let sums = subset_sums(&pat);
            allowed = allowed.intersection(&sums).copied().collect();
            tried += 1;
            if allowed.len() == 2 {
                return Ok(None);
            }
        }
        p += 2;
    }

    // coefficient bound for any monic factor
    let norm2: BigInt = f.iter().map(|c| c * c).sum::<BigInt>().sqrt() + 1;
    let bound: BigInt = (BigInt::one() << n) * norm2;
    let need: BigInt = 2 * &bound + 1;
    if need.bits() > 61 {
        return Err(Error::DegreeBudgetExceeded(format!(
            "coefficient bound {} too large for the single-prime factor search",
            bound
        )));
    }
    let mut big = need.to_u64().unwrap() | 1;
    loop {
        if is_prime_u64(big) && !(disc.numer() % big).is_zero() {
            break;
        }
        big += 2;
    }
    let fp = modp::from_ints(f, big);
    let facs = modp::factor_squarefree(&fp, big);
    let r = facs.len();
    let pb = BigInt::from(big);
    let half = BigInt::from(big / 2);
    // subsets in order of size
    for size in 1..=r / 2 {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let d: usize = idx.iter().map(|&i| facs[i].len() - 1).sum();
            if allowed.contains(&d) && d > 0 && d < n {
                let prod = idx.iter().fold(vec![1u64], |acc, &i| modp::mul(&acc, &facs[i], big));
                let lifted: Vec<BigInt> = prod
                    .iter()
                    .map(|&c| {
                        let c = BigInt::from(c);
                        if c > half {
                            c - &pb
                        } else {
                            c
                        }
                    })
                    .collect();
                if lifted.iter().all(|c| c.abs() <= bound) && exact_div_z(f, &lifted).is_some() {
                    return Ok(Some(lifted));
                }
            }
            // next combination
            let mut k = size;
            while k > 0 && idx[k - 1] == r - size + k - 1 {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            idx[k - 1] += 1;
            for j in k..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    Ok(None)
}

/// Factors a monic integer polynomial into monic irreducibles (with multiplicity).
pub fn factor_monic(f: &[BigInt]) -> Result<Vec<Vec<BigInt>>> {
    match find_factor(f)? {
        None => Ok(vec![f.to_vec()]),
        Some(g) => {
            let h = exact_div_z(f, &g).expect("factor divides");
            let mut out = factor_monic(&g)?;
            out.extend(factor_monic(&h)?);
            out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.iter().rev().cmp(b.iter().rev())));
            Ok(out)
        }
    }
}

/// Factors a monic rational polynomial over Q by scaling to a monic integer polynomial.
pub fn factor_over_q(f: &QPoly) -> Result<Vec<QPoly>> {
    let f = f.monic();
    let n = f.deg() as usize;
    // substitute x = y / c with c the lcm of denominators, making c^n f(y/c) monic integral
    let mut c = BigInt::one();
    for v in f.coeffs() {
        c = c.lcm(v.denom());
    }
    let cq = crate::rat::Rat::from(c.clone());
    let scaled: Vec<BigInt> = (0..=n)
        .map(|i| {
            let v = f.coeff(i) * cq.pow((n - i) as i64);
            v.numer().clone()
        })
        .collect();
    let parts = factor_monic(&scaled)?;
    Ok(parts
        .into_iter()
        .map(|g| {
            let d = g.len() - 1;
            // g(c x) / c^d
            QPoly::new((0..=d).map(|i| crate::rat::Rat::from(g[i].clone()) * cq.pow(i as i64 - d as i64)).collect())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn detects_reducible() {
        assert!(find_factor(&z(&[-4, 0, 1])).unwrap().is_some());
        assert!(find_factor(&z(&[-2, 0, 1])).unwrap().is_none());
        // x^4 - 10x^2 + 1 is irreducible but reducible mod every prime
        assert!(find_factor(&z(&[1, 0, -10, 0, 1])).unwrap().is_none());
        // (x^2 + x + 1)(x^2 - 3) has no rational root
        let f = factor_monic(&z(&[-3, -3, -2, 1, 1])).unwrap();
        assert_eq!(f, vec![z(&[-3, 0, 1]), z(&[1, 1, 1])]);
        assert!(find_factor(&z(&[-1, -3, 0, 1])).unwrap().is_none());
    }

    #[test]
    fn factors_over_q() {
        let f = QPoly::new(vec![crate::rat::Rat::frac(-1, 4), 0.into(), 1.into()]);
        let parts = factor_over_q(&f).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].mul(&parts[1]), f);
    }
}
