//! A Diophantine model of the integers through valuations of x([ℓ_i]P) - x(P).

use crate::elliptic::{check_model_hypotheses, model_modulus, padic_xdiff_ord, CurvePoint, EllipticCurve};
use crate::error::{Error, Result};
use crate::intarith::{factor, is_prime_u64};
use num_bigint::BigInt;
use serde::Serialize;

/// n = 2^k + k^2 for some k >= 1.
pub fn in_b(n: u64) -> bool {
    (1..64u32).map(|k| (1u128 << k) + (k as u128) * (k as u128)).take_while(|&v| v <= n as u128).any(|v| v == n as u128)
}

/// The constraints on ℓ_i, checked by factoring (ℓ - 1)/M.
pub fn ell_constraints(m: u64, p: u64, q: u64, i: u32, ell: u64, in_set: &dyn Fn(u64) -> bool) -> Result<bool> {
    if !is_prime_u64(ell) || (ell - 1) % m != 0 {
        return Ok(false);
    }
    let k = BigInt::from((ell - 1) / m);
    let f = factor(&k)?;
    let e = |t: u64| f.iter().find(|(r, _)| r == &BigInt::from(t)).map_or(0, |(_, e)| *e);
    Ok(e(p) == i && (e(q) > 0) == in_set(i as u64))
}

/// For i = 1..=count the least prime ℓ ≡ 1 mod M p^i with p^{i+1} ∤ (ℓ-1)/M and
/// q | (ℓ-1)/M exactly when i is in the set. `budget` caps the candidates per i.
pub fn ell_sequence_gen(
    m: u64,
    p: u64,
    q: u64,
    count: u32,
    in_set: &dyn Fn(u64) -> bool,
    budget: u64,
) -> Result<Vec<u64>> {
    if p == q || m == 0 {
        return Err(Error::InvalidInput("need distinct primes and a positive modulus".into()));
    }
    let mut out = Vec::new();
    for i in 1..=count {
        let step = p.checked_pow(i).and_then(|v| v.checked_mul(m)).ok_or(Error::SieveBudgetExhausted)?;
        let want_q = in_set(i as u64);
        let mut found = None;
        for t in 1..=budget {
            // ℓ - 1 = step·t, so (ℓ-1)/M = p^i t
            if t % p == 0 || (t % q == 0) != want_q {
                continue;
            }
            let Some(ell) = step.checked_mul(t).and_then(|v| v.checked_add(1)) else { break };
            if is_prime_u64(ell) {
                found = Some(ell);
                break;
            }
        }
        out.push(found.ok_or(Error::SieveBudgetExhausted)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelRow {
    pub i: u32,
    pub ell: u64,
    pub ord_p: i64,
    pub ord_q: i64,
    pub in_b: bool,
    pub identity_holds: bool,
    pub b_predicate_holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelReport {
    pub big_m: u64,
    pub c: i64,
    pub c_q: i64,
    pub rows: Vec<ModelRow>,
    pub addition_checked: u64,
    pub addition_failed: Vec<(u32, u32, u32)>,
    pub holds: bool,
}

/// c = ord_p(x_{M+1} - x_1); checks ord_p(x_{ℓ_i} - x_1) = c + i, the addition equivalence
/// over all triples of the prefix, and the B-predicate via ord_q.
pub fn model_predicates(e: &EllipticCurve, pt: &CurvePoint, p: u64, q: u64, ells: &[u64]) -> Result<ModelReport> {
    check_model_hypotheses(e, pt, p, q)?;
    let big_m = model_modulus(e, p, q)?;
    let (bp, bq) = (BigInt::from(p), BigInt::from(q));
    let c = padic_xdiff_ord(e, pt, big_m + 1, &bp)?;
    let c_q = padic_xdiff_ord(e, pt, big_m + 1, &bq)?;
    let mut rows = Vec::new();
    for (idx, &ell) in ells.iter().enumerate() {
        let i = idx as u32 + 1;
        let op = padic_xdiff_ord(e, pt, ell, &bp)?;
        let oq = padic_xdiff_ord(e, pt, ell, &bq)?;
        let b = in_b(i as u64);
        rows.push(ModelRow {
            i,
            ell,
            ord_p: op,
            ord_q: oq,
            in_b: b,
            identity_holds: op == c + i as i64,
            b_predicate_holds: (oq > c_q) == b,
        });
    }
    let mut failed = Vec::new();
    let mut checked = 0;
    for a in &rows {
        for b in &rows {
            for k in &rows {
                checked += 1;
                if (a.i + b.i == k.i) != (a.ord_p + b.ord_p == k.ord_p + c) {
                    failed.push((a.i, b.i, k.i));
                }
            }
        }
    }
    let holds = failed.is_empty() && rows.iter().all(|r| r.identity_holds && r.b_predicate_holds);
    Ok(ModelReport { big_m, c, c_q, rows, addition_checked: checked, addition_failed: failed, holds })
}

/// The position i with ord_p(x_ℓ - x_1) = c + i, if ℓ - 1 is a multiple of M.
pub fn model_index(e: &EllipticCurve, pt: &CurvePoint, p: u64, q: u64, ell: u64) -> Result<Option<i64>> {
    let big_m = model_modulus(e, p, q)?;
    if (ell - 1) % big_m != 0 {
        return Ok(None);
    }
    let bp = BigInt::from(p);
    let c = padic_xdiff_ord(e, pt, big_m + 1, &bp)?;
    Ok(Some(padic_xdiff_ord(e, pt, ell, &bp)? - c))
}
