//! Norm bounds on numerators and denominators, and the conjugate-gap argument
//! that turns congruences modulo large divisors into membership in a subfield.

use super::{VerificationReport, Verdict};
use crate::divisors::{
    conj_closure, den_divisor, divides_num, divisor_divides, factor_prime, num_divisor, ord, primes_above, Divisor,
    PrimeIdeal, PrimeSet,
};
use crate::error::{Error, Result};
use crate::numfield::{abs_compare, FieldElement, FieldHom};
use crate::rat::Rat;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;
use std::cmp::Ordering;

fn violated(what: &str) -> Error {
    Error::HypothesisViolated(what.to_string())
}

/// |N(x)| = X/Y in lowest terms.
pub fn abs_norm_parts(x: &FieldElement) -> (BigInt, BigInt) {
    let n = x.norm();
    (n.numer().abs(), n.denom().clone())
}

/// Every prime of d(x) lies in `allowed`.
fn integral_outside(x: &FieldElement, allowed: &PrimeSet) -> Result<bool> {
    if x.is_zero() || x.is_integral() {
        return Ok(true);
    }
    for pr in den_divisor(x)?.support() {
        if !allowed.contains(x.field(), pr)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// No prime of `set` occurs in n(x).
fn no_positive_order_in(x: &FieldElement, set: &PrimeSet) -> Result<bool> {
    for pr in num_divisor(x)?.support() {
        if set.contains(x.field(), pr)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// With |N(x)| = X/Y and |N(z)| = Z/W, checks that X divides Z.
pub fn lemma_numerators_check(x: &FieldElement, z: &FieldElement, w: &PrimeSet) -> Result<bool> {
    if x.field() != z.field() {
        return Err(Error::FieldMismatch);
    }
    if x.is_zero() || z.is_zero() {
        return Err(violated("x z != 0"));
    }
    let closure = conj_closure(w.clone());
    if !integral_outside(x, &closure)? {
        return Err(violated("x has a denominator outside the closure of W"));
    }
    if !integral_outside(z, w)? {
        return Err(violated("z has a denominator outside W"));
    }
    if !divisor_divides(&num_divisor(x)?, &num_divisor(z)?)? {
        return Err(violated("n(x) does not divide n(z)"));
    }
    let (big_x, _) = abs_norm_parts(x);
    let (big_z, _) = abs_norm_parts(z);
    Ok((big_z % big_x).is_zero())
}

/// With |N(x1)| = X/Y, checks Y^2 |N(x1 - x2)| is an integer for a conjugate x2 of x1.
pub fn lemma_denominators_check(x1: &FieldElement, x2: &FieldElement, w: &PrimeSet) -> Result<bool> {
    if x1.field() != x2.field() {
        return Err(Error::FieldMismatch);
    }
    if x1 == x2 {
        return Ok(true);
    }
    if x1.is_zero() {
        return Err(violated("x1 != 0"));
    }
    let closure = conj_closure(w.clone());
    for (v, name) in [(x1, "x1"), (x2, "x2")] {
        if !integral_outside(v, &closure)? {
            return Err(violated(&format!("{} has a denominator outside the closure of W", name)));
        }
    }
    if !no_positive_order_in(x1, &closure)? {
        return Err(violated("x1 has positive order at a prime of the closure of W"));
    }
    if x1.min_poly() != x2.min_poly() {
        return Err(violated("x2 is not a conjugate of x1"));
    }
    let (_, y) = abs_norm_parts(x1);
    let d = (x1 - x2).norm();
    let v = Rat::from(&y * &y) * d.abs();
    Ok(v.is_integer() && v.is_positive())
}

/// A divisor of U, lifted to T along `hom`.
fn lift_divisor(a: &Divisor, hom: &FieldHom) -> Result<Divisor> {
    let mut out = Divisor::trivial();
    for (pr, e) in a.iter() {
        for (q, _) in primes_above(hom, pr)? {
            out.add_exponent(&q, e);
        }
    }
    Ok(out)
}

/// The prime of U below the prime q of T.
fn prime_below(q: &PrimeIdeal, hom: &FieldHom) -> Result<PrimeIdeal> {
    for pr in factor_prime(&hom.src, &q.p)? {
        if primes_above(hom, &pr)?.iter().any(|(r, _)| r == q) {
            return Ok(pr);
        }
    }
    Err(Error::Inconsistent(format!("no prime of the subfield below {}", q)))
}

/// Given T^2 | A (A a divisor of U) and A | n(x - t), returns n(x) as a divisor of U.
/// None when some T-prime of n(x) is missing a U-conjugate.
pub fn lemma_modify_check(x: &FieldElement, t: &FieldElement, a: &Divisor, hom: &FieldHom) -> Result<Option<Divisor>> {
    if x.field() != &hom.dst || t.field() != &hom.src {
        return Err(Error::FieldMismatch);
    }
    if !a.is_integral() {
        return Err(Error::NonIntegral);
    }
    let tt = hom.apply(t)?;
    if x.is_zero() {
        return Err(violated("x != 0"));
    }
    let big_t = num_divisor(x)?;
    let a_t = lift_divisor(a, hom)?;
    if !divisor_divides(&big_t.pow(2), &a_t)? {
        return Err(violated("T^2 does not divide A"));
    }
    let diff = x - &tt;
    if !diff.is_zero() && !divides_num(&a_t, &diff)? {
        return Err(violated("A does not divide n(x - t)"));
    }
    let mut out = Divisor::trivial();
    for (q, e) in big_t.iter() {
        let ot = ord(&tt, q)?.unwrap_or(i64::MAX);
        if ot != e {
            return Ok(None);
        }
        let below = prime_below(q, hom)?;
        if out.exponent(&below) != 0 {
            continue;
        }
        for (r, _) in primes_above(hom, &below)? {
            if big_t.exponent(&r) != e {
                return Ok(None);
            }
        }
        out.add_exponent(&below, e);
    }
    if lift_divisor(&out, hom)? != big_t {
        return Ok(None);
    }
    Ok(Some(out))
}

/// The integers of the bound chain for a conjugate pair x, x̂.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainInput {
    pub p: BigInt,
    pub degree: u32,
    /// |N(x)| = X/Y
    pub x: BigInt,
    pub y: BigInt,
    /// |N(z)| = Z/W
    pub z: BigInt,
    pub w: BigInt,
    /// |N(x - x̂)| = A/B
    pub a: BigInt,
    pub b: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ChainVerdict {
    /// The first inequality of the chain that does not hold.
    Broken(String),
    /// Every premise holds, yet the final inequality fails: no distinct conjugate.
    Contradiction,
}

/// Walks the chain Y <= X <= Z, p^n Z^4 <= A, A <= 2^n B Z / W, B <= Y^2 and finally
/// p^n Z^4 <= 2^n Z^3, stopping at the first step that fails.
pub fn usebounds_chain(c: &ChainInput) -> (Vec<(String, bool)>, ChainVerdict) {
    let pn = num_traits::pow(c.p.clone(), c.degree as usize);
    let two_n = num_traits::pow(BigInt::from(2), c.degree as usize);
    let z3 = &c.z * &c.z * &c.z;
    let z4 = &z3 * &c.z;
    let steps: Vec<(&str, bool)> = vec![
        ("eq:4.01", c.y <= c.x && c.x <= c.z),
        ("eq:4.2", &pn * &z4 <= c.a),
        ("eq:7", &c.a * &c.w <= &two_n * &c.b * &c.z),
        ("le:denominators", c.b <= &c.y * &c.y),
    ];
    let mut out = Vec::new();
    for (label, ok) in steps {
        out.push((label.to_string(), ok));
        if !ok {
            return (out, ChainVerdict::Broken(label.to_string()));
        }
    }
    let last = &pn * &z4 <= &two_n * &z3;
    out.push(("eq:8".to_string(), last));
    if last {
        (out, ChainVerdict::Broken("eq:8".to_string()))
    } else {
        (out, ChainVerdict::Contradiction)
    }
}

/// The non-trivial automorphism of a quadratic field.
fn quadratic_conjugate(x: &FieldElement) -> FieldElement {
    let f = x.field();
    let b = f.min_poly().coeff(1);
    let img = &f.from_rat(-b) - &f.gen();
    img.eval_poly_at(&x.as_poly())
}

/// Checks the hypotheses |σx| <= |σz|, |σx| >= 1, |σz| > 1 at every embedding, z ≡ 0 mod x and
/// x ≡ t mod p z^4 in O_{T,W}, then runs the conjugate-gap chain over U.
pub fn usebounds_certificate(
    x: &FieldElement,
    z: &FieldElement,
    t: &FieldElement,
    p: &BigInt,
    hom: &FieldHom,
    w: &PrimeSet,
) -> Result<VerificationReport> {
    let tf = &hom.dst;
    if x.field() != tf || z.field() != tf {
        return Err(Error::FieldMismatch);
    }
    let tt = hom.apply(t)?;
    let mut rep = VerificationReport::new("usebounds");
    for pr in factor_prime(tf, p)? {
        if w.contains(tf, &pr)? {
            return Err(violated(&format!("p has the factor {} in W", pr)));
        }
    }
    let one = tf.one();
    for e in tf.embeddings() {
        if abs_compare(x, z, &e)? == Ordering::Greater {
            return Err(violated(&format!("eq:1 fails at embedding {}", e.index)));
        }
        if abs_compare(x, &one, &e)? == Ordering::Less {
            return Err(violated(&format!("eq:2 fails at embedding {}", e.index)));
        }
        if abs_compare(z, &one, &e)? != Ordering::Greater {
            return Err(violated(&format!("eq:2.1 fails at embedding {}", e.index)));
        }
    }
    rep.record("eq:1", Ok("all embeddings".into()));
    rep.record("eq:2", Ok("all embeddings".into()));
    rep.record("eq:2.1", Ok("all embeddings".into()));
    if x.is_zero() || !integral_outside(&z.try_div(x)?, w)? {
        return Err(violated("eq:3 z is not divisible by x"));
    }
    rep.record("eq:3", Ok(String::new()));
    let m = &z.pow(4)? * &tf.from_int(p.clone());
    let diff = x - &tt;
    if !integral_outside(&diff.try_div(&m)?, w)? {
        return Err(violated("eq:4 x is not congruent to t mod p z^4"));
    }
    rep.record("eq:4", Ok(String::new()));

    if hom.preimage(x)?.is_some() {
        rep.record("conclusion:x_in_U", Ok("x lies in U".into()));
        return Ok(rep);
    }
    if tf.degree() != 2 || hom.src.degree() != 1 {
        rep.skip("conclusion:x_in_U", "conjugates over U are enumerated only for quadratic T over Q");
        return Ok(rep);
    }
    let xh = quadratic_conjugate(x);
    let (bx, by) = abs_norm_parts(x);
    let (bz, bw) = abs_norm_parts(z);
    let (ba, bb) = abs_norm_parts(&(x - &xh));
    let input = ChainInput { p: p.clone(), degree: tf.degree() as u32, x: bx, y: by, z: bz, w: bw, a: ba, b: bb };
    let (steps, verdict) = usebounds_chain(&input);
    for (label, ok) in &steps {
        let v: Verdict = if *ok { Ok(String::new()) } else { Err("inequality fails".into()) };
        rep.record(&format!("chain:{}", label), v);
    }
    match verdict {
        ChainVerdict::Contradiction => rep.record("conclusion:x_in_U", Ok("distinct conjugate is impossible".into())),
        ChainVerdict::Broken(l) => rep.record("conclusion:x_in_U", Err(format!("x has a distinct conjugate; {} breaks", l))),
    }
    Ok(rep)
}

/// Recovers x from (x)^2, (x+1)^2, (x+2)^2.
pub fn square_trick_recover(s0: &FieldElement, s1: &FieldElement, s2: &FieldElement) -> Result<FieldElement> {
    if s0.field() != s1.field() || s0.field() != s2.field() {
        return Err(Error::FieldMismatch);
    }
    let x = (s1 - s0).add_rat(&Rat::from(-1i64)).scale(&Rat::frac(1, 2));
    let two = Rat::from(2i64);
    if &(&x * &x) != s0 || &x.add_rat(&two).pow(2)? != s2 {
        return Err(Error::Inconsistent("values are not consecutive shifted squares".into()));
    }
    Ok(x)
}
