//! Variants of the two systems over rings whose denominators may contain every prime
//! without a degree-one factor in an auxiliary cyclic field E.

use super::bounds::usebounds_certificate;
use super::small::{bezout_int, nonpositive_at_ring_primes, required_multiple, seta_construct_system, verify_seta_with, SETA_BIG_LABELS};
use super::{equal, equal_products, nonzero, ring_checks, Mode, RingSpec, SystemId, VerificationReport, Verdict, WitnessBundle};
use crate::divisors::{factor_prime, no_deg_one_factor};
use crate::elliptic::{CurvePoint, EllipticCurve};
use crate::error::{Error, Result};
use crate::intarith::{factor, is_prime_u64, ord_p};
use crate::linalg::rank;
use crate::numfield::{sign_at, FieldElement, FieldHom, NumberField, Sign};
use crate::poly::QPoly;
use crate::rat::{gcd, Rat};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug)]
pub struct BigRingParams {
    pub e: NumberField,
    pub r: QPoly,
    pub a1: u64,
    pub nj: Vec<u64>,
    pub p: u64,
}

impl BigRingParams {
    /// 2 n_E + 1, the number of shifted squares.
    pub fn count(&self) -> usize {
        2 * self.e.degree() + 1
    }

    pub fn ring(&self) -> RingSpec {
        RingSpec::NoDegOne { e: self.e.clone(), extra: Vec::new() }
    }

    /// R(A1 + t + N_j) for an integer t.
    pub fn shifted(&self, t: &BigInt, j: usize) -> BigInt {
        let s = Rat::from_int(t + BigInt::from(self.a1 + self.nj[j]));
        self.r.eval(&s).numer().clone()
    }

    pub fn shifted_elem(&self, x: &FieldElement, j: usize) -> FieldElement {
        x.add_rat(&Rat::from_int(self.a1 + self.nj[j])).eval_poly_at(&self.r)
    }
}

/// A1 = max(2, ceiling of the largest real root of R - 1), so R(t) > 1 for t > A1.
pub fn a_of_one(r: &QPoly) -> u64 {
    let f = r.sub(&QPoly::one());
    let bound = f.root_bound();
    let mut a = 2u64;
    while f.count_roots_in(&Rat::from_int(a), &bound) > 0 {
        a += 1;
    }
    a
}

/// Rank of the coefficient vectors of R(A1 + t + N_j)^2.
pub fn shifted_square_rank(r: &QPoly, a1: u64, nj: &[u64]) -> usize {
    let rows: Vec<Vec<Rat>> = nj
        .iter()
        .map(|n| {
            let shift = QPoly::new(vec![Rat::from_int(a1 + n), Rat::one()]);
            let g = r.compose(&shift).pow(2);
            let d = 2 * r.deg().max(0) as usize + 1;
            (0..d).map(|i| g.coeff(i)).collect()
        })
        .collect();
    rank(&rows)
}

/// Checks the generator is an integral unit, computes A1, certifies the offsets, and picks
/// the auxiliary prime p (smallest odd prime outside W not dividing disc(R)).
pub fn bigring_params_make(e: &NumberField, nj: &[u64]) -> Result<BigRingParams> {
    let ints = e.poly_coeffs();
    let monic = ints.last().map_or(false, |c| c.is_one());
    if !monic || !ints[0].abs().is_one() {
        return Err(Error::NonUnitGenerator);
    }
    let r = e.min_poly().clone();
    let n = 2 * e.degree() + 1;
    if nj.len() != n {
        return Err(Error::InvalidInput(format!("need {} offsets, got {}", n, nj.len())));
    }
    if nj[0] != 0 {
        return Err(Error::InvalidInput("the first offset must be 0".into()));
    }
    let a1 = a_of_one(&r);
    if shifted_square_rank(&r, a1, nj) < n {
        return Err(Error::DependentFamily);
    }
    let ring = RingSpec::NoDegOne { e: e.clone(), extra: Vec::new() };
    let disc = e.disc().clone();
    let mut p = 3u64;
    loop {
        let bp = BigInt::from(p);
        if is_prime_u64(p) && !(&disc % &bp).is_zero() && !ring.allows_rational_prime(&bp) {
            break;
        }
        p += 2;
    }
    Ok(BigRingParams { e: e.clone(), r, a1, nj: nj.to_vec(), p })
}

/// Whether q (a rational prime, unramified in E) lies in W over Q.
pub fn in_w(params: &BigRingParams, q: u64) -> Result<bool> {
    let qf = NumberField::rationals();
    let pr = factor_prime(&qf, &BigInt::from(q))?.remove(0);
    no_deg_one_factor(&pr, &qf, &params.e)
}

/// ord_q R(z0) <= 0 at every listed prime q of W.
pub fn negorder_check(params: &BigRingParams, z0: &Rat, primes: &[u64]) -> Result<bool> {
    let v = params.r.eval(z0);
    if v.is_zero() {
        return Ok(false);
    }
    for &q in primes {
        let disc = params.e.disc();
        if (disc % BigInt::from(q)).is_zero() || !in_w(params, q)? {
            continue;
        }
        let bq = BigInt::from(q);
        let o = ord_p(v.numer(), &bq) as i64 - ord_p(v.denom(), &bq) as i64;
        if o > 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------- set A

/// Set-A bundle over the big ring (x = m^2, curve over Q).
pub fn bigring_seta_construct(
    m: u64,
    e: &EllipticCurve,
    pt: &CurvePoint,
    params: &BigRingParams,
    mode: Mode,
    budget: u64,
) -> Result<WitnessBundle> {
    seta_construct_system(SystemId::SetABigring, m, e, pt, params.ring(), mode, budget)
}

pub fn bigring_seta_verify(x: &FieldElement, b: &WitnessBundle) -> VerificationReport {
    verify_seta_with(x, b, &SETA_BIG_LABELS, true)
}

// ---------------------------------------------------------------- part 2

/// s, t in the ring with s a + t b = 1, allowing a common factor made of ring primes.
pub fn ring_bezout(a: &BigInt, b: &BigInt, ring: &RingSpec) -> Option<(Rat, Rat)> {
    let g = gcd(a, b);
    if g.is_zero() {
        return None;
    }
    if !g.is_one() {
        for (q, _) in factor(&g).ok()? {
            if !ring.allows_rational_prime(&q) {
                return None;
            }
        }
    }
    let (s, t) = bezout_int(&(a / &g), &(b / &g))?;
    Some((Rat::new(s, g.clone()), Rat::new(t, g)))
}

/// Part of n outside the ring primes.
fn outside_part(n: &BigInt, ring: &RingSpec) -> Result<BigInt> {
    let mut out = BigInt::one();
    if n.abs().is_one() {
        return Ok(out);
    }
    for (q, k) in factor(n)? {
        if !ring.allows_rational_prime(&q) {
            out *= num_traits::pow(q, k as usize);
        }
    }
    Ok(out)
}

/// Default z0: the least integer with R(z0) >= every x_j.
pub fn default_z0(params: &BigRingParams, xs: &[BigInt]) -> u64 {
    let max = xs.iter().max().cloned().unwrap_or_default();
    let mut z0 = params.a1;
    while params.r.eval(&Rat::from_int(z0)).numer() < &max {
        z0 += 1;
    }
    z0
}

/// Fills every part-2 variable from Q = [l]P without searching; values that fail to lie in
/// the ring are left for the verifier to flag. Children are not attached.
pub fn bigring_part2_assemble(
    x: u64,
    z0: Option<u64>,
    l: u64,
    e: &EllipticCurve,
    pt: &CurvePoint,
    params: &BigRingParams,
    mode: Mode,
) -> Result<WitnessBundle> {
    if e.field().degree() != 1 {
        return Err(Error::InvalidInput("assembly requires a curve over Q".into()));
    }
    let f = e.field().clone();
    let ring = params.ring();
    let ex = mode.exponent(8);
    let bx = BigInt::from(x);
    let ks: Vec<BigInt> = (0..params.count()).map(|j| params.shifted(&bx, j)).collect();
    let xs: Vec<BigInt> = ks.iter().map(|k| k * k).collect();
    let z0 = z0.unwrap_or_else(|| default_z0(params, &xs));
    let z = params.r.eval(&Rat::from_int(z0)).numer().clone();
    let q = e.multiple(l as i64, pt)?;
    let xq = q.x()?.as_rational().ok_or(Error::FieldMismatch)?;
    if xq.is_zero() {
        return Err(Error::ZeroXCoordinate);
    }
    let (u, v) = (xq.numer().clone(), xq.denom().clone());
    let mut out = WitnessBundle::new(SystemId::Part2Bigring, mode, ring.clone());
    out.fields.insert("F".into(), f.clone());
    out.curve = Some(e.clone());
    let r = |v: Rat| f.from_rat(v);
    let i = |v: &BigInt| f.from_int(v.clone());
    out.set("x", f.from_int(x));
    out.set("z0", f.from_int(z0));
    out.set("z", i(&z));
    out.set("u_Q", i(&u));
    out.set("v_Q", i(&v));
    let pp = BigInt::from(params.p * params.p);
    for j in 0..params.count() {
        let k = ks[j].to_i64().ok_or_else(|| Error::BudgetExhausted("multiplier too large".into()))?;
        let pj = e.multiple(k, &q)?;
        let xp = pj.x()?.as_rational().ok_or(Error::FieldMismatch)?;
        if xp.is_zero() {
            return Err(Error::ZeroXCoordinate);
        }
        let ratio = xq.clone() / xp;
        let (a, bb) = (ratio.numer().clone(), ratio.denom().clone());
        let zj = &xs[j] * &z;
        out.set(&format!("x_{}", j), i(&xs[j]));
        out.set(&format!("z_{}", j), i(&zj));
        out.set_point(&format!("P_{}", j), pj);
        out.set(&format!("a_{}", j), i(&a));
        out.set(&format!("b_{}", j), i(&bb));
        if let Some((s, t)) = ring_bezout(&bb, &v, &ring) {
            out.set(&format!("X_{}", j), r(s));
            out.set(&format!("Y_{}", j), r(t));
        }
        if let Some((s, t)) = ring_bezout(&zj, &u, &ring) {
            out.set(&format!("Z_{}", j), r(s));
            out.set(&format!("W_{}", j), r(t));
        }
        out.set(&format!("w_{}", j), r(Rat::new(v.clone(), &pp * num_traits::pow(zj.clone(), ex as usize))));
        let t = &xs[j] * &bb - &a;
        out.set(&format!("c_{}", j), r(Rat::new(&u * &t * &t, v.clone())));
    }
    out.set_point("Q", q);
    out.meta.insert("l".into(), l.to_string());
    out.meta.insert("p".into(), params.p.to_string());
    out.meta.insert("exponent".into(), ex.to_string());
    Ok(out)
}

/// Searches l with p^2 z_j^e | v_Q away from the ring primes. The shifted values R(A1+x+N_j)
/// are at least 17 for the cyclic cubic, so at desk scale this ends in BudgetExhausted.
pub fn bigring_part2_construct(
    x: u64,
    z0: Option<u64>,
    e: &EllipticCurve,
    pt: &CurvePoint,
    params: &BigRingParams,
    mode: Mode,
    budget: u64,
) -> Result<WitnessBundle> {
    let ring = params.ring();
    let ex = mode.exponent(8);
    let bx = BigInt::from(x);
    let ks: Vec<BigInt> = (0..params.count()).map(|j| params.shifted(&bx, j)).collect();
    let xs: Vec<BigInt> = ks.iter().map(|k| k * k).collect();
    let z0 = z0.unwrap_or_else(|| default_z0(params, &xs));
    let z = params.r.eval(&Rat::from_int(z0)).numer().clone();
    let mut need = BigInt::from(params.p * params.p);
    for xj in &xs {
        let zj = xj * &z;
        need = num_integer::Integer::lcm(&need, &outside_part(&num_traits::pow(zj, ex as usize), &ring)?);
    }
    let l0 = required_multiple(e, pt, &need, budget)?;
    let zr = z.sqrt();
    if &zr * &zr != z {
        return Err(Error::InvalidInput(format!("z = R({}) = {} is not a square, so A[z] has no witness", z0, z)));
    }
    let mut c = 1;
    while l0 * c <= budget {
        let mut b = bigring_part2_assemble(x, Some(z0), l0 * c, e, pt, params, mode)?;
        c += 1;
        if !bigring_part2_verify(&e.field().from_int(x), &b, params).failing().iter().all(|l| l.starts_with("eq:firstpart") || l.starts_with("eq:x")) {
            continue;
        }
        b.children.insert(
            "A[z]".into(),
            bigring_seta_construct(zr.to_u64().ok_or(Error::BudgetExhausted("z too large".into()))?, e, pt, params, mode, budget)?,
        );
        for (j, k) in ks.iter().enumerate() {
            let m = k.to_u64().ok_or(Error::BudgetExhausted("multiplier too large".into()))?;
            b.children.insert(format!("A[x_{}]", j), bigring_seta_construct(m, e, pt, params, mode, budget)?);
        }
        return Ok(b);
    }
    Err(Error::BudgetExhausted(format!("no multiple of {} up to {} satisfies every equation", l0, budget)))
}

fn real_at_least(lhs: &FieldElement, rhs: &FieldElement) -> Verdict {
    let d = lhs - rhs;
    for emb in d.field().real_embeddings() {
        if sign_at(&d, &emb).map_err(|e| e.to_string())? == Sign::Negative {
            return Err(format!("fails at real embedding {}", emb.index));
        }
    }
    Ok(String::new())
}

fn child(rep: &mut VerificationReport, label: &str, b: &WitnessBundle, key: &str, value: &FieldElement) {
    match b.children.get(key) {
        Some(c) => rep.record_child(label, key, &bigring_seta_verify(value, c)),
        None => rep.record(label, Err(format!("no bundle for {}", key))),
    }
}

/// The part-2 equations over the big ring. Shape constraints and A-membership are reported
/// under separate labels ("eq:x" and "eq:x[A]").
pub fn bigring_part2_verify(x: &FieldElement, b: &WitnessBundle, params: &BigRingParams) -> VerificationReport {
    let mut rep = VerificationReport::new(b.system.as_str());
    let g = |n: &str| b.elem(n);
    let gj = |n: &str, j: usize| b.elem(&format!("{}_{}", n, j));
    let js: Vec<usize> = (0..params.count()).collect();
    let ex = b.mode.exponent(8);
    rep.record("input:x", g("x").and_then(|bx| equal(bx, x)));
    rep.record("eq:firstpart", (|| equal(g("z")?, &g("z0")?.eval_poly_at(&params.r)))());
    if let Ok(z) = g("z") {
        child(&mut rep, "eq:firstpart[A]", b, "A[z]", z);
    }
    for &j in &js {
        rep.record("eq:x", (|| {
            let s = params.shifted_elem(g("x")?, j);
            equal(gj("x", j)?, &(&s * &s))
        })());
        if let Ok(xj) = gj("x", j) {
            child(&mut rep, "eq:x[A]", b, &format!("A[x_{}]", j), xj);
        }
        rep.record("eq:sigma", (|| real_at_least(gj("x", j)?, &x.field().one()))());
    }
    rep.record("eq:first", (|| {
        let e = b.curve.as_ref().ok_or("bundle has no curve")?;
        for n in std::iter::once("Q".to_string()).chain(js.iter().map(|j| format!("P_{}", j))) {
            let p = b.point(&n)?;
            if p.is_identity() || !e.is_on(p) {
                return Err(format!("{} is O or off the curve", n));
            }
        }
        Ok(String::new())
    })());
    let xq = || -> std::result::Result<FieldElement, String> { Ok(b.point("Q")?.x().map_err(|e| e.to_string())?.clone()) };
    rep.record("eq:P_2", (|| {
        nonzero(g("v_Q")?, "v_Q")?;
        equal(g("u_Q")?, &(&xq()? * g("v_Q")?))
    })());
    let pp = x.field().from_int(params.p * params.p);
    for &j in &js {
        rep.record("eq:classnumber", (|| real_at_least(g("z")?, gj("x", j)?))());
        rep.record("eq:newz", (|| equal(gj("z", j)?, &(gj("x", j)? * g("z")?)))());
        rep.record("eq:Q1.4.0.1", (|| {
            let lhs = &(gj("X", j)? * gj("b", j)?) + &(gj("Y", j)? * g("v_Q")?);
            equal(&lhs, &lhs.field().one())
        })());
        rep.record("eq:Q1.4.1.1", (|| {
            let xp = b.point(&format!("P_{}", j))?.x().map_err(|e| e.to_string())?;
            nonzero(gj("b", j)?, "b_j")?;
            equal_products(gj("a", j)?, xp, gj("b", j)?, &xq()?)
        })());
        rep.record("eq:Q1.5.1.1", (|| {
            let lhs = &(gj("Z", j)? * gj("z", j)?) + &(gj("W", j)? * g("u_Q")?);
            equal(&lhs, &lhs.field().one())
        })());
        rep.record("eq:divide", (|| {
            let rhs = &(&pp * &gj("z", j)?.pow(ex as i64).map_err(|e| e.to_string())?) * gj("w", j)?;
            equal(g("v_Q")?, &rhs)
        })());
        rep.record("eq:last", (|| {
            let t = &(gj("b", j)? * gj("x", j)?) - gj("a", j)?;
            equal(&(&(g("u_Q")? * &t) * &t), &(g("v_Q")? * gj("c", j)?))
        })());
        rep.record("eq:nonzero", (|| nonpositive_at_ring_primes(b, gj("x", j)?))());
    }
    rep.record("eq:nonzeroz", (|| nonpositive_at_ring_primes(b, g("z")?))());
    let mut vars = vec!["x".to_string(), "z0".into(), "z".into(), "u_Q".into(), "v_Q".into()];
    for &j in &js {
        for n in ["x", "z", "a", "b", "c", "X", "Y", "Z", "W", "w"] {
            vars.push(format!("{}_{}", n, j));
        }
    }
    ring_checks(&mut rep, b, &vars);
    if b.mode.is_exact() {
        for &j in &js {
            rep.record("conclusion:usebounds", (|| {
                let t = gj("a", j)?.try_div(gj("b", j)?).map_err(|e| e.to_string())?;
                let w = b.ring.prime_set(x.field()).map_err(|e| e.to_string())?;
                let hom = FieldHom::identity(x.field());
                let r = usebounds_certificate(gj("x", j)?, gj("z", j)?, &t, &BigInt::from(params.p), &hom, &w)
                    .map_err(|e| e.to_string())?;
                if r.pass {
                    Ok(String::new())
                } else {
                    Err(r.failing().join(", "))
                }
            })());
        }
    } else {
        rep.skip("conclusion:usebounds", "the congruence modulo p z_j^4 needs the exponent 8");
    }
    rep
}
