//! The set A (numerators that descend to F) and the second-stage system that
//! pins x to the base field, over rings of integers.

use super::bounds::{lemma_modify_check, square_trick_recover, usebounds_certificate};
use super::{
    equal, equal_products, nonzero, ring_checks, short, Mode, RingSpec, SystemId, Value, VerificationReport, Verdict,
    WitnessBundle,
};
use crate::divisors::{divides_den, num_divisor};
use crate::elliptic::{check_good_reduction, fp_mul, reduce_point, CurvePoint, EllipticCurve};
use crate::error::{Error, Result};
use crate::intarith::{factor, ord_p};
use crate::numfield::{sign_at, FieldElement, FieldHom, Sign};
use crate::rat::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Variables per equation label; `_j` names are expanded for every j.
pub type EqTable = Vec<(String, Vec<String>)>;

fn table(rows: &[(&str, &[&str])], js: &[usize]) -> EqTable {
    let mut out = Vec::new();
    for (label, vars) in rows {
        let mut v = Vec::new();
        for name in vars.iter() {
            if let Some(stem) = name.strip_suffix("_j") {
                for j in js {
                    v.push(format!("{}_{}", stem, j));
                }
            } else {
                v.push(name.to_string());
            }
        }
        out.push((label.to_string(), v));
    }
    out
}

pub(crate) struct SetALabels {
    first: &'static str,
    q: &'static str,
    bez_b: &'static str,
    ratio: &'static str,
    bez_x: &'static str,
    cong: &'static str,
    div: &'static str,
}

pub(crate) const SETA_LABELS: SetALabels = SetALabels {
    first: "eq:firstpart1.1",
    q: "eq:Q1.1",
    bez_b: "eq:Q1.2",
    ratio: "eq:Q1.31",
    bez_x: "eq:Q1.3",
    cong: "eq:cong1.1",
    div: "eq:divisibility1.1",
};

pub(crate) const SETA_BIG_LABELS: SetALabels = SetALabels {
    first: "eq:firstpart1",
    q: "eq:Q",
    bez_b: "eq:Q1.4",
    ratio: "eq:Q1.4.1",
    bez_x: "eq:Q1.5",
    cong: "eq:cong",
    div: "eq:divisibility",
};

pub const SETA_VARS: [&str; 13] = ["x", "Q", "S", "u_Q", "v_Q", "X", "Y", "Z", "W", "a", "b", "w", "A"];

/// Equation table of the set-A system (either ring size).
pub fn seta_table(big: bool) -> EqTable {
    let l = if big { &SETA_BIG_LABELS } else { &SETA_LABELS };
    let mut rows: Vec<(&str, &[&str])> = vec![
        ("input:x", &["x"]),
        (l.first, &["Q", "S"]),
        (l.q, &["Q", "u_Q", "v_Q"]),
        (l.bez_b, &["X", "b", "Y", "v_Q"]),
        (l.bez_x, &["Z", "x", "W", "u_Q"]),
        (l.ratio, &["Q", "S", "a", "b"]),
        (l.cong, &["u_Q", "x", "b", "a", "v_Q", "w"]),
        (l.div, &["v_Q", "x", "A"]),
    ];
    if big {
        rows.push(("eq:nonzero", &["x"]));
    }
    table(&rows, &[])
}

pub const PART2_J: [usize; 3] = [0, 1, 2];

pub fn part2_table() -> EqTable {
    table(
        &[
            ("input:x", &["x"]),
            ("eq:firstpart1.2", &["z"]),
            ("eq:x1.1", &["x", "x_j"]),
            ("eq:sigma1.1", &["x_j"]),
            ("eq:first1.1", &["Q", "P_j"]),
            ("eq:classnumber1.1", &["z", "x_j"]),
            ("eq:newz1.1", &["z_j", "x_j", "z"]),
            ("eq:P_21.1", &["Q", "u_Q", "v_Q"]),
            ("eq:P_21.2", &["X_j", "v_Q", "Y_j", "b_j"]),
            ("eq:P21.3", &["U_j", "z_j", "V_j", "u_Q"]),
            ("eq:relprime1.1", &["a_j", "b_j", "Q", "P_j"]),
            ("eq:divide1.1", &["v_Q", "z_j", "y_j"]),
            ("eq:last1.1", &["u_Q", "x_j", "b_j", "a_j", "c_j", "v_Q"]),
        ],
        &PART2_J,
    )
}

/// Labels a perturbation of `var` may legitimately break: its equations, its ring
/// check and every derived conclusion.
pub fn affected_labels(t: &EqTable, var: &str) -> Vec<String> {
    let mut out: Vec<String> = t.iter().filter(|(_, v)| v.iter().any(|n| n == var)).map(|(l, _)| l.clone()).collect();
    out.push(format!("ring:{}", var));
    out
}

/// Whether every failing label lies in the allowed set (conclusion checks always may).
pub fn failures_within(rep: &VerificationReport, allowed: &[String]) -> bool {
    rep.failing().iter().all(|l| allowed.contains(l) || l.starts_with("conclusion:"))
}

// ---------------------------------------------------------------- construction over Q

fn rat_x(p: &CurvePoint) -> Result<Rat> {
    p.x()?.as_rational().ok_or(Error::FieldMismatch)
}

/// Order of P modulo q at a prime of good reduction; 1 at bad primes, None past the cap.
fn order_mod(e: &EllipticCurve, pt: &CurvePoint, q: &BigInt, cap: u64) -> Option<u64> {
    let Some(qq) = q.to_u64() else { return None };
    if check_good_reduction(e, q).is_err() {
        return Some(1);
    }
    let Ok(Some(r)) = reduce_point(e, pt, qq) else { return Some(1) };
    (1..=cap).find(|&n| fp_mul(e, qq, n, Some(r)).is_none())
}

/// Smallest n <= budget with q^k | d(x([n]P)); only multiples of the order of P mod q are tried.
pub fn minimal_multiple_for(e: &EllipticCurve, pt: &CurvePoint, q: &BigInt, k: u64, budget: u64) -> Result<u64> {
    let exhausted = || Error::BudgetExhausted(format!("no multiple up to {} has {}^{} in the denominator", budget, q, k));
    let n0 = order_mod(e, pt, q, budget).ok_or_else(exhausted)?;
    let mut n = n0;
    while n <= budget {
        let s = e.multiple(n as i64, pt)?;
        if !s.is_identity() && ord_p(rat_x(&s)?.denom(), q) >= k {
            return Ok(n);
        }
        n += n0;
    }
    Err(exhausted())
}

/// lcm over the prime powers of N of the minimal multiples.
pub fn required_multiple(e: &EllipticCurve, pt: &CurvePoint, n: &BigInt, budget: u64) -> Result<u64> {
    let mut l = 1u64;
    if n.abs().is_one() {
        return Ok(1);
    }
    for (q, k) in factor(n)? {
        let m = minimal_multiple_for(e, pt, &q, k as u64, budget)?;
        l = l.lcm(&m);
        if l > budget {
            return Err(Error::BudgetExhausted(format!("combined multiple {} exceeds {}", l, budget)));
        }
    }
    Ok(l)
}

/// s, t with s a + t b = 1; the larger operand is reduced first so the gcd runs on small numbers.
pub fn bezout_int(a: &BigInt, b: &BigInt) -> Option<(BigInt, BigInt)> {
    let swap = a.bits() > b.bits();
    let (small, big) = if swap { (b, a) } else { (a, b) };
    if small.is_zero() {
        return if big.abs().is_one() { Some(if swap { (big.clone(), BigInt::zero()) } else { (BigInt::zero(), big.clone()) }) } else { None };
    }
    let (qt, r) = big.div_mod_floor(small);
    let g = small.extended_gcd(&r);
    let (s1, t1) = if g.gcd.is_one() {
        (g.x, g.y)
    } else if (-&g.gcd).is_one() {
        (-g.x, -g.y)
    } else {
        return None;
    };
    // s1 small + t1 (big - qt small) = 1
    let cs = s1 - &t1 * &qt;
    let cb = t1;
    debug_assert!((&cs * small + &cb * big).is_one());
    Some(if swap { (cb, cs) } else { (cs, cb) })
}

fn require_q(e: &EllipticCurve, pt: &CurvePoint) -> Result<()> {
    if e.field().degree() != 1 {
        return Err(Error::InvalidInput("construction requires a curve over Q".into()));
    }
    if !e.is_on(pt) || pt.is_identity() {
        return Err(Error::PointNotOnCurve);
    }
    Ok(())
}

/// u/v with v > 0 and (u, v) = 1.
fn parts(r: &Rat) -> (BigInt, BigInt) {
    (r.numer().clone(), r.denom().clone())
}

/// A bundle for x = m^2: Q = [l]P with x^e | d(x(Q)), S = [m]Q, and all auxiliary values.
pub fn seta_construct(
    m: u64,
    e: &EllipticCurve,
    pt: &CurvePoint,
    ring: RingSpec,
    mode: Mode,
    budget: u64,
) -> Result<WitnessBundle> {
    seta_construct_system(SystemId::SetA, m, e, pt, ring, mode, budget)
}

pub(crate) fn seta_construct_system(
    system: SystemId,
    m: u64,
    e: &EllipticCurve,
    pt: &CurvePoint,
    ring: RingSpec,
    mode: Mode,
    budget: u64,
) -> Result<WitnessBundle> {
    require_q(e, pt)?;
    if m == 0 {
        return Err(Error::InvalidInput("m must be positive".into()));
    }
    let f = e.field().clone();
    let x = BigInt::from(m) * BigInt::from(m);
    let ex = mode.exponent(4);
    let need = num_traits::pow(x.clone(), ex as usize);
    let l0 = required_multiple(e, pt, &need, budget)?;
    let mut c = 1u64;
    while l0 * c <= budget {
        let l = l0 * c;
        c += 1;
        let q = e.multiple(l as i64, pt)?;
        if q.is_identity() {
            continue;
        }
        let xq = rat_x(&q)?;
        let s = e.multiple((l * m) as i64, pt)?;
        if xq.is_zero() || s.is_identity() || rat_x(&s)?.is_zero() {
            continue;
        }
        let (u, v) = parts(&xq);
        if !(&v % &need).is_zero() {
            continue;
        }
        let (a, b) = parts(&(xq.clone() / rat_x(&s)?));
        let Some((bx, by)) = bezout_int(&b, &v) else { continue };
        let Some((bz, bw)) = bezout_int(&x, &u) else { continue };
        let t = &x * &b - &a;
        let wn = &u * &t * &t;
        if !(&wn % &v).is_zero() {
            continue;
        }
        let w = wn / &v;
        let big_a = &v / &need;
        let mut out = WitnessBundle::new(system, mode, ring);
        out.fields.insert("F".into(), f.clone());
        out.curve = Some(e.clone());
        let el = |v: &BigInt| f.from_int(v.clone());
        out.set("x", el(&x));
        out.set_point("Q", q);
        out.set_point("S", s);
        for (n, v) in [
            ("u_Q", &u),
            ("v_Q", &v),
            ("X", &bx),
            ("Y", &by),
            ("Z", &bz),
            ("W", &bw),
            ("a", &a),
            ("b", &b),
            ("w", &w),
            ("A", &big_a),
        ] {
            out.set(n, el(v));
        }
        out.meta.insert("l".into(), l.to_string());
        out.meta.insert("m".into(), m.to_string());
        out.meta.insert("exponent".into(), ex.to_string());
        return Ok(out);
    }
    Err(Error::BudgetExhausted(format!("no multiple of {} up to {} satisfies every equation", l0, budget)))
}

// ---------------------------------------------------------------- verification

fn curve_of(b: &WitnessBundle) -> std::result::Result<&EllipticCurve, String> {
    b.curve.as_ref().ok_or_else(|| "bundle has no curve".to_string())
}

fn on_curve_nonzero(b: &WitnessBundle, names: &[&str]) -> Verdict {
    let e = curve_of(b)?;
    for n in names {
        let p = b.point(n)?;
        if p.is_identity() {
            return Err(format!("{} = O", n));
        }
        if !e.is_on(p) {
            return Err(format!("{} is not on the curve", n));
        }
    }
    Ok(String::new())
}

fn xcoord<'a>(b: &'a WitnessBundle, n: &str) -> std::result::Result<&'a FieldElement, String> {
    b.point(n)?.x().map_err(|_| format!("{} = O", n))
}

fn elem_pow(x: &FieldElement, e: u32) -> FieldElement {
    x.pow(e as i64).expect("nonnegative power")
}

fn one_of(x: &FieldElement) -> FieldElement {
    x.field().one()
}

/// Re-checks every set-A equation; the conclusion is derived only in `paper_exact` mode.
pub fn seta_verify(x: &FieldElement, b: &WitnessBundle) -> VerificationReport {
    verify_seta_with(x, b, &SETA_LABELS, false)
}

pub(crate) fn verify_seta_with(x: &FieldElement, b: &WitnessBundle, l: &SetALabels, big: bool) -> VerificationReport {
    let mut rep = VerificationReport::new(b.system.as_str());
    let g = |n: &str| b.elem(n);
    rep.record("input:x", g("x").and_then(|bx| equal(bx, x)));
    rep.record(l.first, on_curve_nonzero(b, &["Q", "S"]));
    rep.record(l.q, (|| {
        let (u, v) = (g("u_Q")?, g("v_Q")?);
        nonzero(v, "v_Q")?;
        equal_products(u, &one_of(u), xcoord(b, "Q")?, v)
    })());
    rep.record(l.bez_b, (|| {
        let lhs = &(g("X")? * g("b")?) + &(g("Y")? * g("v_Q")?);
        equal(&lhs, &one_of(&lhs))
    })());
    rep.record(l.bez_x, (|| {
        let lhs = &(g("Z")? * g("x")?) + &(g("W")? * g("u_Q")?);
        equal(&lhs, &one_of(&lhs))
    })());
    rep.record(l.ratio, (|| {
        let (xq, xs) = (xcoord(b, "Q")?, xcoord(b, "S")?);
        nonzero(g("b")?, "b")?;
        nonzero(xs, "x(S)")?;
        equal_products(g("a")?, xs, g("b")?, xq)
    })());
    rep.record(l.cong, (|| {
        let t = &(g("x")? * g("b")?) - g("a")?;
        equal(&(&(g("u_Q")? * &t) * &t), &(g("v_Q")? * g("w")?))
    })());
    let ex = b.mode.exponent(4);
    rep.record(l.div, (|| equal(g("v_Q")?, &(&elem_pow(g("x")?, ex) * g("A")?)))());
    let names: Vec<String> = SETA_VARS.iter().filter(|n| !matches!(**n, "Q" | "S")).map(|s| s.to_string()).collect();
    ring_checks(&mut rep, b, &names);
    if big {
        rep.record("eq:nonzero", (|| nonpositive_at_ring_primes(b, g("x")?))());
    }
    if b.mode.is_exact() {
        rep.record("conclusion:modify", (|| seta_conclusion(b, g("x")?, big))());
    } else {
        rep.skip("conclusion:modify", "the descent argument needs the exponent 4 of x");
    }
    rep
}

/// ord_P(x) <= 0 at every prime P where the ring allows denominators.
pub(crate) fn nonpositive_at_ring_primes(b: &WitnessBundle, x: &FieldElement) -> Verdict {
    nonzero(x, "x")?;
    let n = num_divisor(x).map_err(|e| e.to_string())?;
    for pr in n.support() {
        if b.ring.allows(x.field(), pr) {
            return Err(format!("x has positive order at the ring prime {}", pr));
        }
    }
    Ok(String::new())
}

/// n(x)^4 | d(x(Q)) and then n(x) rebased to F through the modification lemma.
fn seta_conclusion(b: &WitnessBundle, x: &FieldElement, big: bool) -> Verdict {
    let xq = xcoord(b, "Q")?;
    let t = b.elem("a")?.try_div(b.elem("b")?).map_err(|e| e.to_string())?;
    let big_t = num_divisor(x).map_err(|e| e.to_string())?;
    if big {
        // only the part of d(x(Q)) outside the ring primes enters the argument
        for pr in big_t.support() {
            if b.ring.allows(x.field(), pr) {
                return Err(format!("{} is a ring prime", pr));
            }
        }
    }
    if !divides_den(&big_t.pow(4), xq).map_err(|e| e.to_string())? {
        return Err("n(x)^4 does not divide d(x(Q))".into());
    }
    let hom = FieldHom::identity(x.field());
    match lemma_modify_check(x, &t, &big_t.pow(2), &hom) {
        Ok(Some(d)) => Ok(format!("n(x) = {} as a divisor of F", d)),
        Ok(None) => Err("n(x) is not conjugate-complete over F".into()),
        Err(e) => Err(e.to_string()),
    }
}

// ---------------------------------------------------------------- part 2

/// Every real embedding of x's field has σ(lhs) `cmp` σ(rhs) for cmp in {>=, >}.
fn real_compare(lhs: &FieldElement, rhs: &FieldElement, strict: bool) -> Verdict {
    let d = lhs - rhs;
    let embs = d.field().real_embeddings();
    for e in &embs {
        let s = sign_at(&d, e).map_err(|e| e.to_string())?;
        let ok = match s {
            Sign::Positive => true,
            Sign::Zero => !strict,
            Sign::Negative => false,
        };
        if !ok {
            return Err(format!("fails at real embedding {}", e.index));
        }
    }
    Ok(format!("{} real embeddings", embs.len()))
}

fn child_check(rep: &mut VerificationReport, label: &str, b: &WitnessBundle, key: &str, value: &FieldElement, verify: &dyn Fn(&FieldElement, &WitnessBundle) -> VerificationReport) {
    let Some(child) = b.children.get(key) else {
        rep.record(label, Err(format!("no bundle for {}", key)));
        return;
    };
    let r = verify(value, child);
    rep.record_child(label, key, &r);
}

/// Default z: the square (x+3)^2, which exceeds every (x+j)^2.
pub fn default_z(x: u64) -> u64 {
    (x + 3) * (x + 3)
}

/// Bundle for a positive integer x with p^2 z_j^e | v_Q for j = 0, 1, 2.
pub fn part2_construct(
    x: u64,
    z: Option<u64>,
    p: u64,
    e: &EllipticCurve,
    pt: &CurvePoint,
    ring: RingSpec,
    mode: Mode,
    budget: u64,
) -> Result<WitnessBundle> {
    require_q(e, pt)?;
    if x == 0 {
        return Err(Error::InvalidInput("x must be positive".into()));
    }
    if p % 2 == 0 || !crate::intarith::is_prime_u64(p) {
        return Err(Error::InvalidInput("p must be an odd prime".into()));
    }
    if ring.allows_rational_prime(&BigInt::from(p)) {
        return Err(Error::InvalidInput("p must have no factor among the ring primes".into()));
    }
    let z = z.unwrap_or_else(|| default_z(x));
    let zr = (z as f64).sqrt().round() as u64;
    if zr * zr != z || z <= (x + 2) * (x + 2) {
        return Err(Error::InvalidInput("z must be a square exceeding (x+2)^2".into()));
    }
    let f = e.field().clone();
    let el = |v: &BigInt| f.from_int(v.clone());
    let ex = mode.exponent(8);
    let pp = BigInt::from(p * p);
    let xs: Vec<BigInt> = PART2_J.iter().map(|j| BigInt::from((x + *j as u64) * (x + *j as u64))).collect();
    let zs: Vec<BigInt> = xs.iter().map(|xj| xj * BigInt::from(z)).collect();
    let needs: Vec<BigInt> = zs.iter().map(|zj| &pp * num_traits::pow(zj.clone(), ex as usize)).collect();
    let need = needs.iter().fold(BigInt::one(), |acc, n| acc.lcm(n));
    let l0 = required_multiple(e, pt, &need, budget)?;

    let mut children = std::collections::BTreeMap::new();
    children.insert("A[z]".to_string(), seta_construct(zr, e, pt, ring.clone(), mode, budget)?);
    for j in PART2_J {
        children.insert(format!("A[x_{}]", j), seta_construct(x + j as u64, e, pt, ring.clone(), mode, budget)?);
    }

    let mut c = 1u64;
    'outer: while l0 * c <= budget {
        let l = l0 * c;
        c += 1;
        let q = e.multiple(l as i64, pt)?;
        if q.is_identity() || rat_x(&q)?.is_zero() {
            continue;
        }
        let (u, v) = parts(&rat_x(&q)?);
        if !(&v % &need).is_zero() {
            continue;
        }
        let mut out = WitnessBundle::new(SystemId::Part2, mode, ring.clone());
        out.fields.insert("F".into(), f.clone());
        out.curve = Some(e.clone());
        out.set("x", f.from_int(x));
        out.set("z", f.from_int(z));
        out.set("u_Q", el(&u));
        out.set("v_Q", el(&v));
        for j in PART2_J {
            let pj = e.multiple((l * (x + j as u64)) as i64, pt)?;
            if pj.is_identity() || rat_x(&pj)?.is_zero() {
                continue 'outer;
            }
            let (a, bb) = parts(&(rat_x(&q)? / rat_x(&pj)?));
            let Some((bx, by)) = bezout_int(&v, &bb) else { continue 'outer };
            let Some((bu, bv)) = bezout_int(&zs[j], &u) else { continue 'outer };
            let t = &xs[j] * &bb - &a;
            let cn = &u * &t * &t;
            if !(&cn % &v).is_zero() {
                continue 'outer;
            }
            let y = &v / &needs[j];
            out.set(&format!("x_{}", j), el(&xs[j]));
            out.set(&format!("z_{}", j), el(&zs[j]));
            out.set_point(&format!("P_{}", j), pj);
            for (n, val) in [("a", &a), ("b", &bb), ("X", &bx), ("Y", &by), ("U", &bu), ("V", &bv), ("y", &y)] {
                out.set(&format!("{}_{}", n, j), el(val));
            }
            out.set(&format!("c_{}", j), el(&(cn / &v)));
        }
        out.set_point("Q", q);
        out.children = children;
        out.meta.insert("l".into(), l.to_string());
        out.meta.insert("p".into(), p.to_string());
        out.meta.insert("exponent".into(), ex.to_string());
        return Ok(out);
    }
    Err(Error::BudgetExhausted(format!("no multiple of {} up to {} satisfies every equation", l0, budget)))
}

/// Re-checks the part-2 equations, the A-memberships through the child bundles, the
/// embedding inequalities, and (`paper_exact` mode) the descent x_j ∈ F and x ∈ K.
pub fn part2_verify(x: &FieldElement, b: &WitnessBundle) -> VerificationReport {
    let mut rep = VerificationReport::new(b.system.as_str());
    let g = |n: &str| b.elem(n);
    let gj = |n: &str, j: usize| b.elem(&format!("{}_{}", n, j));
    let p = match b.meta.get("p").and_then(|s| s.parse::<u64>().ok()) {
        Some(p) => p,
        None => {
            rep.record("input:p", Err("bundle does not record p".into()));
            return rep;
        }
    };
    let ex = b.mode.exponent(8);
    rep.record("input:x", g("x").and_then(|bx| equal(bx, x)));
    match g("z") {
        Ok(z) => child_check(&mut rep, "eq:firstpart1.2", b, "A[z]", z, &seta_verify),
        Err(e) => rep.record("eq:firstpart1.2", Err(e)),
    }
    for j in PART2_J {
        rep.record("eq:x1.1", (|| {
            let s = g("x")?.add_rat(&Rat::from(j as i64));
            equal(gj("x", j)?, &(&s * &s))
        })());
        if let Ok(xj) = gj("x", j) {
            child_check(&mut rep, "eq:x1.1", b, &format!("A[x_{}]", j), xj, &seta_verify);
        }
        rep.record("eq:sigma1.1", (|| real_compare(gj("x", j)?, &one_of(x), false))());
    }
    let names: Vec<String> = std::iter::once("Q".to_string()).chain(PART2_J.iter().map(|j| format!("P_{}", j))).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    rep.record("eq:first1.1", on_curve_nonzero(b, &refs));
    for j in PART2_J {
        rep.record("eq:classnumber1.1", (|| real_compare(g("z")?, gj("x", j)?, true))());
        rep.record("eq:newz1.1", (|| equal(gj("z", j)?, &(gj("x", j)? * g("z")?)))());
    }
    rep.record("eq:P_21.1", (|| {
        let (u, v) = (g("u_Q")?, g("v_Q")?);
        nonzero(v, "v_Q")?;
        equal_products(u, &one_of(u), xcoord(b, "Q")?, v)
    })());
    let pp = b.fields.get("F").map(|f| f.from_int(p * p));
    for j in PART2_J {
        rep.record("eq:P_21.2", (|| {
            let lhs = &(gj("X", j)? * g("v_Q")?) + &(gj("Y", j)? * gj("b", j)?);
            equal(&lhs, &one_of(&lhs))
        })());
        rep.record("eq:P21.3", (|| {
            let lhs = &(gj("U", j)? * gj("z", j)?) + &(gj("V", j)? * g("u_Q")?);
            equal(&lhs, &one_of(&lhs))
        })());
        rep.record("eq:relprime1.1", (|| {
            let xp = xcoord(b, &format!("P_{}", j))?;
            nonzero(gj("b", j)?, "b_j")?;
            nonzero(xp, "x(P_j)")?;
            equal_products(gj("a", j)?, xp, gj("b", j)?, xcoord(b, "Q")?)
        })());
        rep.record("eq:divide1.1", (|| {
            let pp = pp.as_ref().ok_or("bundle has no field F")?;
            equal(g("v_Q")?, &(&(pp * &elem_pow(gj("z", j)?, ex)) * gj("y", j)?))
        })());
        rep.record("eq:last1.1", (|| {
            let t = &(gj("x", j)? * gj("b", j)?) - gj("a", j)?;
            equal(&(&(g("u_Q")? * &t) * &t), &(gj("c", j)? * g("v_Q")?))
        })());
    }
    let mut vars: Vec<String> = vec!["x".into(), "z".into(), "u_Q".into(), "v_Q".into()];
    for j in PART2_J {
        for n in ["x", "z", "a", "b", "X", "Y", "U", "V", "y", "c"] {
            vars.push(format!("{}_{}", n, j));
        }
    }
    ring_checks(&mut rep, b, &vars);
    if b.mode.is_exact() {
        for j in PART2_J {
            rep.record("conclusion:usebounds", (|| {
                let t = gj("a", j)?.try_div(gj("b", j)?).map_err(|e| e.to_string())?;
                let hom = FieldHom::identity(x.field());
                let w = b.ring.prime_set(x.field()).map_err(|e| e.to_string())?;
                let r = usebounds_certificate(gj("x", j)?, gj("z", j)?, &t, &BigInt::from(p), &hom, &w)
                    .map_err(|e| e.to_string())?;
                if r.pass {
                    Ok(format!("x_{} descends", j))
                } else {
                    Err(r.failing().join(", "))
                }
            })());
        }
    } else {
        rep.skip("conclusion:usebounds", "the congruence modulo p z_j^4 needs the exponent 8");
    }
    rep.record("conclusion:square_trick", (|| {
        let r = square_trick_recover(gj("x", 0)?, gj("x", 1)?, gj("x", 2)?).map_err(|e| e.to_string())?;
        equal(&r, g("x")?).map(|_| format!("x = {}", short(&r)))
    })());
    rep
}

/// Every FieldElement variable name in a bundle (for perturbation sweeps).
pub fn element_names(b: &WitnessBundle) -> Vec<String> {
    b.assignment.iter().filter(|(_, v)| matches!(v, Value::Elem(_))).map(|(n, _)| n.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> (EllipticCurve, CurvePoint) {
        let e = EllipticCurve::default_curve();
        let p = e.point_q(Rat::zero(), Rat::zero()).unwrap();
        (e, p)
    }

    #[test]
    fn bezout_small_big() {
        let a = BigInt::from(35);
        let b: BigInt = BigInt::from(3).pow(200u32) + 1;
        let (s, t) = bezout_int(&a, &b).unwrap();
        assert!((s * &a + t * &b).is_one());
        assert!(bezout_int(&BigInt::from(6), &BigInt::from(9)).is_none());
    }

    #[test]
    fn seta_small_cases() {
        let (e, p) = fixture();
        let b = seta_construct(1, &e, &p, RingSpec::Integers, Mode::PaperExact, 100).unwrap();
        assert_eq!(b.meta["l"], "2");
        assert!(seta_verify(&e.field().one(), &b).pass);
        let b = seta_construct(2, &e, &p, RingSpec::Integers, Mode::Relaxed(2), 1000).unwrap();
        assert_eq!(b.meta["l"], "10");
        let x = e.field().from_int(4);
        let rep = seta_verify(&x, &b);
        assert!(rep.pass, "{:?}", rep.failing());
        let b = seta_construct(3, &e, &p, RingSpec::Integers, Mode::Relaxed(1), 1000).unwrap();
        assert_eq!(b.meta["l"], "7");
        let bumped = b.with_value("w", b.assignment["w"].bumped());
        let rep = seta_verify(&e.field().from_int(9), &bumped);
        assert_eq!(rep.failing(), vec!["eq:cong1.1".to_string()]);
    }
}
