//! Primes of Z[θ] above unramified rational primes, valuations, divisors and prime sets.

use crate::error::{Error, Result};
use crate::intarith::{factor, ord_p, primes_up_to};
use crate::modp::{self, FpPoly};
use crate::numfield::{compositum_where, FieldElement, FieldHom, NumberField, DEFAULT_DEGREE_BUDGET};
use crate::poly::QPoly;
use crate::rat::{self, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Largest p for which residues are handled in machine words.
const WORD_PRIME_LIMIT: u64 = 1 << 62;

/// The prime (p, g(θ)) of a field; e is always 1 because p never divides the discriminant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PrimeIdeal {
    pub p: BigInt,
    /// Monic factor of the defining polynomial mod p, coefficients in [0, p), low degree first.
    #[serde(serialize_with = "ser_ints")]
    pub gen_poly: Vec<BigInt>,
    pub e: u32,
    pub f: u32,
}

fn ser_ints<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    let t: Vec<String> = v.iter().map(|c| c.to_string()).collect();
    t.serialize(s)
}

impl PrimeIdeal {
    pub fn p_u64(&self) -> Option<u64> {
        self.p.to_u64()
    }

    fn gen_fp(&self) -> FpPoly {
        self.gen_poly.iter().map(|c| c.to_u64().unwrap()).collect()
    }

    /// Norm p^f.
    pub fn norm(&self) -> BigInt {
        num_traits::pow(self.p.clone(), self.f as usize)
    }
}

impl fmt::Display for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gen_poly.len() == 2 && self.f == 1 && self.gen_poly[0].is_zero() {
            return write!(f, "({})", self.p);
        }
        let g = QPoly::from_bigints(&self.gen_poly).to_string().replace('x', "t");
        write!(f, "({}, {})", self.p, g)
    }
}

fn check_good(field: &NumberField, p: &BigInt) -> Result<()> {
    if (field.disc() % p).is_zero() {
        return Err(Error::RamifiedOrIndexDivisor(format!("{} (discriminant {})", p, field.disc())));
    }
    Ok(())
}

/// The primes above p, one per irreducible factor of the defining polynomial mod p.
pub fn factor_prime(field: &NumberField, p: &BigInt) -> Result<Vec<PrimeIdeal>> {
    if p <= &BigInt::one() {
        return Err(Error::InvalidInput(format!("{} is not a prime", p)));
    }
    check_good(field, p)?;
    let ints = field.poly_coeffs();
    if field.degree() == 1 {
        let c = ints[0].mod_floor(p);
        return Ok(vec![PrimeIdeal { p: p.clone(), gen_poly: vec![c, BigInt::one()], e: 1, f: 1 }]);
    }
    let pu = p.to_u64().filter(|&v| v < WORD_PRIME_LIMIT).ok_or_else(|| {
        Error::InvalidInput(format!("prime {} too large for residue arithmetic in degree {}", p, field.degree()))
    })?;
    let fp = modp::from_ints(ints, pu);
    let mut out: Vec<PrimeIdeal> = modp::factor_squarefree(&fp, pu)
        .into_iter()
        .map(|g| PrimeIdeal {
            p: p.clone(),
            f: (g.len() - 1) as u32,
            gen_poly: g.into_iter().map(BigInt::from).collect(),
            e: 1,
        })
        .collect();
    out.sort();
    Ok(out)
}

/// Writes x = a / d with a integral in the power basis and d a positive integer.
fn clear_denominator(x: &FieldElement) -> (Vec<BigInt>, BigInt) {
    let mut d = BigInt::one();
    for c in x.coords() {
        if !c.denom().is_one() {
            d = d.lcm(c.denom());
        }
    }
    let a = x.coords().iter().map(|c| c.numer() * (&d / c.denom())).collect();
    (a, d)
}

/// Cofactor of the prime's generator: a lift of (defining polynomial)/g mod p.
fn cofactor(field: &NumberField, pr: &PrimeIdeal, p: u64) -> Vec<BigInt> {
    let fp = modp::from_ints(field.poly_coeffs(), p);
    let (h, r) = modp::divrem(&fp, &pr.gen_fp(), p);
    debug_assert!(r.iter().all(|&c| c == 0));
    h.into_iter().map(BigInt::from).collect()
}

fn mul_mod_f(a: &[BigInt], b: &[BigInt], f: &[BigInt]) -> Vec<BigInt> {
    let n = f.len() - 1;
    let mut prod = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                prod[i + j] += x * y;
            }
        }
    }
    while prod.len() > n {
        let top = prod.pop().unwrap();
        if top.is_zero() {
            continue;
        }
        let k = prod.len() - n;
        for i in 0..n {
            if !f[i].is_zero() {
                prod[k + i] -= &top * &f[i];
            }
        }
    }
    prod.resize(n, BigInt::zero());
    prod
}

/// Valuation at pr of a nonzero integral element a of Z[θ].
fn ord_integral(field: &NumberField, a: &[BigInt], pr: &PrimeIdeal) -> u64 {
    let p = &pr.p;
    let mut content = BigInt::zero();
    for c in a {
        content = rat::gcd(&content, c);
    }
    let k = ord_p(&content, p);
    let pk = num_traits::pow(p.clone(), k as usize);
    let mut a: Vec<BigInt> = a.iter().map(|c| c / &pk).collect();
    let pu = pr.p_u64().unwrap();
    let g = pr.gen_fp();
    let mut h: Option<Vec<BigInt>> = None;
    let mut v = k;
    loop {
        let ap = modp::from_ints(&a, pu);
        if !modp::rem(&ap, &g, pu).is_empty() {
            return v;
        }
        // a·h lies in p Z[θ] when a lies in pr
        let hh = h.get_or_insert_with(|| cofactor(field, pr, pu));
        a = mul_mod_f(&a, hh, field.poly_coeffs());
        for c in a.iter_mut() {
            debug_assert!((&*c % p).is_zero());
            *c = &*c / p;
        }
        v += 1;
    }
}

/// Exact valuation ord_P(x); None stands for +infinity (x = 0).
pub fn ord(x: &FieldElement, pr: &PrimeIdeal) -> Result<Option<i64>> {
    if x.is_zero() {
        return Ok(None);
    }
    check_good(x.field(), &pr.p)?;
    if let Some(r) = x.as_rational() {
        return Ok(Some(ord_p(r.numer(), &pr.p) as i64 - ord_p(r.denom(), &pr.p) as i64));
    }
    let (a, d) = clear_denominator(x);
    let va = ord_integral(x.field(), &a, pr) as i64;
    Ok(Some(va - ord_p(&d, &pr.p) as i64))
}

/// A formal product of primes of one field with nonzero integer exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Divisor {
    #[serde(serialize_with = "ser_factors")]
    factors: BTreeMap<PrimeIdeal, i64>,
}

fn ser_factors<S: serde::Serializer>(m: &BTreeMap<PrimeIdeal, i64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<(String, i64)> = m.iter().map(|(p, e)| (p.to_string(), *e)).collect();
    v.serialize(s)
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "(1)");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{}^{}", p, e) })
            .collect();
        write!(f, "{}", parts.join(" * "))
    }
}

impl Divisor {
    pub fn trivial() -> Divisor {
        Divisor::default()
    }

    pub fn prime_power(p: PrimeIdeal, e: i64) -> Divisor {
        let mut d = Divisor::trivial();
        d.add_exponent(&p, e);
        d
    }

    pub fn add_exponent(&mut self, p: &PrimeIdeal, e: i64) {
        let slot = self.factors.entry(p.clone()).or_insert(0);
        *slot += e;
        if *slot == 0 {
            self.factors.remove(p);
        }
    }

    pub fn exponent(&self, p: &PrimeIdeal) -> i64 {
        self.factors.get(p).copied().unwrap_or(0)
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.factors.values().all(|&e| e > 0)
    }

    pub fn support(&self) -> impl Iterator<Item = &PrimeIdeal> {
        self.factors.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PrimeIdeal, i64)> {
        self.factors.iter().map(|(p, e)| (p, *e))
    }

    pub fn mul(&self, o: &Divisor) -> Divisor {
        let mut d = self.clone();
        for (p, e) in &o.factors {
            d.add_exponent(p, *e);
        }
        d
    }

    pub fn inverse(&self) -> Divisor {
        Divisor { factors: self.factors.iter().map(|(p, e)| (p.clone(), -e)).collect() }
    }

    pub fn pow(&self, k: i64) -> Divisor {
        if k == 0 {
            return Divisor::trivial();
        }
        Divisor { factors: self.factors.iter().map(|(p, e)| (p.clone(), e * k)).collect() }
    }

    /// True iff no prime occurs in both.
    pub fn coprime_to(&self, o: &Divisor) -> bool {
        self.factors.keys().all(|p| !o.factors.contains_key(p))
    }
}

/// A | B in the semigroup of integral divisors.
pub fn divisor_divides(a: &Divisor, b: &Divisor) -> Result<bool> {
    if !a.is_integral() || !b.is_integral() {
        return Err(Error::NonIntegral);
    }
    Ok(a.factors.iter().all(|(p, e)| b.exponent(p) >= *e))
}

/// The integral divisor B with B^2 = A, when it exists.
pub fn divisor_sqrt(a: &Divisor) -> Result<Option<Divisor>> {
    if !a.is_integral() {
        return Err(Error::NonIntegral);
    }
    if a.factors.values().any(|e| e % 2 != 0) {
        return Ok(None);
    }
    Ok(Some(Divisor { factors: a.factors.iter().map(|(p, e)| (p.clone(), e / 2)).collect() }))
}

/// Product of p^(f·e) over the factors.
pub fn divisor_norm(a: &Divisor) -> Rat {
    let mut r = Rat::one();
    for (p, e) in &a.factors {
        r = r * Rat::from(p.norm()).pow(*e);
    }
    r
}

fn prime_list(n: &BigInt) -> Result<Vec<BigInt>> {
    if n.abs() <= BigInt::one() {
        return Ok(Vec::new());
    }
    Ok(factor(&n.abs())?.into_iter().map(|(p, _)| p).collect())
}

/// Rational primes that can carry a nonzero valuation of x.
fn support_primes(x: &FieldElement) -> Result<(Vec<BigInt>, Vec<BigInt>)> {
    if let Some(r) = x.as_rational() {
        return Ok((prime_list(r.numer())?, prime_list(r.denom())?));
    }
    let (a, d) = clear_denominator(x);
    let na = x.field().element(a.iter().map(|c| Rat::from(c.clone())).collect()).norm();
    Ok((prime_list(na.numer())?, prime_list(&d)?))
}

fn collect(x: &FieldElement, primes: &[BigInt], sign: i64) -> Result<Divisor> {
    let mut out = Divisor::trivial();
    let field = x.field();
    for p in primes {
        if (field.disc() % p).is_zero() {
            return Err(Error::SupportHitsBadPrime(format!("{} divides the discriminant", p)));
        }
        for pr in factor_prime(field, p)? {
            let v = ord(x, &pr)?.expect("nonzero element");
            if v * sign > 0 {
                out.add_exponent(&pr, v * sign);
            }
        }
    }
    Ok(out)
}

/// d(x): primes where x has negative valuation, with exponent -ord. d(0) is trivial.
pub fn den_divisor(x: &FieldElement) -> Result<Divisor> {
    if x.is_zero() {
        return Ok(Divisor::trivial());
    }
    let (_, d) = clear_denominator(x);
    collect(x, &prime_list(&d)?, -1)
}

/// A | d(x) for an integral divisor A, without factoring the denominator of x.
pub fn divides_den(a: &Divisor, x: &FieldElement) -> Result<bool> {
    if !a.is_integral() {
        return Err(Error::NonIntegral);
    }
    if x.is_zero() {
        return Ok(a.is_trivial());
    }
    for (pr, e) in a.iter() {
        if ord(x, pr)?.unwrap() > -e {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A | n(x) for an integral divisor A; zero is divisible by everything.
pub fn divides_num(a: &Divisor, x: &FieldElement) -> Result<bool> {
    if !a.is_integral() {
        return Err(Error::NonIntegral);
    }
    for (pr, e) in a.iter() {
        if let Some(v) = ord(x, pr)? {
            if v < e {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True iff no prime of A occurs in d(x).
pub fn coprime_to_den(a: &Divisor, x: &FieldElement) -> Result<bool> {
    for (pr, _) in a.iter() {
        if let Some(v) = ord(x, pr)? {
            if v < 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// n(x) = d(1/x).
pub fn num_divisor(x: &FieldElement) -> Result<Divisor> {
    if x.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let (num, den) = support_primes(x)?;
    let mut all: Vec<BigInt> = num;
    all.extend(den);
    all.sort();
    all.dedup();
    collect(x, &all, 1)
}

/// n(x) / d(x).
pub fn principal_divisor(x: &FieldElement) -> Result<Divisor> {
    Ok(num_divisor(x)?.mul(&den_divisor(x)?.inverse()))
}

/// Sets of primes of a field K, given explicitly or by rule.
#[derive(Clone, Debug)]
pub enum PrimeSet {
    List(Vec<PrimeIdeal>),
    /// Primes of K without a relative degree-one factor in the compositum EK.
    NoDegOneIn(NumberField),
    Union(Box<PrimeSet>, Box<PrimeSet>),
    Minus(Box<PrimeSet>, Box<PrimeSet>),
    Closure(Box<PrimeSet>),
    Hat(Box<PrimeSet>),
}

impl PrimeSet {
    pub fn empty() -> PrimeSet {
        PrimeSet::List(Vec::new())
    }

    /// Membership of a prime of K.
    pub fn contains(&self, k: &NumberField, pr: &PrimeIdeal) -> Result<bool> {
        match self {
            PrimeSet::List(v) => Ok(v.contains(pr)),
            PrimeSet::NoDegOneIn(e) => no_deg_one_factor(pr, k, e),
            PrimeSet::Union(a, b) => {
                // an explicit member on either side settles it, even if the other side cannot decide
                let ra = a.contains(k, pr);
                if let Ok(true) = ra {
                    return Ok(true);
                }
                if b.contains(k, pr)? {
                    return Ok(true);
                }
                ra
            }
            PrimeSet::Minus(a, b) => Ok(a.contains(k, pr)? && !b.contains(k, pr)?),
            PrimeSet::Closure(s) => {
                for q in factor_prime(k, &pr.p)? {
                    if s.contains(k, &q)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            PrimeSet::Hat(s) => {
                if !s.contains(k, pr)? {
                    return Ok(false);
                }
                let mut members = Vec::new();
                for q in factor_prime(k, &pr.p)? {
                    if s.contains(k, &q)? {
                        members.push(q);
                    }
                }
                Ok(hat_representative(&members).as_ref() != Some(pr))
            }
        }
    }

    /// The members lying above rational primes in `primes`.
    pub fn members_above(&self, k: &NumberField, primes: &[BigInt]) -> Result<Vec<PrimeIdeal>> {
        let mut out = Vec::new();
        for p in primes {
            for q in factor_prime(k, p)? {
                if self.contains(k, &q)? {
                    out.push(q);
                }
            }
        }
        Ok(out)
    }

    /// Rational primes below a finite set; None if the set is given by an infinite rule.
    pub fn finite_support(&self) -> Option<BTreeSet<BigInt>> {
        match self {
            PrimeSet::List(v) => Some(v.iter().map(|p| p.p.clone()).collect()),
            PrimeSet::NoDegOneIn(_) => None,
            PrimeSet::Union(a, b) => {
                let mut s = a.finite_support()?;
                s.extend(b.finite_support()?);
                Some(s)
            }
            PrimeSet::Minus(a, _) => a.finite_support(),
            PrimeSet::Closure(s) | PrimeSet::Hat(s) => s.finite_support(),
        }
    }

    /// Explicit member list of a finite set.
    pub fn materialize(&self, k: &NumberField) -> Result<Option<Vec<PrimeIdeal>>> {
        let Some(support) = self.finite_support() else { return Ok(None) };
        let primes: Vec<BigInt> = support.into_iter().collect();
        Ok(Some(self.members_above(k, &primes)?))
    }
}

/// The prime removed by the hat operation from a conjugacy class: maximal f,
/// ties broken by the lexicographically smallest generator (low degree first).
fn hat_representative(members: &[PrimeIdeal]) -> Option<PrimeIdeal> {
    let maxf = members.iter().map(|p| p.f).max()?;
    members.iter().filter(|p| p.f == maxf).min_by(|a, b| a.gen_poly.cmp(&b.gen_poly)).cloned()
}

pub fn conj_closure(s: PrimeSet) -> PrimeSet {
    PrimeSet::Closure(Box::new(s))
}

pub fn hat_set(s: PrimeSet) -> PrimeSet {
    PrimeSet::Hat(Box::new(s))
}

/// Compositum of K and E whose defining polynomial is prime to p.
fn compositum_good_at(
    k: &NumberField,
    e: &NumberField,
    p: &BigInt,
) -> Result<(NumberField, FieldHom)> {
    if k.degree() == 1 {
        check_good(e, p)?;
        let image = e.from_rat(-k.min_poly().coeff(0));
        return Ok((e.clone(), FieldHom::new(k, e, image)?));
    }
    let good = |ints: &[BigInt]| {
        let f = QPoly::from_bigints(ints);
        !(f.discriminant().numer() % p).is_zero()
    };
    let c = compositum_where(k, e, DEFAULT_DEGREE_BUDGET, &good)?;
    check_good(&c.field, p)?;
    Ok((c.field, c.left))
}

/// Primes of `big` above the prime pr of the subfield embedded by `hom`, with relative degrees.
pub fn primes_above(hom: &FieldHom, pr: &PrimeIdeal) -> Result<Vec<(PrimeIdeal, u32)>> {
    let small = &hom.src;
    let big = &hom.dst;
    let g = small.element(pr.gen_poly.iter().map(|c| Rat::from(c.clone())).collect());
    let gi = hom.apply(&g)?;
    let mut out = Vec::new();
    for q in factor_prime(big, &pr.p)? {
        let inside = gi.is_zero() || ord(&gi, &q)?.unwrap() > 0;
        if inside {
            out.push((q.clone(), q.f / pr.f));
        }
    }
    Ok(out)
}

/// True iff no prime of EK above pr has relative degree one over K.
pub fn no_deg_one_factor(pr: &PrimeIdeal, k: &NumberField, e: &NumberField) -> Result<bool> {
    let (_, hom) = compositum_good_at(k, e, &pr.p)?;
    Ok(primes_above(&hom, pr)?.iter().all(|(_, f)| *f != 1))
}

/// Desk-level normality test over Q: quadratics, cubics with square
/// discriminant, otherwise equal residue degrees at the first 20 good primes.
pub fn looks_galois(f: &NumberField) -> bool {
    let n = f.degree();
    if n <= 2 {
        return true;
    }
    if n == 3 {
        return f.disc().is_positive() && crate::intarith::is_square(f.disc());
    }
    let mut seen = 0;
    for p in primes_up_to(10_000) {
        if (f.disc() % p).is_zero() {
            continue;
        }
        let pat = modp::degree_pattern(&modp::from_ints(f.poly_coeffs(), p), p);
        if pat.iter().any(|&d| d != pat[0]) {
            return false;
        }
        seen += 1;
        if seen == 20 {
            break;
        }
    }
    true
}

/// Residue-degree table of one instance of the degree-one-factor lemma.
#[derive(Clone, Debug, Serialize)]
pub struct NoDegOneReport {
    pub p: String,
    pub hypothesis_holds: bool,
    /// f(P_E / p) for the primes of E above p.
    pub f_in_e: Vec<u32>,
    /// For each prime of G above p: relative degrees of the primes of GE above it.
    pub f_in_ge_over_g: Vec<Vec<u32>>,
    pub verdict: bool,
}

/// Checks an instance of the lemma over K = Q: if p has no degree-one factor
/// in E, no prime of G above p has a relative degree-one factor in GE.
pub fn check_nodegonefact(k: &NumberField, e: &NumberField, g: &NumberField, p: &BigInt) -> Result<NoDegOneReport> {
    if k.degree() != 1 {
        return Err(Error::HypothesisViolated("only K = Q is supported".into()));
    }
    let (de, dg) = (e.degree(), g.degree());
    if de <= 1 || dg <= 1 {
        return Err(Error::HypothesisViolated("extensions must be nontrivial".into()));
    }
    if de.gcd(&dg) != 1 {
        return Err(Error::HypothesisViolated(format!("degrees {} and {} are not coprime", de, dg)));
    }
    if !looks_galois(e) || !looks_galois(g) {
        return Err(Error::HypothesisViolated("extension is not Galois".into()));
    }
    let pq = factor_prime(k, p)?.remove(0);
    let f_in_e: Vec<u32> = factor_prime(e, p)?.iter().map(|q| q.f).collect();
    let hypothesis_holds = f_in_e.iter().all(|&f| f != 1);
    let (ge, g_to_ge) = compositum_good_at(g, e, p)?;
    let _ = ge;
    let mut table = Vec::new();
    let k_to_g = FieldHom::new(k, g, g.from_rat(-k.min_poly().coeff(0)))?;
    for (pg, _) in primes_above(&k_to_g, &pq)? {
        table.push(primes_above(&g_to_ge, &pg)?.iter().map(|(_, f)| *f).collect::<Vec<u32>>());
    }
    let conclusion = table.iter().all(|fs| fs.iter().all(|&f| f != 1));
    Ok(NoDegOneReport {
        p: p.to_string(),
        hypothesis_holds,
        f_in_e,
        f_in_ge_over_g: table,
        verdict: !hypothesis_holds || conclusion,
    })
}

/// max_i ord_q([M_i : Q]).
pub fn degree_index(degrees: &[u64], q: u64) -> u32 {
    degrees.iter().map(|&d| crate::intarith::ord_p_u64(d, q)).max().unwrap_or(0)
}

/// How an unramified rational prime decomposes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitType {
    Inert,
    Split,
    Partial,
    /// No factor of degree one, but not inert.
    NoLinear,
}

impl SplitType {
    pub fn as_str(&self) -> &'static str {
        match self {
            SplitType::Inert => "inert",
            SplitType::Split => "split",
            SplitType::Partial => "partial",
            SplitType::NoLinear => "nolinear",
        }
    }

    pub fn has_linear_factor(&self) -> bool {
        matches!(self, SplitType::Split | SplitType::Partial)
    }
}

fn split_type(f: &[BigInt], p: u64) -> SplitType {
    let fp = modp::from_ints(f, p);
    let n = f.len() - 1;
    let pat = modp::degree_pattern(&fp, p);
    if pat.len() == 1 && pat[0] == n {
        SplitType::Inert
    } else if pat.iter().all(|&d| d == 1) {
        SplitType::Split
    } else if pat.contains(&1) {
        SplitType::Partial
    } else {
        SplitType::NoLinear
    }
}

/// Decomposition type of every unramified prime up to x.
pub fn density_rows(e: &NumberField, x: u64) -> Vec<(u64, SplitType)> {
    primes_up_to(x)
        .into_iter()
        .filter(|&p| !(e.disc() % p).is_zero())
        .map(|p| (p, split_type(e.poly_coeffs(), p)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityCount {
    /// Unramified primes with no degree-one factor.
    pub inert_count: u64,
    pub total_count: u64,
    pub fraction: Rat,
}

/// Counts unramified primes p <= x with no degree-one factor in E (inert when E/Q is cyclic of prime degree).
pub fn density_count(e: &NumberField, x: u64) -> Result<DensityCount> {
    if x > 10_000_000 {
        return Err(Error::InvalidInput("density bound above 10^7".into()));
    }
    let rows = density_rows(e, x);
    let total = rows.len() as u64;
    let inert = rows.iter().filter(|(_, t)| !t.has_linear_factor()).count() as u64;
    let fraction = if total == 0 { Rat::zero() } else { Rat::frac(inert as i64, total as i64) };
    Ok(DensityCount { inert_count: inert, total_count: total, fraction })
}

/// True iff ord_P(x) >= 0 for every P in S.
pub fn integrality_predicate(x: &FieldElement, s: &PrimeSet) -> Result<bool> {
    if x.is_zero() {
        return Ok(true);
    }
    let d = den_divisor(x)?;
    for pr in d.support() {
        if s.contains(x.field(), pr)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Element with ord_P = e_P at the listed primes (all above distinct or equal rational
/// primes in `primes`) and valuation 0 at every other prime above those rational primes.
fn crt_element(field: &NumberField, targets: &BTreeMap<PrimeIdeal, i64>, primes: &BTreeSet<BigInt>) -> Result<FieldElement> {
    let mut moduli = Vec::new();
    let mut locals = Vec::new();
    for p in primes {
        let emax = targets.iter().filter(|(q, _)| &q.p == p).map(|(_, e)| *e).max().unwrap_or(0);
        let mut local = field.one();
        for (q, &e) in targets.iter().filter(|(q, _)| &q.p == p) {
            let g = field.element(q.gen_poly.iter().map(|c| Rat::from(c.clone())).collect());
            let pi = if ord(&g, q)? == Some(1) { g } else { g.add_rat(&Rat::from(p.clone())) };
            debug_assert_eq!(ord(&pi, q)?, Some(1));
            local = &local * &pi.pow(e)?;
        }
        let m = num_traits::pow(p.clone(), (emax + 1) as usize);
        moduli.push(m);
        locals.push(local);
    }
    let big: BigInt = moduli.iter().product();
    let mut acc = vec![BigInt::zero(); field.degree()];
    for (m, local) in moduli.iter().zip(&locals) {
        let rest = &big / m;
        let inv = crate::intarith::invmod_big(&(&rest % m), m).expect("coprime moduli");
        let c = (&rest * inv) % &big;
        for (slot, v) in acc.iter_mut().zip(local.coords()) {
            *slot += &c * v.numer();
        }
    }
    let coords = acc.into_iter().map(|v| Rat::from(v.mod_floor(&big))).collect();
    Ok(field.element(coords))
}

/// z_i = a_i / b_i with a_i, b_i integral, (b1, b2) = 1 and (n(a_i), d(z_i)) = 1.
pub fn strong_approx_split(z1: &FieldElement, z2: &FieldElement) -> Result<[FieldElement; 4]> {
    if z1.field() != z2.field() {
        return Err(Error::FieldMismatch);
    }
    let field = z1.field();
    let d1 = den_divisor(z1)?;
    let d2 = den_divisor(z2)?;
    if !d1.coprime_to(&d2) {
        return Err(Error::DenominatorsNotCoprime);
    }
    if field.degree() == 1 {
        let r1 = z1.as_rational().unwrap();
        let r2 = z2.as_rational().unwrap();
        return Ok([
            field.from_int(r1.numer().clone()),
            field.from_int(r1.denom().clone()),
            field.from_int(r2.numer().clone()),
            field.from_int(r2.denom().clone()),
        ]);
    }
    let zero_at = |d: &Divisor, primes: &mut BTreeSet<BigInt>| {
        for q in d.support() {
            primes.insert(q.p.clone());
        }
    };
    // units at the primes dividing the discriminant keep all later supports good
    let mut primes1: BTreeSet<BigInt> = prime_list(field.disc())?.into_iter().collect();
    zero_at(&d1, &mut primes1);
    zero_at(&d2, &mut primes1);
    let t1: BTreeMap<PrimeIdeal, i64> = d1.iter().map(|(p, e)| (p.clone(), e)).collect();
    let b1 = crt_element(field, &t1, &primes1)?;
    let nb1 = num_divisor(&b1)?;
    let mut primes2 = primes1.clone();
    zero_at(&nb1, &mut primes2);
    let t2: BTreeMap<PrimeIdeal, i64> = d2.iter().map(|(p, e)| (p.clone(), e)).collect();
    let b2 = crt_element(field, &t2, &primes2)?;
    let a1 = z1 * &b1;
    let a2 = z2 * &b2;
    let out = [a1, b1, a2, b2];
    verify_split(z1, z2, &out)?;
    Ok(out)
}

/// Re-checks every condition of a split with independent valuation computations.
pub fn verify_split(z1: &FieldElement, z2: &FieldElement, s: &[FieldElement; 4]) -> Result<()> {
    let [a1, b1, a2, b2] = s;
    let fail = |m: &str| Err(Error::Inconsistent(m.to_string()));
    if &(a1.clone()) != &(z1 * b1) || &(a2.clone()) != &(z2 * b2) {
        return fail("a_i != z_i b_i");
    }
    for v in s {
        if !v.is_zero() && !den_divisor(v)?.is_trivial() {
            return fail("component not integral");
        }
    }
    if !num_divisor(b1)?.coprime_to(&num_divisor(b2)?) {
        return fail("b1 and b2 share a prime");
    }
    for (a, z) in [(a1, z1), (a2, z2)] {
        if !a.is_zero() && !num_divisor(a)?.coprime_to(&den_divisor(z)?) {
            return fail("numerator meets the denominator");
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q2() -> NumberField {
        NumberField::from_ints(&[-2, 0, 1]).unwrap()
    }

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn prime_factorization_shapes() {
        let k = q2();
        let p7 = factor_prime(&k, &b(7)).unwrap();
        assert_eq!(p7.len(), 2);
        assert!(p7.iter().all(|p| p.f == 1));
        let p3 = factor_prime(&k, &b(3)).unwrap();
        assert_eq!((p3.len(), p3[0].f), (1, 2));
        assert!(matches!(factor_prime(&k, &b(2)), Err(Error::RamifiedOrIndexDivisor(_))));
    }

    #[test]
    fn valuations() {
        let k = q2();
        for pr in factor_prime(&k, &b(7)).unwrap() {
            assert_eq!(ord(&k.from_int(7), &pr).unwrap(), Some(1));
            assert_eq!(ord(&k.one(), &pr).unwrap(), Some(0));
        }
        let p3 = factor_prime(&k, &b(3)).unwrap().remove(0);
        assert_eq!(ord(&k.elem(&[3, 1]), &p3).unwrap(), Some(0));
        assert_eq!(ord(&k.zero(), &p3).unwrap(), None);
        // 3 + √2 has norm 7: valuation 1 at exactly one prime above 7
        let vs: Vec<i64> =
            factor_prime(&k, &b(7)).unwrap().iter().map(|p| ord(&k.elem(&[3, 1]), p).unwrap().unwrap()).collect();
        assert_eq!(vs.iter().sum::<i64>(), 1);
        assert!(vs.contains(&0));
    }

    #[test]
    fn divisors_of_elements() {
        let q = NumberField::rationals();
        let d = den_divisor(&q.from_rat(Rat::frac(1, 4))).unwrap();
        assert_eq!(d.to_string(), "(2)^2");
        assert!(num_divisor(&q.from_rat(Rat::frac(1, 4))).unwrap().is_trivial());
        let k = q2();
        let x = k.elem(&[1, 1]).scale(&Rat::frac(1, 7));
        let d = den_divisor(&x).unwrap();
        assert_eq!(d.iter().count(), 2);
        assert!(num_divisor(&x).unwrap().is_trivial());
        let inert = Divisor::prime_power(factor_prime(&k, &b(3)).unwrap().remove(0), 1);
        assert_eq!(divisor_norm(&inert), Rat::from(9));
        let two = factor_prime(&q, &b(2)).unwrap().remove(0);
        let a = Divisor::prime_power(two.clone(), 2);
        let c = Divisor::prime_power(two, 4);
        assert!(divisor_divides(&a, &c).unwrap());
        assert_eq!(divisor_sqrt(&c).unwrap(), Some(a.clone()));
        assert_eq!(divisor_divides(&a.inverse(), &c), Err(Error::NonIntegral));
    }

    #[test]
    fn prime_sets() {
        let k = q2();
        let p7 = factor_prime(&k, &b(7)).unwrap();
        let one = PrimeSet::List(vec![p7[0].clone()]);
        let cl = conj_closure(one.clone());
        assert!(cl.contains(&k, &p7[1]).unwrap());
        assert_eq!(cl.materialize(&k).unwrap().unwrap().len(), 2);
        let hat = hat_set(cl.clone());
        let m = hat.materialize(&k).unwrap().unwrap();
        assert_eq!(m.len(), 1);
        // the smaller generator is the one removed
        let smaller = p7.iter().min_by(|a, b| a.gen_poly.cmp(&b.gen_poly)).unwrap();
        assert_ne!(&m[0], smaller);
        assert!(conj_closure(PrimeSet::empty()).materialize(&k).unwrap().unwrap().is_empty());
    }

    #[test]
    fn degree_one_factors() {
        let q = NumberField::rationals();
        let e = NumberField::from_ints(&[-1, -3, 0, 1]).unwrap();
        let p2 = factor_prime(&q, &b(2)).unwrap().remove(0);
        let p17 = factor_prime(&q, &b(17)).unwrap().remove(0);
        assert!(no_deg_one_factor(&p2, &q, &e).unwrap());
        assert!(!no_deg_one_factor(&p17, &q, &e).unwrap());
        assert!(!no_deg_one_factor(&p2, &q, &q).unwrap());
        let g = NumberField::from_ints(&[-1, -1, 1]).unwrap();
        let r = check_nodegonefact(&q, &e, &g, &b(2)).unwrap();
        assert!(r.verdict && r.hypothesis_holds);
        assert_eq!(r.f_in_e, vec![3]);
        assert!(r.f_in_ge_over_g.iter().all(|fs| fs == &vec![3]));
        assert!(matches!(check_nodegonefact(&q, &q2(), &g, &b(3)), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn densities() {
        let e = NumberField::from_ints(&[-1, -3, 0, 1]).unwrap();
        let d = density_count(&e, 2).unwrap();
        assert_eq!((d.inert_count, d.total_count), (1, 1));
        let d = density_count(&q2(), 2).unwrap();
        assert_eq!(d.total_count, 0);
        assert_eq!(degree_index(&[1, 5, 25, 125], 5), 3);
        assert_eq!(degree_index(&[1, 5, 25, 125], 3), 0);
        assert_eq!(degree_index(&[1, 2, 4], 2), 2);
    }

    #[test]
    fn splits() {
        let q = NumberField::rationals();
        let s = strong_approx_split(&q.from_rat(Rat::frac(3, 4)), &q.from_rat(Rat::frac(5, 9))).unwrap();
        assert_eq!(s.iter().map(|v| v.as_rational().unwrap()).collect::<Vec<_>>(), vec![3.into(), 4.into(), 5.into(), 9.into()]);
        let k = q2();
        let z1 = k.elem(&[3, 1]).inv().unwrap();
        let z2 = k.from_rat(Rat::frac(1, 3));
        let [_, b1, _, b2] = strong_approx_split(&z1, &z2).unwrap();
        let d1 = den_divisor(&z1).unwrap();
        assert_eq!(d1.iter().count(), 1);
        let (p, _) = d1.iter().next().unwrap();
        assert_eq!(ord(&b1, p).unwrap(), Some(1));
        let p3 = factor_prime(&k, &b(3)).unwrap().remove(0);
        assert_eq!(ord(&b2, &p3).unwrap(), Some(1));
        assert!(matches!(
            strong_approx_split(&k.from_rat(Rat::frac(1, 3)), &k.from_rat(Rat::frac(2, 3))),
            Err(Error::DenominatorsNotCoprime)
        ));
    }
}
