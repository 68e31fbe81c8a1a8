//! Norm-one units of quadratic extensions K(δ)/K, δ^2 = d.

use crate::error::{Error, Result};
use crate::intarith::euler_phi;
use crate::linalg::{solve, Echelon};
use crate::numfield::{abs_compare, FieldElement, FieldHom, NumberField, subfield_coords};
use crate::rat::Rat;
use crate::zfactor;
use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

struct ExtInner {
    base: NumberField,
    d: FieldElement,
    field: NumberField,
    embed: FieldHom,
    delta: FieldElement,
    /// columns: coordinates of θ^i as (c, d) pairs over the base power basis
    basis: Vec<Vec<Rat>>,
    shift: i64,
}

/// K(δ) with δ^2 = d, presented as an absolute field Q(θ), θ = gen(K) + shift·δ.
#[derive(Clone)]
pub struct QuadraticExtension(Arc<ExtInner>);

impl std::fmt::Debug for QuadraticExtension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "QuadraticExtension(d = {}, poly = {})", self.0.d, self.0.field.min_poly())
    }
}

impl PartialEq for QuadraticExtension {
    fn eq(&self, o: &Self) -> bool {
        self.0.base == o.0.base && self.0.d == o.0.d && self.0.shift == o.0.shift
    }
}

fn pair_mul(d: &FieldElement, a: &(FieldElement, FieldElement), b: &(FieldElement, FieldElement)) -> (FieldElement, FieldElement) {
    (&(&a.0 * &b.0) + &(&(d * &a.1) * &b.1), &(&a.0 * &b.1) + &(&a.1 * &b.0))
}

fn pair_vec(p: &(FieldElement, FieldElement)) -> Vec<Rat> {
    let mut v = p.0.coords().to_vec();
    v.extend_from_slice(p.1.coords());
    v
}

/// Minimal polynomial over Q of c + shift·y in K[y]/(y^2 - d), low degree first.
fn pair_min_poly(d: &FieldElement, shift: i64) -> (Vec<Rat>, Vec<Vec<Rat>>) {
    let k = d.field();
    let n = k.degree();
    let theta = (k.gen(), k.from_int(shift));
    let mut p = (k.one(), k.zero());
    let mut ech = Echelon::new(2 * n);
    let mut powers = Vec::new();
    loop {
        let v = pair_vec(&p);
        if let Some(c) = ech.insert(&v) {
            let mut poly: Vec<Rat> = c.iter().map(|x| -x).collect();
            poly.push(Rat::one());
            return (poly, powers);
        }
        powers.push(v);
        p = pair_mul(d, &p, &theta);
    }
}

/// Whether d is a square in its field.
pub fn is_square_in_field(d: &FieldElement) -> Result<bool> {
    if d.is_zero() {
        return Ok(true);
    }
    let n = d.field().degree();
    for shift in 1..=(4 * n as i64 + 4) {
        let (poly, _) = pair_min_poly(d, shift);
        let ints = crate::poly::QPoly::new(poly.clone()).to_primitive_ints();
        if zfactor::find_factor(&ints)?.is_some() {
            // a field's elements have irreducible minimal polynomials
            return Ok(true);
        }
        if poly.len() - 1 == 2 * n {
            return Ok(false);
        }
    }
    Err(Error::BudgetExhausted("no primitive element found".into()))
}

impl QuadraticExtension {
    pub fn new(base: &NumberField, d: &FieldElement) -> Result<QuadraticExtension> {
        if d.field() != base {
            return Err(Error::FieldMismatch);
        }
        if !d.is_integral() {
            return Err(Error::NonIntegral);
        }
        if is_square_in_field(d)? {
            return Err(Error::PerfectSquare(d.to_string()));
        }
        let n = base.degree();
        for shift in 1..=(4 * n as i64 + 4) {
            let (poly, powers) = pair_min_poly(d, shift);
            if poly.len() - 1 != 2 * n {
                continue;
            }
            if poly.iter().any(|c| !c.is_integer()) {
                return Err(Error::NonIntegral);
            }
            let ints: Vec<BigInt> = poly.iter().map(|c| c.numer().clone()).collect();
            let field = NumberField::new(&ints)?;
            let gimg = compose_in(&field, &powers, &base.gen(), &base.zero());
            let delta = compose_in(&field, &powers, &base.zero(), &base.one());
            let inner = ExtInner {
                base: base.clone(),
                d: d.clone(),
                embed: FieldHom::new(base, &field, gimg)?,
                field,
                delta,
                basis: powers,
                shift,
            };
            return Ok(QuadraticExtension(Arc::new(inner)));
        }
        Err(Error::BudgetExhausted("no primitive element found".into()))
    }

    pub fn base(&self) -> &NumberField {
        &self.0.base
    }

    pub fn d(&self) -> &FieldElement {
        &self.0.d
    }

    pub fn field(&self) -> &NumberField {
        &self.0.field
    }

    pub fn embed(&self) -> &FieldHom {
        &self.0.embed
    }

    pub fn delta(&self) -> &FieldElement {
        &self.0.delta
    }

    pub fn shift(&self) -> i64 {
        self.0.shift
    }

    pub fn lift(&self, c: &FieldElement) -> Result<FieldElement> {
        self.0.embed.apply(c)
    }

    /// c + δ d.
    pub fn compose(&self, c: &FieldElement, d: &FieldElement) -> Result<FieldElement> {
        if c.field() != &self.0.base || d.field() != &self.0.base {
            return Err(Error::FieldMismatch);
        }
        Ok(compose_in(&self.0.field, &self.0.basis, c, d))
    }

    /// (c, d) with h = c + δ d.
    pub fn decompose(&self, h: &FieldElement) -> Result<(FieldElement, FieldElement)> {
        if h.field() != &self.0.field {
            return Err(Error::FieldMismatch);
        }
        let n = self.0.base.degree();
        let mut v = vec![Rat::zero(); 2 * n];
        for (hi, col) in h.coords().iter().zip(&self.0.basis) {
            if hi.is_zero() {
                continue;
            }
            for (a, b) in v.iter_mut().zip(col) {
                *a += &(hi * b);
            }
        }
        let d = v.split_off(n);
        Ok((self.0.base.element(v), self.0.base.element(d)))
    }

    /// The automorphism δ -> -δ.
    pub fn conj(&self, h: &FieldElement) -> Result<FieldElement> {
        let (c, d) = self.decompose(h)?;
        self.compose(&c, &d.neg())
    }

    /// h · conj(h), as an element of the base.
    pub fn relative_norm(&self, h: &FieldElement) -> Result<FieldElement> {
        let (c, d) = self.decompose(h)?;
        Ok(&(&c * &c) - &(&(&self.0.d * &d) * &d))
    }
}

fn compose_in(field: &NumberField, basis: &[Vec<Rat>], c: &FieldElement, d: &FieldElement) -> FieldElement {
    let target = pair_vec(&(c.clone(), d.clone()));
    let m = target.len();
    let rows: Vec<Vec<Rat>> = (0..m).map(|r| basis.iter().map(|col| col[r].clone()).collect()).collect();
    field.element(solve(&rows, &target).expect("power basis spans the extension"))
}

/// x^2 - d y^2 = 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PellSolution {
    pub x: FieldElement,
    pub y: FieldElement,
    pub d: FieldElement,
}

impl PellSolution {
    pub fn field(&self) -> &NumberField {
        self.x.field()
    }

    pub fn holds(&self) -> bool {
        (&(&self.x * &self.x) - &(&(&self.d * &self.y) * &self.y)).is_one()
    }

    /// (x1 x2 + d y1 y2, x1 y2 + x2 y1).
    pub fn compose(&self, o: &PellSolution) -> Result<PellSolution> {
        if self.d != o.d {
            return Err(Error::InvalidInput("different d".into()));
        }
        let x = &(&self.x * &o.x) + &(&(&self.d * &self.y) * &o.y);
        let y = &(&self.x * &o.y) + &(&o.x * &self.y);
        Ok(PellSolution { x, y, d: self.d.clone() })
    }

    pub fn integers(&self) -> Option<(BigInt, BigInt)> {
        let x = self.x.as_rational()?;
        let y = self.y.as_rational()?;
        if x.is_integer() && y.is_integer() {
            Some((x.numer().clone(), y.numer().clone()))
        } else {
            None
        }
    }
}

/// Fundamental solution of x^2 - d y^2 = 1 over Z from the continued fraction of √d.
pub fn pell_solve_q(d: &BigInt) -> Result<PellSolution> {
    if d <= &BigInt::one() {
        return Err(Error::InvalidInput("d must exceed 1".into()));
    }
    let a0 = d.sqrt();
    if &(&a0 * &a0) == d {
        return Err(Error::PerfectSquare(d.to_string()));
    }
    let (mut m, mut den, mut a) = (BigInt::zero(), BigInt::one(), a0.clone());
    let (mut p_prev, mut p) = (BigInt::one(), a0.clone());
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    while &p * &p - d * &q * &q != BigInt::one() {
        m = &den * &a - &m;
        den = (d - &m * &m) / &den;
        a = (&a0 + &m) / &den;
        let pn = &a * &p + &p_prev;
        let qn = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, pn);
        q_prev = std::mem::replace(&mut q, qn);
    }
    let qf = NumberField::rationals();
    let s = PellSolution { x: qf.from_int(p), y: qf.from_int(q), d: qf.from_int(d.clone()) };
    debug_assert!(s.holds());
    Ok(s)
}

/// ε = x - δ y in K(δ), with x^2 - d y^2 = 1.
#[derive(Clone, Debug)]
pub struct QuadUnit {
    pub ext: QuadraticExtension,
    pub x: FieldElement,
    pub y: FieldElement,
}

impl PartialEq for QuadUnit {
    fn eq(&self, o: &Self) -> bool {
        self.ext == o.ext && self.x == o.x && self.y == o.y
    }
}

impl Serialize for QuadUnit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PellSolution { x: self.x.clone(), y: self.y.clone(), d: self.ext.d().clone() }.serialize(s)
    }
}

impl QuadUnit {
    pub fn new(ext: &QuadraticExtension, x: FieldElement, y: FieldElement) -> Result<QuadUnit> {
        let u = QuadUnit { ext: ext.clone(), x, y };
        if !u.pell().holds() {
            return Err(Error::HypothesisViolated("x^2 - d y^2 != 1".into()));
        }
        Ok(u)
    }

    pub fn from_value(ext: &QuadraticExtension, v: &FieldElement) -> Result<QuadUnit> {
        let (c, d) = ext.decompose(v)?;
        QuadUnit::new(ext, c, d.neg())
    }

    pub fn pell(&self) -> PellSolution {
        PellSolution { x: self.x.clone(), y: self.y.clone(), d: self.ext.d().clone() }
    }

    pub fn value(&self) -> FieldElement {
        self.ext.compose(&self.x, &self.y.neg()).expect("same base")
    }

    /// ε · σ(ε) with σ: δ -> -δ.
    pub fn norm_certificate(&self) -> Result<bool> {
        let v = self.value();
        Ok((&v * &self.ext.conj(&v)?).is_one())
    }

    pub fn pow(&self, e: i64) -> Result<QuadUnit> {
        QuadUnit::from_value(&self.ext, &self.value().pow(e)?)
    }
}

/// Multiplicative order of x if x is a root of unity. Orders k with φ(k) <= [Q(x):Q] are
/// the only candidates, so None is a proof.
pub fn is_root_of_unity(x: &FieldElement) -> Option<u64> {
    if x.is_zero() || !x.is_integral() {
        return None;
    }
    if x.norm().abs() != Rat::one() {
        return None;
    }
    let n = x.field().degree() as u64;
    let kmax = (1..=2 * n * n + 2).filter(|&k| euler_phi(k) <= n).max().unwrap();
    let mut p = x.clone();
    for k in 1..=kmax {
        if p.is_one() {
            return Some(k);
        }
        p = &p * x;
    }
    None
}

/// Points of Z^n with max-norm at most h, ordered by height then lexicographically.
fn height_box(n: usize, h: i64) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * (2 * h as usize + 1));
        for v in &out {
            for c in -h..=h {
                let mut w = v.clone();
                w.push(c);
                next.push(w);
            }
        }
        out = next;
    }
    out.sort_by_key(|v| (v.iter().map(|c| c.abs()).max().unwrap_or(0), v.clone()));
    out
}

/// Elements of the power-basis lattice Z[θ] of height at most h.
pub fn power_basis_box(k: &NumberField, h: i64) -> Vec<FieldElement> {
    height_box(k.degree(), h).into_iter().map(|v| k.elem(&v)).collect()
}

/// Elements c + δd of a quadratic extension with c, d in the base power-basis box.
pub fn relative_box(ext: &QuadraticExtension, h: i64) -> Vec<FieldElement> {
    let n = ext.base().degree();
    height_box(2 * n, h)
        .into_iter()
        .map(|v| {
            let c = ext.base().elem(&v[..n]);
            let d = ext.base().elem(&v[n..]);
            ext.compose(&c, &d).unwrap()
        })
        .collect()
}

/// All (x, y) among the candidates with x^2 - d y^2 = 1.
pub fn norm_one_solutions(d: &FieldElement, candidates: &[FieldElement]) -> Vec<(FieldElement, FieldElement)> {
    let mut by_norm: HashMap<Rat, Vec<&FieldElement>> = HashMap::new();
    for x in candidates {
        let n = x.norm();
        by_norm.entry(&n * &n).or_default().push(x);
    }
    let mut out = Vec::new();
    for y in candidates {
        let target = (&(d * y) * y).add_rat(&Rat::one());
        if let Some(xs) = by_norm.get(&target.norm()) {
            for x in xs {
                if &(*x * *x) == &target {
                    out.push(((*x).clone(), y.clone()));
                }
            }
        }
    }
    out
}

/// Some ε = x - δy with x^2 - dy^2 = 1, x, y of height at most `height`, ε not a root of unity.
pub fn norm_one_unit_search(k: &NumberField, d: &FieldElement, height: i64) -> Result<Option<QuadUnit>> {
    if d.field() != k {
        return Err(Error::FieldMismatch);
    }
    let ext = QuadraticExtension::new(k, d)?;
    if let Some(r) = d.as_rational() {
        if r.is_integer() && r > Rat::one() && k.degree() <= 2 && k.is_totally_real() {
            // fundamental solution of the rational Pell equation, lifted
            let s = pell_solve_q(r.numer())?;
            let (x, y) = s.integers().unwrap();
            return Ok(Some(QuadUnit::new(&ext, k.from_int(x), k.from_int(y))?));
        }
    }
    let cands = power_basis_box(k, height);
    for (x, y) in norm_one_solutions(d, &cands) {
        let u = QuadUnit::new(&ext, x, y)?;
        if is_root_of_unity(&u.value()).is_none() {
            return Ok(Some(u));
        }
    }
    Ok(None)
}

/// Solutions of height at most `height` whose ε is a root of unity.
pub fn norm_one_roots_of_unity(k: &NumberField, d: &FieldElement, height: i64) -> Result<Vec<QuadUnit>> {
    let ext = QuadraticExtension::new(k, d)?;
    let mut out = Vec::new();
    for (x, y) in norm_one_solutions(d, &power_basis_box(k, height)) {
        let u = QuadUnit::new(&ext, x, y)?;
        if is_root_of_unity(&u.value()).is_some() {
            out.push(u);
        }
    }
    Ok(out)
}

/// For x^2 - dy^2 = 1 with ξ = x - δy a root of unity, checks ξ^4 = 1.
pub fn check_rootofunity_fourth(x: &FieldElement, y: &FieldElement, d: &FieldElement) -> Result<bool> {
    let ext = QuadraticExtension::new(d.field(), d)?;
    if !x.is_integral() || !y.is_integral() {
        return Err(Error::HypothesisViolated("x and y must be integral".into()));
    }
    let u = QuadUnit::new(&ext, x.clone(), y.clone())?;
    let xi = u.value();
    if is_root_of_unity(&xi).is_none() {
        return Err(Error::HypothesisViolated("x - δy is not a root of unity".into()));
    }
    Ok(xi.pow(4)?.is_one())
}

/// Whether both components of ε^4 lie in the subfield M embedded by `m_hom`.
pub fn fourth_power_in_bm(eps: &QuadUnit, m_hom: &FieldHom) -> Result<bool> {
    if &m_hom.dst != eps.ext.base() {
        return Err(Error::SubfieldDataMissing);
    }
    let e4 = eps.pow(4)?;
    Ok(subfield_coords(m_hom, &e4.x)?.is_some() && subfield_coords(m_hom, &e4.y)?.is_some())
}

/// 1 + ε^r + ... + ε^{r(k-1)} - k = (ε^{rk} - 1)/(ε^r - 1) - k.
fn closeto1_gap(eps: &FieldElement, r: u64, k: u64) -> Result<FieldElement> {
    let er = eps.pow(r as i64)?;
    if er.is_one() {
        return Err(Error::HypothesisViolated("ε^r = 1".into()));
    }
    let mut s = eps.field().zero();
    let mut p = eps.field().one();
    for _ in 0..k {
        s = &s + &p;
        p = &p * &er;
    }
    Ok(s.add_rat(&Rat::from(-(k as i64))))
}

/// Smallest r <= budget with |τ(ε^{rk} - 1)/τ(ε^r - 1) - k| < λ at every non-real τ.
pub fn closeto1_find_r(eps: &QuadUnit, k: u64, lambda: &Rat, budget: u64) -> Result<Option<u64>> {
    if k == 0 || !lambda.is_positive() {
        return Err(Error::InvalidInput("k and λ must be positive".into()));
    }
    let h = eps.ext.field();
    let complex: Vec<_> = h.embeddings().into_iter().filter(|e| !e.is_real).collect();
    if complex.is_empty() || k == 1 {
        return Ok(Some(1));
    }
    let v = eps.value();
    let lam = h.from_rat(lambda.clone());
    'r: for r in 1..=budget {
        let g = closeto1_gap(&v, r, k)?;
        for e in &complex {
            if abs_compare(&g, &lam, e)? != Ordering::Less {
                continue 'r;
            }
        }
        return Ok(Some(r));
    }
    Ok(None)
}

/// Approximate max over non-real τ of |τ((ε^{rk} - 1)/(ε^r - 1)) - k| for r = 1..=rmax.
pub fn closeto1_errors(eps: &QuadUnit, k: u64, rmax: u64) -> Result<Vec<f64>> {
    let h = eps.ext.field();
    let complex: Vec<_> = h.embeddings().into_iter().filter(|e| !e.is_real).collect();
    let v = eps.value();
    let mut out = Vec::new();
    for r in 1..=rmax {
        let g = closeto1_gap(&v, r, k)?;
        let m = complex
            .iter()
            .map(|e| {
                let (re, im) = g.approx(e);
                re.hypot(im)
            })
            .fold(0.0, f64::max);
        out.push(m);
    }
    Ok(out)
}

/// Default cap on the order search in unit_congruence_power.
pub const ORDER_BUDGET: u64 = 1 << 20;

fn reduce_mod(x: &FieldElement, m: &BigInt) -> Option<FieldElement> {
    let mut c = Vec::with_capacity(x.coords().len());
    for v in x.coords() {
        if !v.is_integer() {
            return None;
        }
        c.push(Rat::from(v.numer().mod_floor(m)));
    }
    Some(x.field().element(c))
}

/// Whether ν ≡ 1 mod m in the ring of integers of the extension.
pub fn congruent_to_one(nu: &QuadUnit, m: &FieldElement) -> Result<bool> {
    let mm = nu.ext.lift(m)?;
    Ok(((&nu.value() - &nu.ext.field().one()).try_div(&mm)?).is_integral())
}

/// Smallest t with ε^t ≡ 1 mod m, and ν = ε^t.
pub fn unit_congruence_power(eps: &QuadUnit, m: &FieldElement, budget: u64) -> Result<(u64, QuadUnit)> {
    if m.is_zero() {
        return Err(Error::InvalidInput("zero modulus".into()));
    }
    if m.field() != eps.ext.base() {
        return Err(Error::FieldMismatch);
    }
    if congruent_to_one(eps, m)? {
        return Ok((1, eps.clone()));
    }
    // an order modulo the rational integer |N(m)|, which m divides
    let nm = m.norm();
    if !m.is_integral() || !nm.is_integer() {
        return Err(Error::NonIntegral);
    }
    let big = nm.numer().abs();
    let d = eps.ext.d();
    let dr = reduce_mod(d, &big).ok_or(Error::NonIntegral)?;
    let start = (reduce_mod(&eps.x, &big).ok_or(Error::NonIntegral)?, reduce_mod(&eps.y.neg(), &big).ok_or(Error::NonIntegral)?);
    let k = eps.ext.base();
    let one = (reduce_mod(&k.one(), &big).unwrap(), k.zero());
    let mut p = start.clone();
    let mut t0 = 1u64;
    while p != one {
        let q = pair_mul(&dr, &p, &start);
        p = (reduce_mod(&q.0, &big).unwrap(), reduce_mod(&q.1, &big).unwrap());
        t0 += 1;
        if t0 > budget {
            return Err(Error::OrderBudgetExceeded);
        }
    }
    let mut divs: Vec<u64> = (1..=t0.sqrt()).filter(|i| t0 % i == 0).flat_map(|i| [i, t0 / i]).collect();
    divs.sort_unstable();
    divs.dedup();
    for t in divs {
        let nu = eps.pow(t as i64)?;
        if congruent_to_one(&nu, m)? {
            return Ok((t, nu));
        }
    }
    unreachable!("ε^t0 ≡ 1 mod N(m)")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pell_brute(d: i64) -> (i64, i64) {
        for y in 1i64.. {
            let x2 = 1 + d * y * y;
            let x = (x2 as f64).sqrt().round() as i64;
            for c in [x - 1, x, x + 1] {
                if c > 0 && c * c == x2 {
                    return (c, y);
                }
            }
        }
        unreachable!()
    }

    #[test]
    fn pell_matches_brute_force() {
        for d in 2..=50i64 {
            let r = d.sqrt();
            if r * r == d {
                assert!(matches!(pell_solve_q(&BigInt::from(d)), Err(Error::PerfectSquare(_))));
                continue;
            }
            let s = pell_solve_q(&BigInt::from(d)).unwrap();
            let (x, y) = s.integers().unwrap();
            let (bx, by) = pell_brute(d);
            assert_eq!((x, y), (BigInt::from(bx), BigInt::from(by)), "d = {d}");
        }
        let s = pell_solve_q(&BigInt::from(61)).unwrap();
        assert_eq!(s.integers().unwrap().0, BigInt::from(1766319049i64));
    }

    #[test]
    fn quadratic_extension_basics() {
        let k = NumberField::from_ints(&[-2, 0, 1]).unwrap();
        let d = k.elem(&[0, -1]);
        let ext = QuadraticExtension::new(&k, &d).unwrap();
        assert_eq!(ext.field().degree(), 4);
        let delta = ext.delta();
        assert_eq!(&(delta * delta), &ext.lift(&d).unwrap());
        let h = ext.compose(&k.elem(&[1, 2]), &k.elem(&[3, -1])).unwrap();
        assert_eq!(ext.decompose(&h).unwrap(), (k.elem(&[1, 2]), k.elem(&[3, -1])));
        assert!(matches!(QuadraticExtension::new(&k, &k.from_int(2)), Err(Error::PerfectSquare(_))));
        assert!(matches!(QuadraticExtension::new(&k, &k.from_int(8)), Err(Error::PerfectSquare(_))));
        assert!(!is_square_in_field(&k.from_int(3)).unwrap());
        assert!(is_square_in_field(&k.elem(&[3, 2])).unwrap());
    }

    #[test]
    fn unit_search() {
        let q = NumberField::rationals();
        let u = norm_one_unit_search(&q, &q.from_int(2), 3).unwrap().unwrap();
        assert_eq!((u.x.clone(), u.y.clone()), (q.from_int(3), q.from_int(2)));
        assert!(u.norm_certificate().unwrap());
        assert!(norm_one_unit_search(&q, &q.from_int(-1), 5).unwrap().is_none());
        let k = NumberField::from_ints(&[-2, 0, 1]).unwrap();
        let u = norm_one_unit_search(&k, &k.from_int(3), 3).unwrap().unwrap();
        assert_eq!((u.x.clone(), u.y.clone()), (k.from_int(2), k.from_int(1)));
        let u = norm_one_unit_search(&k, &k.elem(&[0, -1]), 3).unwrap().unwrap();
        assert!(u.norm_certificate().unwrap());
        assert!(is_root_of_unity(&u.value()).is_none());
    }

    #[test]
    fn roots_of_unity() {
        let q = NumberField::rationals();
        assert_eq!(is_root_of_unity(&q.from_int(-1)), Some(2));
        assert_eq!(is_root_of_unity(&q.one()), Some(1));
        let k = NumberField::from_ints(&[-2, 0, 1]).unwrap();
        assert_eq!(is_root_of_unity(&k.elem(&[3, -2])), None);
        let ci = NumberField::from_ints(&[1, 1, 1]).unwrap();
        assert_eq!(is_root_of_unity(&ci.gen()), Some(3));
        let sols = norm_one_roots_of_unity(&q, &q.from_int(-1), 4).unwrap();
        assert_eq!(sols.len(), 4);
        for s in &sols {
            assert!(check_rootofunity_fourth(&s.x, &s.y, &q.from_int(-1)).unwrap());
        }
        assert_eq!(norm_one_roots_of_unity(&q, &q.from_int(-3), 4).unwrap().len(), 2);
    }

    #[test]
    fn closeto1_and_congruence() {
        let k = NumberField::from_ints(&[-2, 0, 1]).unwrap();
        let d = k.elem(&[0, -1]);
        let ext = QuadraticExtension::new(&k, &d).unwrap();
        let u = QuadUnit::new(&ext, k.elem(&[3, -2]), k.elem(&[2, -2])).unwrap();
        assert_eq!(closeto1_find_r(&u, 1, &Rat::frac(1, 2), 10).unwrap(), Some(1));
        let r = closeto1_find_r(&u, 2, &Rat::frac(1, 2), 200).unwrap().unwrap();
        let errs = closeto1_errors(&u, 2, r).unwrap();
        assert!(errs[r as usize - 1] < 0.5);
        assert!(errs[..r as usize - 1].iter().all(|&e| e >= 0.5));
        let m = k.from_int(2);
        let (t, nu) = unit_congruence_power(&u, &m, ORDER_BUDGET).unwrap();
        assert!(congruent_to_one(&nu, &m).unwrap());
        for s in 1..t {
            assert!(!congruent_to_one(&u.pow(s as i64).unwrap(), &m).unwrap());
        }
        assert_eq!(unit_congruence_power(&u, &k.one(), 10).unwrap().0, 1);
    }
}
