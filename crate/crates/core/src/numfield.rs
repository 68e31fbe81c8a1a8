//! Number fields Q(θ) presented by a monic irreducible integer polynomial.

use crate::ball::{eval_poly, CBall, Dy, RBall};
use crate::error::{Error, Result};
use crate::linalg::{solve, Echelon};
use crate::poly::QPoly;
use crate::rat::Rat;
use crate::roots::{isolate_roots, radius_within, refine, RootDisk};
use crate::zfactor;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

/// First precision tried by sign and comparison queries, in bits.
pub const PREC_START: u64 = 64;
/// Precision after which queries switch to the algebraic fallback.
pub const PREC_CAP: u64 = 4096;
/// Hard limit for the fallback refinement.
const PREC_HARD_LIMIT: u64 = 1 << 20;

struct Inner {
    poly: QPoly,
    ints: Vec<BigInt>,
    n: usize,
    disc: BigInt,
    roots: Vec<RootDisk>,
    r: usize,
    power_sums: Vec<Rat>,
    primary: usize,
}

/// A number field together with a chosen complex embedding (the primary one).
#[derive(Clone)]
pub struct NumberField(Arc<Inner>);

impl PartialEq for NumberField {
    fn eq(&self, o: &NumberField) -> bool {
        Arc::ptr_eq(&self.0, &o.0) || (self.0.ints == o.0.ints && self.0.primary == o.0.primary)
    }
}

impl Eq for NumberField {}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField({})", self.0.poly)
    }
}

impl Serialize for NumberField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.0.ints.iter().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

fn power_sums(ints: &[BigInt], count: usize) -> Vec<Rat> {
    // Newton's identities for x^n + a_{n-1} x^{n-1} + ... + a_0
    let n = ints.len() - 1;
    let a = |i: usize| Rat::from(ints[i].clone());
    let mut p: Vec<Rat> = vec![Rat::from(n as i64)];
    for k in 1..count {
        let mut s = Rat::zero();
        for i in 1..k.min(n + 1) {
            s += &(a(n - i) * &p[k - i]);
        }
        if k <= n {
            s += &(a(n - k) * Rat::from(k as i64));
        } else {
            s += &(a(0) * &p[k - n]);
            // terms i in 1..n already added; the a_0 term has index i = n
        }
        p.push(-s);
    }
    p
}

impl NumberField {
    /// Builds Q(θ) from the coefficients of a monic irreducible polynomial, low degree first.
    pub fn new(coeffs: &[BigInt]) -> Result<NumberField> {
        let mut c = coeffs.to_vec();
        while c.last().map_or(false, |x| x.is_zero()) {
            c.pop();
        }
        if c.len() <= 1 {
            return Err(Error::ZeroDegree);
        }
        if !c.last().unwrap().is_one() {
            return Err(Error::NotMonic);
        }
        if let Some(g) = zfactor::find_factor(&c)? {
            return Err(Error::Reducible(QPoly::from_bigints(&g).to_string()));
        }
        Ok(NumberField::build(c, 0))
    }

    pub fn from_ints(coeffs: &[i64]) -> Result<NumberField> {
        NumberField::new(&coeffs.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>())
    }

    /// The rational numbers, presented as Q(θ) with θ = 0.
    pub fn rationals() -> NumberField {
        NumberField::build(vec![BigInt::zero(), BigInt::one()], 0)
    }

    fn build(ints: Vec<BigInt>, primary: usize) -> NumberField {
        let poly = QPoly::from_bigints(&ints);
        let n = ints.len() - 1;
        let disc = poly.discriminant().numer().clone();
        let roots = isolate_roots(&poly, PREC_START);
        let r = roots.iter().filter(|d| d.is_real).count();
        assert_eq!(r, poly.count_real_roots(), "root isolation disagrees with the Sturm count");
        let ps = power_sums(&ints, 2 * n + 1);
        NumberField(Arc::new(Inner { poly, ints, n, disc, roots, r, power_sums: ps, primary }))
    }

    /// Same field with a different complex embedding marked as primary.
    pub fn with_primary(&self, index: usize) -> NumberField {
        assert!(index < self.0.n);
        NumberField(Arc::new(Inner {
            poly: self.0.poly.clone(),
            ints: self.0.ints.clone(),
            n: self.0.n,
            disc: self.0.disc.clone(),
            roots: self.0.roots.clone(),
            r: self.0.r,
            power_sums: self.0.power_sums.clone(),
            primary: index,
        }))
    }

    pub fn degree(&self) -> usize {
        self.0.n
    }

    pub fn min_poly(&self) -> &QPoly {
        &self.0.poly
    }

    pub fn poly_coeffs(&self) -> &[BigInt] {
        &self.0.ints
    }

    pub fn disc(&self) -> &BigInt {
        &self.0.disc
    }

    /// (r, s): real embeddings and pairs of complex embeddings.
    pub fn signature(&self) -> (usize, usize) {
        (self.0.r, (self.0.n - self.0.r) / 2)
    }

    pub fn is_totally_real(&self) -> bool {
        self.0.r == self.0.n
    }

    pub fn primary_index(&self) -> usize {
        self.0.primary
    }

    pub fn embeddings(&self) -> Vec<Embedding> {
        (0..self.0.n).map(|i| self.embedding(i)).collect()
    }

    pub fn embedding(&self, index: usize) -> Embedding {
        let d = self.0.roots[index].clone();
        Embedding { index, is_real: d.is_real, enclosure: d }
    }

    pub fn primary_embedding(&self) -> Embedding {
        self.embedding(self.0.primary)
    }

    pub fn real_embeddings(&self) -> Vec<Embedding> {
        self.embeddings().into_iter().filter(|e| e.is_real).collect()
    }

    /// Index of the embedding that is the complex conjugate of `index`.
    pub fn conjugate_index(&self, index: usize) -> usize {
        let d = &self.0.roots[index];
        if d.is_real {
            return index;
        }
        if d.im.signum() > 0 {
            index + 1
        } else {
            index - 1
        }
    }

    pub fn element(&self, coords: Vec<Rat>) -> FieldElement {
        FieldElement::from_poly(self, &QPoly::new(coords))
    }

    pub fn elem(&self, coords: &[i64]) -> FieldElement {
        self.element(coords.iter().map(|&c| Rat::from(c)).collect())
    }

    pub fn from_rat(&self, v: Rat) -> FieldElement {
        self.element(vec![v])
    }

    pub fn from_int<T: Into<BigInt>>(&self, v: T) -> FieldElement {
        self.from_rat(Rat::from_int(v))
    }

    pub fn zero(&self) -> FieldElement {
        self.from_rat(Rat::zero())
    }

    pub fn one(&self) -> FieldElement {
        self.from_rat(Rat::one())
    }

    /// The generator θ.
    pub fn gen(&self) -> FieldElement {
        FieldElement::from_poly(self, &QPoly::x())
    }

    fn trace_of_power(&self, k: usize) -> &Rat {
        &self.0.power_sums[k]
    }

    /// Disk for embedding `index` refined to `prec` bits.
    pub fn root_disk(&self, index: usize, prec: u64) -> RootDisk {
        let base = &self.0.roots[index];
        if prec <= base.prec && radius_within(&base.radius, prec) {
            return base.clone();
        }
        refine(&self.0.poly, base, prec)
    }
}

/// One complex embedding of a field, identified by the root enclosure of θ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub index: usize,
    pub enclosure: RootDisk,
    pub is_real: bool,
}

impl Embedding {
    /// A refined copy; the new enclosure lies inside the old one.
    pub fn refined(&self, field: &NumberField, prec: u64) -> Embedding {
        let d = field.root_disk(self.index, prec);
        Embedding { index: self.index, is_real: d.is_real, enclosure: d }
    }
}

/// An element of a number field in the power basis 1, θ, ..., θ^(n-1).
#[derive(Clone)]
pub struct FieldElement {
    field: NumberField,
    c: Vec<Rat>,
}

impl PartialEq for FieldElement {
    fn eq(&self, o: &FieldElement) -> bool {
        self.field == o.field && self.c == o.c
    }
}

impl Eq for FieldElement {}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = QPoly::new(self.c.clone());
        write!(f, "{}", p.to_string().replace('x', "t"))
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.c.iter().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

/// Exact sign of a real number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
}

fn reduce_mod(mut c: Vec<Rat>, f: &[BigInt]) -> Vec<Rat> {
    let n = f.len() - 1;
    while c.len() > n {
        let top = c.pop().unwrap();
        if top.is_zero() {
            continue;
        }
        let k = c.len() - n;
        for i in 0..n {
            if !f[i].is_zero() {
                let t = &top * &Rat::from(f[i].clone());
                c[k + i] -= &t;
            }
        }
    }
    c.resize(n, Rat::zero());
    c
}

impl FieldElement {
    pub fn from_poly(field: &NumberField, p: &QPoly) -> FieldElement {
        let c = reduce_mod(p.coeffs().to_vec(), &field.0.ints);
        FieldElement { field: field.clone(), c }
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn coords(&self) -> &[Rat] {
        &self.c
    }

    pub fn as_poly(&self) -> QPoly {
        QPoly::new(self.c.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|v| v.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.c[0].is_one() && self.c[1..].iter().all(|v| v.is_zero())
    }

    /// The rational value if the element lies in Q.
    pub fn as_rational(&self) -> Option<Rat> {
        if self.c[1..].iter().all(|v| v.is_zero()) {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    fn check(&self, o: &FieldElement) -> Result<()> {
        if self.field == o.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn try_add(&self, o: &FieldElement) -> Result<FieldElement> {
        self.check(o)?;
        Ok(FieldElement { field: self.field.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() })
    }

    pub fn try_sub(&self, o: &FieldElement) -> Result<FieldElement> {
        self.check(o)?;
        Ok(FieldElement { field: self.field.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() })
    }

    pub fn try_mul(&self, o: &FieldElement) -> Result<FieldElement> {
        self.check(o)?;
        let n = self.c.len();
        if n == 1 {
            return Ok(FieldElement { field: self.field.clone(), c: vec![&self.c[0] * &o.c[0]] });
        }
        let mut prod = vec![Rat::zero(); 2 * n - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += &(a * b);
                }
            }
        }
        Ok(FieldElement { field: self.field.clone(), c: reduce_mod(prod, &self.field.0.ints) })
    }

    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.c.len() == 1 {
            return Ok(FieldElement { field: self.field.clone(), c: vec![self.c[0].recip()] });
        }
        let (g, s, _) = self.as_poly().ext_gcd(self.field.min_poly());
        debug_assert_eq!(g.deg(), 0);
        Ok(FieldElement::from_poly(&self.field, &s))
    }

    pub fn try_div(&self, o: &FieldElement) -> Result<FieldElement> {
        self.check(o)?;
        self.try_mul(&o.inv()?)
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement { field: self.field.clone(), c: self.c.iter().map(|v| -v).collect() }
    }

    pub fn scale(&self, k: &Rat) -> FieldElement {
        FieldElement { field: self.field.clone(), c: self.c.iter().map(|v| v * k).collect() }
    }

    pub fn add_rat(&self, k: &Rat) -> FieldElement {
        let mut c = self.c.clone();
        c[0] = &c[0] + k;
        FieldElement { field: self.field.clone(), c }
    }

    pub fn pow(&self, e: i64) -> Result<FieldElement> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut result = self.field.one();
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    /// Norm to Q: the resultant of the defining polynomial and the coordinate polynomial.
    pub fn norm(&self) -> Rat {
        if self.c.len() == 1 {
            return self.c[0].clone();
        }
        if let Some(r) = self.as_rational() {
            return r.pow(self.c.len() as i64);
        }
        self.field.min_poly().resultant(&self.as_poly())
    }

    pub fn trace(&self) -> Rat {
        let mut t = Rat::zero();
        for (k, a) in self.c.iter().enumerate() {
            if !a.is_zero() {
                t += &(a * self.field.trace_of_power(k));
            }
        }
        t
    }

    /// Monic minimal polynomial over Q, found as the first linear dependency among powers.
    pub fn min_poly(&self) -> QPoly {
        let n = self.c.len();
        let mut ech = Echelon::new(n);
        let mut p = self.field.one();
        let mut k = 0;
        loop {
            if let Some(rel) = ech.insert(&p.c) {
                // x^k = sum rel_i x^i
                let mut coeffs: Vec<Rat> = rel.iter().map(|v| -v).collect();
                coeffs.push(Rat::one());
                return QPoly::new(coeffs);
            }
            p = &p * self;
            k += 1;
            assert!(k <= n, "minimal polynomial degree exceeds field degree");
        }
    }

    /// Characteristic polynomial of multiplication by self (min_poly^(n/d)).
    pub fn char_poly(&self) -> QPoly {
        let m = self.min_poly();
        let d = m.deg() as u32;
        m.pow(self.c.len() as u32 / d)
    }

    /// True iff the element is an algebraic integer.
    pub fn is_integral(&self) -> bool {
        if self.c.iter().all(|v| v.is_integer()) {
            return true;
        }
        self.min_poly().coeffs().iter().all(|v| v.is_integer())
    }

    /// Ball containing the image under an embedding, with θ known to `prec` bits.
    pub fn eval_at(&self, e: &Embedding, prec: u64) -> CBall {
        let d = self.field.root_disk(e.index, prec);
        eval_poly(&self.c, &d.as_ball(), prec + 32)
    }

    /// Approximate complex value under an embedding.
    pub fn approx(&self, e: &Embedding) -> (f64, f64) {
        let b = self.eval_at(e, 64);
        (b.re.mid.to_f64(), b.im.mid.to_f64())
    }

    /// Evaluates an integer-coefficient polynomial at self.
    pub fn eval_poly_at(&self, p: &QPoly) -> FieldElement {
        let mut acc = self.field.zero();
        for c in p.coeffs().iter().rev() {
            acc = (&acc * self).add_rat(c);
        }
        acc
    }
}

macro_rules! field_binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl<'a, 'b> std::ops::$tr<&'b FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            fn $m(self, o: &'b FieldElement) -> FieldElement {
                self.$f(o).expect("elements of different fields")
            }
        }
        impl std::ops::$tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, o: FieldElement) -> FieldElement {
                (&self).$f(&o).expect("elements of different fields")
            }
        }
    };
}
field_binop!(Add, add, try_add);
field_binop!(Sub, sub, try_sub);
field_binop!(Mul, mul, try_mul);

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::neg(self)
    }
}

/// The arith operation; `y` is ignored for negation.
pub fn arith(op: ArithOp, x: &FieldElement, y: &FieldElement) -> Result<FieldElement> {
    match op {
        ArithOp::Add => x.try_add(y),
        ArithOp::Sub => x.try_sub(y),
        ArithOp::Mul => x.try_mul(y),
        ArithOp::Div => x.try_div(y),
        ArithOp::Neg => {
            x.check(y)?;
            Ok(x.neg())
        }
    }
}

/// Lower bound on |t| over the nonzero roots of p.
fn nonzero_root_lower_bound(p: &QPoly) -> Rat {
    let mut q = p.clone();
    while q.coeff(0).is_zero() && !q.is_zero() {
        q = QPoly::new(q.coeffs()[1..].to_vec());
    }
    let q0 = q.coeff(0).abs();
    let m = q.coeffs()[1..].iter().map(|v| v.abs()).max().unwrap_or_else(Rat::zero);
    &q0 / &(&q0 + &m)
}

fn prec_for(bound: &Rat) -> u64 {
    // 2^-prec well below bound/4
    let bits = bound.denom().bits() as i64 - bound.numer().bits() as i64 + 8;
    bits.max(PREC_START as i64) as u64
}

/// Exact sign at a real embedding.
pub fn sign_at(x: &FieldElement, e: &Embedding) -> Result<Sign> {
    if !e.is_real {
        return Err(Error::NonRealEmbedding(e.index));
    }
    if x.is_zero() {
        return Ok(Sign::Zero);
    }
    if let Some(r) = x.as_rational() {
        return Ok(if r.is_positive() { Sign::Positive } else { Sign::Negative });
    }
    let decide = |prec: u64| x.eval_at(e, prec).re.sign();
    let mut prec = PREC_START;
    while prec <= PREC_CAP {
        if let Some(s) = decide(prec) {
            return Ok(if s > 0 { Sign::Positive } else { Sign::Negative });
        }
        prec *= 2;
    }
    // x != 0, so e(x) is a nonzero root of its minimal polynomial and is at
    // least this far from zero
    let beta = nonzero_root_lower_bound(&x.min_poly());
    let mut prec = prec_for(&beta).max(2 * PREC_CAP);
    while prec <= PREC_HARD_LIMIT {
        if let Some(s) = decide(prec) {
            return Ok(if s > 0 { Sign::Positive } else { Sign::Negative });
        }
        prec *= 2;
    }
    Err(Error::PrecisionExhausted("sign query".into()))
}

/// Element h(u, v) = x(u) x(v) - y(u) y(v) of Q[u, v]/(f(u), f(v)); its
/// value at (θ_e, conj θ_e) is |e(x)|^2 - |e(y)|^2.
fn modulus_gap_min_poly(x: &FieldElement, y: &FieldElement) -> Result<QPoly> {
    let f = x.field.poly_coeffs();
    let n = x.field.degree();
    if n * n > 64 {
        return Err(Error::PrecisionExhausted("exact modulus comparison limited to degree 8".into()));
    }
    let alg = Algebra::new(f, f);
    let h = alg.sub(&alg.outer(&x.c, &x.c), &alg.outer(&y.c, &y.c));
    Ok(alg.min_poly(&h))
}

/// Compares |e(x)| with |e(y)| exactly.
pub fn abs_compare(x: &FieldElement, y: &FieldElement, e: &Embedding) -> Result<Ordering> {
    x.check(y)?;
    let x2 = x * x;
    let y2 = y * y;
    if x2 == y2 {
        return Ok(Ordering::Equal);
    }
    if e.is_real {
        return Ok(match sign_at(&(&x2 - &y2), e)? {
            Sign::Positive => Ordering::Greater,
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
        });
    }
    let gap = |prec: u64| -> RBall {
        let bx = x.eval_at(e, prec);
        let by = y.eval_at(e, prec);
        bx.norm_sq(prec + 32).sub(&by.norm_sq(prec + 32), prec + 32)
    };
    let to_ord = |s: i32| if s > 0 { Ordering::Greater } else { Ordering::Less };
    let mut prec = PREC_START;
    while prec <= PREC_CAP {
        if let Some(s) = gap(prec).sign() {
            return Ok(to_ord(s));
        }
        prec *= 2;
    }
    let m = modulus_gap_min_poly(x, y)?;
    let beta = nonzero_root_lower_bound(&m);
    let zero_possible = m.coeff(0).is_zero();
    let beta_dy = Dy::from_rat_floor(&beta, 64).0;
    let mut prec = prec_for(&beta).max(2 * PREC_CAP);
    while prec <= PREC_HARD_LIMIT {
        let g = gap(prec);
        if let Some(s) = g.sign() {
            return Ok(to_ord(s));
        }
        if zero_possible && g.abs_upper() < beta_dy {
            return Ok(Ordering::Equal);
        }
        prec *= 2;
    }
    Err(Error::PrecisionExhausted("modulus comparison".into()))
}

pub fn is_totally_real_field(f: &NumberField) -> bool {
    f.is_totally_real()
}

pub fn is_totally_positive(x: &FieldElement) -> Result<bool> {
    if !x.field.is_totally_real() {
        return Ok(false);
    }
    for e in x.field.real_embeddings() {
        if sign_at(x, &e)? != Sign::Positive {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The algebra Q[u, v]/(f(u), g(v)), elements as coefficient arrays indexed i*m + j for u^i v^j.
pub(crate) struct Algebra {
    f: Vec<BigInt>,
    g: Vec<BigInt>,
    n: usize,
    m: usize,
}

impl Algebra {
    pub(crate) fn new(f: &[BigInt], g: &[BigInt]) -> Algebra {
        Algebra { f: f.to_vec(), g: g.to_vec(), n: f.len() - 1, m: g.len() - 1 }
    }

    pub(crate) fn dim(&self) -> usize {
        self.n * self.m
    }

    fn reduce(&self, full: Vec<Vec<Rat>>) -> Vec<Rat> {
        // full[i][j] for i < 2n-1, j < 2m-1
        let rows: Vec<Vec<Rat>> = full.into_iter().map(|r| reduce_mod(r, &self.g)).collect();
        let mut out = vec![Rat::zero(); self.dim()];
        for j in 0..self.m {
            let col: Vec<Rat> = rows.iter().map(|r| r[j].clone()).collect();
            let col = reduce_mod(col, &self.f);
            for i in 0..self.n {
                out[i * self.m + j] = col[i].clone();
            }
        }
        out
    }

    pub(crate) fn mul(&self, a: &[Rat], b: &[Rat]) -> Vec<Rat> {
        let (n, m) = (self.n, self.m);
        let mut full = vec![vec![Rat::zero(); 2 * m - 1]; 2 * n - 1];
        for i1 in 0..n {
            for j1 in 0..m {
                let x = &a[i1 * m + j1];
                if x.is_zero() {
                    continue;
                }
                for i2 in 0..n {
                    for j2 in 0..m {
                        let y = &b[i2 * m + j2];
                        if !y.is_zero() {
                            full[i1 + i2][j1 + j2] += &(x * y);
                        }
                    }
                }
            }
        }
        self.reduce(full)
    }

    pub(crate) fn sub(&self, a: &[Rat], b: &[Rat]) -> Vec<Rat> {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    /// p(u) * q(v).
    pub(crate) fn outer(&self, p: &[Rat], q: &[Rat]) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.dim()];
        for i in 0..self.n {
            for j in 0..self.m {
                out[i * self.m + j] = &p[i] * &q[j];
            }
        }
        out
    }

    pub(crate) fn one(&self) -> Vec<Rat> {
        let mut o = vec![Rat::zero(); self.dim()];
        o[0] = Rat::one();
        o
    }

    pub(crate) fn min_poly(&self, h: &[Rat]) -> QPoly {
        let mut ech = Echelon::new(self.dim());
        let mut p = self.one();
        loop {
            if let Some(rel) = ech.insert(&p) {
                let mut coeffs: Vec<Rat> = rel.iter().map(|v| -v).collect();
                coeffs.push(Rat::one());
                return QPoly::new(coeffs);
            }
            p = self.mul(&p, h);
        }
    }
}

/// An embedding of fields src -> dst, determined by the image of the generator.
#[derive(Clone, Debug)]
pub struct FieldHom {
    pub src: NumberField,
    pub dst: NumberField,
    pub image: FieldElement,
}

impl FieldHom {
    pub fn new(src: &NumberField, dst: &NumberField, image: FieldElement) -> Result<FieldHom> {
        if image.field() != dst {
            return Err(Error::FieldMismatch);
        }
        if !image.eval_poly_at(src.min_poly()).is_zero() {
            return Err(Error::InvalidInput("image does not satisfy the minimal polynomial".into()));
        }
        Ok(FieldHom { src: src.clone(), dst: dst.clone(), image })
    }

    pub fn identity(f: &NumberField) -> FieldHom {
        FieldHom { src: f.clone(), dst: f.clone(), image: f.gen() }
    }

    pub fn apply(&self, x: &FieldElement) -> Result<FieldElement> {
        if x.field() != &self.src {
            return Err(Error::FieldMismatch);
        }
        Ok(self.image.eval_poly_at(&x.as_poly()))
    }

    /// Coordinates of x in the source field if x lies in the image.
    pub fn preimage(&self, x: &FieldElement) -> Result<Option<FieldElement>> {
        subfield_coords(self, x)
    }
}

/// Coordinates over F of an element of M, for F embedded in M by `hom`.
pub fn subfield_coords(hom: &FieldHom, x: &FieldElement) -> Result<Option<FieldElement>> {
    if x.field() != &hom.dst {
        return Err(Error::FieldMismatch);
    }
    let nf = hom.src.degree();
    let nm = hom.dst.degree();
    let mut cols = Vec::with_capacity(nf);
    let mut p = hom.dst.one();
    for _ in 0..nf {
        cols.push(p.coords().to_vec());
        p = &p * &hom.image;
    }
    let rows: Vec<Vec<Rat>> = (0..nm).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
    Ok(solve(&rows, x.coords()).map(|c| hom.src.element(c)))
}

/// Compositum F1 F2 inside C (using each field's primary embedding).
#[derive(Clone, Debug)]
pub struct Compositum {
    pub field: NumberField,
    pub left: FieldHom,
    pub right: FieldHom,
    /// Generator is θ1 + k θ2.
    pub k: i64,
}

pub const DEFAULT_DEGREE_BUDGET: usize = 16;

type KPoly = Vec<FieldElement>;

fn kpoly_trim(mut p: KPoly) -> KPoly {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
    p
}

fn kpoly_rem(a: &KPoly, b: &KPoly) -> KPoly {
    let mut r = a.clone();
    let db = b.len() - 1;
    let inv = b[db].inv().expect("nonzero leading coefficient");
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let t = &r[r.len() - 1] * &inv;
        for (j, bj) in b.iter().enumerate() {
            r[k + j] = &r[k + j] - &(&t * bj);
        }
        r.pop();
        r = kpoly_trim(r);
    }
    r
}

fn kpoly_gcd(a: &KPoly, b: &KPoly) -> KPoly {
    let (mut a, mut b) = (kpoly_trim(a.clone()), kpoly_trim(b.clone()));
    while !b.is_empty() {
        let r = kpoly_rem(&a, &b);
        a = b;
        b = r;
    }
    let inv = a.last().unwrap().inv().unwrap();
    a.iter().map(|c| c * &inv).collect()
}

fn kpoly_mul(a: &KPoly, b: &KPoly, field: &NumberField) -> KPoly {
    let mut r = vec![field.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            r[i + j] = &r[i + j] + &(x * y);
        }
    }
    r
}

/// p(q(y)) with p rational and q over the field.
fn kpoly_compose(p: &QPoly, q: &KPoly, field: &NumberField) -> KPoly {
    let mut acc: KPoly = vec![field.zero()];
    for c in p.coeffs().iter().rev() {
        acc = kpoly_mul(&acc, q, field);
        acc[0] = acc[0].add_rat(c);
    }
    kpoly_trim(acc)
}

fn balls_meet(a: &CBall, d: &RootDisk) -> bool {
    let b = d.as_ball();
    let overlap = |x: &RBall, y: &RBall| x.lower() <= y.upper() && y.lower() <= x.upper();
    overlap(&a.re, &b.re) && overlap(&a.im, &b.im)
}

pub fn compositum(f1: &NumberField, f2: &NumberField, budget: usize) -> Result<Compositum> {
    compositum_where(f1, f2, budget, &|_| true)
}

/// As `compositum`, but only accepts generators whose minimal polynomial passes `accept`.
pub fn compositum_where(
    f1: &NumberField,
    f2: &NumberField,
    budget: usize,
    accept: &dyn Fn(&[BigInt]) -> bool,
) -> Result<Compositum> {
    let (n1, n2) = (f1.degree(), f2.degree());
    if n1 == 1 {
        let image = f2.from_rat(-f1.min_poly().coeff(0));
        return Ok(Compositum { field: f2.clone(), left: FieldHom::new(f1, f2, image)?, right: FieldHom::identity(f2), k: 0 });
    }
    if n2 == 1 {
        let image = f1.from_rat(-f2.min_poly().coeff(0));
        return Ok(Compositum { field: f1.clone(), left: FieldHom::identity(f1), right: FieldHom::new(f2, f1, image)?, k: 0 });
    }
    if f1 == f2 {
        return Ok(Compositum { field: f1.clone(), left: FieldHom::identity(f1), right: FieldHom::identity(f1), k: 0 });
    }
    if n1 * n2 > budget {
        return Err(Error::DegreeBudgetExceeded(format!("[F1:Q][F2:Q] = {} exceeds {}", n1 * n2, budget)));
    }
    let alg = Algebra::new(f1.poly_coeffs(), f2.poly_coeffs());
    let e1 = f1.primary_embedding();
    let e2 = f2.primary_embedding();
    for k in 1..=50i64 {
        // γ = u + k v
        let mut gamma = vec![Rat::zero(); alg.dim()];
        gamma[n2] = Rat::one();
        gamma[1] = Rat::from(k);
        let h = alg.min_poly(&gamma);
        if h.deg() as usize != n1 * n2 {
            continue;
        }
        let factors = zfactor::factor_over_q(&h)?;
        // locate the factor that vanishes at θ1 + k θ2 under the primary embeddings
        let mut prec = PREC_START;
        let chosen = loop {
            let t1 = f1.gen().eval_at(&e1, prec);
            let t2 = f2.gen().eval_at(&e2, prec);
            let g0 = t1.add(&t2.mul(&CBall::from_rat(&Rat::from(k), prec), prec), prec);
            let mut hits = Vec::new();
            for (fi, fac) in factors.iter().enumerate() {
                for (ri, d) in isolate_roots(fac, prec).iter().enumerate() {
                    let d = refine(fac, d, prec);
                    if balls_meet(&g0, &d) {
                        hits.push((fi, ri));
                    }
                }
            }
            if hits.len() == 1 {
                break hits[0];
            }
            prec *= 2;
            if prec > PREC_HARD_LIMIT {
                return Err(Error::PrecisionExhausted("compositum factor selection".into()));
            }
        };
        let fac = &factors[chosen.0];
        let ints = fac.to_ints().expect("minimal polynomial of an algebraic integer is integral");
        if !accept(&ints) {
            continue;
        }
        let m = NumberField::build(ints, chosen.1);
        // θ2 is the common root of f2(y) and f1(γ - k y)
        let g = m.gen();
        let lin: KPoly = vec![g.clone(), m.from_int(-k)];
        let a = kpoly_compose(f1.min_poly(), &lin, &m);
        let b: KPoly = f2.min_poly().coeffs().iter().map(|c| m.from_rat(c.clone())).collect();
        let d = kpoly_gcd(&a, &b);
        if d.len() != 2 {
            return Err(Error::Inconsistent("compositum generator does not determine θ2".into()));
        }
        let theta2 = d[0].neg();
        let theta1 = &g - &theta2.scale(&Rat::from(k));
        let left = FieldHom::new(f1, &m, theta1)?;
        let right = FieldHom::new(f2, &m, theta2)?;
        return Ok(Compositum { field: m, left, right, k });
    }
    Err(Error::DegreeBudgetExceeded("no primitive element θ1 + kθ2 with k <= 50".into()))
}
