//! Elliptic curves in long Weierstrass form over number fields.
//!
//! Large multiples are computed with the division-polynomial ladder:
//! x([n]P) = x - ψ(n-1)ψ(n+1)/ψ(n)^2 and 2y([n]P) + a1 x([n]P) + a3 = ψ(2n)/ψ(n)^4.

use crate::divisors::{self, coprime_to_den, den_divisor, divides_den, divisor_divides, Divisor};
use crate::error::{Error, Result};
use crate::intarith::{ord_p, powmod};
use crate::numfield::{FieldElement, NumberField};
use crate::rat::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

/// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllipticCurve {
    field: NumberField,
    pub a1: FieldElement,
    pub a2: FieldElement,
    pub a3: FieldElement,
    pub a4: FieldElement,
    pub a6: FieldElement,
    pub b2: FieldElement,
    pub b4: FieldElement,
    pub b6: FieldElement,
    pub b8: FieldElement,
    pub disc: FieldElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurvePoint {
    Identity,
    Affine(FieldElement, FieldElement),
}

impl CurvePoint {
    pub fn is_identity(&self) -> bool {
        matches!(self, CurvePoint::Identity)
    }

    pub fn x(&self) -> Result<&FieldElement> {
        match self {
            CurvePoint::Identity => Err(Error::IdentityPoint),
            CurvePoint::Affine(x, _) => Ok(x),
        }
    }

    pub fn y(&self) -> Result<&FieldElement> {
        match self {
            CurvePoint::Identity => Err(Error::IdentityPoint),
            CurvePoint::Affine(_, y) => Ok(y),
        }
    }
}

impl Serialize for CurvePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CurvePoint::Identity => s.serialize_str("O"),
            CurvePoint::Affine(x, y) => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("x", x)?;
                m.serialize_entry("y", y)?;
                m.end()
            }
        }
    }
}

impl EllipticCurve {
    pub fn new(field: &NumberField, a: [FieldElement; 5]) -> Result<EllipticCurve> {
        if a.iter().any(|c| c.field() != field) {
            return Err(Error::FieldMismatch);
        }
        if a.iter().any(|c| !c.is_integral()) {
            return Err(Error::InvalidInput("curve coefficients must be integral".into()));
        }
        let [a1, a2, a3, a4, a6] = a;
        let two = field.from_int(2);
        let four = field.from_int(4);
        let b2 = &(&a1 * &a1) + &(&four * &a2);
        let b4 = &(&two * &a4) + &(&a1 * &a3);
        let b6 = &(&a3 * &a3) + &(&four * &a6);
        let b8 = &(&(&(&(&a1 * &a1) * &a6) + &(&(&four * &a2) * &a6)) - &(&(&a1 * &a3) * &a4))
            + &(&(&(&a2 * &a3) * &a3) - &(&a4 * &a4));
        let disc = &(&(&(&(&b2 * &b2).neg() * &b8) - &(&field.from_int(8) * &(&(&b4 * &b4) * &b4)))
            - &(&field.from_int(27) * &(&b6 * &b6)))
            + &(&(&field.from_int(9) * &b2) * &(&b4 * &b6));
        if disc.is_zero() {
            return Err(Error::InvalidInput("singular curve".into()));
        }
        Ok(EllipticCurve { field: field.clone(), a1, a2, a3, a4, a6, b2, b4, b6, b8, disc })
    }

    pub fn over_q(a: [i64; 5]) -> Result<EllipticCurve> {
        let q = NumberField::rationals();
        EllipticCurve::new(&q, a.map(|c| q.from_int(c)))
    }

    /// y^2 + y = x^3 - x.
    pub fn default_curve() -> EllipticCurve {
        EllipticCurve::over_q([0, 0, 1, -1, 0]).expect("nonsingular")
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn coefficients(&self) -> [&FieldElement; 5] {
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6]
    }

    /// The same equation over a field containing the current one (currently only from Q).
    pub fn base_change(&self, k: &NumberField) -> Result<EllipticCurve> {
        if self.field.degree() != 1 {
            return Err(Error::InvalidInput("base change is only supported from Q".into()));
        }
        let lift = |c: &FieldElement| k.from_rat(c.as_rational().unwrap());
        EllipticCurve::new(k, self.coefficients().map(lift))
    }

    pub fn lift_point(&self, p: &CurvePoint) -> Result<CurvePoint> {
        match p {
            CurvePoint::Identity => Ok(CurvePoint::Identity),
            CurvePoint::Affine(x, y) => {
                let lx = x.as_rational().ok_or(Error::FieldMismatch)?;
                let ly = y.as_rational().ok_or(Error::FieldMismatch)?;
                self.point(self.field.from_rat(lx), self.field.from_rat(ly))
            }
        }
    }

    fn lhs_minus_rhs(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        let lhs = &(&(y * y) + &(&(&self.a1 * x) * y)) + &(&self.a3 * y);
        let x2 = x * x;
        let rhs = &(&(&(&x2 * x) + &(&self.a2 * &x2)) + &(&self.a4 * x)) + &self.a6;
        &lhs - &rhs
    }

    pub fn is_on(&self, p: &CurvePoint) -> bool {
        match p {
            CurvePoint::Identity => true,
            CurvePoint::Affine(x, y) => {
                if x.field() != &self.field || y.field() != &self.field {
                    return false;
                }
                if self.field.degree() == 1 {
                    return self.on_curve_q(&x.coords()[0], &y.coords()[0]);
                }
                self.lhs_minus_rhs(x, y).is_zero()
            }
        }
    }

    /// Curve equation for rational coordinates, cleared of denominators (no gcds).
    fn on_curve_q(&self, x: &Rat, y: &Rat) -> bool {
        let a: Vec<BigInt> = self.coefficients().iter().map(|c| c.coords()[0].numer().clone()).collect();
        let (nx, dx) = (x.numer(), x.denom());
        let (ny, dy) = (y.numer(), y.denom());
        let dx2 = dx * dx;
        let dx3 = &dx2 * dx;
        if a[0].is_zero() && dy * dy == dx3 {
            // x = n/d^2, y = m/d^3: the equation scaled by d^6
            let lhs = ny * ny + &(&a[2] * ny) * dy;
            let rhs = &(&(nx * nx) * nx) + &(&(&a[1] * nx) * nx) * dx + &(&a[3] * nx) * &dx2 + &a[4] * &dx3;
            return lhs == rhs;
        }
        let dy2 = dy * dy;
        let lhs = &(ny * ny) * &dx3 + &(&(&a[0] * nx) * ny) * &(&dx2 * dy) + &(&a[2] * ny) * &(&dx3 * dy);
        let rhs_inner = &(&(nx * nx) * nx) + &(&(&a[1] * nx) * nx) * dx + &(&a[3] * nx) * &dx2 + &a[4] * &dx3;
        lhs == rhs_inner * dy2
    }

    pub fn point(&self, x: FieldElement, y: FieldElement) -> Result<CurvePoint> {
        let p = CurvePoint::Affine(x, y);
        if self.is_on(&p) {
            Ok(p)
        } else {
            Err(Error::PointNotOnCurve)
        }
    }

    pub fn point_q(&self, x: Rat, y: Rat) -> Result<CurvePoint> {
        self.point(self.field.from_rat(x), self.field.from_rat(y))
    }

    pub fn neg(&self, p: &CurvePoint) -> CurvePoint {
        match p {
            CurvePoint::Identity => CurvePoint::Identity,
            CurvePoint::Affine(x, y) => {
                let ny = &(&y.neg() - &(&self.a1 * x)) - &self.a3;
                CurvePoint::Affine(x.clone(), ny)
            }
        }
    }

    fn check(&self, p: &CurvePoint) -> Result<()> {
        if self.is_on(p) {
            Ok(())
        } else {
            Err(Error::PointNotOnCurve)
        }
    }

    fn add_unchecked(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        let (x1, y1, x2, y2) = match (p, q) {
            (CurvePoint::Identity, _) => return q.clone(),
            (_, CurvePoint::Identity) => return p.clone(),
            (CurvePoint::Affine(x1, y1), CurvePoint::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let (lambda, nu) = if x1 == x2 {
            let s = &(&(y1 + y2) + &(&self.a1 * x2)) + &self.a3;
            if s.is_zero() {
                return CurvePoint::Identity;
            }
            let two = self.field.from_int(2);
            let den = &(&(&two * y1) + &(&self.a1 * x1)) + &self.a3;
            let x1sq = x1 * x1;
            let num_l = &(&(&(&self.field.from_int(3) * &x1sq) + &(&(&two * &self.a2) * x1)) + &self.a4)
                - &(&self.a1 * y1);
            let num_n = &(&(&(&x1sq * x1).neg() + &(&self.a4 * x1)) + &(&two * &self.a6)) - &(&self.a3 * y1);
            let inv = den.inv().expect("nonzero tangent denominator");
            (&num_l * &inv, &num_n * &inv)
        } else {
            let inv = (x2 - x1).inv().expect("distinct x");
            let lambda = &(y2 - y1) * &inv;
            let nu = &(&(y1 * x2) - &(y2 * x1)) * &inv;
            (lambda, nu)
        };
        let x3 = &(&(&(&lambda * &lambda) + &(&self.a1 * &lambda)) - &self.a2) - &(x1 + x2);
        let y3 = &(&(&(&lambda + &self.a1) * &x3).neg() - &nu) - &self.a3;
        CurvePoint::Affine(x3, y3)
    }

    pub fn add(&self, p: &CurvePoint, q: &CurvePoint) -> Result<CurvePoint> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.add_unchecked(p, q))
    }

    /// [n]P by double-and-add.
    pub fn mul(&self, n: i64, p: &CurvePoint) -> Result<CurvePoint> {
        self.check(p)?;
        let base = if n < 0 { self.neg(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = CurvePoint::Identity;
        let mut b = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_unchecked(&acc, &b);
            }
            k >>= 1;
            if k > 0 {
                b = self.add_unchecked(&b, &b);
            }
        }
        debug_assert!(self.is_on(&acc));
        Ok(acc)
    }

    /// ψ_2, ψ_3, ψ_4 at an affine point.
    fn psi_small(&self, x: &FieldElement, y: &FieldElement) -> [FieldElement; 3] {
        let f = &self.field;
        let c = |v: i64| f.from_int(v);
        let psi2 = &(&(&c(2) * y) + &(&self.a1 * x)) + &self.a3;
        let x2 = x * x;
        let x3 = &x2 * x;
        let x4 = &x3 * x;
        let psi3 = &(&(&(&(&c(3) * &x4) + &(&self.b2 * &x3)) + &(&(&c(3) * &self.b4) * &x2))
            + &(&(&c(3) * &self.b6) * x))
            + &self.b8;
        let x5 = &x4 * x;
        let x6 = &x5 * x;
        let inner = &(&(&(&(&(&(&c(2) * &x6) + &(&self.b2 * &x5)) + &(&(&c(5) * &self.b4) * &x4))
            + &(&(&c(10) * &self.b6) * &x3))
            + &(&(&c(10) * &self.b8) * &x2))
            + &(&(&(&self.b2 * &self.b8) - &(&self.b4 * &self.b6)) * x))
            + &(&(&self.b4 * &self.b8) - &(&self.b6 * &self.b6));
        let psi4 = &psi2 * &inner;
        [psi2, psi3, psi4]
    }

    /// [n]P through the division-polynomial ladder; intended for large n.
    pub fn multiple(&self, n: i64, p: &CurvePoint) -> Result<CurvePoint> {
        self.check(p)?;
        if n < 0 {
            return Ok(self.neg(&self.multiple(-n, p)?));
        }
        if n <= 16 {
            return self.mul(n, p);
        }
        let (x, y) = match p {
            CurvePoint::Identity => return Ok(CurvePoint::Identity),
            CurvePoint::Affine(x, y) => (x, y),
        };
        let [psi2, psi3, psi4] = self.psi_small(x, y);
        if psi2.is_zero() {
            // 2-torsion
            return self.mul(n, p);
        }
        if self.field.degree() == 1 && x.is_integral() && y.is_integral() {
            return Ok(self.multiple_integral(n as u64, x, y));
        }
        let ring = FieldRing { inv2: psi2.inv()?, zero: self.field.zero() };
        let w = ladder(&ring, &psi2, &psi3, &psi4, &self.field.one(), n as u64);
        let (pm1, p0, pp1) = (&w[2], &w[3], &w[4]);
        if p0.is_zero() {
            return Ok(CurvePoint::Identity);
        }
        let p0sq = p0 * p0;
        let inv = p0sq.inv()?;
        let xn = x - &(&(pm1 * pp1) * &inv);
        let psi2n = ring.even(&w, 3);
        let s = &psi2n * &(&inv * &inv);
        let yn = &(&(&s - &(&self.a1 * &xn)) - &self.a3) * &self.field.from_rat(Rat::frac(1, 2));
        let q = CurvePoint::Affine(xn, yn);
        debug_assert!(self.is_on(&q));
        Ok(q)
    }
}

impl EllipticCurve {
    /// [n]P for an integral point of a curve over Q; the ψ values stay in Z.
    fn multiple_integral(&self, n: u64, x: &FieldElement, y: &FieldElement) -> CurvePoint {
        let int = |v: &FieldElement| v.coords()[0].numer().clone();
        let [p2, p3, p4] = self.psi_small(x, y);
        let (p2, p3, p4) = (int(&p2), int(&p3), int(&p4));
        let r = IntRing { psi2: p2.clone() };
        let w = ladder(&r, &p2, &p3, &p4, &BigInt::one(), n);
        let (pm1, p0, pp1) = (&w[2], &w[3], &w[4]);
        if p0.is_zero() {
            return CurvePoint::Identity;
        }
        let (a1, a3) = (int(&self.a1), int(&self.a3));
        let p0sq = p0 * p0;
        let num = &int(x) * &p0sq - pm1 * pp1;
        let psi2n = r.even(&w, 3);
        let p0_4 = &p0sq * &p0sq;
        let ynum = psi2n - &(&a1 * &num) * &p0sq - &a3 * &p0_4;
        let xn = Rat::new(num, p0sq);
        let yn = Rat::new(ynum, p0_4 * 2);
        CurvePoint::Affine(self.field.from_rat(xn), self.field.from_rat(yn))
    }
}

/// Exact integer arithmetic; division by ψ_2 is exact on ladder values.
struct IntRing {
    psi2: BigInt,
}

impl Ring for IntRing {
    type T = BigInt;
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn div2(&self, a: &BigInt) -> BigInt {
        debug_assert!((a % &self.psi2).is_zero());
        a / &self.psi2
    }
}

/// Arithmetic needed by the ladder.
trait Ring {
    type T: Clone;
    fn sub(&self, a: &Self::T, b: &Self::T) -> Self::T;
    fn mul(&self, a: &Self::T, b: &Self::T) -> Self::T;
    fn neg(&self, a: &Self::T) -> Self::T;
    fn zero(&self) -> Self::T;
    /// Multiplication by ψ_2^{-1}.
    fn div2(&self, a: &Self::T) -> Self::T;

    /// ψ(2m+1) from the window w centred so that w[c] = ψ(m).
    fn odd(&self, w: &[Self::T], c: usize) -> Self::T {
        let a = self.mul(&w[c + 2], &self.cube(&w[c]));
        let b = self.mul(&w[c - 1], &self.cube(&w[c + 1]));
        self.sub(&a, &b)
    }

    /// ψ(2m) from the window w centred so that w[c] = ψ(m).
    fn even(&self, w: &[Self::T], c: usize) -> Self::T {
        let a = self.mul(&w[c + 2], &self.mul(&w[c - 1], &w[c - 1]));
        let b = self.mul(&w[c - 2], &self.mul(&w[c + 1], &w[c + 1]));
        self.div2(&self.mul(&w[c], &self.sub(&a, &b)))
    }

    fn cube(&self, a: &Self::T) -> Self::T {
        self.mul(a, &self.mul(a, a))
    }
}

struct FieldRing {
    inv2: FieldElement,
    zero: FieldElement,
}

impl Ring for FieldRing {
    type T = FieldElement;
    fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        a - b
    }
    fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        a * b
    }
    fn neg(&self, a: &FieldElement) -> FieldElement {
        a.neg()
    }
    fn zero(&self) -> FieldElement {
        self.zero.clone()
    }
    fn div2(&self, a: &FieldElement) -> FieldElement {
        if self.inv2.is_one() {
            a.clone()
        } else {
            a * &self.inv2
        }
    }
}

struct ModRing {
    m: BigInt,
    inv2: BigInt,
}

impl Ring for ModRing {
    type T = BigInt;
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a - b).mod_floor(&self.m)
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) % &self.m
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        (-a).mod_floor(&self.m)
    }
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn div2(&self, a: &BigInt) -> BigInt {
        (a * &self.inv2) % &self.m
    }
}

/// Window (ψ(n-3), ..., ψ(n+4)) for n >= 1.
fn ladder<R: Ring>(r: &R, psi2: &R::T, psi3: &R::T, psi4: &R::T, one: &R::T, n: u64) -> Vec<R::T> {
    assert!(n >= 1);
    // window for k = 1: ψ(-2) .. ψ(5)
    let psi5 = r.sub(&r.mul(psi4, &r.cube(psi2)), &r.cube(psi3));
    let mut w: Vec<R::T> =
        vec![r.neg(psi2), r.neg(one), r.zero(), one.clone(), psi2.clone(), psi3.clone(), psi4.clone(), psi5];
    let bits = 64 - n.leading_zeros();
    for i in (0..bits - 1).rev() {
        // w[3] = ψ(k); entries ψ(k+j) sit at w[3+j]
        let bit = (n >> i) & 1;
        let mut next = Vec::with_capacity(8);
        // target index t = 2k + bit + j for j in -3..=4
        for j in -3i64..=4 {
            let t = bit as i64 + j;
            // 2k + t: if t even, ψ(2(k + t/2)) else ψ(2(k + (t-1)/2) + 1)
            let v = if t.rem_euclid(2) == 0 {
                r.even(&w, (3 + t.div_euclid(2)) as usize)
            } else {
                r.odd(&w, (3 + (t - 1).div_euclid(2)) as usize)
            };
            next.push(v);
        }
        w = next;
    }
    w
}

fn rat_to_mod(v: &Rat, m: &BigInt, p: &BigInt) -> Result<BigInt> {
    if (v.denom() % p).is_zero() {
        return Err(Error::HypothesisViolated(format!("point is not integral at {}", p)));
    }
    let inv = crate::intarith::invmod_big(&(v.denom() % m), m).expect("unit denominator");
    Ok((v.numer() * inv).mod_floor(m))
}

fn curve_q(e: &EllipticCurve) -> Result<()> {
    if e.field.degree() != 1 {
        return Err(Error::InvalidInput("operation requires a curve over Q".into()));
    }
    Ok(())
}

fn q_coords(p: &CurvePoint) -> Result<(Rat, Rat)> {
    let x = p.x()?.as_rational().ok_or(Error::FieldMismatch)?;
    let y = p.y()?.as_rational().ok_or(Error::FieldMismatch)?;
    Ok((x, y))
}

/// The window (ψ(n-3), ..., ψ(n+4)) at P modulo p^k.
fn psi_window_mod(e: &EllipticCurve, p: &CurvePoint, n: u64, prime: &BigInt, k: u32) -> Result<Vec<BigInt>> {
    curve_q(e)?;
    let (x, y) = q_coords(p)?;
    let m = num_traits::pow(prime.clone(), k as usize);
    let q = NumberField::rationals();
    let [p2, p3, p4] = e.psi_small(&q.from_rat(x), &q.from_rat(y));
    let to = |v: &FieldElement| rat_to_mod(&v.as_rational().unwrap(), &m, prime);
    let (p2, p3, p4) = (to(&p2)?, to(&p3)?, to(&p4)?);
    if (&p2 % prime).is_zero() {
        return Err(Error::HypothesisViolated(format!("2y + a1x + a3 vanishes mod {}", prime)));
    }
    let inv2 = crate::intarith::invmod_big(&p2, &m).unwrap();
    let r = ModRing { m: m.clone(), inv2 };
    Ok(ladder(&r, &p2, &p3, &p4, &BigInt::one(), n))
}

/// ord_p of a residue mod p^k; None when the residue is 0.
fn ord_mod(v: &BigInt, p: &BigInt) -> Option<i64> {
    if v.is_zero() {
        None
    } else {
        Some(ord_p(v, p) as i64)
    }
}

/// x([n]P) in Z_p to relative precision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PadicX {
    /// x = p^ord · unit with unit known modulo p^digits.
    Value { ord: i64, unit: String, digits: i64 },
    /// The numerator vanishes at this precision (x = 0 or ord >= at_least).
    Infinite { at_least: i64 },
}

/// x([n]P) modulo p^k from projective ladder arithmetic over Z/p^k.
pub fn padic_multiple_x(e: &EllipticCurve, p: &CurvePoint, n: u64, prime: &BigInt, k: u32) -> Result<PadicX> {
    check_good_reduction(e, prime)?;
    if n == 0 {
        return Err(Error::IdentityPoint);
    }
    let w = psi_window_mod(e, p, n, prime, k)?;
    let m = num_traits::pow(prime.clone(), k as usize);
    let (x, _) = q_coords(p)?;
    let xm = rat_to_mod(&x, &m, prime)?;
    let psin = &w[3];
    let dord = ord_mod(psin, prime).ok_or_else(|| Error::PrecisionExhausted(format!("ψ({}) vanishes mod p^{}", n, k)))?;
    if 2 * dord >= k as i64 {
        return Err(Error::PrecisionExhausted(format!("denominator valuation of x([{}]P) reaches the precision", n)));
    }
    let num = (&xm * psin * psin - &w[2] * &w[4]).mod_floor(&m);
    match ord_mod(&num, prime) {
        None => Ok(PadicX::Infinite { at_least: k as i64 - 2 * dord }),
        Some(nord) => {
            let ordx = nord - 2 * dord;
            // unit = (num / p^nord) / (psin / p^dord)^2, known mod p^(k - nord)
            let digits = k as i64 - nord;
            let md = num_traits::pow(prime.clone(), digits as usize);
            let pn = num_traits::pow(prime.clone(), nord as usize);
            let pd = num_traits::pow(prime.clone(), dord as usize);
            let nu = (&num / &pn) % &md;
            let du = (psin / &pd) % &md;
            let dinv = crate::intarith::invmod_big(&(&du * &du % &md), &md).unwrap();
            let unit = (nu * dinv).mod_floor(&md);
            Ok(PadicX::Value { ord: ordx, unit: unit.to_string(), digits })
        }
    }
}

/// Precision schedule for p-adic valuations.
pub const PADIC_START: u32 = 8;
pub const PADIC_CAP: u32 = 2048;

/// ord_p(x([n]P) - x(P)) = ord ψ(n-1) + ord ψ(n+1) - 2 ord ψ(n), with adaptive precision.
pub fn padic_xdiff_ord(e: &EllipticCurve, p: &CurvePoint, n: u64, prime: &BigInt) -> Result<i64> {
    if n <= 1 {
        return Err(Error::InvalidInput("x([n]P) - x(P) vanishes for n = 1".into()));
    }
    let mut k = PADIC_START;
    loop {
        let w = psi_window_mod(e, p, n, prime, k)?;
        if let (Some(a), Some(b), Some(c)) = (ord_mod(&w[2], prime), ord_mod(&w[3], prime), ord_mod(&w[4], prime)) {
            return Ok(a + c - 2 * b);
        }
        k *= 2;
        if k > PADIC_CAP {
            return Err(Error::PrecisionExhausted(format!("valuation at n = {} beyond {} digits", n, PADIC_CAP)));
        }
    }
}

/// The same valuation computed from exact rational coordinates.
pub fn exact_xdiff_ord(e: &EllipticCurve, p: &CurvePoint, n: i64, prime: &BigInt) -> Result<Option<i64>> {
    curve_q(e)?;
    let q = e.multiple(n, p)?;
    let d = q.x()? - p.x()?;
    let r = d.as_rational().unwrap();
    if r.is_zero() {
        return Ok(None);
    }
    Ok(Some(ord_p(r.numer(), prime) as i64 - ord_p(r.denom(), prime) as i64))
}

pub fn check_good_reduction(e: &EllipticCurve, p: &BigInt) -> Result<()> {
    curve_q(e)?;
    let d = e.disc.as_rational().unwrap();
    if (d.numer() % p).is_zero() {
        return Err(Error::BadReduction(format!("{} divides the discriminant {}", p, d)));
    }
    Ok(())
}

fn int_coeffs_mod(e: &EllipticCurve, p: u64) -> [u64; 5] {
    e.coefficients().map(|c| {
        let r = c.as_rational().unwrap();
        r.numer().mod_floor(&BigInt::from(p)).to_u64().unwrap()
    })
}

/// #E(F_p) for a curve over Q with good reduction at p.
pub fn reduce_count_points(e: &EllipticCurve, p: u64) -> Result<u64> {
    check_good_reduction(e, &BigInt::from(p))?;
    if p > 1 << 31 {
        return Err(Error::InvalidInput("prime too large for exhaustive counting".into()));
    }
    let [a1, a2, a3, a4, a6] = int_coeffs_mod(e, p);
    let mut count = 1u64;
    for x in 0..p {
        // y^2 + (a1 x + a3) y - (x^3 + a2 x^2 + a4 x + a6) = 0
        let b = (a1 * x + a3) % p;
        let c = (((x * x % p) * x + a2 * (x * x % p) + a4 * x + a6) % p) as u64;
        if p == 2 {
            for y in 0..2 {
                if (y * y + b * y + p - c) % p == 0 {
                    count += 1;
                }
            }
            continue;
        }
        let disc = (b * b + 4 * c) % p;
        count += if disc == 0 {
            1
        } else if powmod(disc, (p - 1) / 2, p) == 1 {
            2
        } else {
            0
        };
    }
    Ok(count)
}

/// gcd of #E(F_p) over the primes; the rational torsion order divides it (0 for an empty list).
pub fn torsion_bound(e: &EllipticCurve, primes: &[u64]) -> Result<u64> {
    let mut g = 0u64;
    for &p in primes {
        g = g.gcd(&reduce_count_points(e, p)?);
    }
    Ok(g)
}

/// A point of E(F_p); None is the identity.
pub type FpPoint = Option<(u64, u64)>;

/// Reduction of a Q-point modulo a prime of good reduction.
pub fn reduce_point(e: &EllipticCurve, pt: &CurvePoint, p: u64) -> Result<FpPoint> {
    check_good_reduction(e, &BigInt::from(p))?;
    if pt.is_identity() {
        return Ok(None);
    }
    let (x, y) = q_coords(pt)?;
    let pb = BigInt::from(p);
    if (x.denom() % &pb).is_zero() {
        return Ok(None);
    }
    let xm = rat_to_mod(&x, &pb, &pb)?.to_u64().unwrap();
    let ym = rat_to_mod(&y, &pb, &pb)?.to_u64().unwrap();
    Ok(Some((xm, ym)))
}

/// Group law on E(F_p).
pub fn fp_add(e: &EllipticCurve, p: u64, a: FpPoint, b: FpPoint) -> FpPoint {
    use crate::intarith::{invmod, mulmod};
    let [a1, a2, a3, a4, a6] = int_coeffs_mod(e, p);
    let (Some((x1, y1)), Some((x2, y2))) = (a, b) else { return a.or(b) };
    let m = |u: u64, v: u64| mulmod(u, v, p);
    let ad = |u: u64, v: u64| (u + v) % p;
    let sb = |u: u64, v: u64| (u + p - v) % p;
    let (lambda, nu) = if x1 == x2 {
        if ad(ad(y1, y2), ad(m(a1, x2), a3)) == 0 {
            return None;
        }
        let den = ad(ad(m(2, y1), m(a1, x1)), a3);
        let inv = invmod(den, p).unwrap();
        let x1sq = m(x1, x1);
        let nl = sb(ad(ad(m(3, x1sq), m(m(2, a2), x1)), a4), m(a1, y1));
        let nn = sb(ad(ad(sb(0, m(x1sq, x1)), m(a4, x1)), m(2, a6)), m(a3, y1));
        (m(nl, inv), m(nn, inv))
    } else {
        let inv = invmod(sb(x2, x1), p).unwrap();
        (m(sb(y2, y1), inv), m(sb(m(y1, x2), m(y2, x1)), inv))
    };
    let x3 = sb(sb(ad(m(lambda, lambda), m(a1, lambda)), a2), ad(x1, x2));
    let y3 = sb(sb(sb(0, m(ad(lambda, a1), x3)), nu), a3);
    Some((x3, y3))
}

pub fn fp_mul(e: &EllipticCurve, p: u64, n: u64, a: FpPoint) -> FpPoint {
    let mut acc = None;
    let mut b = a;
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            acc = fp_add(e, p, acc, b);
        }
        k >>= 1;
        b = fp_add(e, p, b, b);
    }
    acc
}

/// d(x(Q)).
pub fn x_den_divisor(q: &CurvePoint) -> Result<Divisor> {
    den_divisor(q.x()?)
}

/// d(x(Q)) is the square of an integral divisor.
pub fn check_evenorder(q: &CurvePoint) -> Result<bool> {
    Ok(divisors::divisor_sqrt(&x_den_divisor(q)?)?.is_some())
}

/// d(x(Q)) divides d(x([k]Q)).
pub fn check_po3(e: &EllipticCurve, q: &CurvePoint, k: i64) -> Result<bool> {
    let qk = e.multiple(k, q)?;
    divides_den(&x_den_divisor(q)?, qk.x()?)
}

/// d(x(Q)) and d(x(Q)/x([k]Q)) have no common prime.
pub fn check_ratio(e: &EllipticCurve, q: &CurvePoint, k: i64) -> Result<bool> {
    let qk = e.multiple(k, q)?;
    let xk = qk.x()?;
    if xk.is_zero() {
        return Err(Error::ZeroXCoordinate);
    }
    let ratio = q.x()? * &xk.inv()?;
    coprime_to_den(&x_den_divisor(q)?, &ratio)
}

/// Smallest l in 1..=budget with I | d(x([l]P)).
pub fn find_multiple_with_denominator(
    e: &EllipticCurve,
    p: &CurvePoint,
    i: &Divisor,
    budget: u64,
) -> Result<Option<(u64, CurvePoint)>> {
    if !i.is_integral() {
        return Err(Error::NonIntegral);
    }
    let mut q = CurvePoint::Identity;
    for l in 1..=budget {
        q = e.add(&q, p)?;
        if q.is_identity() {
            continue;
        }
        if divides_den(i, q.x()?)? {
            return Ok(Some((l, q)));
        }
    }
    Ok(None)
}

/// Smallest multiple l of `step` (l <= budget) with I | d(x([l]P)), via the ladder.
pub fn find_multiple_with_denominator_stepped(
    e: &EllipticCurve,
    p: &CurvePoint,
    i: &Divisor,
    step: u64,
    budget: u64,
) -> Result<Option<(u64, CurvePoint)>> {
    let base = e.multiple(step as i64, p)?;
    let mut q = CurvePoint::Identity;
    let mut l = 0;
    while l + step <= budget {
        l += step;
        q = e.add(&q, &base)?;
        if !q.is_identity() && divides_den(i, q.x()?)? {
            return Ok(Some((l, q)));
        }
    }
    Ok(None)
}

/// d(x([lr]P)) | n(x([lr]P)/x([mlr]P) - m^2)^2, zero being divisible by everything.
pub fn check_po2(e: &EllipticCurve, p: &CurvePoint, r: i64, l: i64, m: i64) -> Result<bool> {
    let q = e.multiple(l * r, p)?;
    let qm = e.multiple(m * l * r, p)?;
    let xm = qm.x()?;
    if xm.is_zero() {
        return Err(Error::ZeroXCoordinate);
    }
    let v = (q.x()? * &xm.inv()?).add_rat(&Rat::from(-(m * m)));
    if v.is_zero() {
        return Ok(true);
    }
    let d = x_den_divisor(&q)?;
    let sq = v.pow(2)?;
    divisors::divides_num(&d, &sq)
}

/// Both sides of ord_t(x_{mM+1} - x_1) = ord_t(x_{M+1} - x_1) + ord_t(m) for t in {p, q}.
#[derive(Clone, Debug, Serialize)]
pub struct XDifferenceReport {
    pub m_value: u64,
    pub big_m: u64,
    pub rows: Vec<XDifferenceRow>,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct XDifferenceRow {
    pub t: u64,
    pub lhs: i64,
    pub rhs: i64,
    pub holds: bool,
}

/// #E(F_p) #E(F_q) p q.
pub fn model_modulus(e: &EllipticCurve, p: u64, q: u64) -> Result<u64> {
    Ok(reduce_count_points(e, p)? * reduce_count_points(e, q)? * p * q)
}

/// Checks the hypotheses shared by the valuation-model computations.
pub fn check_model_hypotheses(e: &EllipticCurve, pt: &CurvePoint, p: u64, q: u64) -> Result<()> {
    curve_q(e)?;
    if p == q || p % 2 == 0 || q % 2 == 0 {
        return Err(Error::HypothesisViolated("p and q must be distinct odd primes".into()));
    }
    for t in [p, q] {
        if !crate::intarith::is_prime_u64(t) {
            return Err(Error::HypothesisViolated(format!("{} is not prime", t)));
        }
        check_good_reduction(e, &BigInt::from(t))
            .map_err(|_| Error::HypothesisViolated(format!("bad reduction at {}", t)))?;
        let Some((x, y)) = reduce_point(e, pt, t)? else {
            return Err(Error::HypothesisViolated(format!("P reduces to O mod {}", t)));
        };
        let [a1, _, a3, _, _] = int_coeffs_mod(e, t);
        if (2 * y + a1 * x + a3) % t == 0 {
            return Err(Error::HypothesisViolated(format!("2y + a1x + a3 vanishes at P mod {}", t)));
        }
    }
    Ok(())
}

pub fn xdifference_check(e: &EllipticCurve, pt: &CurvePoint, p: u64, q: u64, m: u64) -> Result<XDifferenceReport> {
    check_model_hypotheses(e, pt, p, q)?;
    if m == 0 {
        return Err(Error::InvalidInput("m must be positive".into()));
    }
    let big_m = model_modulus(e, p, q)?;
    let mut rows = Vec::new();
    for t in [p, q] {
        let tb = BigInt::from(t);
        let lhs = padic_xdiff_ord(e, pt, m * big_m + 1, &tb)?;
        let base = padic_xdiff_ord(e, pt, big_m + 1, &tb)?;
        let rhs = base + crate::intarith::ord_p_u64(m, t) as i64;
        rows.push(XDifferenceRow { t, lhs, rhs, holds: lhs == rhs });
    }
    let holds = rows.iter().all(|r| r.holds);
    Ok(XDifferenceReport { m_value: m, big_m, rows, holds })
}

/// Whether the multiples of P have strictly increasing denominator norms along doublings
/// (a certificate of infinite order when torsion_bound is inconclusive).
pub fn denominators_grow(e: &EllipticCurve, p: &CurvePoint, doublings: u32) -> Result<bool> {
    let mut q = p.clone();
    let mut last = Rat::zero();
    for _ in 0..doublings {
        q = e.add(&q, &q)?;
        if q.is_identity() {
            return Ok(false);
        }
        let x = q.x()?;
        let d = x.coords().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let dn = Rat::from(d);
        if dn <= last {
            return Ok(false);
        }
        last = dn;
    }
    Ok(true)
}

/// Runs check_evenorder, check_po3 (n k <= bound) and check_ratio over multiples of P.
#[derive(Clone, Debug, Default, Serialize)]
pub struct LemmaSuiteReport {
    pub evenorder_checked: u64,
    pub evenorder_failed: Vec<i64>,
    pub po3_checked: u64,
    pub po3_failed: Vec<(i64, i64)>,
    pub ratio_checked: u64,
    pub ratio_failed: Vec<(i64, i64)>,
    pub pass: bool,
}

pub fn lemma_suite(e: &EllipticCurve, p: &CurvePoint, bound: i64) -> Result<LemmaSuiteReport> {
    let mut pts = vec![CurvePoint::Identity];
    for n in 1..=bound {
        let next = e.add(&pts[(n - 1) as usize], p)?;
        pts.push(next);
    }
    let mut r = LemmaSuiteReport::default();
    let mut dens = Vec::with_capacity(pts.len());
    dens.push(Divisor::trivial());
    for n in 1..=bound {
        let q = &pts[n as usize];
        if q.is_identity() {
            dens.push(Divisor::trivial());
            continue;
        }
        let d = x_den_divisor(q)?;
        r.evenorder_checked += 1;
        if divisors::divisor_sqrt(&d)?.is_none() {
            r.evenorder_failed.push(n);
        }
        dens.push(d);
    }
    for n in 1..=bound {
        for k in 2..=bound / n {
            let (q, qk) = (&pts[n as usize], &pts[(n * k) as usize]);
            if q.is_identity() || qk.is_identity() {
                continue;
            }
            r.po3_checked += 1;
            if !divisor_divides(&dens[n as usize], &dens[(n * k) as usize])? {
                r.po3_failed.push((n, k));
            }
            let xk = qk.x()?;
            if xk.is_zero() {
                continue;
            }
            r.ratio_checked += 1;
            let ratio = q.x()? * &xk.inv()?;
            if !coprime_to_den(&dens[n as usize], &ratio)? {
                r.ratio_failed.push((n, k));
            }
        }
    }
    r.pass = r.evenorder_failed.is_empty() && r.po3_failed.is_empty() && r.ratio_failed.is_empty();
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> (EllipticCurve, CurvePoint) {
        let e = EllipticCurve::default_curve();
        let p = e.point_q(Rat::zero(), Rat::zero()).unwrap();
        (e, p)
    }

    fn xy(pt: &CurvePoint) -> (Rat, Rat) {
        q_coords(pt).unwrap()
    }

    #[test]
    fn small_multiples() {
        let (e, p) = fixture();
        assert_eq!(xy(&e.mul(2, &p).unwrap()), (Rat::from(1), Rat::from(0)));
        assert_eq!(xy(&e.mul(5, &p).unwrap()), (Rat::frac(1, 4), Rat::frac(-5, 8)));
        assert_eq!(xy(&e.mul(7, &p).unwrap()).0, Rat::frac(-5, 9));
        assert!(e.add(&p, &e.neg(&p)).unwrap().is_identity());
        assert_eq!(e.mul(-3, &p).unwrap(), e.neg(&e.mul(3, &p).unwrap()));
    }

    #[test]
    fn ladder_matches_group_law() {
        let (e, p) = fixture();
        let mut q = CurvePoint::Identity;
        for n in 1..=60 {
            q = e.add(&q, &p).unwrap();
            assert_eq!(e.multiple(n, &p).unwrap(), q, "n = {n}");
        }
    }

    #[test]
    fn point_counts() {
        let (e, _) = fixture();
        assert_eq!(reduce_count_points(&e, 5).unwrap(), 8);
        assert_eq!(reduce_count_points(&e, 7).unwrap(), 9);
        assert_eq!(reduce_count_points(&e, 3).unwrap(), 7);
        assert_eq!(reduce_count_points(&e, 2).unwrap(), 5);
        assert!(matches!(reduce_count_points(&e, 37), Err(Error::BadReduction(_))));
        assert_eq!(torsion_bound(&e, &[3, 5]).unwrap(), 1);
        assert_eq!(torsion_bound(&e, &[5]).unwrap(), 8);
        assert_eq!(torsion_bound(&e, &[]).unwrap(), 0);
    }

    #[test]
    fn reduction_compatibility() {
        let (e, p) = fixture();
        for prime in [2u64, 3, 5, 7, 11, 13, 17, 19] {
            let base = reduce_point(&e, &p, prime).unwrap();
            for n in 1..=50u64 {
                let q = e.multiple(n as i64, &p).unwrap();
                assert_eq!(reduce_point(&e, &q, prime).unwrap(), fp_mul(&e, prime, n, base), "p={prime} n={n}");
            }
        }
    }

    #[test]
    fn denominators_and_lemmas() {
        let (e, p) = fixture();
        let q5 = e.mul(5, &p).unwrap();
        assert_eq!(x_den_divisor(&q5).unwrap().to_string(), "(2)^2");
        assert!(x_den_divisor(&e.mul(2, &p).unwrap()).unwrap().is_trivial());
        assert_eq!(x_den_divisor(&e.mul(7, &p).unwrap()).unwrap().to_string(), "(3)^2");
        assert!(check_evenorder(&e.multiple(25, &p).unwrap()).unwrap());
        assert!(check_po3(&e, &q5, 2).unwrap());
        assert!(check_po3(&e, &q5, 3).unwrap());
        assert!(check_ratio(&e, &q5, 2).unwrap());
        assert!(check_ratio(&e, &q5, 5).unwrap());
        let q = NumberField::rationals();
        let two = divisors::factor_prime(&q, &BigInt::from(2)).unwrap().remove(0);
        let i2 = Divisor::prime_power(two.clone(), 2);
        let i4 = Divisor::prime_power(two, 4);
        assert_eq!(find_multiple_with_denominator(&e, &p, &i2, 20).unwrap().unwrap().0, 5);
        assert_eq!(find_multiple_with_denominator(&e, &p, &i4, 20).unwrap().unwrap().0, 10);
        assert_eq!(find_multiple_with_denominator(&e, &p, &Divisor::trivial(), 20).unwrap().unwrap().0, 1);
        assert!(check_po2(&e, &p, 5, 1, 1).unwrap());
    }

    #[test]
    fn padic_values() {
        let (e, p) = fixture();
        let five = BigInt::from(5);
        let v = padic_multiple_x(&e, &p, 7, &five, 6).unwrap();
        // x(7P) = -5/9
        let inv9 = crate::intarith::invmod_big(&BigInt::from(9), &BigInt::from(3125)).unwrap();
        let expect = (-inv9).mod_floor(&BigInt::from(3125));
        assert_eq!(v, PadicX::Value { ord: 1, unit: expect.to_string(), digits: 5 });
        assert!(matches!(padic_multiple_x(&e, &p, 1, &five, 6).unwrap(), PadicX::Infinite { .. }));
        assert_eq!(padic_multiple_x(&e, &p, 2, &five, 6).unwrap(), PadicX::Value { ord: 0, unit: "1".into(), digits: 6 });
        for n in 2..=30u64 {
            for t in [3u64, 5, 7, 11] {
                let tb = BigInt::from(t);
                assert_eq!(Some(padic_xdiff_ord(&e, &p, n, &tb).unwrap()), exact_xdiff_ord(&e, &p, n as i64, &tb).unwrap());
            }
        }
    }

    #[test]
    fn xdifference() {
        let (e, p) = fixture();
        for m in [1u64, 2, 5, 7] {
            let r = xdifference_check(&e, &p, 5, 7, m).unwrap();
            assert_eq!(r.big_m, 2520);
            assert!(r.holds, "m = {m}: {:?}", r);
        }
    }
}
