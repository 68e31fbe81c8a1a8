//! Exact rationals over `BigInt`.
//!
//! Normalization uses a Lehmer gcd. The binary gcd in num-bigint costs
//! O(bits * words), which dominates once coordinates reach tens of
//! thousands of digits.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Greatest common divisor of two naturals (Lehmer's algorithm).
pub fn gcd_nat(a: &BigUint, b: &BigUint) -> BigUint {
    let (mut a, mut b) = if a >= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    while !b.is_zero() {
        if a.bits() <= 64 {
            return BigUint::from(gcd_u64(a.to_u64().unwrap(), b.to_u64().unwrap()));
        }
        let n = a.bits();
        if n - b.bits() >= 32 {
            let r = &a % &b;
            a = b;
            b = r;
            continue;
        }
        let shift = n - 63;
        let mut x = (&a >> shift).to_u64().unwrap() as i128;
        let mut y = (&b >> shift).to_u64().unwrap() as i128;
        let (mut ca, mut cb, mut cc, mut cd) = (1i128, 0i128, 0i128, 1i128);
        loop {
            if y + cc <= 0 || y + cd <= 0 {
                break;
            }
            let q1 = (x + ca).div_euclid(y + cc);
            let q2 = (x + cb).div_euclid(y + cd);
            if q1 != q2 {
                break;
            }
            let t = ca - q1 * cc;
            ca = cc;
            cc = t;
            let t = cb - q1 * cd;
            cb = cd;
            cd = t;
            let t = x - q1 * y;
            x = y;
            y = t;
        }
        if cb == 0 {
            let r = &a % &b;
            a = b;
            b = r;
            continue;
        }
        let ai = BigInt::from_biguint(Sign::Plus, a);
        let bi = BigInt::from_biguint(Sign::Plus, b);
        let na = &ai * ca + &bi * cb;
        let nb = &ai * cc + &bi * cd;
        if na.is_negative() || nb.is_negative() {
            // cofactor simulation drifted; take a plain Euclid step instead
            let (a0, b0) = (ai.magnitude().clone(), bi.magnitude().clone());
            let r = &a0 % &b0;
            a = b0;
            b = r;
            continue;
        }
        a = na.into_parts().1;
        b = nb.into_parts().1;
        if a < b {
            std::mem::swap(&mut a, &mut b);
        }
    }
    a
}

/// Nonnegative gcd of two integers.
pub fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    if a.magnitude().is_one() || b.magnitude().is_one() {
        return BigInt::one();
    }
    BigInt::from_biguint(Sign::Plus, gcd_nat(a.magnitude(), b.magnitude()))
}

/// Extended gcd: returns (g, s, t) with s*a + t*b = g >= 0.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    // reduce the larger operand first so the quadratic loop runs on balanced sizes
    if !b.is_zero() && a.bits() > b.bits() + 64 {
        let (q, r) = a.div_mod_floor(b);
        let (g, s, t) = ext_gcd(&r, b);
        // s*r + t*b = g, r = a - q*b
        let t2 = t - &s * q;
        return (g, s, t2);
    }
    if !a.is_zero() && b.bits() > a.bits() + 64 {
        let (g, t, s) = ext_gcd(b, a);
        return (g, s, t);
    }
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (BigInt::one(), BigInt::zero());
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let (q, r) = r0.div_mod_floor(&r1);
        r0 = std::mem::replace(&mut r1, r);
        let s2 = &s0 - &q * &s1;
        s0 = std::mem::replace(&mut s1, s2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.is_negative() {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// An exact rational number in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rat {
    num: BigInt,
    den: BigInt,
}

impl Rat {
    pub fn new(num: BigInt, den: BigInt) -> Rat {
        assert!(!den.is_zero(), "zero denominator");
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num, den) };
        if den.is_one() {
            return Rat { num, den };
        }
        if num.is_zero() {
            return Rat::zero();
        }
        let g = gcd(&num, &den);
        if g.is_one() {
            Rat { num, den }
        } else {
            Rat { num: num / &g, den: den / g }
        }
    }

    /// Builds a rational already known to be in lowest terms.
    pub fn new_reduced(num: BigInt, den: BigInt) -> Rat {
        debug_assert!(den.is_positive());
        Rat { num, den }
    }

    pub fn from_int<T: Into<BigInt>>(n: T) -> Rat {
        Rat { num: n.into(), den: BigInt::one() }
    }

    pub fn frac(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn into_parts(self) -> (BigInt, BigInt) {
        (self.num, self.den)
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.num.is_positive()
    }

    pub fn signum(&self) -> i32 {
        match self.num.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Rat {
        Rat { num: self.num.abs(), den: self.den.clone() }
    }

    pub fn recip(&self) -> Rat {
        assert!(!self.num.is_zero(), "reciprocal of zero");
        if self.num.is_negative() {
            Rat { num: -&self.den, den: -&self.num }
        } else {
            Rat { num: self.den.clone(), den: self.num.clone() }
        }
    }

    pub fn pow(&self, e: i64) -> Rat {
        if e < 0 {
            return self.recip().pow(-e);
        }
        let e = e as u32;
        Rat { num: num_traits::pow(self.num.clone(), e as usize), den: num_traits::pow(self.den.clone(), e as usize) }
    }

    pub fn floor(&self) -> BigInt {
        self.num.div_floor(&self.den)
    }

    pub fn ceil(&self) -> BigInt {
        -((-&self.num).div_floor(&self.den))
    }

    /// Nearest f64, accurate for values of any size.
    pub fn to_f64(&self) -> f64 {
        if self.num.is_zero() {
            return 0.0;
        }
        let nb = self.num.bits() as i64;
        let db = self.den.bits() as i64;
        let shift = 60 - (nb - db);
        let q = if shift >= 0 {
            (&self.num << shift as usize) / &self.den
        } else {
            &self.num / (&self.den << (-shift) as usize)
        };
        q.to_f64().unwrap_or(0.0) * 2f64.powi(-(shift.clamp(-1_000_000, 1_000_000) as i32))
    }
}

impl Zero for Rat {
    fn zero() -> Rat {
        Rat { num: BigInt::zero(), den: BigInt::one() }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for Rat {
    fn one() -> Rat {
        Rat { num: BigInt::one(), den: BigInt::one() }
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::from_int(n)
    }
}

impl From<BigInt> for Rat {
    fn from(n: BigInt) -> Rat {
        Rat::from_int(n)
    }
}

impl From<&BigInt> for Rat {
    fn from(n: &BigInt) -> Rat {
        Rat::from_int(n.clone())
    }
}

fn add_impl(a: &Rat, b: &Rat, negate_b: bool) -> Rat {
    let bn = if negate_b { -&b.num } else { b.num.clone() };
    if a.den.is_one() && b.den.is_one() {
        return Rat { num: &a.num + bn, den: BigInt::one() };
    }
    if a.den == b.den {
        return Rat::new(&a.num + bn, a.den.clone());
    }
    let g = gcd(&a.den, &b.den);
    if g.is_one() {
        return Rat { num: &a.num * &b.den + bn * &a.den, den: &a.den * &b.den };
    }
    let ad = &a.den / &g;
    let bd = &b.den / &g;
    let t = &a.num * &bd + bn * &ad;
    if t.is_zero() {
        return Rat::zero();
    }
    let g2 = gcd(&t, &g);
    if g2.is_one() {
        Rat { num: t, den: ad * &b.den }
    } else {
        Rat { num: t / &g2, den: ad * (&b.den / g2) }
    }
}

fn mul_impl(a: &Rat, b: &Rat) -> Rat {
    if a.num.is_zero() || b.num.is_zero() {
        return Rat::zero();
    }
    if a.den.is_one() && b.den.is_one() {
        return Rat { num: &a.num * &b.num, den: BigInt::one() };
    }
    let g1 = gcd(&a.num, &b.den);
    let g2 = gcd(&b.num, &a.den);
    let n1 = if g1.is_one() { a.num.clone() } else { &a.num / &g1 };
    let d2 = if g1.is_one() { b.den.clone() } else { &b.den / &g1 };
    let n2 = if g2.is_one() { b.num.clone() } else { &b.num / &g2 };
    let d1 = if g2.is_one() { a.den.clone() } else { &a.den / &g2 };
    Rat { num: n1 * n2, den: d1 * d2 }
}

impl<'a, 'b> Add<&'b Rat> for &'a Rat {
    type Output = Rat;
    fn add(self, rhs: &'b Rat) -> Rat {
        add_impl(self, rhs, false)
    }
}

impl<'a, 'b> Sub<&'b Rat> for &'a Rat {
    type Output = Rat;
    fn sub(self, rhs: &'b Rat) -> Rat {
        add_impl(self, rhs, true)
    }
}

impl<'a, 'b> Mul<&'b Rat> for &'a Rat {
    type Output = Rat;
    fn mul(self, rhs: &'b Rat) -> Rat {
        mul_impl(self, rhs)
    }
}

impl<'a, 'b> Div<&'b Rat> for &'a Rat {
    type Output = Rat;
    fn div(self, rhs: &'b Rat) -> Rat {
        mul_impl(self, &rhs.recip())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: &'a Rat) -> Rat {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Rat> for &'a Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                self.$m(&rhs)
            }
        }
    };
}
forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        *self = &*self * rhs;
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat { num: -self.num, den: self.den }
    }
}

impl<'a> Neg for &'a Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat { num: -&self.num, den: self.den.clone() }
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Rat) -> Ordering {
        if self.den == other.den {
            return self.num.cmp(&other.num);
        }
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Rat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRatError(pub String);

impl fmt::Display for ParseRatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational literal {:?}", self.0)
    }
}

impl std::error::Error for ParseRatError {}

impl FromStr for Rat {
    type Err = ParseRatError;
    fn from_str(s: &str) -> Result<Rat, ParseRatError> {
        let err = || ParseRatError(s.to_string());
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
                let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
                if d.is_zero() {
                    return Err(err());
                }
                Ok(Rat::new(n, d))
            }
            None => BigInt::from_str(s).map(Rat::from_int).map_err(|_| err()),
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(n) => Ok(Rat::from(n)),
            Repr::Str(s) => Rat::from_str(&s).map_err(serde::de::Error::custom),
        }
    }
}
