//! Dyadic numbers and midpoint-radius balls over R and C.
//!
//! A ball always contains the exact value it stands for. Midpoints are
//! rounded to a working precision and the rounding error is pushed into
//! the radius.

use crate::rat::Rat;
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

/// m * 2^e
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dy {
    pub m: BigInt,
    pub e: i64,
}

const RAD_BITS: u64 = 40;

impl Dy {
    pub fn zero() -> Dy {
        Dy { m: BigInt::zero(), e: 0 }
    }

    pub fn from_int<T: Into<BigInt>>(v: T) -> Dy {
        Dy { m: v.into(), e: 0 }
    }

    pub fn pow2(e: i64) -> Dy {
        Dy { m: BigInt::one(), e }
    }

    pub fn from_f64(v: f64) -> Dy {
        if v == 0.0 || !v.is_finite() {
            return Dy::zero();
        }
        let (mant, exp) = frexp(v);
        let m = (mant * (1u64 << 53) as f64) as i64;
        Dy { m: BigInt::from(m), e: exp as i64 - 53 }
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.m.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Dy {
        Dy { m: self.m.abs(), e: self.e }
    }

    pub fn neg(&self) -> Dy {
        Dy { m: -&self.m, e: self.e }
    }

    pub fn add(&self, o: &Dy) -> Dy {
        if self.m.is_zero() {
            return o.clone();
        }
        if o.m.is_zero() {
            return self.clone();
        }
        match self.e.cmp(&o.e) {
            Ordering::Equal => Dy { m: &self.m + &o.m, e: self.e },
            Ordering::Less => Dy { m: &self.m + (&o.m << (o.e - self.e) as usize), e: self.e },
            Ordering::Greater => Dy { m: (&self.m << (self.e - o.e) as usize) + &o.m, e: o.e },
        }
    }

    pub fn sub(&self, o: &Dy) -> Dy {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Dy) -> Dy {
        Dy { m: &self.m * &o.m, e: self.e + o.e }
    }

    pub fn mul_pow2(&self, k: i64) -> Dy {
        Dy { m: self.m.clone(), e: self.e + k }
    }

    /// Position of the leading bit: |self| < 2^top.
    pub fn top(&self) -> i64 {
        self.m.bits() as i64 + self.e
    }

    /// Truncates toward minus infinity to at most `prec` mantissa bits; returns the error bound.
    pub fn round_floor(&self, prec: u64) -> (Dy, Dy) {
        let b = self.m.bits();
        if b <= prec {
            return (self.clone(), Dy::zero());
        }
        let k = b - prec;
        let m = self.m.div_floor(&(BigInt::one() << k as usize));
        (Dy { m, e: self.e + k as i64 }, Dy::pow2(self.e + k as i64))
    }

    /// Smallest dyadic with at most `prec` bits that is >= self.
    pub fn round_up(&self, prec: u64) -> Dy {
        let b = self.m.bits();
        if b <= prec {
            return self.clone();
        }
        let k = b - prec;
        let d = BigInt::one() << k as usize;
        let m = -((-&self.m).div_floor(&d));
        Dy { m, e: self.e + k as i64 }
    }

    /// Largest dyadic with at most `prec` bits that is <= self.
    pub fn round_down(&self, prec: u64) -> Dy {
        self.round_floor(prec).0
    }

    pub fn to_rat(&self) -> Rat {
        if self.e >= 0 {
            Rat::from(&self.m << self.e as usize)
        } else {
            Rat::new(self.m.clone(), BigInt::one() << (-self.e) as usize)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.m.is_zero() {
            return 0.0;
        }
        let b = self.m.bits() as i64;
        let shift = (b - 60).max(0);
        let m = (&self.m >> shift as usize).to_f64().unwrap();
        let e = (self.e + shift).clamp(-2000, 2000) as i32;
        m * 2f64.powi(e / 2) * 2f64.powi(e - e / 2)
    }

    /// Lower bound of a rational with about `prec` significant bits.
    pub fn from_rat_floor(q: &Rat, prec: u64) -> (Dy, Dy) {
        if q.is_zero() {
            return (Dy::zero(), Dy::zero());
        }
        if q.is_integer() {
            return Dy::from_int(q.numer().clone()).round_floor(prec.max(1));
        }
        let s = prec as i64 - (q.numer().bits() as i64 - q.denom().bits() as i64);
        let (m, r) = if s >= 0 {
            (&(q.numer() << s as usize)).div_mod_floor(q.denom())
        } else {
            q.numer().div_mod_floor(&(q.denom() << (-s) as usize))
        };
        let err = if r.is_zero() { Dy::zero() } else { Dy::pow2(-s) };
        (Dy { m, e: -s }, err)
    }

    /// Upper bound on 1/self for self > 0.
    pub fn recip_up(&self, prec: u64) -> Dy {
        assert!(self.m.is_positive());
        let k = prec + self.m.bits();
        let (q, r) = (BigInt::one() << k as usize).div_rem(&self.m);
        let q = if r.is_zero() { q } else { q + 1 };
        Dy { m: q, e: -(k as i64) - self.e }
    }

    /// Lower bound on 1/self for self > 0.
    pub fn recip_down(&self, prec: u64) -> Dy {
        assert!(self.m.is_positive());
        let k = prec + self.m.bits();
        let q = (BigInt::one() << k as usize) / &self.m;
        Dy { m: q, e: -(k as i64) - self.e }
    }

    /// Bounds on sqrt(self) for self >= 0: (lower, upper).
    pub fn sqrt_bounds(&self, prec: u64) -> (Dy, Dy) {
        assert!(!self.m.is_negative());
        if self.m.is_zero() {
            return (Dy::zero(), Dy::zero());
        }
        let mut m = self.m.clone();
        let mut e = self.e;
        let want = 2 * prec as i64;
        let have = m.bits() as i64;
        let mut shift = (want - have).max(0);
        if (e - shift) % 2 != 0 {
            shift += 1;
        }
        m <<= shift as usize;
        e -= shift;
        let s = m.sqrt();
        let lo = Dy { m: s.clone(), e: e / 2 };
        let hi = if &s * &s == m { lo.clone() } else { Dy { m: s + 1, e: e / 2 } };
        (lo, hi)
    }

    /// Upper bound on a / b for a >= 0, b > 0.
    pub fn div_up(a: &Dy, b: &Dy, prec: u64) -> Dy {
        if a.is_zero() {
            return Dy::zero();
        }
        let k = prec + b.m.bits();
        let (q, r) = (&a.m << k as usize).div_rem(&b.m);
        let q = if r.is_zero() { q } else { q + 1 };
        Dy { m: q, e: a.e - k as i64 - b.e }
    }

    /// a / b rounded toward minus infinity, for b > 0.
    pub fn div_floor(a: &Dy, b: &Dy, prec: u64) -> Dy {
        let k = prec + b.m.bits();
        let q = (&a.m << k as usize).div_floor(&b.m);
        Dy { m: q, e: a.e - k as i64 - b.e }
    }
}

fn frexp(v: f64) -> (f64, i32) {
    let bits = v.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    if exp == 0 {
        let (m, e) = frexp(v * 2f64.powi(64));
        return (m, e - 64);
    }
    let e = exp - 1022;
    let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
    (m, e)
}

impl PartialOrd for Dy {
    fn partial_cmp(&self, o: &Dy) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Dy {
    fn cmp(&self, o: &Dy) -> Ordering {
        self.sub(o).m.sign().cmp(&Sign::NoSign)
    }
}

/// Real ball [mid - rad, mid + rad].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RBall {
    pub mid: Dy,
    pub rad: Dy,
}

impl RBall {
    pub fn exact(mid: Dy) -> RBall {
        RBall { mid, rad: Dy::zero() }
    }

    pub fn zero() -> RBall {
        RBall::exact(Dy::zero())
    }

    pub fn from_rat(q: &Rat, prec: u64) -> RBall {
        let (mid, err) = Dy::from_rat_floor(q, prec);
        RBall { mid, rad: err }
    }

    fn normalize(mid: Dy, rad: Dy, prec: u64) -> RBall {
        let (mid, err) = mid.round_floor(prec);
        let rad = rad.add(&err).round_up(RAD_BITS);
        RBall { mid, rad }
    }

    pub fn add(&self, o: &RBall, prec: u64) -> RBall {
        RBall::normalize(self.mid.add(&o.mid), self.rad.add(&o.rad), prec)
    }

    pub fn sub(&self, o: &RBall, prec: u64) -> RBall {
        RBall::normalize(self.mid.sub(&o.mid), self.rad.add(&o.rad), prec)
    }

    pub fn neg(&self) -> RBall {
        RBall { mid: self.mid.neg(), rad: self.rad.clone() }
    }

    pub fn mul(&self, o: &RBall, prec: u64) -> RBall {
        let mid = self.mid.mul(&o.mid);
        let rad = self.mid.abs().mul(&o.rad).add(&o.mid.abs().mul(&self.rad)).add(&self.rad.mul(&o.rad));
        RBall::normalize(mid, rad, prec)
    }

    pub fn lower(&self) -> Dy {
        self.mid.sub(&self.rad)
    }

    pub fn upper(&self) -> Dy {
        self.mid.add(&self.rad)
    }

    pub fn contains_zero(&self) -> bool {
        self.lower().signum() <= 0 && self.upper().signum() >= 0
    }

    /// Sign of every point of the ball, if uniform and nonzero.
    pub fn sign(&self) -> Option<i32> {
        if self.lower().signum() > 0 {
            Some(1)
        } else if self.upper().signum() < 0 {
            Some(-1)
        } else {
            None
        }
    }

    /// Upper bound on |x| over the ball.
    pub fn abs_upper(&self) -> Dy {
        self.mid.abs().add(&self.rad)
    }

    /// Lower bound on |x| over the ball (zero if the ball meets zero).
    pub fn abs_lower(&self) -> Dy {
        let v = self.mid.abs().sub(&self.rad);
        if v.signum() < 0 {
            Dy::zero()
        } else {
            v
        }
    }

    pub fn inv(&self, prec: u64) -> Option<RBall> {
        let lo = self.abs_lower();
        if lo.is_zero() {
            return None;
        }
        let s = self.mid.signum();
        let am = self.mid.abs();
        // 1/m to prec bits, error |1/x - 1/m| <= r / (|m| (|m| - r))
        let q = Dy::div_floor(&Dy::from_int(1), &am, prec);
        let qerr = Dy::pow2(q.e);
        let denom = am.mul(&lo);
        let rad = Dy::div_up(&self.rad, &denom, RAD_BITS).add(&qerr);
        let mid = if s < 0 { q.neg() } else { q };
        Some(RBall { mid, rad: rad.round_up(RAD_BITS) })
    }

    pub fn width_log2(&self) -> i64 {
        if self.rad.is_zero() {
            i64::MIN
        } else {
            self.rad.top()
        }
    }
}

/// Complex ball as a product of two real balls.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CBall {
    pub re: RBall,
    pub im: RBall,
}

impl CBall {
    pub fn from_real(re: RBall) -> CBall {
        CBall { re, im: RBall::zero() }
    }

    pub fn from_rat(q: &Rat, prec: u64) -> CBall {
        CBall::from_real(RBall::from_rat(q, prec))
    }

    pub fn exact(re: Dy, im: Dy) -> CBall {
        CBall { re: RBall::exact(re), im: RBall::exact(im) }
    }

    pub fn add(&self, o: &CBall, prec: u64) -> CBall {
        CBall { re: self.re.add(&o.re, prec), im: self.im.add(&o.im, prec) }
    }

    pub fn sub(&self, o: &CBall, prec: u64) -> CBall {
        CBall { re: self.re.sub(&o.re, prec), im: self.im.sub(&o.im, prec) }
    }

    pub fn neg(&self) -> CBall {
        CBall { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn conj(&self) -> CBall {
        CBall { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn mul(&self, o: &CBall, prec: u64) -> CBall {
        if self.im.mid.is_zero() && self.im.rad.is_zero() && o.im.mid.is_zero() && o.im.rad.is_zero() {
            return CBall::from_real(self.re.mul(&o.re, prec));
        }
        let re = self.re.mul(&o.re, prec).sub(&self.im.mul(&o.im, prec), prec);
        let im = self.re.mul(&o.im, prec).add(&self.im.mul(&o.re, prec), prec);
        CBall { re, im }
    }

    pub fn norm_sq(&self, prec: u64) -> RBall {
        let a = sq(&self.re, prec);
        let b = sq(&self.im, prec);
        a.add(&b, prec)
    }

    pub fn inv(&self, prec: u64) -> Option<CBall> {
        let n = self.norm_sq(prec);
        let ni = n.inv(prec)?;
        let c = self.conj();
        Some(CBall { re: c.re.mul(&ni, prec), im: c.im.mul(&ni, prec) })
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn mid_only(&self) -> CBall {
        CBall::exact(self.re.mid.clone(), self.im.mid.clone())
    }

    pub fn is_real_exact(&self) -> bool {
        self.im.mid.is_zero() && self.im.rad.is_zero()
    }
}

/// Square of a real ball, tighter than mul when the ball straddles zero.
pub fn sq(a: &RBall, prec: u64) -> RBall {
    let m = a.mul(a, prec);
    if a.contains_zero() {
        let up = a.abs_upper();
        let hi = up.mul(&up);
        // [0, hi]
        let (mid, _) = hi.mul_pow2(-1).round_floor(prec);
        let rad = hi.sub(&mid).round_up(RAD_BITS);
        return RBall { mid, rad };
    }
    m
}

/// Horner evaluation of a rational polynomial at a complex ball.
pub fn eval_poly(coeffs: &[Rat], z: &CBall, prec: u64) -> CBall {
    let mut acc = CBall::from_rat(&Rat::zero(), prec);
    for c in coeffs.iter().rev() {
        acc = acc.mul(z, prec).add(&CBall::from_rat(c, prec), prec);
    }
    acc
}

/// Upper bound on |z| over the ball.
pub fn abs_upper(z: &CBall, prec: u64) -> Dy {
    let n = z.norm_sq(prec);
    n.upper().sqrt_bounds(prec).1
}

/// Lower bound on |z| over the ball.
pub fn abs_lower(z: &CBall, prec: u64) -> Dy {
    let n = z.norm_sq(prec);
    let lo = n.lower();
    if lo.signum() <= 0 {
        return Dy::zero();
    }
    lo.sqrt_bounds(prec).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sqrt_bounds_bracket() {
        let two = Dy::from_int(2);
        let (lo, hi) = two.sqrt_bounds(80);
        assert!(lo.mul(&lo) <= two && hi.mul(&hi) >= two);
        assert!(hi.sub(&lo) <= Dy::pow2(-70));
    }

    #[test]
    fn frexp_roundtrip() {
        for v in [1.0, 0.75, -3.5, 1e-300, 12345.678] {
            assert_eq!(Dy::from_f64(v).to_f64(), v);
        }
    }

    proptest! {
        #[test]
        fn balls_contain_exact_results(a in -10_000i64..10_000, b in 1i64..10_000, c in -10_000i64..10_000, d in 1i64..10_000, prec in 8u64..80) {
            let x = Rat::frac(a, b);
            let y = Rat::frac(c, d);
            let bx = RBall::from_rat(&x, prec);
            let by = RBall::from_rat(&y, prec);
            let inside = |ball: &RBall, v: &Rat| ball.lower().to_rat() <= *v && *v <= ball.upper().to_rat();
            prop_assert!(inside(&bx, &x));
            prop_assert!(inside(&bx.add(&by, prec), &(&x + &y)));
            prop_assert!(inside(&bx.mul(&by, prec), &(&x * &y)));
            if let Some(inv) = by.inv(prec) {
                prop_assert!(inside(&inv, &y.recip()));
            }
            let cx = CBall { re: bx.clone(), im: by.clone() };
            let n = cx.norm_sq(prec);
            prop_assert!(inside(&n, &(&x * &x + &y * &y)));
        }
    }
}
