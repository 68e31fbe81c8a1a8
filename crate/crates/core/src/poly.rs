//! Dense univariate polynomials over Q, coefficients stored low to high.

use crate::rat::{gcd, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QPoly {
    c: Vec<Rat>,
}

impl QPoly {
    pub fn new(mut c: Vec<Rat>) -> QPoly {
        while c.last().map_or(false, |x| x.is_zero()) {
            c.pop();
        }
        QPoly { c }
    }

    pub fn from_ints(c: &[i64]) -> QPoly {
        QPoly::new(c.iter().map(|&v| Rat::from(v)).collect())
    }

    pub fn from_bigints(c: &[BigInt]) -> QPoly {
        QPoly::new(c.iter().map(Rat::from).collect())
    }

    pub fn zero() -> QPoly {
        QPoly { c: vec![] }
    }

    pub fn one() -> QPoly {
        QPoly::constant(Rat::one())
    }

    pub fn constant(v: Rat) -> QPoly {
        QPoly::new(vec![v])
    }

    /// The monomial c*x^k.
    pub fn monomial(v: Rat, k: usize) -> QPoly {
        let mut c = vec![Rat::zero(); k + 1];
        c[k] = v;
        QPoly::new(c)
    }

    pub fn x() -> QPoly {
        QPoly::monomial(Rat::one(), 1)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<Rat> {
        self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; the zero polynomial has degree -1.
    pub fn deg(&self) -> isize {
        self.c.len() as isize - 1
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.c.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn lc(&self) -> Rat {
        self.c.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.c.last().map_or(false, |x| x.is_one())
    }

    pub fn scale(&self, k: &Rat) -> QPoly {
        if k.is_zero() {
            return QPoly::zero();
        }
        QPoly { c: self.c.iter().map(|v| v * k).collect() }
    }

    pub fn monic(&self) -> QPoly {
        if self.is_zero() {
            return QPoly::zero();
        }
        let l = self.lc().recip();
        self.scale(&l)
    }

    pub fn add(&self, o: &QPoly) -> QPoly {
        let n = self.c.len().max(o.c.len());
        QPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &QPoly) -> QPoly {
        let n = self.c.len().max(o.c.len());
        QPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> QPoly {
        QPoly { c: self.c.iter().map(|v| -v).collect() }
    }

    pub fn mul(&self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut r = vec![Rat::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !b.is_zero() {
                    r[i + j] += &(a * b);
                }
            }
        }
        QPoly::new(r)
    }

    pub fn pow(&self, e: u32) -> QPoly {
        let mut r = QPoly::one();
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn divrem(&self, d: &QPoly) -> (QPoly, QPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.c.len() - 1;
        if self.c.len() < d.c.len() {
            return (QPoly::zero(), self.clone());
        }
        let inv = d.lc().recip();
        let mut r = self.c.clone();
        let mut q = vec![Rat::zero(); self.c.len() - dd];
        for k in (0..q.len()).rev() {
            let t = &r[k + dd] * &inv;
            if !t.is_zero() {
                for (j, dj) in d.c.iter().enumerate() {
                    if !dj.is_zero() {
                        r[k + j] -= &(&t * dj);
                    }
                }
            }
            q[k] = t;
        }
        r.truncate(dd);
        (QPoly::new(q), QPoly::new(r))
    }

    pub fn rem(&self, d: &QPoly) -> QPoly {
        self.divrem(d).1
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, o: &QPoly) -> QPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.primitive_rat();
        }
        a.monic()
    }

    /// Returns (g, s, t) with s*self + t*o = g, g monic.
    pub fn ext_gcd(&self, o: &QPoly) -> (QPoly, QPoly, QPoly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (QPoly::one(), QPoly::zero());
        let (mut t0, mut t1) = (QPoly::zero(), QPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s2 = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s2);
            let t2 = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t2);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let l = r0.lc().recip();
        (r0.scale(&l), s0.scale(&l), t0.scale(&l))
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for v in self.c.iter().rev() {
            acc = &(&acc * x) + v;
        }
        acc
    }

    pub fn derivative(&self) -> QPoly {
        QPoly::new(self.c.iter().enumerate().skip(1).map(|(i, v)| v * &Rat::from(i as i64)).collect())
    }

    /// self(g(x)).
    pub fn compose(&self, g: &QPoly) -> QPoly {
        let mut acc = QPoly::zero();
        for v in self.c.iter().rev() {
            acc = acc.mul(g).add(&QPoly::constant(v.clone()));
        }
        acc
    }

    /// Scales by a positive rational so the coefficients are coprime integers.
    pub fn primitive_rat(&self) -> QPoly {
        if self.is_zero() {
            return QPoly::zero();
        }
        let z = self.to_primitive_ints();
        QPoly::from_bigints(&z)
    }

    /// Integer coefficients of a positive rational multiple with content 1.
    pub fn to_primitive_ints(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return vec![];
        }
        let mut l = BigInt::one();
        for v in &self.c {
            l = l.lcm(v.denom());
        }
        let ints: Vec<BigInt> = self.c.iter().map(|v| v.numer() * (&l / v.denom())).collect();
        let mut g = BigInt::zero();
        for v in &ints {
            g = gcd(&g, v);
        }
        ints.into_iter().map(|v| v / &g).collect()
    }

    /// Integer coefficients if every coefficient is an integer.
    pub fn to_ints(&self) -> Option<Vec<BigInt>> {
        self.c.iter().map(|v| if v.is_integer() { Some(v.numer().clone()) } else { None }).collect()
    }

    pub fn is_squarefree(&self) -> bool {
        self.deg() <= 0 || self.gcd(&self.derivative()).deg() == 0
    }

    /// Resultant via the Euclidean remainder sequence.
    pub fn resultant(&self, o: &QPoly) -> Rat {
        if self.is_zero() || o.is_zero() {
            return Rat::zero();
        }
        let (m, n) = (self.deg(), o.deg());
        if n == 0 {
            return o.lc().pow(m as i64);
        }
        if m == 0 {
            return self.lc().pow(n as i64);
        }
        if m < n {
            let s = if (m * n) % 2 == 1 { -Rat::one() } else { Rat::one() };
            return s * o.resultant(self);
        }
        let r = self.rem(o);
        if r.is_zero() {
            return Rat::zero();
        }
        // res(f, g) = (-1)^{mn} lc(g)^{m - deg r} res(g, r)
        let s = if (m * n) % 2 == 1 { -Rat::one() } else { Rat::one() };
        s * o.lc().pow(m as i64 - r.deg() as i64) * o.resultant(&r)
    }

    pub fn discriminant(&self) -> Rat {
        let n = self.deg();
        let r = self.resultant(&self.derivative());
        let s = if (n * (n - 1) / 2) % 2 == 1 { -Rat::one() } else { Rat::one() };
        s * r / self.lc()
    }

    /// Sturm sequence of a squarefree polynomial, each term made primitive.
    pub fn sturm_sequence(&self) -> Vec<QPoly> {
        let mut seq = vec![self.primitive_rat(), self.derivative().primitive_rat()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(r.neg().primitive_rat());
        }
        seq
    }

    /// Number of distinct real roots.
    pub fn count_real_roots(&self) -> usize {
        if self.deg() <= 0 {
            return 0;
        }
        let seq = self.sturm_sequence();
        let changes = |signs: Vec<i32>| {
            let s: Vec<i32> = signs.into_iter().filter(|&v| v != 0).collect();
            s.windows(2).filter(|w| w[0] != w[1]).count()
        };
        let at_pos: Vec<i32> = seq.iter().map(|p| p.lc().signum()).collect();
        let at_neg: Vec<i32> = seq.iter().map(|p| p.lc().signum() * if p.deg() % 2 == 0 { 1 } else { -1 }).collect();
        changes(at_neg) - changes(at_pos)
    }

    /// Number of distinct real roots in the half-open interval (a, b].
    pub fn count_roots_in(&self, a: &Rat, b: &Rat) -> usize {
        let seq = self.sturm_sequence();
        let changes = |x: &Rat| {
            let s: Vec<i32> = seq.iter().map(|p| p.eval(x).signum()).filter(|&v| v != 0).collect();
            s.windows(2).filter(|w| w[0] != w[1]).count()
        };
        changes(a) - changes(b)
    }

    /// Cauchy bound: every complex root has absolute value below it.
    pub fn root_bound(&self) -> Rat {
        let l = self.lc().abs();
        let m = self.c[..self.c.len() - 1].iter().map(|v| v.abs()).max().unwrap_or_else(Rat::zero);
        Rat::one() + m / l
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.c.iter().map(|v| v.to_f64()).collect()
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, v) in self.c.iter().enumerate().rev() {
            if v.is_zero() {
                continue;
            }
            let neg = v.is_negative();
            let a = v.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_coeff = !a.is_one() || i == 0;
            if show_coeff {
                write!(f, "{}", a)?;
                if i > 0 {
                    write!(f, "*")?;
                }
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{}", i)?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QPoly({})", self)
    }
}

/// Coefficients as i64 when they fit.
pub fn small_ints(p: &QPoly) -> Option<Vec<i64>> {
    use num_traits::ToPrimitive;
    p.to_ints()?.iter().map(|v| v.to_i64()).collect()
}

/// Degree of the largest coefficient bit size, used for budget decisions.
pub fn max_coeff_bits(p: &[BigInt]) -> u64 {
    p.iter().map(|v| v.abs().bits()).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn resultant_and_discriminant() {
        let f = QPoly::from_ints(&[-2, 0, 1]);
        assert_eq!(f.discriminant(), Rat::from(8));
        let g = QPoly::from_ints(&[3, 1]);
        // res(x^2-2, x+3) = (-3)^2 - 2
        assert_eq!(f.resultant(&g), Rat::from(7));
        let c = QPoly::from_ints(&[-1, -3, 0, 1]);
        assert_eq!(c.discriminant(), Rat::from(81));
    }

    #[test]
    fn sturm_counts() {
        assert_eq!(QPoly::from_ints(&[-2, 0, 1]).count_real_roots(), 2);
        assert_eq!(QPoly::from_ints(&[7, 0, 1]).count_real_roots(), 0);
        assert_eq!(QPoly::from_ints(&[-1, -3, 0, 1]).count_real_roots(), 3);
        assert_eq!(QPoly::from_ints(&[-2, 0, 0, 0, 1]).count_real_roots(), 2);
        let f = QPoly::from_ints(&[-2, 0, 1]);
        assert_eq!(f.count_roots_in(&Rat::from(0), &Rat::from(2)), 1);
    }

    #[test]
    fn display() {
        assert_eq!(QPoly::from_ints(&[-1, -2, 1]).to_string(), "x^2 - 2*x - 1");
        assert_eq!(QPoly::from_ints(&[3, 1]).to_string(), "x + 3");
    }

    fn arb_poly() -> impl Strategy<Value = QPoly> {
        proptest::collection::vec(-20i64..20, 0..6).prop_map(|v| QPoly::from_ints(&v))
    }

    proptest! {
        #[test]
        fn division_identity(a in arb_poly(), b in arb_poly()) {
            prop_assume!(!b.is_zero());
            let (q, r) = a.divrem(&b);
            prop_assert_eq!(q.mul(&b).add(&r), a);
            prop_assert!(r.deg() < b.deg());
        }

        #[test]
        fn ext_gcd_identity(a in arb_poly(), b in arb_poly()) {
            prop_assume!(!a.is_zero() || !b.is_zero());
            let (g, s, t) = a.ext_gcd(&b);
            prop_assert_eq!(s.mul(&a).add(&t.mul(&b)), g.clone());
            prop_assert!(a.rem(&g).is_zero() && b.rem(&g).is_zero());
        }

        #[test]
        fn resultant_multiplicative(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assume!(a.deg() > 0 && b.deg() > 0 && c.deg() > 0);
            prop_assert_eq!(a.resultant(&b.mul(&c)), a.resultant(&b) * a.resultant(&c));
        }
    }
}
