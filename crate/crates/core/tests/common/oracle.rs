//! Chord-tangent arithmetic on BigRational, independent of the library's field arithmetic.

use dioph_core::elliptic::CurvePoint;
use dioph_core::Rat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

pub type Q = BigRational;
pub type Pt = Option<(Q, Q)>;

pub struct Oracle {
    a: [Q; 5],
}

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

impl Oracle {
    pub fn new(a: [i64; 5]) -> Oracle {
        Oracle { a: a.map(q) }
    }

    pub fn neg(&self, p: &Pt) -> Pt {
        let [a1, _, a3, _, _] = &self.a;
        p.as_ref().map(|(x, y)| (x.clone(), -y - a1 * x - a3))
    }

    pub fn add(&self, p: &Pt, r: &Pt) -> Pt {
        let [a1, a2, a3, a4, a6] = &self.a;
        let (Some((x1, y1)), Some((x2, y2))) = (p, r) else {
            return if p.is_none() { r.clone() } else { p.clone() };
        };
        if x1 == x2 && (y1 + y2 + a1 * x2 + a3).is_zero() {
            return None;
        }
        let (lam, nu) = if x1 == x2 {
            let three = q(3);
            let two = q(2);
            let num = &three * x1 * x1 + &two * a2 * x1 + a4 - a1 * y1;
            let den = &two * y1 + a1 * x1 + a3;
            let nu_num = -(x1 * x1 * x1) + a4 * x1 + &two * a6 - a3 * y1;
            (num / &den, nu_num / &den)
        } else {
            let lam = (y2 - y1) / (x2 - x1);
            let nu = (y1 * x2 - y2 * x1) / (x2 - x1);
            (lam, nu)
        };
        let x3 = &lam * &lam + a1 * &lam - a2 - x1 - x2;
        let y3 = -(&lam + a1) * &x3 - &nu - a3;
        Some((x3, y3))
    }

    pub fn mul(&self, n: i64, p: &Pt) -> Pt {
        let base = if n < 0 { self.neg(p) } else { p.clone() };
        let mut acc = None;
        for _ in 0..n.unsigned_abs() {
            acc = self.add(&acc, &base);
        }
        acc
    }

    pub fn on_curve(&self, p: &Pt) -> bool {
        let [a1, a2, a3, a4, a6] = &self.a;
        match p {
            None => true,
            Some((x, y)) => y * y + a1 * x * y + a3 * y == x * x * x + a2 * x * x + a4 * x + a6,
        }
    }
}

pub fn to_oracle(p: &CurvePoint) -> Pt {
    match p {
        CurvePoint::Identity => None,
        CurvePoint::Affine(x, y) => {
            let c = |r: Rat| Q::new(r.numer().clone(), r.denom().clone());
            Some((c(x.as_rational().unwrap()), c(y.as_rational().unwrap())))
        }
    }
}
