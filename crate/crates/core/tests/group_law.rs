//! Group law against the chord-tangent oracle.

mod common;

use common::oracle::{q, to_oracle, Oracle, Pt, Q};
use dioph_core::elliptic::{CurvePoint, EllipticCurve};
use dioph_core::Rat;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn default_pair() -> (EllipticCurve, CurvePoint, Oracle, Pt) {
    let e = EllipticCurve::default_curve();
    let p = e.point_q(Rat::from(0), Rat::from(0)).unwrap();
    (e, p, Oracle::new([0, 0, 1, -1, 0]), Some((Q::zero(), Q::zero())))
}

#[test]
fn listed_multiples() {
    let (e, p, o, op) = default_pair();
    let want = [(2, (1, 1), (0, 1)), (3, (-1, 1), (-1, 1)), (4, (2, 1), (-3, 1)), (5, (1, 4), (-5, 8)), (6, (6, 1), (14, 1))];
    for (n, (xn, xd), (yn, yd)) in want {
        let exp = Some((q(xn) / q(xd), q(yn) / q(yd)));
        assert_eq!(o.mul(n, &op), exp, "oracle [{}]P", n);
        assert_eq!(to_oracle(&e.mul(n, &p).unwrap()), exp, "library [{}]P", n);
    }
}

#[test]
fn library_matches_oracle_for_small_multiples() {
    let (e, p, o, op) = default_pair();
    for n in -25..=25 {
        let lib = e.mul(n, &p).unwrap();
        let ora = o.mul(n, &op);
        assert!(o.on_curve(&ora));
        assert_eq!(to_oracle(&lib), ora, "n = {}", n);
        assert_eq!(e.multiple(n, &p).unwrap(), lib, "ladder vs double-and-add at n = {}", n);
    }
}

#[test]
fn other_curves_over_q() {
    let cases: [([i64; 5], (i64, i64)); 3] = [([0, 0, 0, 0, 17], (-2, 3)), ([1, 0, 0, -1, 0], (1, 0)), ([1, -1, 1, 0, 2], (0, 1))];
    for (a, (x, y)) in cases {
        let e = EllipticCurve::over_q(a).unwrap();
        let o = Oracle::new(a);
        let op = Some((q(x), q(y)));
        assert!(o.on_curve(&op));
        let p = e.point_q(Rat::from(x), Rat::from(y)).unwrap();
        for n in -8..=8 {
            assert_eq!(to_oracle(&e.mul(n, &p).unwrap()), o.mul(n, &op), "{:?} n = {}", a, n);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn associativity_on_multiples(a in -12i64..12, b in -12i64..12, c in -12i64..12) {
        let (e, p, _, _) = default_pair();
        let (pa, pb, pc) = (e.mul(a, &p).unwrap(), e.mul(b, &p).unwrap(), e.mul(c, &p).unwrap());
        let l = e.add(&e.add(&pa, &pb).unwrap(), &pc).unwrap();
        let r = e.add(&pa, &e.add(&pb, &pc).unwrap()).unwrap();
        prop_assert_eq!(&l, &r);
        prop_assert_eq!(l, e.mul(a + b + c, &p).unwrap());
    }

    #[test]
    fn negation_and_identity(n in -20i64..20) {
        let (e, p, o, op) = default_pair();
        let pn = e.mul(n, &p).unwrap();
        prop_assert!(e.add(&pn, &e.neg(&pn)).unwrap().is_identity());
        prop_assert_eq!(e.add(&pn, &CurvePoint::Identity).unwrap(), pn.clone());
        prop_assert_eq!(to_oracle(&e.neg(&pn)), o.neg(&o.mul(n, &op)));
    }
}

#[test]
fn oracle_self_check() {
    let o = Oracle::new([0, 0, 1, -1, 0]);
    let p = Some((Q::zero(), Q::zero()));
    assert_eq!(o.add(&p, &o.neg(&p)), None);
    assert_eq!(o.mul(0, &p), None);
    assert!(Q::one() > Q::zero());
}
