use dioph_core::dioph::{
    self, bigring_params_make, negorder_check, usebounds_chain, ChainInput, ChainVerdict, Deg2Fixture, Deg2Tower, Mode,
    RingSpec, SystemId, VerificationReport, WitnessBundle,
};
use dioph_core::elliptic::EllipticCurve;
use dioph_core::numfield::NumberField;
use dioph_core::units::pell_solve_q;
use dioph_core::Rat;
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

fn is_square(n: u128) -> bool {
    let r = (n as f64).sqrt() as u128;
    (r.saturating_sub(2)..=r + 2).any(|s| s * s == n)
}

/// Smallest y >= 1 with d y^2 + 1 a square.
fn pell_brute(d: u128) -> (u128, u128) {
    for y in 1u128.. {
        let v = d * y * y + 1;
        if is_square(v) {
            let x = (1..).map(|k| (v as f64).sqrt() as u128 - 1 + k).find(|x| x * x == v).unwrap();
            return (x, y);
        }
    }
    unreachable!()
}

#[test]
fn pell_matches_minimal_y_search() {
    for d in 2u128..=60 {
        if is_square(d) {
            continue;
        }
        let (x, y) = pell_brute(d);
        let s = pell_solve_q(&BigInt::from(d)).unwrap();
        assert_eq!(s.integers(), Some((BigInt::from(x), BigInt::from(y))), "d = {}", d);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn pell_composition_closure(d in 2i64..40, i in 1u32..4, j in 1u32..4) {
        prop_assume!(!is_square(d as u128));
        let s = pell_solve_q(&BigInt::from(d)).unwrap();
        let pow = |k: u32| (1..k).fold(s.clone(), |acc, _| acc.compose(&s).unwrap());
        let c = pow(i).compose(&pow(j)).unwrap();
        prop_assert!(c.holds());
        prop_assert_eq!(c, pow(i + j));
    }
}

/// The chain evaluated on machine integers, step by step.
fn chain_oracle(p: i128, n: u32, x: i128, y: i128, z: i128, w: i128, a: i128, b: i128) -> ChainVerdict {
    let pn = p.pow(n);
    let tn = 2i128.pow(n);
    if !(y <= x && x <= z) {
        return ChainVerdict::Broken("eq:4.01".into());
    }
    if pn * z.pow(4) > a {
        return ChainVerdict::Broken("eq:4.2".into());
    }
    if a * w > tn * b * z {
        return ChainVerdict::Broken("eq:7".into());
    }
    if b > y * y {
        return ChainVerdict::Broken("le:denominators".into());
    }
    if pn * z.pow(4) <= tn * z.pow(3) {
        return ChainVerdict::Broken("eq:8".into());
    }
    ChainVerdict::Contradiction
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn usebounds_chain_matches_brute_force(
        p in prop::sample::select(vec![2i128, 3, 5, 7]),
        n in 1u32..4,
        x in 1i128..12, y in 1i128..12, z in 1i128..12, w in 1i128..12,
        a in 1i128..5000, b in 1i128..200,
    ) {
        let c = ChainInput {
            p: BigInt::from(p),
            degree: n,
            x: BigInt::from(x),
            y: BigInt::from(y),
            z: BigInt::from(z),
            w: BigInt::from(w),
            a: BigInt::from(a),
            b: BigInt::from(b),
        };
        let (steps, verdict) = usebounds_chain(&c);
        prop_assert_eq!(&verdict, &chain_oracle(p, n, x, y, z, w, a, b));
        // the step list stops at the first failure
        let fails = steps.iter().filter(|(_, ok)| !ok).count();
        prop_assert!(fails <= 1);
    }
}

/// A <= 2^n B Z / W <= 2^n Y^2 Z <= 2^n Z^3 < p^n Z^4 <= A, so integer inputs always break a premise.
#[test]
fn chain_stops_at_the_first_broken_premise() {
    let c = ChainInput {
        p: BigInt::from(3),
        degree: 1,
        x: BigInt::from(1),
        y: BigInt::from(1),
        z: BigInt::from(1),
        w: BigInt::from(1),
        a: BigInt::from(3),
        b: BigInt::from(1),
    };
    assert_eq!(usebounds_chain(&c).1, ChainVerdict::Broken("eq:7".into()));
    let c = ChainInput { a: BigInt::from(3), w: BigInt::from(1), b: BigInt::from(1), z: BigInt::from(2), x: BigInt::from(2), ..c };
    // p Z^4 = 48 > A: eq:4.2 breaks
    assert_eq!(usebounds_chain(&c).1, ChainVerdict::Broken("eq:4.2".into()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn negorder_on_random_rationals(num in -5000i64..5000, den in 1i64..5000) {
        let e = NumberField::from_ints(&[-1, -3, 0, 1]).unwrap();
        let params = bigring_params_make(&e, &[0, 1, 2, 3, 4, 5, 6]).unwrap();
        let primes = [2u64, 5, 7, 11, 13, 23, 29, 31, 41, 43];
        prop_assert!(negorder_check(&params, &Rat::frac(num, den), &primes).unwrap());
    }
}

fn default_q() -> (EllipticCurve, dioph_core::elliptic::CurvePoint) {
    let e = EllipticCurve::default_curve();
    let p = e.point_q(Rat::from(0), Rat::from(0)).unwrap();
    (e, p)
}

fn verify_any(b: &WitnessBundle, n: u64) -> VerificationReport {
    let q = NumberField::rationals();
    match b.system {
        SystemId::SetA => dioph::seta_verify(&q.from_int(n * n), b),
        SystemId::SetABigring => dioph::bigring_seta_verify(&q.from_int(n * n), b),
        SystemId::Part2 => dioph::part2_verify(&q.from_int(n), b),
        SystemId::Part2Bigring => {
            let e = NumberField::from_ints(&[-1, -3, 0, 1]).unwrap();
            let params = bigring_params_make(&e, &[0, 1, 2, 3, 4, 5, 6]).unwrap();
            dioph::bigring_part2_verify(&q.from_int(n), b, &params)
        }
        SystemId::Deg2 | SystemId::Deg2Bigring => {
            let f = Deg2Fixture::standard().unwrap();
            let x = Deg2Tower::new(&f).unwrap().k_to_g(&f.k.from_int(n)).unwrap();
            dioph::deg2_verify(&x, b, &f)
        }
    }
}

#[test]
fn json_round_trip_is_stable() {
    let (e, p) = default_q();
    let f = Deg2Fixture::standard().unwrap();
    let bundles = vec![
        (dioph::seta_construct(1, &e, &p, RingSpec::Integers, Mode::PaperExact, 1000).unwrap(), 1),
        (dioph::seta_construct(2, &e, &p, RingSpec::Allowed(vec![BigInt::from(5)]), Mode::Relaxed(2), 1000).unwrap(), 2),
        (dioph::part2_construct(1, None, 3, &e, &p, RingSpec::Integers, Mode::Relaxed(1), 100_000).unwrap(), 1),
        (dioph::deg2_construct(1, &f).unwrap(), 1),
    ];
    for (b, n) in bundles {
        let j = b.to_json().unwrap();
        let text = serde_json::to_string(&j).unwrap();
        let back = WitnessBundle::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.to_json().unwrap(), j);
        assert_eq!(back.assignment, b.assignment);
        assert_eq!(back.children.len(), b.children.len());
        let rep = verify_any(&back, n);
        assert!(rep.pass, "{} {:?}", b.system, rep.failing());
    }
}

fn pick<'a, T>(rng: &mut ChaCha8Rng, v: &'a [T]) -> &'a T {
    &v[rng.gen_range(0..v.len())]
}

/// One random structural or value corruption of a bundle document.
fn mutate(base: &Json, rng: &mut ChaCha8Rng) -> (String, String) {
    let mut v = base.clone();
    let names: Vec<String> = v["assignment"].as_object().unwrap().keys().cloned().collect();
    let kind = rng.gen_range(0..9);
    let name = pick(rng, &names).clone();
    let what = match kind {
        0 => {
            let k = pick(rng, &["system", "mode", "fields", "curve", "ring", "assignment"]).to_string();
            v.as_object_mut().unwrap().remove(&k);
            format!("drop {}", k)
        }
        1 => {
            v["assignment"].as_object_mut().unwrap().remove(&name);
            format!("drop variable {}", name)
        }
        2 => {
            let junk = pick(rng, &["abc", "1/0", "", "1.5", "--3", "0x10"]).to_string();
            let ent = &mut v["assignment"][&name];
            let slot = if ent.get("coords").is_some() { &mut ent["coords"][0] } else { &mut ent["x"][0] };
            *slot = json!(junk);
            format!("garbage in {}", name)
        }
        3 => {
            let k: i64 = *pick(rng, &[-7i64, -1, 1, 2, 11]);
            let ent = &mut v["assignment"][&name];
            let slot = if ent.get("coords").is_some() { &mut ent["coords"][0] } else { &mut ent["x"][0] };
            let old: Rat = slot.as_str().unwrap().parse().unwrap();
            *slot = json!((old + Rat::from(k)).to_string());
            format!("shift {} by {}", name, k)
        }
        4 => {
            // setA_bigring is left out: an integral witness is also one over the larger ring
            let s = pick(rng, &["part2", "deg2", "part2_bigring"]).to_string();
            v["system"] = json!(s);
            format!("system {}", s)
        }
        5 => {
            v["curve"]["a"][4] = json!(["1"]);
            "curve a6".into()
        }
        6 => {
            v["ring"] = json!({"kind": "bogus"});
            "ring kind".into()
        }
        7 => {
            let other = pick(rng, &names).clone();
            let (a, b) = (v["assignment"][&name].clone(), v["assignment"][&other].clone());
            if a == b {
                v["assignment"].as_object_mut().unwrap().remove(&name);
                format!("drop variable {}", name)
            } else {
                v["assignment"][&name] = b;
                v["assignment"][&other] = a;
                format!("swap {} {}", name, other)
            }
        }
        _ => {
            let text = v.to_string();
            let cut = rng.gen_range(1..text.len() - 1);
            return (text[..cut].to_string(), format!("truncate at {}", cut));
        }
    };
    (v.to_string(), what)
}

#[test]
fn random_malformed_bundles_never_pass() {
    let (e, p) = default_q();
    let b = dioph::seta_construct(2, &e, &p, RingSpec::Integers, Mode::Relaxed(2), 1000).unwrap();
    let base = b.to_json().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut rejected_at_parse = 0;
    for _ in 0..100 {
        let (text, what) = mutate(&base, &mut rng);
        let parsed = serde_json::from_str::<Json>(&text).ok().and_then(|j| WitnessBundle::from_json(&j).ok());
        match parsed {
            None => rejected_at_parse += 1,
            Some(bad) => {
                let rep = verify_any(&bad, 2);
                assert!(!rep.pass, "mutation '{}' still verifies", what);
            }
        }
    }
    assert!(rejected_at_parse > 0 && rejected_at_parse < 100);
}
