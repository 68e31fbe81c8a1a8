//! Task execution. Each task yields a status, a details object and a list of labelled checks.

use crate::config::{NamedCurve, TaskKind, WitnessAction, WitnessTask};
use dioph_core::dioph::{
    self, bigring_params_make, BigRingParams, Deg2Fixture, Mode, RingSpec, Status, SystemId, VerificationReport,
    WitnessBundle,
};
use dioph_core::divisors::{self, density_count, density_rows, factor_prime, looks_galois, Divisor};
use dioph_core::elliptic::{self, CurvePoint};
use dioph_core::numfield::{FieldElement, NumberField};
use dioph_core::{units, Error, Rat};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value as Json};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskStatus {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckEntry {
    pub label: String,
    pub status: String,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub status: TaskStatus,
    pub details: Json,
    pub checks: Vec<CheckEntry>,
}

impl Outcome {
    fn new(details: Json) -> Outcome {
        Outcome { status: TaskStatus::Pass, details, checks: Vec::new() }
    }

    fn check(mut self, label: &str, ok: bool) -> Outcome {
        self.checks.push(CheckEntry { label: label.into(), status: if ok { "pass" } else { "fail" }.into() });
        if !ok {
            self.status = TaskStatus::Fail;
        }
        self
    }

    fn from_report(details: Json, rep: &VerificationReport) -> Outcome {
        let checks = rep
            .checks
            .iter()
            .map(|c| CheckEntry {
                label: c.label.clone(),
                status: match c.status {
                    Status::Pass => "pass",
                    Status::Fail => "fail",
                    Status::Skipped => "skipped",
                }
                .into(),
            })
            .collect();
        Outcome { status: if rep.pass { TaskStatus::Pass } else { TaskStatus::Fail }, details, checks }
    }

    pub fn error(e: &Error) -> Outcome {
        Outcome { status: TaskStatus::Error, details: json!({"error": e.to_string()}), checks: Vec::new() }
    }
}

type R<T> = dioph_core::Result<T>;

/// A number when it fits in i64, a decimal string otherwise.
pub fn int_json(n: &BigInt) -> Json {
    match i64::try_from(n) {
        Ok(v) => json!(v),
        Err(_) => json!(n.to_string()),
    }
}

/// Rationals as "a/b" strings, other elements as power-basis coordinate lists.
pub fn elem_json(x: &FieldElement) -> Json {
    match x.as_rational() {
        Some(r) => json!(r.to_string()),
        None => json!(x.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>()),
    }
}

pub fn point_json(p: &CurvePoint) -> Json {
    match p {
        CurvePoint::Identity => json!({"point": "O"}),
        CurvePoint::Affine(x, y) => json!({"x": elem_json(x), "y": elem_json(y)}),
    }
}

fn divisor_json(d: &Divisor) -> Json {
    let factors: Vec<Json> = d.iter().map(|(p, e)| json!({"prime": p.to_string(), "exp": e})).collect();
    json!({"divisor": d.to_string(), "factors": factors})
}

fn point_of(c: &NamedCurve) -> &CurvePoint {
    c.point.as_ref().expect("resolved curves carry a point")
}

pub fn field_info(k: &NumberField) -> Json {
    let (r, s) = k.signature();
    let embeddings: Vec<Json> = k
        .embeddings()
        .iter()
        .map(|e| {
            let (re, im) = e.enclosure.approx();
            json!({"index": e.index, "is_real": e.is_real, "re": re, "im": im})
        })
        .collect();
    json!({
        "min_poly": k.poly_coeffs().iter().map(int_json).collect::<Vec<_>>(),
        "degree": k.degree(),
        "disc": int_json(k.disc()),
        "signature": [r, s],
        "embeddings": embeddings,
    })
}

pub fn factor_prime_json(k: &NumberField, p: &BigInt) -> R<Json> {
    let primes = factor_prime(k, p)?;
    Ok(Json::Array(
        primes
            .iter()
            .map(|pr| {
                json!({
                    "ideal": pr.to_string(),
                    "p": int_json(&pr.p),
                    "gen_poly": pr.gen_poly.iter().map(int_json).collect::<Vec<_>>(),
                    "e": pr.e,
                    "f": pr.f,
                })
            })
            .collect(),
    ))
}

/// (2)^4 in the field of the curve.
fn two_to_the_fourth(k: &NumberField) -> R<Divisor> {
    let mut d = Divisor::trivial();
    for pr in factor_prime(k, &BigInt::from(2))? {
        let e = pr.e as i64;
        d.add_exponent(&pr, 4 * e);
    }
    Ok(d)
}

fn lemma_suite(suite: &str, c: &NamedCurve, bound: i64, p: u64, q: u64, ms: &[u64], primes: &[u64]) -> R<Outcome> {
    let (e, pt) = (&c.curve, point_of(c));
    match suite {
        "elliptic" => {
            let rep = elliptic::lemma_suite(e, pt, bound)?;
            let found = elliptic::find_multiple_with_denominator(e, pt, &two_to_the_fourth(e.field())?, 1000)?;
            let details = json!({
                "report": rep,
                "multiple_with_2_4": found.as_ref().map(|(l, _)| *l),
            });
            Ok(Outcome::new(details)
                .check("lemma:evenorder", rep.evenorder_failed.is_empty())
                .check("lemma:po3", rep.po3_failed.is_empty())
                .check("lemma:ratio", rep.ratio_failed.is_empty())
                .check("lemma:multiple_with_denominator", found.is_some()))
        }
        "torsion" => {
            let mut counts = serde_json::Map::new();
            for &l in primes {
                counts.insert(l.to_string(), json!(elliptic::reduce_count_points(e, l)?));
            }
            let b = elliptic::torsion_bound(e, primes)?;
            Ok(Outcome::new(json!({"counts": counts, "torsion_bound": b})).check("torsion:bound_is_one", b == 1))
        }
        "xdifference" => {
            let mut rows = Vec::new();
            let mut ok = true;
            for &m in ms {
                let rep = elliptic::xdifference_check(e, pt, p, q, m)?;
                ok &= rep.holds;
                rows.push(serde_json::to_value(&rep).expect("serializable"));
            }
            Ok(Outcome::new(json!({"p": p, "q": q, "reports": rows})).check("lemma:xdifference", ok))
        }
        _ => Err(Error::InvalidInput(format!("unknown suite {}", suite))),
    }
}

pub fn default_params(k: &NumberField) -> R<BigRingParams> {
    let nj: Vec<u64> = (0..(2 * k.degree() + 1) as u64).collect();
    bigring_params_make(k, &nj)
}

fn construct(t: &WitnessTask) -> R<WitnessBundle> {
    let (e, pt) = (&t.curve.curve, point_of(&t.curve));
    let ring = t.ring.clone().unwrap_or(RingSpec::Integers);
    match t.system {
        SystemId::SetA => dioph::seta_construct(t.n, e, pt, ring, t.mode, t.budget),
        SystemId::Part2 => dioph::part2_construct(t.n, t.z, t.p.unwrap_or(3), e, pt, ring, t.mode, t.budget),
        SystemId::SetABigring => dioph::bigring_seta_construct(t.n, e, pt, &default_params(&t.aux)?, t.mode, t.budget),
        SystemId::Part2Bigring => {
            dioph::bigring_part2_construct(t.n, t.z, e, pt, &default_params(&t.aux)?, t.mode, t.budget)
        }
        SystemId::Deg2 => dioph::deg2_construct(t.n, &Deg2Fixture::standard()?),
        SystemId::Deg2Bigring => Err(Error::InvalidInput("the deg2_bigring system has no constructor".into())),
    }
}

/// The verifier input: x = m^2 for the set-A systems, x = n otherwise (in G for deg2).
fn verify(t: &WitnessTask, b: &WitnessBundle) -> R<VerificationReport> {
    if b.system != t.system {
        return Err(Error::InvalidInput(format!("bundle is for {}, not {}", b.system, t.system)));
    }
    let q = t.curve.curve.field();
    Ok(match t.system {
        SystemId::SetA => dioph::seta_verify(&q.from_int(t.n * t.n), b),
        SystemId::Part2 => dioph::part2_verify(&q.from_int(t.n), b),
        SystemId::SetABigring => dioph::bigring_seta_verify(&q.from_int(t.n * t.n), b),
        SystemId::Part2Bigring => dioph::bigring_part2_verify(&q.from_int(t.n), b, &default_params(&t.aux)?),
        SystemId::Deg2 => {
            let f = Deg2Fixture::standard()?;
            let x = dioph::Deg2Tower::new(&f)?.k_to_g(&f.k.from_int(t.n))?;
            dioph::deg2_verify(&x, b, &f)
        }
        SystemId::Deg2Bigring => return Err(Error::InvalidInput("the deg2_bigring system has no verifier".into())),
    })
}

pub fn witness_construct(t: &WitnessTask) -> R<Json> {
    construct(t)?.to_json()
}

pub fn witness_verify(t: &WitnessTask, bundle: &Json) -> R<VerificationReport> {
    let b = WitnessBundle::from_json(bundle)?;
    verify(t, &b)
}

fn witness(t: &WitnessTask) -> R<Outcome> {
    match &t.action {
        WitnessAction::Construct => {
            let b = construct(t)?;
            Ok(Outcome::new(b.to_json()?))
        }
        WitnessAction::Verify(j) => {
            let rep = witness_verify(t, j)?;
            Ok(Outcome::from_report(serde_json::to_value(&rep).expect("serializable"), &rep))
        }
        WitnessAction::RoundTrip => {
            let b = construct(t)?;
            // verify what a reader of the JSON would see
            let back = WitnessBundle::from_json(&b.to_json()?)?;
            let rep = verify(t, &back)?;
            let details = json!({"meta": b.meta, "mode": t.mode.to_string(), "report": rep});
            Ok(Outcome::from_report(details, &rep))
        }
    }
}

pub fn density(k: &NumberField, x: u64, csv: Option<&std::path::Path>) -> R<Json> {
    let c = density_count(k, x)?;
    let n = k.degree() as i64;
    let expected = Rat::frac(n - 1, n);
    let tol = 3.0 / (x as f64).sqrt();
    let dev = (c.fraction.to_f64() - expected.to_f64()).abs();
    if let Some(path) = csv {
        write_csv(path, &density_rows(k, x)).map_err(|e| Error::InvalidInput(format!("csv {}: {}", path.display(), e)))?;
    }
    Ok(json!({
        "X": x,
        "inert_count": c.inert_count,
        "total_count": c.total_count,
        "fraction": c.fraction.to_string(),
        "fraction_approx": c.fraction.to_f64(),
        "expected_if_cyclic": expected.to_string(),
        "galois": looks_galois(k),
        "within_tolerance": dev <= tol,
    }))
}

fn write_csv(path: &std::path::Path, rows: &[(u64, divisors::SplitType)]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["p", "split_type"])?;
    for (p, t) in rows {
        w.write_record([p.to_string().as_str(), t.as_str()])?;
    }
    w.flush()?;
    Ok(())
}

fn rank1_model(c: &NamedCurve, p: u64, q: u64, count: u32, budget: u64) -> R<Outcome> {
    let (e, pt) = (&c.curve, point_of(c));
    let big_m = elliptic::model_modulus(e, p, q)?;
    let np = elliptic::reduce_count_points(e, p)?;
    let nq = elliptic::reduce_count_points(e, q)?;
    let ells = dioph::ell_sequence_gen(big_m, p, q, count, &dioph::in_b, budget)?;
    let mut constraints = true;
    for (i, &l) in ells.iter().enumerate() {
        constraints &= dioph::ell_constraints(big_m, p, q, i as u32 + 1, l, &dioph::in_b)?;
    }
    let rep = dioph::model_predicates(e, pt, p, q, &ells)?;
    let holds = rep.holds;
    let details = json!({"points_mod_p": np, "points_mod_q": nq, "ells": ells, "report": rep});
    Ok(Outcome::new(details)
        .check("modulus", big_m == np * nq * p * q)
        .check("prop:overK", constraints)
        .check("prop:modelB", holds))
}

pub fn pell(d: &BigInt) -> R<Json> {
    let s = units::pell_solve_q(d)?;
    let (x, y) = s.integers().ok_or_else(|| Error::Inconsistent("non-integral Pell solution".into()))?;
    Ok(json!({"x": int_json(&x), "y": int_json(&y)}))
}

fn negorder(k: &NumberField, samples: u32, height: i64, prime_bound: u64, seed: u64) -> R<Outcome> {
    let params = default_params(k)?;
    let primes: Vec<u64> = (3..=prime_bound).filter(|&q| dioph_core::intarith::is_prime_u64(q)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = Vec::new();
    for _ in 0..samples {
        let num = rng.gen_range(-height..=height);
        let den = rng.gen_range(1..=height);
        let z0 = Rat::frac(num, den);
        if !dioph::negorder_check(&params, &z0, &primes)? {
            bad.push(z0.to_string());
        }
    }
    let ok = bad.is_empty();
    Ok(Outcome::new(json!({"samples": samples, "seed": seed, "violations": bad})).check("lemma:negorder", ok))
}

pub fn run_kind(kind: &TaskKind, seed: u64) -> R<Outcome> {
    match kind {
        TaskKind::FieldInfo { field } => Ok(Outcome::new(field_info(field))),
        TaskKind::FactorPrime { field, p } => Ok(Outcome::new(factor_prime_json(field, p)?)),
        TaskKind::EcMul { curve, n, expect } => {
            let q = curve.curve.mul(*n, point_of(curve))?;
            let j = point_json(&q);
            let out = Outcome::new(j.clone());
            Ok(match expect {
                None => out,
                Some((x, y)) => out.check("expect", j == json!({"x": x, "y": y})),
            })
        }
        TaskKind::EcDenom { curve, n } => {
            let q = curve.curve.mul(*n, point_of(curve))?;
            if q.is_identity() {
                return Err(Error::IdentityPoint);
            }
            Ok(Outcome::new(json!({"n": n, "point": point_json(&q), "denominator": divisor_json(&elliptic::x_den_divisor(&q)?)})))
        }
        TaskKind::LemmaSuite { suite, curve, bound, p, q, ms, primes } => lemma_suite(suite, curve, *bound, *p, *q, ms, primes),
        TaskKind::Witness(t) => witness(t),
        TaskKind::Density { field, x, csv } => Ok(Outcome::new(density(field, *x, csv.as_deref())?)),
        TaskKind::Rank1Model { curve, p, q, count, budget } => rank1_model(curve, *p, *q, *count, *budget),
        TaskKind::Pell { d } => Ok(Outcome::new(pell(d)?)),
        TaskKind::PrimeSetMembers { set, bound } => {
            let primes: Vec<BigInt> =
                (2..=*bound).filter(|&q| dioph_core::intarith::is_prime_u64(q)).map(BigInt::from).collect();
            let (mut members, mut skipped) = (Vec::new(), Vec::new());
            for p in &primes {
                let above = match factor_prime(&set.field, p) {
                    Ok(v) => v,
                    Err(Error::RamifiedOrIndexDivisor(_)) => {
                        skipped.push(int_json(p));
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                for pr in above {
                    match set.set.contains(&set.field, &pr) {
                        Ok(true) => members.push(pr.to_string()),
                        Ok(false) => {}
                        Err(Error::RamifiedOrIndexDivisor(_)) => skipped.push(int_json(p)),
                        Err(e) => return Err(e),
                    }
                }
            }
            Ok(Outcome::new(json!({"bound": bound, "members": members, "undecided_bad_primes": skipped})))
        }
        TaskKind::DegreeIndex { degrees, q } => {
            Ok(Outcome::new(json!({"degrees": degrees, "q": q, "index": divisors::degree_index(degrees, *q)})))
        }
        TaskKind::BigringParams { field, nj } => {
            let params = match nj {
                Some(v) => bigring_params_make(field, v)?,
                None => default_params(field)?,
            };
            let shifted: Vec<Json> = (0..params.count()).map(|j| int_json(&params.shifted(&BigInt::from(0), j))).collect();
            Ok(Outcome::new(json!({
                "A1": params.a1,
                "Nj": params.nj,
                "p": params.p,
                "rank": dioph::shifted_square_rank(&params.r, params.a1, &params.nj),
                "shifted_at_0": shifted,
            }))
            .check("independence", true))
        }
        TaskKind::NegOrder { field, samples, height, prime_bound } => negorder(field, *samples, *height, *prime_bound, seed),
    }
}

/// The mode string accepted on the command line and in configs.
pub fn parse_mode(s: &str) -> Result<Mode, String> {
    Mode::parse(s).map_err(|e| e.to_string())
}
