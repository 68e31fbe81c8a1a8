//! Config loading and reference resolution.
//!
//! A config is a JSON object:
//!
//! ```json
//! {
//!   "seed": 7,
//!   "fields": {"K": {"min_poly": [-2, 0, 1]}},
//!   "curves": {"E": {"field": "Q", "a": [0, 0, 1, -1, 0], "P": [0, 0]}},
//!   "prime_sets": {"W": {"field": "Q", "rule": {"list": [[2, [0, 1]]]}}},
//!   "tasks": [{"kind": "ec_mul", "curve": "E", "n": 5}]
//! }
//! ```
//!
//! Coordinates are a rational (number or string such as "-5/8") or an array of
//! rationals in the power basis. Every reference is resolved before any task runs.

use dioph_core::dioph::{Mode, RingSpec, SystemId};
use dioph_core::divisors::{conj_closure, factor_prime, hat_set, PrimeSet};
use dioph_core::elliptic::{CurvePoint, EllipticCurve};
use dioph_core::numfield::{FieldElement, NumberField};
use dioph_core::Rat;
use num_bigint::BigInt;
use serde::Deserialize;
use serde_json::{Map, Value as Json};
use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

/// A config or flag problem; maps to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub type CResult<T> = std::result::Result<T, ConfigError>;

fn cerr<T>(msg: impl Into<String>) -> CResult<T> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub fields: BTreeMap<String, FieldSpec>,
    #[serde(default)]
    pub curves: BTreeMap<String, CurveSpec>,
    #[serde(default)]
    pub prime_sets: BTreeMap<String, PrimeSetSpec>,
    #[serde(default)]
    pub tasks: Vec<Map<String, Json>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub min_poly: Vec<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    #[serde(default = "rationals_name")]
    pub field: String,
    pub a: Vec<Json>,
    #[serde(rename = "P", default)]
    pub p: Option<Vec<Json>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimeSetSpec {
    #[serde(default = "rationals_name")]
    pub field: String,
    pub rule: Json,
}

fn rationals_name() -> String {
    "Q".into()
}

/// Embedded fixtures, overridable by config entries of the same name.
pub const FIXTURE_FIELDS: [(&str, &[i64]); 3] =
    [("Q", &[0, 1]), ("sqrt2", &[-2, 0, 1]), ("cyclic_cubic", &[-1, -3, 0, 1])];

/// Degrees of the first layers of the cyclotomic Z_5 tower.
pub const Z5_TOWER_DEGREES: [u64; 4] = [1, 5, 25, 125];

#[derive(Clone, Debug)]
pub struct NamedCurve {
    pub curve: EllipticCurve,
    pub point: Option<CurvePoint>,
}

#[derive(Clone, Debug)]
pub struct NamedPrimeSet {
    pub field: NumberField,
    pub set: PrimeSet,
    /// The ring whose denominators are this set, when the rule has that shape.
    pub ring: Option<RingSpec>,
}

#[derive(Clone, Debug, Default)]
pub struct Env {
    pub fields: BTreeMap<String, NumberField>,
    pub curves: BTreeMap<String, NamedCurve>,
    pub prime_sets: BTreeMap<String, NamedPrimeSet>,
}

impl Env {
    pub fn with_fixtures() -> Env {
        let mut env = Env::default();
        for (name, c) in FIXTURE_FIELDS {
            env.fields.insert(name.into(), NumberField::from_ints(c).expect("fixture field"));
        }
        let e = EllipticCurve::default_curve();
        let p = e.point_q(Rat::from(0), Rat::from(0)).expect("fixture point");
        env.curves.insert("default".into(), NamedCurve { curve: e, point: Some(p) });
        env
    }

    pub fn field(&self, name: &str) -> CResult<&NumberField> {
        self.fields.get(name).ok_or_else(|| ConfigError(format!("unknown field {:?}", name)))
    }

    pub fn curve(&self, name: &str) -> CResult<&NamedCurve> {
        self.curves.get(name).ok_or_else(|| ConfigError(format!("unknown curve {:?}", name)))
    }

    pub fn prime_set(&self, name: &str) -> CResult<&NamedPrimeSet> {
        self.prime_sets.get(name).ok_or_else(|| ConfigError(format!("unknown prime set {:?}", name)))
    }
}

pub fn parse_rat(v: &Json) -> CResult<Rat> {
    match v {
        Json::Number(n) => match n.as_i64() {
            Some(i) => Ok(Rat::from(i)),
            None => cerr(format!("expected an integer or a rational string, got {}", n)),
        },
        Json::String(s) => s.trim().parse().map_err(|_| ConfigError(format!("bad rational {:?}", s))),
        _ => cerr(format!("expected a rational, got {}", v)),
    }
}

pub fn parse_coords(k: &NumberField, v: &Json) -> CResult<FieldElement> {
    match v {
        Json::Array(items) => {
            if items.len() > k.degree() {
                return cerr(format!("{} coordinates for a field of degree {}", items.len(), k.degree()));
            }
            let mut c = items.iter().map(parse_rat).collect::<CResult<Vec<_>>>()?;
            c.resize(k.degree(), Rat::from(0));
            Ok(k.element(c))
        }
        _ => Ok(k.from_rat(parse_rat(v)?)),
    }
}

pub fn parse_bigint(v: &Json) -> CResult<BigInt> {
    match v {
        Json::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| ConfigError(format!("bad integer {}", n))),
        Json::String(s) => s.trim().parse().map_err(|_| ConfigError(format!("bad integer {:?}", s))),
        _ => cerr(format!("expected an integer, got {}", v)),
    }
}

fn field_from(coeffs: &[i64]) -> CResult<NumberField> {
    NumberField::from_ints(coeffs).map_err(|e| ConfigError(format!("field {:?}: {}", coeffs, e)))
}

fn resolve_curve(env: &Env, name: &str, spec: &CurveSpec) -> CResult<NamedCurve> {
    let k = env.field(&spec.field)?;
    if spec.a.len() != 5 {
        return cerr(format!("curve {}: need five coefficients a1..a6", name));
    }
    let a: Vec<FieldElement> = spec.a.iter().map(|v| parse_coords(k, v)).collect::<CResult<_>>()?;
    let a: [FieldElement; 5] = a.try_into().expect("length checked");
    let curve = EllipticCurve::new(k, a).map_err(|e| ConfigError(format!("curve {}: {}", name, e)))?;
    let point = match &spec.p {
        None => None,
        Some(xy) if xy.len() == 2 => {
            let (x, y) = (parse_coords(k, &xy[0])?, parse_coords(k, &xy[1])?);
            Some(curve.point(x, y).map_err(|e| ConfigError(format!("curve {} point: {}", name, e)))?)
        }
        Some(_) => return cerr(format!("curve {}: P must be [x, y]", name)),
    };
    Ok(NamedCurve { curve, point })
}

/// Rules: {"list": [[p, genpoly], ...]} | {"no_deg_one_in": field} | {"union": [r, r]} |
/// {"minus": [r, r]} | {"closure": r} | {"hat": r} | "name of another prime set".
fn resolve_rule(env: &Env, raw: &BTreeMap<String, PrimeSetSpec>, k: &NumberField, rule: &Json, depth: u32) -> CResult<PrimeSet> {
    if depth > 32 {
        return cerr("prime set rules nest too deeply (cyclic reference?)");
    }
    if let Json::String(name) = rule {
        let spec = raw.get(name).ok_or_else(|| ConfigError(format!("unknown prime set {:?}", name)))?;
        if env.field(&spec.field)? != k {
            return cerr(format!("prime set {:?} lives over a different field", name));
        }
        return resolve_rule(env, raw, k, &spec.rule, depth + 1);
    }
    let obj = rule.as_object().filter(|o| o.len() == 1).ok_or_else(|| ConfigError(format!("bad prime set rule {}", rule)))?;
    let (key, val) = obj.iter().next().expect("one entry");
    let pair = |v: &Json| -> CResult<(PrimeSet, PrimeSet)> {
        match v.as_array().map(|a| a.as_slice()) {
            Some([a, b]) => Ok((resolve_rule(env, raw, k, a, depth + 1)?, resolve_rule(env, raw, k, b, depth + 1)?)),
            _ => cerr(format!("{} takes two rules", key)),
        }
    };
    Ok(match key.as_str() {
        "list" => {
            let entries = val.as_array().ok_or_else(|| ConfigError("list takes an array".into()))?;
            let mut out = Vec::new();
            for ent in entries {
                let (p, g) = match ent.as_array().map(|a| a.as_slice()) {
                    Some([p, g]) => (parse_bigint(p)?, g),
                    Some([p]) => (parse_bigint(p)?, &Json::Null),
                    _ => (parse_bigint(ent)?, &Json::Null),
                };
                let primes = factor_prime(k, &p).map_err(|e| ConfigError(format!("prime {}: {}", p, e)))?;
                if g.is_null() {
                    out.extend(primes);
                    continue;
                }
                let want: Vec<BigInt> = g
                    .as_array()
                    .ok_or_else(|| ConfigError("generator must be a coefficient array".into()))?
                    .iter()
                    .map(parse_bigint)
                    .collect::<CResult<_>>()?;
                match primes.into_iter().find(|pr| pr.gen_poly == want) {
                    Some(pr) => out.push(pr),
                    None => return cerr(format!("no prime above {} with generator {:?}", p, g)),
                }
            }
            PrimeSet::List(out)
        }
        "no_deg_one_in" => {
            let name = val.as_str().ok_or_else(|| ConfigError("no_deg_one_in takes a field name".into()))?;
            PrimeSet::NoDegOneIn(env.field(name)?.clone())
        }
        "union" => {
            let (a, b) = pair(val)?;
            PrimeSet::Union(Box::new(a), Box::new(b))
        }
        "minus" => {
            let (a, b) = pair(val)?;
            PrimeSet::Minus(Box::new(a), Box::new(b))
        }
        "closure" => conj_closure(resolve_rule(env, raw, k, val, depth + 1)?),
        "hat" => hat_set(resolve_rule(env, raw, k, val, depth + 1)?),
        other => return cerr(format!("unknown prime set rule {:?}", other)),
    })
}

/// Denominator rings are rational-prime lists, optionally joined with a no-degree-one rule.
pub fn ring_of(set: &PrimeSet, k: &NumberField) -> Option<RingSpec> {
    if k.degree() != 1 {
        return None;
    }
    let below = |v: &[dioph_core::divisors::PrimeIdeal]| -> Vec<BigInt> {
        v.iter().map(|p| p.p.clone()).collect::<BTreeSet<_>>().into_iter().collect()
    };
    match set {
        PrimeSet::List(v) if v.is_empty() => Some(RingSpec::Integers),
        PrimeSet::List(v) => Some(RingSpec::Allowed(below(v))),
        PrimeSet::NoDegOneIn(e) => Some(RingSpec::NoDegOne { e: e.clone(), extra: Vec::new() }),
        PrimeSet::Union(a, b) => match (a.as_ref(), b.as_ref()) {
            (PrimeSet::NoDegOneIn(e), PrimeSet::List(v)) | (PrimeSet::List(v), PrimeSet::NoDegOneIn(e)) => {
                Some(RingSpec::NoDegOne { e: e.clone(), extra: below(v) })
            }
            _ => None,
        },
        _ => None,
    }
}

/// A task after resolution: every reference is an object.
#[derive(Clone, Debug)]
pub struct Task {
    pub name: String,
    pub seed: u64,
    pub kind: TaskKind,
}

#[derive(Clone, Debug)]
pub enum WitnessAction {
    /// Construct then verify.
    RoundTrip,
    Construct,
    Verify(Json),
}

#[derive(Clone, Debug)]
pub struct WitnessTask {
    pub system: SystemId,
    pub action: WitnessAction,
    /// The integer input: m for the set-A systems (x = m^2), x otherwise.
    pub n: u64,
    pub mode: Mode,
    pub budget: u64,
    pub ring: Option<RingSpec>,
    pub p: Option<u64>,
    pub z: Option<u64>,
    pub curve: NamedCurve,
    /// Cyclic field for the big-ring systems.
    pub aux: NumberField,
}

#[derive(Clone, Debug)]
pub enum TaskKind {
    FieldInfo { field: NumberField },
    FactorPrime { field: NumberField, p: BigInt },
    EcMul { curve: NamedCurve, n: i64, expect: Option<(String, String)> },
    EcDenom { curve: NamedCurve, n: i64 },
    LemmaSuite { suite: String, curve: NamedCurve, bound: i64, p: u64, q: u64, ms: Vec<u64>, primes: Vec<u64> },
    Witness(Box<WitnessTask>),
    Density { field: NumberField, x: u64, csv: Option<PathBuf> },
    Rank1Model { curve: NamedCurve, p: u64, q: u64, count: u32, budget: u64 },
    Pell { d: BigInt },
    PrimeSetMembers { set: NamedPrimeSet, bound: u64 },
    DegreeIndex { degrees: Vec<u64>, q: u64 },
    BigringParams { field: NumberField, nj: Option<Vec<u64>> },
    NegOrder { field: NumberField, samples: u32, height: i64, prime_bound: u64 },
}

/// Command-line overrides applied to every task.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub budget: Option<u64>,
    pub mode: Option<Mode>,
}

pub struct Params<'a> {
    obj: &'a Map<String, Json>,
    used: BTreeSet<&'static str>,
    ctx: String,
}

impl<'a> Params<'a> {
    pub fn new(obj: &'a Map<String, Json>, ctx: String) -> Params<'a> {
        Params { obj, used: BTreeSet::new(), ctx }
    }

    fn get(&mut self, key: &'static str) -> Option<&'a Json> {
        self.used.insert(key);
        self.obj.get(key).filter(|v| !v.is_null())
    }

    fn err<T>(&self, msg: impl std::fmt::Display) -> CResult<T> {
        cerr(format!("{}: {}", self.ctx, msg))
    }

    pub fn str(&mut self, key: &'static str) -> CResult<Option<&'a str>> {
        match self.get(key) {
            None => Ok(None),
            Some(Json::String(s)) => Ok(Some(s)),
            Some(v) => self.err(format!("{} must be a string, got {}", key, v)),
        }
    }

    pub fn u64(&mut self, key: &'static str) -> CResult<Option<u64>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => match v.as_u64() {
                Some(n) => Ok(Some(n)),
                None => self.err(format!("{} must be a nonnegative integer, got {}", key, v)),
            },
        }
    }

    pub fn i64(&mut self, key: &'static str) -> CResult<Option<i64>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => match v.as_i64() {
                Some(n) => Ok(Some(n)),
                None => self.err(format!("{} must be an integer, got {}", key, v)),
            },
        }
    }

    pub fn u64_list(&mut self, key: &'static str) -> CResult<Option<Vec<u64>>> {
        match self.get(key) {
            None => Ok(None),
            Some(Json::Array(a)) => match a.iter().map(Json::as_u64).collect::<Option<Vec<_>>>() {
                Some(v) => Ok(Some(v)),
                None => self.err(format!("{} must be a list of nonnegative integers", key)),
            },
            Some(v) => self.err(format!("{} must be a list, got {}", key, v)),
        }
    }

    pub fn positive(&mut self, key: &'static str, default: u64) -> CResult<u64> {
        let v = self.u64(key)?.unwrap_or(default);
        if v == 0 {
            return self.err(format!("{} must be positive", key));
        }
        Ok(v)
    }

    pub fn raw(&mut self, key: &'static str) -> Option<&'a Json> {
        self.get(key)
    }

    pub fn finish(self) -> CResult<()> {
        for k in self.obj.keys() {
            if !self.used.contains(k.as_str()) {
                return cerr(format!("{}: unknown parameter {:?}", self.ctx, k));
            }
        }
        Ok(())
    }
}

pub const TASK_KINDS: [&str; 13] = [
    "field_info",
    "factor_prime",
    "ec_mul",
    "ec_denom",
    "lemma_suite",
    "witness",
    "density",
    "rank1_model",
    "pell",
    "prime_set",
    "degree_index",
    "bigring_params",
    "negorder",
];

pub const LEMMA_SUITES: [&str; 3] = ["elliptic", "torsion", "xdifference"];

fn curve_with_point(env: &Env, name: &str, ctx: &str) -> CResult<NamedCurve> {
    let c = env.curve(name)?.clone();
    if c.point.is_none() {
        return cerr(format!("{}: curve {:?} has no point P", ctx, name));
    }
    Ok(c)
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Resolves one task record. `index` names unnamed tasks.
pub fn resolve_task(env: &Env, obj: &Map<String, Json>, index: usize, seed: u64, ov: &Overrides) -> CResult<Task> {
    let kind = obj.get("kind").and_then(Json::as_str).ok_or_else(|| ConfigError(format!("task {}: missing kind", index)))?;
    if !TASK_KINDS.contains(&kind) {
        return cerr(format!("task {}: unknown kind {:?}", index, kind));
    }
    let name = match obj.get("name") {
        None => format!("{:03}_{}", index, kind),
        Some(Json::String(s)) if !s.is_empty() => s.clone(),
        Some(_) => return cerr(format!("task {}: name must be a nonempty string", index)),
    };
    let mut pr = Params::new(obj, format!("task {:?}", name));
    pr.get("kind");
    pr.get("name");
    let field = |pr: &mut Params, default: &str| -> CResult<NumberField> {
        let n = pr.str("field")?.unwrap_or(default);
        Ok(env.field(n)?.clone())
    };
    let curve = |pr: &mut Params| -> CResult<NamedCurve> {
        let n = pr.str("curve")?.unwrap_or("default");
        curve_with_point(env, n, &pr.ctx)
    };
    let odd_prime = |pr: &mut Params, key: &'static str, default: u64| -> CResult<u64> {
        let v = pr.u64(key)?.unwrap_or(default);
        if !is_prime(v) || v == 2 {
            return pr.err(format!("{} must be an odd prime, got {}", key, v));
        }
        Ok(v)
    };
    let kind = match kind {
        "field_info" => TaskKind::FieldInfo { field: field(&mut pr, "Q")? },
        "factor_prime" => {
            let f = field(&mut pr, "Q")?;
            let p = match pr.raw("p") {
                Some(v) => parse_bigint(v)?,
                None => return pr.err("missing p"),
            };
            TaskKind::FactorPrime { field: f, p }
        }
        "ec_mul" | "ec_denom" => {
            let c = curve(&mut pr)?;
            let n = pr.i64("n")?.ok_or_else(|| ConfigError(format!("{}: missing n", pr.ctx)))?;
            if kind == "ec_denom" {
                TaskKind::EcDenom { curve: c, n }
            } else {
                let expect = match pr.raw("expect") {
                    None => None,
                    Some(v) => match (v.get("x").and_then(Json::as_str), v.get("y").and_then(Json::as_str)) {
                        (Some(x), Some(y)) => Some((x.to_string(), y.to_string())),
                        _ => return pr.err("expect must be {\"x\": ..., \"y\": ...} with string values"),
                    },
                };
                TaskKind::EcMul { curve: c, n, expect }
            }
        }
        "lemma_suite" => {
            let suite = pr.str("suite")?.unwrap_or("elliptic").to_string();
            if !LEMMA_SUITES.contains(&suite.as_str()) {
                return pr.err(format!("unknown suite {:?} (known: {:?})", suite, LEMMA_SUITES));
            }
            let c = curve(&mut pr)?;
            let bound = pr.positive("bound", 30)? as i64;
            let p = odd_prime(&mut pr, "p", 5)?;
            let q = odd_prime(&mut pr, "q", 7)?;
            let ms = pr.u64_list("m")?.unwrap_or_else(|| vec![1, 2, 5]);
            let primes = pr.u64_list("primes")?.unwrap_or_else(|| vec![3, 5]);
            TaskKind::LemmaSuite { suite, curve: c, bound, p, q, ms, primes }
        }
        "witness" => {
            let sys = pr.str("system")?.ok_or_else(|| ConfigError(format!("{}: missing system", pr.ctx)))?;
            let system = SystemId::parse(sys).map_err(|e| ConfigError(format!("{}: {}", pr.ctx, e)))?;
            let action = match pr.str("action")?.unwrap_or("roundtrip") {
                "roundtrip" => WitnessAction::RoundTrip,
                "construct" => WitnessAction::Construct,
                "verify" => match pr.raw("bundle") {
                    Some(Json::String(path)) => {
                        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("bundle {}: {}", path, e)))?;
                        WitnessAction::Verify(serde_json::from_str(&text).map_err(|e| ConfigError(format!("bundle {}: {}", path, e)))?)
                    }
                    Some(v @ Json::Object(_)) => WitnessAction::Verify(v.clone()),
                    _ => return pr.err("verify needs a bundle (path or inline object)"),
                },
                other => return pr.err(format!("unknown action {:?}", other)),
            };
            let n = match (pr.u64("m")?, pr.u64("x")?) {
                (Some(m), None) => m,
                (None, Some(x)) => x,
                (None, None) => 1,
                (Some(_), Some(_)) => return pr.err("give m or x, not both"),
            };
            if n == 0 {
                return pr.err("input must be positive");
            }
            let mode = match (ov.mode, pr.str("mode")?) {
                (Some(m), _) => m,
                (None, Some(s)) => Mode::parse(s).map_err(|e| ConfigError(format!("{}: {}", pr.ctx, e)))?,
                (None, None) => Mode::Relaxed(1),
            };
            let budget = match ov.budget {
                Some(b) => b,
                None => pr.positive("budget", 100_000)?,
            };
            let ring = match pr.str("ring")? {
                None => None,
                Some(n) => {
                    let s = env.prime_set(n)?;
                    Some(s.ring.clone().ok_or_else(|| ConfigError(format!("prime set {:?} is not a denominator ring over Q", n)))?)
                }
            };
            let p = match pr.u64("p")? {
                None => None,
                Some(_) => Some(odd_prime(&mut pr, "p", 3)?),
            };
            let z = pr.u64("z")?;
            let c = curve(&mut pr)?;
            let aux = field(&mut pr, "cyclic_cubic")?;
            TaskKind::Witness(Box::new(WitnessTask { system, action, n, mode, budget, ring, p, z, curve: c, aux }))
        }
        "density" => {
            let f = field(&mut pr, "cyclic_cubic")?;
            let x = pr.positive("X", 10_000)?;
            let csv = pr.str("csv")?.map(PathBuf::from);
            TaskKind::Density { field: f, x, csv }
        }
        "rank1_model" => {
            let c = curve(&mut pr)?;
            let p = odd_prime(&mut pr, "p", 5)?;
            let q = odd_prime(&mut pr, "q", 7)?;
            if p == q {
                return pr.err("p and q must differ");
            }
            let count = pr.positive("count", 3)? as u32;
            let budget = match ov.budget {
                Some(b) => b,
                None => pr.positive("budget", 100_000)?,
            };
            TaskKind::Rank1Model { curve: c, p, q, count, budget }
        }
        "pell" => {
            let d = match pr.raw("d") {
                Some(v) => parse_bigint(v)?,
                None => return pr.err("missing d"),
            };
            TaskKind::Pell { d }
        }
        "prime_set" => {
            let n = pr.str("set")?.ok_or_else(|| ConfigError(format!("{}: missing set", pr.ctx)))?;
            let set = env.prime_set(n)?.clone();
            let bound = pr.positive("bound", 50)?;
            TaskKind::PrimeSetMembers { set, bound }
        }
        "degree_index" => {
            let degrees = pr.u64_list("degrees")?.unwrap_or_else(|| Z5_TOWER_DEGREES.to_vec());
            let q = pr.u64("q")?.unwrap_or(5);
            if !is_prime(q) {
                return pr.err("q must be prime");
            }
            if degrees.iter().any(|&d| d == 0) {
                return pr.err("degrees must be positive");
            }
            TaskKind::DegreeIndex { degrees, q }
        }
        "bigring_params" => {
            let f = field(&mut pr, "cyclic_cubic")?;
            let nj = pr.u64_list("nj")?;
            TaskKind::BigringParams { field: f, nj }
        }
        "negorder" => {
            let f = field(&mut pr, "cyclic_cubic")?;
            let samples = pr.positive("samples", 50)? as u32;
            let height = pr.positive("height", 1000)? as i64;
            let prime_bound = pr.positive("prime_bound", 100)?;
            TaskKind::NegOrder { field: f, samples, height, prime_bound }
        }
        _ => unreachable!("kind list checked above"),
    };
    pr.finish()?;
    Ok(Task { name, seed: ov.seed.unwrap_or(seed).wrapping_add(index as u64), kind })
}

/// Parses a config document and resolves it against the embedded fixtures.
pub fn load(text: &str, ov: &Overrides) -> CResult<(u64, Vec<Task>)> {
    let cfg: ConfigFile = serde_json::from_str(text).map_err(|e| ConfigError(format!("config: {}", e)))?;
    let mut env = Env::with_fixtures();
    for (name, spec) in &cfg.fields {
        env.fields.insert(name.clone(), field_from(&spec.min_poly)?);
    }
    for (name, spec) in &cfg.curves {
        let c = resolve_curve(&env, name, spec)?;
        env.curves.insert(name.clone(), c);
    }
    for (name, spec) in &cfg.prime_sets {
        let k = env.field(&spec.field)?.clone();
        let set = resolve_rule(&env, &cfg.prime_sets, &k, &spec.rule, 0)?;
        let ring = ring_of(&set, &k);
        env.prime_sets.insert(name.clone(), NamedPrimeSet { field: k, set, ring });
    }
    let seed = ov.seed.unwrap_or(cfg.seed);
    let mut tasks = Vec::new();
    let mut names = BTreeSet::new();
    for (i, t) in cfg.tasks.iter().enumerate() {
        let task = resolve_task(&env, t, i, seed, ov)?;
        if !names.insert(task.name.clone()) {
            return cerr(format!("duplicate task name {:?}", task.name));
        }
        tasks.push(task);
    }
    Ok((seed, tasks))
}
