//! Equation systems as data: witness bundles, their construction for rational
//! integers, and exact verification reports with per-equation verdicts.

pub mod bigring;
pub mod bounds;
pub mod deg2;
pub mod model;
pub mod small;

use crate::divisors::{den_divisor, factor_prime, no_deg_one_factor, PrimeSet};
use crate::elliptic::{CurvePoint, EllipticCurve};
use crate::error::{Error, Result};
use crate::numfield::{FieldElement, NumberField};
use crate::rat::Rat;
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Map, Value as Json};
use std::collections::BTreeMap;
use std::fmt;

pub use bigring::*;
pub use bounds::*;
pub use deg2::*;
pub use model::*;
pub use small::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SystemId {
    SetA,
    Part2,
    SetABigring,
    Part2Bigring,
    Deg2,
    Deg2Bigring,
}

impl SystemId {
    pub fn as_str(&self) -> &'static str {
        match self {
            SystemId::SetA => "setA",
            SystemId::Part2 => "part2",
            SystemId::SetABigring => "setA_bigring",
            SystemId::Part2Bigring => "part2_bigring",
            SystemId::Deg2 => "deg2",
            SystemId::Deg2Bigring => "deg2_bigring",
        }
    }

    pub fn parse(s: &str) -> Result<SystemId> {
        Ok(match s {
            "setA" => SystemId::SetA,
            "part2" => SystemId::Part2,
            "setA_bigring" => SystemId::SetABigring,
            "part2_bigring" => SystemId::Part2Bigring,
            "deg2" => SystemId::Deg2,
            "deg2_bigring" => SystemId::Deg2Bigring,
            _ => return Err(Error::InvalidInput(format!("unknown system {}", s))),
        })
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Exponents as printed in the equations, or one substituted exponent for construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    PaperExact,
    Relaxed(u32),
}

impl Mode {
    pub fn exponent(&self, exact: u32) -> u32 {
        match self {
            Mode::PaperExact => exact,
            Mode::Relaxed(e) => *e,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Mode::PaperExact)
    }

    pub fn parse(s: &str) -> Result<Mode> {
        if s == "paper_exact" {
            return Ok(Mode::PaperExact);
        }
        if let Some(e) = s.strip_prefix("relaxed:") {
            let e: u32 = e.parse().map_err(|_| Error::InvalidInput(format!("bad mode {}", s)))?;
            return Ok(Mode::Relaxed(e));
        }
        Err(Error::InvalidInput(format!("bad mode {}", s)))
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::PaperExact => f.write_str("paper_exact"),
            Mode::Relaxed(e) => write!(f, "relaxed:{}", e),
        }
    }
}

/// Which denominators ring variables may carry.
#[derive(Clone, Debug)]
pub enum RingSpec {
    /// The ring of integers.
    Integers,
    /// Denominators only at primes above the listed rational primes.
    Allowed(Vec<BigInt>),
    /// Denominators at primes without a degree-one factor in E, plus the listed rational primes.
    /// Primes dividing the discriminant of E are excluded unless listed.
    NoDegOne { e: NumberField, extra: Vec<BigInt> },
}

impl RingSpec {
    /// Whether the prime pr of `field` may occur in a denominator.
    pub fn allows(&self, field: &NumberField, pr: &crate::divisors::PrimeIdeal) -> bool {
        match self {
            RingSpec::Integers => false,
            RingSpec::Allowed(v) => v.contains(&pr.p),
            RingSpec::NoDegOne { e, extra } => {
                extra.contains(&pr.p) || no_deg_one_factor(pr, field, e).unwrap_or(false)
            }
        }
    }

    pub fn allows_rational_prime(&self, p: &BigInt) -> bool {
        let q = NumberField::rationals();
        match factor_prime(&q, p) {
            Ok(v) => v.iter().all(|pr| self.allows(&q, pr)),
            Err(_) => false,
        }
    }

    /// Membership of x in the ring.
    pub fn contains(&self, x: &FieldElement) -> Result<bool> {
        if x.is_integral() {
            return Ok(true);
        }
        if matches!(self, RingSpec::Integers) {
            return Ok(false);
        }
        let d = den_divisor(x)?;
        let ok = d.support().all(|pr| self.allows(x.field(), pr));
        Ok(ok)
    }

    /// The allowed primes as a PrimeSet of `field` (for the bound lemmas).
    pub fn prime_set(&self, field: &NumberField) -> Result<PrimeSet> {
        Ok(match self {
            RingSpec::Integers => PrimeSet::empty(),
            RingSpec::Allowed(v) => {
                let mut out = Vec::new();
                for p in v {
                    out.extend(factor_prime(field, p)?);
                }
                PrimeSet::List(out)
            }
            RingSpec::NoDegOne { e, extra } => {
                let mut out = Vec::new();
                for p in extra {
                    out.extend(factor_prime(field, p)?);
                }
                PrimeSet::Union(Box::new(PrimeSet::NoDegOneIn(e.clone())), Box::new(PrimeSet::List(out)))
            }
        })
    }

    fn to_json(&self) -> Json {
        match self {
            RingSpec::Integers => json!({"kind": "integers"}),
            RingSpec::Allowed(v) => json!({"kind": "allowed", "primes": strs(v)}),
            RingSpec::NoDegOne { e, extra } => {
                json!({"kind": "no_deg_one", "e": strs(e.poly_coeffs()), "extra": strs(extra)})
            }
        }
    }

    fn from_json(v: &Json) -> Result<RingSpec> {
        let kind = v.get("kind").and_then(Json::as_str).ok_or_else(|| bad("ring kind"))?;
        Ok(match kind {
            "integers" => RingSpec::Integers,
            "allowed" => RingSpec::Allowed(ints(v.get("primes"))?),
            "no_deg_one" => RingSpec::NoDegOne {
                e: NumberField::new(&ints(v.get("e"))?)?,
                extra: ints(v.get("extra"))?,
            },
            _ => return Err(bad("ring kind")),
        })
    }
}

fn strs(v: &[BigInt]) -> Vec<String> {
    v.iter().map(|c| c.to_string()).collect()
}

fn bad(what: &str) -> Error {
    Error::InvalidInput(format!("malformed bundle: {}", what))
}

fn ints(v: Option<&Json>) -> Result<Vec<BigInt>> {
    let arr = v.and_then(Json::as_array).ok_or_else(|| bad("integer list"))?;
    arr.iter()
        .map(|s| s.as_str().and_then(|s| s.parse().ok()).ok_or_else(|| bad("integer")))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Elem(FieldElement),
    Point(CurvePoint),
}

impl Value {
    pub fn field(&self) -> Option<&NumberField> {
        match self {
            Value::Elem(e) => Some(e.field()),
            Value::Point(CurvePoint::Affine(x, _)) => Some(x.field()),
            Value::Point(CurvePoint::Identity) => None,
        }
    }

    /// The value with 1 added (to the x-coordinate for points).
    pub fn bumped(&self) -> Value {
        match self {
            Value::Elem(e) => Value::Elem(e.add_rat(&Rat::from(1i64))),
            Value::Point(CurvePoint::Affine(x, y)) => Value::Point(CurvePoint::Affine(x.add_rat(&Rat::from(1i64)), y.clone())),
            Value::Point(CurvePoint::Identity) => Value::Point(CurvePoint::Identity),
        }
    }
}

/// A system id with a full variable assignment, the ring the variables must lie in,
/// and sub-bundles for membership conditions ("A[z]" and so on).
#[derive(Clone, Debug)]
pub struct WitnessBundle {
    pub system: SystemId,
    pub mode: Mode,
    pub fields: BTreeMap<String, NumberField>,
    pub curve: Option<EllipticCurve>,
    pub ring: RingSpec,
    pub assignment: BTreeMap<String, Value>,
    pub children: BTreeMap<String, WitnessBundle>,
    /// Recorded search results (multiples, exponents, unit powers); informational only.
    pub meta: BTreeMap<String, String>,
}

impl WitnessBundle {
    pub fn new(system: SystemId, mode: Mode, ring: RingSpec) -> WitnessBundle {
        WitnessBundle {
            system,
            mode,
            fields: BTreeMap::new(),
            curve: None,
            ring,
            assignment: BTreeMap::new(),
            children: BTreeMap::new(),
            meta: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, name: &str, v: FieldElement) {
        self.assignment.insert(name.to_string(), Value::Elem(v));
    }

    pub fn set_point(&mut self, name: &str, p: CurvePoint) {
        self.assignment.insert(name.to_string(), Value::Point(p));
    }

    pub fn elem(&self, name: &str) -> std::result::Result<&FieldElement, String> {
        match self.assignment.get(name) {
            Some(Value::Elem(e)) => Ok(e),
            Some(Value::Point(_)) => Err(format!("{} is a point", name)),
            None => Err(format!("{} is not assigned", name)),
        }
    }

    pub fn point(&self, name: &str) -> std::result::Result<&CurvePoint, String> {
        match self.assignment.get(name) {
            Some(Value::Point(p)) => Ok(p),
            Some(Value::Elem(_)) => Err(format!("{} is not a point", name)),
            None => Err(format!("{} is not assigned", name)),
        }
    }

    /// Copy with one variable replaced; used for perturbation experiments.
    pub fn with_value(&self, name: &str, v: Value) -> WitnessBundle {
        let mut b = self.clone();
        b.assignment.insert(name.to_string(), v);
        b
    }

    fn field_name(&self, f: &NumberField) -> Result<String> {
        self.fields
            .iter()
            .find(|(_, g)| *g == f)
            .map(|(n, _)| n.clone())
            .ok_or_else(|| Error::InvalidInput(format!("field {:?} is not registered in the bundle", f)))
    }

    /// Canonical JSON (keys sorted, rationals as strings).
    pub fn to_json(&self) -> Result<Json> {
        let mut fields = Map::new();
        for (n, f) in &self.fields {
            fields.insert(n.clone(), json!({"poly": strs(f.poly_coeffs()), "primary": f.primary_index()}));
        }
        let mut asg = Map::new();
        for (n, v) in &self.assignment {
            let enc = match v {
                Value::Elem(e) => json!({"field": self.field_name(e.field())?, "coords": coords_json(e)}),
                Value::Point(CurvePoint::Identity) => json!({"point": "O"}),
                Value::Point(CurvePoint::Affine(x, y)) => {
                    json!({"field": self.field_name(x.field())?, "x": coords_json(x), "y": coords_json(y)})
                }
            };
            asg.insert(n.clone(), enc);
        }
        let curve = match &self.curve {
            None => Json::Null,
            Some(c) => {
                let a: Vec<Json> = c.coefficients().iter().map(|v| coords_json(v)).collect();
                json!({"field": self.field_name(c.field())?, "a": a})
            }
        };
        let mut children = Map::new();
        for (n, c) in &self.children {
            children.insert(n.clone(), c.to_json()?);
        }
        Ok(json!({
            "system": self.system.as_str(),
            "mode": self.mode.to_string(),
            "fields": fields,
            "curve": curve,
            "ring": self.ring.to_json(),
            "assignment": asg,
            "children": children,
            "meta": self.meta,
        }))
    }

    pub fn from_json(v: &Json) -> Result<WitnessBundle> {
        let system = SystemId::parse(v.get("system").and_then(Json::as_str).ok_or_else(|| bad("system"))?)?;
        let mode = Mode::parse(v.get("mode").and_then(Json::as_str).ok_or_else(|| bad("mode"))?)?;
        let ring = RingSpec::from_json(v.get("ring").ok_or_else(|| bad("ring"))?)?;
        let mut b = WitnessBundle::new(system, mode, ring);
        let fields = v.get("fields").and_then(Json::as_object).ok_or_else(|| bad("fields"))?;
        for (n, f) in fields {
            let poly = ints(f.get("poly"))?;
            let primary = f.get("primary").and_then(Json::as_u64).unwrap_or(0) as usize;
            let field = NumberField::new(&poly)?;
            if primary >= field.degree() {
                return Err(bad("primary embedding"));
            }
            b.fields.insert(n.clone(), field.with_primary(primary));
        }
        let field_of = |v: &Json| -> Result<NumberField> {
            let n = v.get("field").and_then(Json::as_str).ok_or_else(|| bad("field reference"))?;
            b.fields.get(n).cloned().ok_or_else(|| bad("unknown field reference"))
        };
        if let Some(c) = v.get("curve").filter(|c| !c.is_null()) {
            let f = field_of(c)?;
            let a = c.get("a").and_then(Json::as_array).ok_or_else(|| bad("curve"))?;
            if a.len() != 5 {
                return Err(bad("curve"));
            }
            let coeffs: Vec<FieldElement> = a.iter().map(|x| elem_from_json(&f, x)).collect::<Result<_>>()?;
            let arr: [FieldElement; 5] = coeffs.try_into().map_err(|_| bad("curve"))?;
            b.curve = Some(EllipticCurve::new(&f, arr)?);
        }
        let asg = v.get("assignment").and_then(Json::as_object).ok_or_else(|| bad("assignment"))?;
        let mut out = BTreeMap::new();
        for (n, x) in asg {
            let val = if x.get("point").is_some() {
                Value::Point(CurvePoint::Identity)
            } else if x.get("x").is_some() {
                let f = field_of(x)?;
                let px = elem_from_json(&f, x.get("x").unwrap())?;
                let py = elem_from_json(&f, x.get("y").ok_or_else(|| bad("point y"))?)?;
                Value::Point(CurvePoint::Affine(px, py))
            } else {
                let f = field_of(x)?;
                Value::Elem(elem_from_json(&f, x.get("coords").ok_or_else(|| bad("coords"))?)?)
            };
            out.insert(n.clone(), val);
        }
        b.assignment = out;
        if let Some(ch) = v.get("children").and_then(Json::as_object) {
            for (n, c) in ch {
                b.children.insert(n.clone(), WitnessBundle::from_json(c)?);
            }
        }
        if let Some(m) = v.get("meta").and_then(Json::as_object) {
            for (k, x) in m {
                b.meta.insert(k.clone(), x.as_str().unwrap_or_default().to_string());
            }
        }
        Ok(b)
    }
}

fn coords_json(e: &FieldElement) -> Json {
    Json::Array(e.coords().iter().map(|c| Json::String(c.to_string())).collect())
}

fn elem_from_json(f: &NumberField, v: &Json) -> Result<FieldElement> {
    let arr = v.as_array().ok_or_else(|| bad("coordinates"))?;
    if arr.len() != f.degree() {
        return Err(bad("coordinate count"));
    }
    let mut c = Vec::with_capacity(arr.len());
    for x in arr {
        let s = x.as_str().ok_or_else(|| bad("coordinate"))?;
        c.push(s.parse::<Rat>().map_err(|_| bad("coordinate"))?);
    }
    Ok(f.element(c))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub label: String,
    pub status: Status,
    pub detail: String,
}

/// Per-equation verdicts; `pass` is true iff no check failed.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub system: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

pub type Verdict = std::result::Result<String, String>;

impl VerificationReport {
    pub fn new(system: &str) -> VerificationReport {
        VerificationReport { system: system.to_string(), checks: Vec::new(), pass: true }
    }

    /// Ok(detail) is a pass, Err(detail) a failure.
    pub fn record(&mut self, label: &str, v: Verdict) {
        let (status, detail) = match v {
            Ok(d) => (Status::Pass, d),
            Err(d) => (Status::Fail, d),
        };
        if status == Status::Fail {
            self.pass = false;
        }
        self.checks.push(Check { label: label.to_string(), status, detail });
    }

    pub fn skip(&mut self, label: &str, why: &str) {
        self.checks.push(Check { label: label.to_string(), status: Status::Skipped, detail: why.to_string() });
    }

    /// Labels with at least one failing check, deduplicated in order.
    pub fn failing(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for c in &self.checks {
            if c.status == Status::Fail && !out.contains(&c.label) {
                out.push(c.label.clone());
            }
        }
        out
    }

    pub fn status_of(&self, label: &str) -> Option<Status> {
        let mut found = None;
        for c in self.checks.iter().filter(|c| c.label == label) {
            match c.status {
                Status::Fail => return Some(Status::Fail),
                s => found = Some(found.map_or(s, |f: Status| if f == Status::Pass { f } else { s })),
            }
        }
        found
    }

    pub fn labels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for c in &self.checks {
            if !out.contains(&c.label) {
                out.push(c.label.clone());
            }
        }
        out
    }

    /// Merges a sub-report under a single label.
    pub fn record_child(&mut self, label: &str, name: &str, child: &VerificationReport) {
        if child.pass {
            self.record(label, Ok(format!("{} verifies ({} checks)", name, child.checks.len())));
        } else {
            self.record(label, Err(format!("{} fails: {}", name, child.failing().join(", "))));
        }
    }
}

/// Short rendering of a possibly huge value.
pub(crate) fn short(e: &FieldElement) -> String {
    let s = e.to_string();
    if s.len() <= 80 {
        s
    } else {
        format!("{}...{} ({} chars)", &s[..36], &s[s.len() - 36..], s.len())
    }
}

pub(crate) fn equal(lhs: &FieldElement, rhs: &FieldElement) -> Verdict {
    if lhs.field() != rhs.field() {
        return Err("operands lie in different fields".into());
    }
    if lhs == rhs {
        Ok(String::new())
    } else {
        Err(format!("residual {}", short(&(lhs - rhs))))
    }
}

/// a b = c d. Over Q the sides are cross-multiplied, so no gcd runs on large coordinates.
pub(crate) fn equal_products(a: &FieldElement, b: &FieldElement, c: &FieldElement, d: &FieldElement) -> Verdict {
    let f = a.field();
    if [b, c, d].iter().any(|v| v.field() != f) {
        return Err("operands lie in different fields".into());
    }
    if f.degree() > 1 {
        return equal(&(a * b), &(c * d));
    }
    let [a, b, c, d] = [a, b, c, d].map(|v| &v.coords()[0]);
    let lhs = &(a.numer() * b.numer()) * &(c.denom() * d.denom());
    let rhs = &(c.numer() * d.numer()) * &(a.denom() * b.denom());
    if lhs == rhs {
        Ok(String::new())
    } else {
        Err("the two products differ".into())
    }
}

pub(crate) fn ring_checks(rep: &mut VerificationReport, b: &WitnessBundle, names: &[String]) {
    for n in names {
        if let Ok(x) = b.elem(n) {
            let v = match b.ring.contains(x) {
                Ok(true) => Ok(String::new()),
                Ok(false) => Err(format!("{} has a denominator outside the allowed primes", n)),
                Err(e) => Err(e.to_string()),
            };
            rep.record(&format!("ring:{}", n), v);
        }
    }
}

pub(crate) fn nonzero(x: &FieldElement, name: &str) -> std::result::Result<(), String> {
    if x.is_zero() {
        Err(format!("{} = 0", name))
    } else {
        Ok(())
    }
}
