#![allow(dead_code)]

pub mod oracle;

use dioph_core::dioph::{affected_labels, failures_within, EqTable, Value, VerificationReport, WitnessBundle};
use dioph_core::elliptic::{CurvePoint, EllipticCurve};
use dioph_core::Rat;

pub fn default_q() -> (EllipticCurve, CurvePoint) {
    let e = EllipticCurve::default_curve();
    let p = e.point_q(Rat::from(0), Rat::from(0)).unwrap();
    (e, p)
}

#[derive(Debug, Default)]
pub struct Sweep {
    pub tried: usize,
    /// Variables whose perturbation still verifies.
    pub undetected: Vec<String>,
    /// Variables whose perturbation fails a label outside its equations.
    pub leaky: Vec<(String, Vec<String>)>,
}

impl Sweep {
    pub fn clean(&self) -> bool {
        self.undetected.is_empty() && self.leaky.is_empty()
    }
}

/// Adds 1 to every top-level variable (x-coordinate for points) and to every variable of
/// every child bundle, one at a time. Child perturbations may only break the parent label
/// that records the child.
pub fn tamper_sweep(b: &WitnessBundle, table: &EqTable, verify: &dyn Fn(&WitnessBundle) -> VerificationReport) -> Sweep {
    let mut s = Sweep::default();
    for (name, v) in &b.assignment {
        if matches!(v, Value::Point(CurvePoint::Identity)) {
            continue;
        }
        s.tried += 1;
        let rep = verify(&b.with_value(name, v.bumped()));
        if rep.pass {
            s.undetected.push(name.clone());
        } else if !failures_within(&rep, &affected_labels(table, name)) {
            s.leaky.push((name.clone(), rep.failing()));
        }
    }
    for (child, cb) in &b.children {
        for (name, v) in &cb.assignment {
            if matches!(v, Value::Point(CurvePoint::Identity)) {
                continue;
            }
            s.tried += 1;
            let mut t = b.clone();
            t.children.insert(child.clone(), cb.with_value(name, v.bumped()));
            let rep = verify(&t);
            let tag = format!("{}/{}", child, name);
            if rep.pass {
                s.undetected.push(tag);
            } else if rep.failing().len() != 1 {
                s.leaky.push((tag, rep.failing()));
            }
        }
    }
    s
}
