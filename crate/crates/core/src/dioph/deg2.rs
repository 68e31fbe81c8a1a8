//! The degree-two system: x in the ring of integers of G = K(α_G) lies in K.

use super::small::EqTable;
use super::{equal, ring_checks, Mode, RingSpec, SystemId, VerificationReport, Verdict, WitnessBundle};
use crate::error::{Error, Result};
use crate::numfield::{abs_compare, sign_at, FieldElement, NumberField, Sign};
use crate::rat::Rat;
use crate::units::{
    closeto1_find_r, is_root_of_unity, is_square_in_field, norm_one_unit_search, unit_congruence_power,
    QuadUnit, QuadraticExtension, ORDER_BUDGET,
};
use num_traits::Zero;
use std::cmp::Ordering;

#[derive(Clone, Debug)]
pub struct Deg2Fixture {
    pub k: NumberField,
    pub a_g: FieldElement,
    pub d_h: FieldElement,
    /// Height of the box searched for the unit ν.
    pub unit_height: i64,
}

impl Deg2Fixture {
    /// K = Q(√2), a_G = √2, d_H = -√2.
    pub fn standard() -> Result<Deg2Fixture> {
        let k = NumberField::from_ints(&[-2, 0, 1])?;
        let s = k.gen();
        Ok(Deg2Fixture { a_g: s.clone(), d_h: s.neg(), k, unit_height: 3 })
    }
}

/// G = K(α_G), H = K(δ), L = G(δ).
#[derive(Clone, Debug)]
pub struct Deg2Tower {
    pub g: QuadraticExtension,
    pub h: QuadraticExtension,
    pub l: QuadraticExtension,
}

impl Deg2Tower {
    pub fn new(f: &Deg2Fixture) -> Result<Deg2Tower> {
        let g = QuadraticExtension::new(&f.k, &f.a_g)?;
        let h = QuadraticExtension::new(&f.k, &f.d_h)?;
        let l = QuadraticExtension::new(g.field(), &g.lift(&f.d_h)?)?;
        Ok(Deg2Tower { g, h, l })
    }

    pub fn k_to_g(&self, c: &FieldElement) -> Result<FieldElement> {
        self.g.lift(c)
    }

    pub fn g_to_l(&self, c: &FieldElement) -> Result<FieldElement> {
        self.l.lift(c)
    }

    pub fn h_to_l(&self, v: &FieldElement) -> Result<FieldElement> {
        let (c, d) = self.h.decompose(v)?;
        self.l.compose(&self.g.lift(&c)?, &self.g.lift(&d)?)
    }

    pub fn alpha(&self) -> Result<FieldElement> {
        self.l.lift(self.g.delta())
    }

    pub fn delta(&self) -> &FieldElement {
        self.l.delta()
    }
}

/// d_H not a square, |σ(d_H)| > 1 everywhere, σ(d_H) > 0 iff σ(a_G) < 0, G not totally real.
pub fn deg2_fixture_check(f: &Deg2Fixture) -> Result<()> {
    let bad = |s: &str| Err(Error::HypothesisViolated(s.to_string()));
    if f.a_g.field() != &f.k || f.d_h.field() != &f.k {
        return Err(Error::FieldMismatch);
    }
    if is_square_in_field(&f.d_h)? {
        return bad("d_H is a square");
    }
    let one = f.k.one();
    for e in f.k.embeddings() {
        if abs_compare(&f.d_h, &one, &e)? != Ordering::Greater {
            return bad("a conjugate of d_H has absolute value at most 1");
        }
        if e.is_real {
            let sd = sign_at(&f.d_h, &e)?;
            let sa = sign_at(&f.a_g, &e)?;
            if (sd == Sign::Positive) != (sa == Sign::Negative) {
                return bad("sign linkage between d_H and a_G fails");
            }
        }
    }
    let g = QuadraticExtension::new(&f.k, &f.a_g)?;
    if g.field().real_embeddings().len() == g.field().degree() {
        return bad("G is totally real");
    }
    Ok(())
}

pub const DEG2_G_VARS: [&str; 21] = [
    "x", "a_1", "b_1", "a_2", "b_2", "c_1", "d_1", "c_2", "d_2", "c_3", "d_3", "c_4", "d_4", "u", "v", "u_1", "v_1",
    "u_2", "v_2", "u_3", "v_3",
];

fn all_vars() -> Vec<String> {
    let mut v: Vec<String> = DEG2_G_VARS.iter().map(|s| s.to_string()).collect();
    v.push("u_4".into());
    v.push("v_4".into());
    for i in 1..=4 {
        v.push(format!("gamma_{}", i));
    }
    v
}

pub fn deg2_table() -> EqTable {
    let mut t: EqTable = Vec::new();
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    t.push(("input:x".into(), s(&["x"])));
    let mut two = Vec::new();
    let mut three = Vec::new();
    let mut fourtwo = Vec::new();
    for i in 1..=4 {
        two.extend([format!("u_{}", i), format!("v_{}", i)]);
        three.extend([format!("gamma_{}", i), format!("u_{}", i), format!("v_{}", i)]);
        fourtwo.extend([format!("gamma_{}", i), format!("c_{}", i), format!("d_{}", i)]);
    }
    t.push(("eqdeg2:2i".into(), two));
    t.push(("eqdeg2:3i".into(), three));
    t.push(("eqdeg2:4i".into(), s(&["gamma_1", "gamma_2", "gamma_3", "gamma_4", "a_1", "b_1", "a_2", "b_2"])));
    t.push(("eqdeg2:4.2i".into(), fourtwo));
    t.push(("eqdeg2:7i".into(), s(&["x", "a_1", "b_1"])));
    t.push(("eqdeg2:9i".into(), s(&["x", "a_2", "b_2", "c_3", "d_3", "u", "v"])));
    t.push(("eqdeg2:10i".into(), s(&["x", "a_1", "b_1", "c_3", "d_3"])));
    t.push(("lemma:bound1".into(), s(&["x", "gamma_3"])));
    t.push(("lemma:bound2".into(), s(&["x", "a_1", "b_1"])));
    t.push(("lemma:chain".into(), s(&["x", "a_1", "b_1", "gamma_3"])));
    t
}

/// u - δ v of a unit of H, as K-coordinates (u, v).
fn uv(n: &QuadUnit) -> (FieldElement, FieldElement) {
    (n.x.clone(), n.y.clone())
}

/// (a, b) with a - δ b = v for v in H.
fn minus_parts(h: &QuadraticExtension, v: &FieldElement) -> Result<(FieldElement, FieldElement)> {
    let (c, d) = h.decompose(v)?;
    Ok((c, d.neg()))
}

/// Witnesses for a positive integer x, following the construction in the proof.
pub fn deg2_construct(x: u64, f: &Deg2Fixture) -> Result<WitnessBundle> {
    if x == 0 {
        return Err(Error::InvalidInput("x must be positive".into()));
    }
    deg2_fixture_check(f)?;
    let tw = Deg2Tower::new(f)?;
    let k = &f.k;
    let nu = norm_one_unit_search(k, &f.d_h, f.unit_height)?
        .ok_or_else(|| Error::BudgetExhausted("no norm-one unit in the search box".into()))?;
    if is_root_of_unity(&nu.value()).is_some() {
        return Err(Error::HypothesisViolated("the unit found is a root of unity".into()));
    }
    let xi = x as i64;
    let nu4 = nu.pow(4)?;
    let rp = closeto1_find_r(&nu4, x, &Rat::frac(1, 2), 4096)?
        .ok_or_else(|| Error::BudgetExhausted("no r brings the ratio within 1/2".into()))?;
    let r = 4 * rp as i64;
    let one_h = tw.h.field().one();
    let nu1 = nu.pow(rp as i64)?;
    let nu2 = nu.pow(rp as i64 * xi)?;
    let g1 = nu.value().pow(r)?;
    let g2 = nu.value().pow(r * xi)?;
    let ab1 = (&g2 - &one_h).try_div(&(&g1 - &one_h))?;
    let (a1, b1) = minus_parts(&tw.h, &ab1)?;
    let n1 = &(&a1 * &a1) - &(&(&f.d_h * &b1) * &b1);
    let zf = (&n1 * &n1).add_rat(&Rat::from(1));
    let m = &f.a_g.scale(&Rat::from(6 * xi)) * &zf;
    let (t, nu3) = unit_congruence_power(&nu, &m, ORDER_BUDGET)?;
    let nu4u = nu3.pow(xi)?;
    let g3 = nu3.value().pow(4)?;
    let g4 = g3.pow(xi)?;
    let ab2 = (&g4 - &one_h).try_div(&(&g3 - &one_h))?;
    let (a2, b2) = minus_parts(&tw.h, &ab2)?;
    let xh = tw.h.lift(&k.from_int(x))?;
    // u + δ v = (x - (a_2 - δ b_2)) / (γ_3 - 1)
    let uvq = (&xh - &ab2).try_div(&(&g3 - &one_h))?;
    let (u, v) = tw.h.decompose(&uvq)?;
    if !u.is_integral() || !v.is_integral() {
        return Err(Error::Inconsistent("u + δ v is not integral".into()));
    }

    let mut b = WitnessBundle::new(SystemId::Deg2, Mode::PaperExact, RingSpec::Integers);
    b.fields.insert("K".into(), k.clone());
    b.fields.insert("G".into(), tw.g.field().clone());
    b.fields.insert("L".into(), tw.l.field().clone());
    let put = |b: &mut WitnessBundle, n: &str, v: &FieldElement| -> Result<()> {
        b.set(n, tw.k_to_g(v)?);
        Ok(())
    };
    put(&mut b, "x", &k.from_int(x))?;
    put(&mut b, "a_1", &a1)?;
    put(&mut b, "b_1", &b1)?;
    put(&mut b, "a_2", &a2)?;
    put(&mut b, "b_2", &b2)?;
    put(&mut b, "u", &u)?;
    put(&mut b, "v", &v)?;
    for (i, (unit, gamma)) in [(&nu1, &g1), (&nu2, &g2), (&nu3, &g3), (&nu4u, &g4)].into_iter().enumerate() {
        let (ui, vi) = uv(unit);
        put(&mut b, &format!("u_{}", i + 1), &ui)?;
        put(&mut b, &format!("v_{}", i + 1), &vi)?;
        let (c, d) = tw.h.decompose(gamma)?;
        put(&mut b, &format!("c_{}", i + 1), &c)?;
        put(&mut b, &format!("d_{}", i + 1), &d)?;
        b.set(&format!("gamma_{}", i + 1), tw.h_to_l(gamma)?);
    }
    b.meta.insert("unit".into(), format!("{} - δ({})", nu.x, nu.y));
    b.meta.insert("r".into(), r.to_string());
    b.meta.insert("t".into(), t.to_string());
    Ok(b)
}

fn abs_norm(x: &FieldElement) -> Rat {
    x.norm().abs()
}

/// Re-checks every equation and then runs the bound argument on the α_G-component of x.
pub fn deg2_verify(x: &FieldElement, b: &WitnessBundle, f: &Deg2Fixture) -> VerificationReport {
    let mut rep = VerificationReport::new(b.system.as_str());
    rep.record("fixture", deg2_fixture_check(f).map(|_| String::new()).map_err(|e| e.to_string()));
    let tw = match Deg2Tower::new(f) {
        Ok(t) => t,
        Err(e) => {
            rep.record("fixture", Err(e.to_string()));
            return rep;
        }
    };
    let same = b.fields.get("G") == Some(tw.g.field()) && b.fields.get("L") == Some(tw.l.field());
    rep.record("fixture", if same { Ok(String::new()) } else { Err("bundle fields differ from the fixture tower".into()) });
    let g = |n: &str| b.elem(n);
    let gl = |n: &str| -> std::result::Result<FieldElement, String> { tw.g_to_l(b.elem(n)?).map_err(|e| e.to_string()) };
    let s = |e: Error| e.to_string();
    let delta = tw.delta().clone();
    let one_l = tw.l.field().one();
    let dh_g = tw.k_to_g(&f.d_h).map_err(s);
    rep.record("input:x", g("x").and_then(|bx| equal(bx, x)));
    for i in 1..=4 {
        let (un, vn) = (format!("u_{}", i), format!("v_{}", i));
        rep.record("eqdeg2:2i", (|| {
            let (u, v) = (g(&un)?, g(&vn)?);
            let dh = dh_g.clone()?;
            let lhs = &(u * u) - &(&(&dh * v) * v);
            equal(&lhs, &lhs.field().one())
        })());
        rep.record("eqdeg2:3i", (|| {
            let e = &gl(&un)? - &(&delta * &gl(&vn)?);
            equal(g(&format!("gamma_{}", i))?, &e.pow(4).map_err(s)?)
        })());
        rep.record("eqdeg2:4.2i", (|| {
            let rhs = &gl(&format!("c_{}", i))? + &(&delta * &gl(&format!("d_{}", i))?);
            equal(g(&format!("gamma_{}", i))?, &rhs)
        })());
    }
    for j in 1..=2 {
        rep.record("eqdeg2:4i", (|| {
            let lo = g(&format!("gamma_{}", 2 * j - 1))? - &one_l;
            if lo.is_zero() {
                return Err(format!("gamma_{} = 1", 2 * j - 1));
            }
            let hi = g(&format!("gamma_{}", 2 * j))? - &one_l;
            let ab = &gl(&format!("a_{}", j))? - &(&delta * &gl(&format!("b_{}", j))?);
            equal(&hi, &(&ab * &lo))
        })());
    }
    // z = 1 + (a_1^2 - d_H b_1^2)^2, in G
    let zval = || -> std::result::Result<FieldElement, String> {
        let (a1, b1) = (g("a_1")?, g("b_1")?);
        let n1 = &(a1 * a1) - &(&(&dh_g.clone()? * b1) * b1);
        Ok((&n1 * &n1).add_rat(&Rat::from(1)))
    };
    rep.record("eqdeg2:7i", (|| {
        let (xv, z) = (g("x")?, zval()?);
        let one = xv.field().one();
        for e in xv.field().real_embeddings() {
            if abs_compare(xv, &one, &e).map_err(s)? == Ordering::Less {
                return Err(format!("|σ(x)| < 1 at real embedding {}", e.index));
            }
            // z is real and at least 1 at real embeddings, so |z| = z there
            if abs_compare(xv, &z, &e).map_err(s)? == Ordering::Greater {
                return Err(format!("|σ(x)| exceeds the bound at real embedding {}", e.index));
            }
        }
        Ok(String::new())
    })());
    let g3m1 = || -> std::result::Result<FieldElement, String> {
        Ok(&(&gl("c_3")? + &(&delta * &gl("d_3")?)) - &one_l)
    };
    rep.record("eqdeg2:9i", (|| {
        let lhs = &gl("x")? - &(&gl("a_2")? - &(&delta * &gl("b_2")?));
        let rhs = &g3m1()? * &(&gl("u")? + &(&gl("v")? * &delta));
        equal(&lhs, &rhs)
    })());
    rep.record("eqdeg2:10i", (|| {
        let alpha = tw.alpha().map_err(s)?;
        let m = &(&alpha.scale(&Rat::from(6)) * &gl("x")?) * &tw.g_to_l(&zval()?).map_err(s)?;
        let q = g3m1()?.try_div(&m).map_err(s)?;
        if q.is_integral() {
            Ok(String::new())
        } else {
            Err("the quotient is not integral".into())
        }
    })());
    let names = all_vars();
    ring_checks(&mut rep, b, &names);
    bound_argument(&mut rep, &tw, b, &zval);
    rep
}

fn bound_argument(
    rep: &mut VerificationReport,
    tw: &Deg2Tower,
    b: &WitnessBundle,
    zval: &dyn Fn() -> std::result::Result<FieldElement, String>,
) {
    let s = |e: Error| e.to_string();
    let parts = (|| -> std::result::Result<_, String> {
        let x = b.elem("x")?;
        let (y0, y1) = tw.g.decompose(x).map_err(s)?;
        let alpha = tw.alpha().map_err(s)?;
        let two_alpha = alpha.scale(&Rat::from(2));
        let g3 = b.elem("gamma_3")?;
        let n_g3 = abs_norm(&(g3 - &tw.l.field().one()));
        let n_2ay1 = abs_norm(&(&two_alpha * &tw.g_to_l(&tw.k_to_g(&y1).map_err(s)?).map_err(s)?));
        let n_2a = abs_norm(&two_alpha);
        let z = zval()?;
        let lx = tw.g_to_l(x).map_err(s)?;
        let lz = tw.g_to_l(&z).map_err(s)?;
        Ok((y0, y1, n_g3, n_2ay1, n_2a, abs_norm(&lx), abs_norm(&lz), x.clone(), z))
    })();
    let (_y0, y1, n_g3, n_2ay1, n_2a, n_x, n_z, x, z) = match parts {
        Ok(p) => p,
        Err(e) => {
            rep.record("conclusion:x_in_K", Err(e));
            return;
        }
    };
    let mut broken = Vec::new();
    let v1: Verdict = if n_g3.is_zero() {
        Err("γ_3 = 1".into())
    } else if (n_2ay1.clone() / n_g3.clone()).is_integer() {
        Ok(String::new())
    } else {
        Err(format!("N(2α y_1)/N(γ_3 - 1) = {} is not an integer", n_2ay1.clone() / n_g3.clone()))
    };
    let v2: Verdict = {
        let gy = tw.k_to_g(&y1).map(|v| abs_norm(&v));
        let bound = abs_norm(&x) * abs_norm(&z);
        match gy {
            Ok(ny) if ny <= bound => Ok(String::new()),
            Ok(ny) => Err(format!("|N(y_1)| = {} exceeds |N(x)N(z)| = {}", ny, bound)),
            Err(e) => Err(e.to_string()),
        }
    };
    let lhs = n_2a * n_x * n_z;
    let v3: Verdict = if lhs < n_g3 { Ok(String::new()) } else { Err(format!("N(2α)N(x)N(z) = {} >= N(γ_3 - 1)", lhs)) };
    for (l, v) in [("lemma:bound1", v1), ("lemma:bound2", v2), ("lemma:chain", v3)] {
        if v.is_err() {
            broken.push(l);
        }
        rep.record(l, v);
    }
    if y1.is_zero() {
        rep.record("conclusion:x_in_K", Ok("the α_G-component of x vanishes".into()));
    } else if broken.is_empty() {
        rep.record("conclusion:x_in_K", Err("y_1 != 0 yet every bound holds".into()));
    } else {
        rep.record("conclusion:x_in_K", Err(format!("y_1 != 0; fails: {}", broken.join(", "))));
    }
}
