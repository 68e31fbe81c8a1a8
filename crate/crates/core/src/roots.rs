//! Certified complex root enclosures of squarefree rational polynomials.
//!
//! Approximations come from Aberth iteration followed by Newton steps at
//! the working precision. A disk around z of radius n|f(z)/f'(z)| holds a
//! root; n pairwise disjoint such disks hold exactly one root each.

use crate::ball::{abs_lower, abs_upper, eval_poly, CBall, Dy, RBall};
use crate::poly::QPoly;
use crate::rat::Rat;
use num_traits::Zero;

/// A disk that contains exactly one root of the defining polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDisk {
    pub re: Dy,
    pub im: Dy,
    pub radius: Dy,
    pub is_real: bool,
    pub prec: u64,
}

impl RootDisk {
    pub fn as_ball(&self) -> CBall {
        CBall {
            re: RBall { mid: self.re.clone(), rad: self.radius.clone() },
            im: if self.is_real { RBall::zero() } else { RBall { mid: self.im.clone(), rad: self.radius.clone() } },
        }
    }

    pub fn approx(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

#[derive(Clone, Debug)]
struct Approx {
    re: Dy,
    im: Dy,
}

fn cx(a: &Approx) -> CBall {
    CBall::exact(a.re.clone(), a.im.clone())
}

fn from_ball(b: &CBall, prec: u64) -> Approx {
    Approx { re: b.re.mid.round_down(prec + 8), im: b.im.mid.round_down(prec + 8) }
}

fn dist_sq(a: &Approx, b: &Approx) -> Dy {
    let dr = a.re.sub(&b.re);
    let di = a.im.sub(&b.im);
    dr.mul(&dr).add(&di.mul(&di))
}

fn aberth(f: &QPoly, start: Vec<Approx>, prec: u64, iters: usize) -> Vec<Approx> {
    let c = f.coeffs();
    let df = f.derivative();
    let dc = df.coeffs();
    let n = start.len();
    let mut z = start;
    for _ in 0..iters {
        let mut max_step = f64::MIN;
        for k in 0..n {
            let zk = cx(&z[k]);
            let fv = eval_poly(c, &zk, prec).mid_only();
            if fv.re.mid.is_zero() && fv.im.mid.is_zero() {
                continue;
            }
            let dv = eval_poly(dc, &zk, prec).mid_only();
            let w = match dv.inv(prec) {
                Some(inv) => fv.mul(&inv, prec).mid_only(),
                None => continue,
            };
            let mut s = CBall::from_rat(&Rat::zero(), prec);
            for j in 0..n {
                if j == k {
                    continue;
                }
                let d = zk.sub(&cx(&z[j]), prec).mid_only();
                if let Some(inv) = d.inv(prec) {
                    s = s.add(&inv.mid_only(), prec).mid_only();
                }
            }
            let one = CBall::from_rat(&Rat::from(1), prec);
            let den = one.sub(&w.mul(&s, prec), prec).mid_only();
            let step = match den.inv(prec) {
                Some(inv) => w.mul(&inv, prec).mid_only(),
                None => w,
            };
            let sz = step.re.mid.to_f64().abs().max(step.im.mid.to_f64().abs());
            let scale = z[k].re.to_f64().abs().max(z[k].im.to_f64().abs()).max(1.0);
            max_step = max_step.max((sz / scale).log2());
            z[k] = from_ball(&zk.sub(&step, prec), prec);
        }
        if max_step < -(prec as f64) * 0.9 {
            break;
        }
    }
    z
}

fn newton(f: &QPoly, z: &Approx, prec: u64) -> Approx {
    let c = f.coeffs();
    let d = f.derivative();
    let mut z = z.clone();
    for _ in 0..4 {
        let zb = cx(&z);
        let fv = eval_poly(c, &zb, prec).mid_only();
        let dv = eval_poly(d.coeffs(), &zb, prec).mid_only();
        match dv.inv(prec) {
            Some(inv) => {
                let step = fv.mul(&inv, prec);
                z = from_ball(&zb.sub(&step, prec), prec);
            }
            None => break,
        }
    }
    z
}

/// Inclusion radius n |f(z)| / |f'(z)|, None when f'(z) cannot be bounded away from 0.
fn inclusion_radius(f: &QPoly, z: &Approx, prec: u64) -> Option<Dy> {
    let n = f.deg() as i64;
    let zb = cx(z);
    let fv = eval_poly(f.coeffs(), &zb, prec);
    let dv = eval_poly(f.derivative().coeffs(), &zb, prec);
    let lo = abs_lower(&dv, prec);
    if lo.is_zero() {
        return None;
    }
    let up = abs_upper(&fv, prec);
    Some(Dy::div_up(&up.mul(&Dy::from_int(n)), &lo, 40).round_up(40))
}

fn disjoint(a: &Approx, ra: &Dy, b: &Approx, rb: &Dy) -> bool {
    let s = ra.add(rb);
    dist_sq(a, b) > s.mul(&s)
}

fn initial_guesses(f: &QPoly) -> Vec<Approx> {
    let n = f.deg() as usize;
    let bound = f.root_bound().to_f64().min(1e300);
    let r = bound.max(1.0);
    (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            Approx { re: Dy::from_f64(r * t.cos()), im: Dy::from_f64(r * t.sin()) }
        })
        .collect()
}

/// Tries to certify the given approximations, knowing that f has `nreal`
/// real roots; on success returns the disks (unordered).
fn certify(f: &QPoly, z: &[Approx], prec: u64, nreal: usize) -> Option<Vec<RootDisk>> {
    let n = z.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| z[a].im.abs().cmp(&z[b].im.abs()));
    let mut disks: Vec<(Approx, Dy, bool)> = Vec::with_capacity(n);
    for (rank, &i) in order.iter().enumerate() {
        let a = &z[i];
        if rank < nreal {
            let proj = Approx { re: a.re.clone(), im: Dy::zero() };
            let r = inclusion_radius(f, &proj, prec)?;
            disks.push((proj, r, true));
        } else {
            let r = inclusion_radius(f, a, prec)?;
            if a.im.abs() <= r {
                return None;
            }
            disks.push((a.clone(), r, false));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if !disjoint(&disks[i].0, &disks[i].1, &disks[j].0, &disks[j].1) {
                return None;
            }
        }
    }
    Some(disks.into_iter().map(|(a, r, real)| RootDisk { re: a.re, im: a.im, radius: r, is_real: real, prec }).collect())
}

/// Canonical order: real roots descending, then pairs (upper, conjugate) with
/// the upper roots sorted by real part descending, then imaginary part descending.
fn canonical(mut disks: Vec<RootDisk>) -> Option<Vec<RootDisk>> {
    let mut reals: Vec<RootDisk> = disks.iter().filter(|d| d.is_real).cloned().collect();
    reals.sort_by(|a, b| b.re.cmp(&a.re));
    let mut uppers: Vec<RootDisk> = disks.iter().filter(|d| !d.is_real && d.im.signum() > 0).cloned().collect();
    let lowers = disks.iter().filter(|d| !d.is_real && d.im.signum() < 0).count();
    if uppers.len() != lowers {
        return None;
    }
    uppers.sort_by(|a, b| b.re.cmp(&a.re).then(b.im.cmp(&a.im)));
    disks.clear();
    disks.extend(reals);
    for u in uppers {
        let l = RootDisk { re: u.re.clone(), im: u.im.neg(), radius: u.radius.clone(), is_real: false, prec: u.prec };
        disks.push(u);
        disks.push(l);
    }
    // mirrored disks must stay disjoint from everything else
    for i in 0..disks.len() {
        for j in i + 1..disks.len() {
            let a = Approx { re: disks[i].re.clone(), im: disks[i].im.clone() };
            let b = Approx { re: disks[j].re.clone(), im: disks[j].im.clone() };
            if !disjoint(&a, &disks[i].radius, &b, &disks[j].radius) {
                return None;
            }
        }
    }
    Some(disks)
}

/// Certified enclosures of all roots of a squarefree polynomial, in canonical order.
pub fn isolate_roots(f: &QPoly, min_prec: u64) -> Vec<RootDisk> {
    let n = f.deg();
    assert!(n >= 1, "constant polynomial has no roots");
    let f = f.monic();
    if n == 1 {
        let root = -f.coeff(0);
        let (m, err) = Dy::from_rat_floor(&root, min_prec.max(64));
        let radius = if err.is_zero() { Dy::zero() } else { err };
        return vec![RootDisk { re: m, im: Dy::zero(), radius, is_real: true, prec: min_prec.max(64) }];
    }
    let nreal = f.count_real_roots();
    let mut prec = 64u64;
    let mut z = initial_guesses(&f);
    loop {
        z = aberth(&f, z, prec, 200 + 20 * n as usize);
        let zn: Vec<Approx> = z.iter().map(|a| newton(&f, a, prec.max(min_prec))).collect();
        if prec >= min_prec {
            if let Some(d) = certify(&f, &zn, prec.max(min_prec), nreal) {
                if let Some(c) = canonical(d) {
                    return c;
                }
            }
        }
        z = zn;
        prec *= 2;
        assert!(prec <= 1 << 16, "root isolation failed to converge; is the polynomial squarefree?");
    }
}

/// True when the radius is at most 2^(4 - prec).
pub fn radius_within(r: &Dy, prec: u64) -> bool {
    r.is_zero() || r.top() <= -(prec as i64) + 4
}

/// Refines a certified disk to at least `prec` bits; the result lies inside the old disk.
pub fn refine(f: &QPoly, d: &RootDisk, prec: u64) -> RootDisk {
    if d.prec >= prec && radius_within(&d.radius, prec) {
        return d.clone();
    }
    let f = f.monic();
    if f.deg() == 1 {
        let root = -f.coeff(0);
        let (m, err) = Dy::from_rat_floor(&root, prec);
        return RootDisk { re: m, im: Dy::zero(), radius: err, is_real: true, prec };
    }
    let mut work = prec;
    let mut z = Approx { re: d.re.clone(), im: if d.is_real { Dy::zero() } else { d.im.clone() } };
    loop {
        // each Newton pass gains precision quadratically from the current center
        for _ in 0..64 {
            let next = newton(&f, &z, work);
            let moved = dist_sq(&next, &z);
            z = next;
            if d.is_real {
                z.im = Dy::zero();
            }
            if moved.is_zero() || moved.top() < -2 * work as i64 {
                break;
            }
        }
        if let Some(r) = inclusion_radius(&f, &z, work) {
            let inside = {
                let gap = d.radius.sub(&r);
                gap.signum() > 0 && dist_sq(&z, &Approx { re: d.re.clone(), im: d.im.clone() }) < gap.mul(&gap)
            };
            let real_ok = d.is_real || z.im.abs() > r;
            if inside && real_ok && radius_within(&r, prec) {
                let im = if d.is_real { Dy::zero() } else { z.im.clone() };
                return RootDisk { re: z.re, im, radius: r, is_real: d.is_real, prec };
            }
        }
        work *= 2;
        assert!(work <= prec * 64 + 4096, "root refinement failed");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two_roots_in_order() {
        let f = QPoly::from_ints(&[-2, 0, 1]);
        let r = isolate_roots(&f, 64);
        assert_eq!(r.len(), 2);
        assert!(r[0].is_real && r[1].is_real);
        assert!((r[0].approx().0 - 2f64.sqrt()).abs() < 1e-12);
        assert!((r[1].approx().0 + 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn complex_pairs_and_refinement() {
        let f = QPoly::from_ints(&[2, 0, 0, 0, 1]);
        let r = isolate_roots(&f, 64);
        assert_eq!(r.iter().filter(|d| d.is_real).count(), 0);
        assert!(r[0].im.signum() > 0 && r[1].im == r[0].im.neg());
        let fine = refine(&f, &r[0], 512);
        assert!(fine.radius.top() <= -500);
        let cubic = QPoly::from_ints(&[-1, -3, 0, 1]);
        let rr = isolate_roots(&cubic, 64);
        assert!(rr.iter().all(|d| d.is_real));
        assert!(rr[0].re > rr[1].re && rr[1].re > rr[2].re);
    }

    #[test]
    fn clustered_roots() {
        // (x^2 - 2)(x^2 - 2 - 1/1000) scaled to integers
        let f = QPoly::from_ints(&[-2, 0, 1]).mul(&QPoly::from_ints(&[-2001, 0, 1000]));
        let r = isolate_roots(&f, 64);
        assert_eq!(r.len(), 4);
        assert!(r.iter().all(|d| d.is_real));
    }
}
