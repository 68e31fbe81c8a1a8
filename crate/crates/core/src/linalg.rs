//! Exact linear algebra over Q.

use crate::rat::Rat;
use num_traits::{One, Zero};

/// Incremental row echelon basis that records how each reduced row is
/// expressed through the vectors inserted so far.
pub struct Echelon {
    dim: usize,
    rows: Vec<(usize, Vec<Rat>, Vec<Rat>)>,
    inserted: usize,
}

impl Echelon {
    pub fn new(dim: usize) -> Echelon {
        Echelon { dim, rows: Vec::new(), inserted: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Inserts v. If v depends on the earlier vectors, returns coefficients c
    /// with v = sum c_i v_i over the earlier vectors, and v is not added.
    pub fn insert(&mut self, v: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(v.len(), self.dim);
        let idx = self.inserted;
        let mut w = v.to_vec();
        // combination tracks w = v - sum comb_i v_i
        let mut comb = vec![Rat::zero(); idx + 1];
        comb[idx] = Rat::one();
        for (pivot, row, rcomb) in &self.rows {
            if w[*pivot].is_zero() {
                continue;
            }
            let f = w[*pivot].clone();
            for j in 0..self.dim {
                if !row[j].is_zero() {
                    w[j] -= &(&f * &row[j]);
                }
            }
            for (j, c) in rcomb.iter().enumerate() {
                if !c.is_zero() {
                    comb[j] -= &(&f * c);
                }
            }
        }
        match w.iter().position(|x| !x.is_zero()) {
            None => {
                // 0 = comb . (v_0..v_idx), comb[idx] = 1
                Some(comb[..idx].iter().map(|c| -c).collect())
            }
            Some(p) => {
                let inv = w[p].recip();
                let row: Vec<Rat> = w.iter().map(|x| x * &inv).collect();
                let rc: Vec<Rat> = comb.iter().map(|x| x * &inv).collect();
                self.rows.push((p, row, rc));
                self.inserted += 1;
                None
            }
        }
    }
}

/// Solves A x = b for one solution (A given as rows), or None if inconsistent.
pub fn solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut rows: Vec<Vec<Rat>> = a.iter().zip(b).map(|(r, bi)| {
        let mut r = r.clone();
        r.push(bi.clone());
        r
    }).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in c..=n {
                    let t = &f * &rows[r][j];
                    rows[i][j] -= &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m {
            break;
        }
    }
    if rows[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut x = vec![Rat::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rows[i][n].clone();
    }
    Some(x)
}

/// Rank of a matrix given as rows.
pub fn rank(rows: &[Vec<Rat>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut e = Echelon::new(rows[0].len());
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| Rat::from(x)).collect()
    }

    #[test]
    fn dependency_coefficients() {
        let mut e = Echelon::new(2);
        assert!(e.insert(&q(&[1, 2])).is_none());
        assert!(e.insert(&q(&[0, 1])).is_none());
        let c = e.insert(&q(&[3, 4])).unwrap();
        assert_eq!(c, q(&[3, -2]));
    }

    #[test]
    fn solve_and_rank() {
        let a = vec![q(&[1, 1]), q(&[1, -1]), q(&[2, 0])];
        assert_eq!(solve(&a, &q(&[3, 1, 4])), Some(q(&[2, 1])));
        assert_eq!(solve(&a, &q(&[3, 1, 5])), None);
        assert_eq!(rank(&a), 2);
    }
}
