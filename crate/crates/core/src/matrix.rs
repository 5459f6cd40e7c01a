//! Dense exact matrices over Q(i), plus a fraction-free rank kernel.
//!
//! Matrices here are small and dense (dimension = number of monomials of a
//! jet space, a few hundred at most). Rank is computed without fractions by
//! Bareiss elimination over the Gaussian integers, which keeps intermediate
//! entries as minors of the scaled integer matrix.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::gaussian::GaussianRational;
use crate::gaussint::GaussInt;

#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    nrows: usize,
    ncols: usize,
    data: Vec<GaussianRational>,
}

impl Mat {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        Mat { nrows, ncols, data: vec![GaussianRational::zero(); nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = GaussianRational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<GaussianRational>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        Mat { nrows, ncols, data: rows.into_iter().flatten().collect() }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn at(&self, i: usize, j: usize) -> &GaussianRational {
        &self.data[i * self.ncols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut GaussianRational {
        &mut self.data[i * self.ncols + j]
    }

    pub fn is_identity(&self) -> bool {
        self.nrows == self.ncols && *self == Mat::identity(self.nrows)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(GaussianRational::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Mat { nrows: self.nrows, ncols: self.ncols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Mat { nrows: self.nrows, ncols: self.ncols, data }
    }

    pub fn neg(&self) -> Self {
        Mat { nrows: self.nrows, ncols: self.ncols, data: self.data.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        Mat {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows, "shape mismatch");
        let mut out = Mat::zero(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.ncols {
                    let b = other.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let t = a * b;
                    let e = out.at_mut(i, j);
                    *e = &*e + &t;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[GaussianRational]) -> Vec<GaussianRational> {
        assert_eq!(v.len(), self.ncols);
        (0..self.nrows)
            .map(|i| {
                let mut s = GaussianRational::zero();
                for (j, vj) in v.iter().enumerate() {
                    if !vj.is_zero() && !self.at(i, j).is_zero() {
                        s = &s + &(self.at(i, j) * vj);
                    }
                }
                s
            })
            .collect()
    }

    pub fn col(&self, j: usize) -> Vec<GaussianRational> {
        (0..self.nrows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<GaussianRational> {
        self.data[i * self.ncols..(i + 1) * self.ncols].to_vec()
    }

    pub fn trace(&self) -> GaussianRational {
        assert_eq!(self.nrows, self.ncols);
        let mut s = GaussianRational::zero();
        for i in 0..self.nrows {
            s = &s + self.at(i, i);
        }
        s
    }

    pub fn pow(&self, mut k: u64) -> Self {
        assert_eq!(self.nrows, self.ncols);
        let mut base = self.clone();
        let mut out = Mat::identity(self.nrows);
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Gauss-Jordan inverse; None when singular.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        let mut a = self.clone();
        let mut inv = Mat::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.at(r, col).is_zero())?;
            if pivot != col {
                for j in 0..n {
                    let tmp = a.at(pivot, j).clone();
                    *a.at_mut(pivot, j) = a.at(col, j).clone();
                    *a.at_mut(col, j) = tmp;
                    let tmp = inv.at(pivot, j).clone();
                    *inv.at_mut(pivot, j) = inv.at(col, j).clone();
                    *inv.at_mut(col, j) = tmp;
                }
            }
            let scale = a.at(col, col).inv().expect("pivot nonzero");
            for j in 0..n {
                *a.at_mut(col, j) = a.at(col, j) * &scale;
                *inv.at_mut(col, j) = inv.at(col, j) * &scale;
            }
            for r in 0..n {
                if r == col || a.at(r, col).is_zero() {
                    continue;
                }
                let f = a.at(r, col).clone();
                for j in 0..n {
                    let t = &(a.at(col, j) * &f);
                    *a.at_mut(r, j) = &*a.at(r, j) - t;
                    let t = &(inv.at(col, j) * &f);
                    *inv.at_mut(r, j) = &*inv.at(r, j) - t;
                }
            }
        }
        Some(inv)
    }

    /// Smallest k with M^k = 0, or None if M is not nilpotent. A nilpotent
    /// D x D matrix vanishes by the D-th power, so the search is finite.
    pub fn nilpotency_index(&self) -> Option<usize> {
        assert_eq!(self.nrows, self.ncols);
        let mut power = Mat::identity(self.nrows);
        for k in 0..=self.nrows {
            if power.is_zero() {
                return Some(k);
            }
            if k < self.nrows {
                power = power.mul(self);
            }
        }
        None
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.nrows, self.ncols)?;
        for i in 0..self.nrows {
            let row: Vec<String> = (0..self.ncols).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Rank over Q(i) of a row-major matrix, by Bareiss elimination on the
/// denominator-cleared Gaussian-integer rows. Pivoting is deterministic:
/// columns in order, first nonzero row.
pub fn rank_qi(rows: &[Vec<GaussianRational>]) -> usize {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return 0;
    }
    let mut m: Vec<Vec<GaussInt>> = rows.iter().map(|r| clear_denominators(r)).collect();
    let mut rank = 0usize;
    let mut prev = GaussInt::one();
    for col in 0..ncols {
        let Some(pr) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, pr);
        let (pivot_rows, rest) = m.split_at_mut(rank + 1);
        let pivot_row = &pivot_rows[rank];
        let pivot = pivot_row[col].clone();
        for r in rest.iter_mut() {
            if r[col].is_zero() {
                // Still renormalize so the Bareiss divisor stays in sync.
                for c in (col + 1)..ncols {
                    let t = pivot.mul(&r[c]);
                    r[c] = t.div_exact(&prev).expect("exact Bareiss division");
                }
                continue;
            }
            let lead = r[col].clone();
            for c in (col + 1)..ncols {
                let t = pivot.mul(&r[c]).sub(&lead.mul(&pivot_row[c]));
                r[c] = t.div_exact(&prev).expect("exact Bareiss division");
            }
            r[col] = GaussInt::zero();
        }
        prev = pivot;
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

/// Scales a Q(i) row to Gaussian integers and strips the common content.
fn clear_denominators(row: &[GaussianRational]) -> Vec<GaussInt> {
    let mut lcm = BigInt::one();
    for e in row {
        lcm = lcm.lcm(e.den());
    }
    let mut out: Vec<GaussInt> = row
        .iter()
        .map(|e| {
            let f = &lcm / e.den();
            GaussInt::new(e.num_re() * &f, e.num_im() * &f)
        })
        .collect();
    let mut content = BigInt::zero();
    for g in &out {
        content = content.gcd(&g.re).gcd(&g.im);
        if content.is_one() {
            return out;
        }
    }
    if content > BigInt::one() {
        for g in &mut out {
            g.re = &g.re / &content;
            g.im = &g.im / &content;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> GaussianRational {
        GaussianRational::from_int(v)
    }

    fn qr(n: i64, d: i64) -> GaussianRational {
        GaussianRational::from_ratio(n, d).unwrap()
    }

    fn mat(rows: &[&[i64]]) -> Mat {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect())
    }

    #[test]
    fn multiply_and_power() {
        let a = mat(&[&[1, 1], &[0, 1]]);
        let b = a.pow(5);
        assert_eq!(*b.at(0, 1), q(5));
        assert_eq!(*b.at(0, 0), q(1));
        assert!(a.pow(0).is_identity());
    }

    #[test]
    fn inverse_round_trip() {
        let a = mat(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).is_identity());
        assert!(inv.mul(&a).is_identity());

        let singular = mat(&[&[1, 2], &[2, 4]]);
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn inverse_with_complex_entries() {
        let mut a = Mat::identity(2);
        *a.at_mut(0, 1) = GaussianRational::i();
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).is_identity());
    }

    #[test]
    fn ranks() {
        assert_eq!(rank_qi(&[vec![q(1), q(2)], vec![q(2), q(4)]]), 1);
        assert_eq!(rank_qi(&[vec![q(1), q(0)], vec![q(0), q(1)]]), 2);
        assert_eq!(rank_qi(&[vec![q(0), q(0)]]), 0);
        assert_eq!(
            rank_qi(&[
                vec![qr(1, 2), qr(1, 3), q(0)],
                vec![q(3), q(2), q(0)],
                vec![q(0), q(0), q(5)],
            ]),
            2
        );
        let i = GaussianRational::i();
        assert_eq!(rank_qi(&[vec![q(1), i.clone()], vec![i.clone(), q(-1)]]), 1);
    }

    #[test]
    fn rank_matches_rational_elimination_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let nrows = rng.gen_range(1..6);
            let ncols = rng.gen_range(1..6);
            let rows: Vec<Vec<GaussianRational>> = (0..nrows)
                .map(|_| {
                    (0..ncols)
                        .map(|_| {
                            GaussianRational::from_parts(
                                rng.gen_range(-3..=3),
                                rng.gen_range(-1..=1),
                                rng.gen_range(1..=2),
                            )
                            .unwrap()
                        })
                        .collect()
                })
                .collect();
            assert_eq!(rank_qi(&rows), naive_rank(rows.clone()), "rows {rows:?}");
        }
    }

    fn naive_rank(mut rows: Vec<Vec<GaussianRational>>) -> usize {
        let ncols = rows.first().map_or(0, Vec::len);
        let mut rank = 0;
        for col in 0..ncols {
            let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else { continue };
            rows.swap(rank, p);
            let inv = rows[rank][col].inv().unwrap();
            for c in 0..ncols {
                rows[rank][c] = &rows[rank][c] * &inv;
            }
            for r in 0..rows.len() {
                if r != rank && !rows[r][col].is_zero() {
                    let f = rows[r][col].clone();
                    for c in 0..ncols {
                        let t = &rows[rank][c] * &f;
                        rows[r][c] = &rows[r][c] - &t;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn nilpotency() {
        let n = mat(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        assert_eq!(n.nilpotency_index(), Some(3));
        assert_eq!(Mat::zero(2, 2).nilpotency_index(), Some(1));
        assert_eq!(mat(&[&[1, 0], &[0, 1]]).nilpotency_index(), None);
    }
}
