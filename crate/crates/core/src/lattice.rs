//! Integer linear algebra and the multiplicative structure of spectra.
//!
//! Kernels of integer matrices are computed by unimodular column elimination
//! (Hermite-style), entirely in big integers. On top of that sit the two
//! multiplicative invariants of a tuple of nonzero Gaussian rationals
//! (lambda_1, ..., lambda_n):
//!
//! * `torsion_order`: the order k in {1, 2, 4} of the group of roots of
//!   unity contained in the subgroup of Q(i)* generated by the lambda_j.
//!   Roots of unity in Q(i) are exactly {1, i, -1, -i}, so k divides 4.
//! * `relation_lattice`: all e in Z^n with prod lambda_j^{e_j} = 1.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::factor::gauss_factor;
use crate::gaussian::GaussianRational;

/// A sublattice of Z^ambient_rank, given by an independent basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntLattice {
    pub ambient_rank: usize,
    pub basis: Vec<Vec<BigInt>>,
}

impl IntLattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

/// Kernel of an integer matrix (given row-major) as a lattice in Z^ncols.
/// The kernel of an integer matrix is automatically saturated.
pub fn integer_kernel(rows: &[Vec<BigInt>], ncols: usize) -> IntLattice {
    for r in rows {
        assert_eq!(r.len(), ncols, "ragged matrix");
    }
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let mut u = identity(ncols);
    let pivots = column_echelon(&mut a, &mut u);
    let basis = u
        .iter()
        .map(|row| row.clone())
        .collect::<Vec<_>>();
    // Columns of u beyond the pivot count span the kernel; u is stored
    // row-major, so extract columns.
    let mut kernel = Vec::new();
    for j in pivots..ncols {
        let mut v: Vec<BigInt> = (0..ncols).map(|i| basis[i][j].clone()).collect();
        normalize_sign(&mut v);
        kernel.push(v);
    }
    IntLattice { ambient_rank: ncols, basis: kernel }
}

/// Solves `rows * x = rhs` over the integers; None when no integer solution
/// exists.
pub fn solve_integer(rows: &[Vec<BigInt>], ncols: usize, rhs: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(rows.len(), rhs.len(), "shape mismatch");
    let mut h: Vec<Vec<BigInt>> = rows.to_vec();
    let mut u = identity(ncols);
    let rank = column_echelon(&mut h, &mut u);

    // h = rows * u is in column-echelon form: pivot columns 0..rank with
    // strictly increasing pivot rows, zero columns after. Forward-substitute.
    let mut y = vec![BigInt::zero(); ncols];
    let mut col = 0usize;
    for (r, rhs_r) in rhs.iter().enumerate() {
        // Residual in row r given the y already fixed.
        let mut acc = rhs_r.clone();
        for (j, yj) in y.iter().enumerate().take(col) {
            acc -= &h[r][j] * yj;
        }
        if col < rank && !h[r][col].is_zero() {
            let (q, rem) = acc.div_rem(&h[r][col]);
            if !rem.is_zero() {
                return None;
            }
            y[col] = q;
            col += 1;
        } else if !acc.is_zero() {
            return None;
        }
    }
    // x = u * y.
    let x: Vec<BigInt> = (0..ncols)
        .map(|i| {
            let mut s = BigInt::zero();
            for (j, yj) in y.iter().enumerate() {
                s += &u[i][j] * yj;
            }
            s
        })
        .collect();
    debug_assert!(rows
        .iter()
        .zip(rhs)
        .all(|(row, b)| row.iter().zip(&x).map(|(a, v)| a * v).sum::<BigInt>() == *b));
    Some(x)
}

/// In-place unimodular column elimination. Afterwards `a` is in column-echelon
/// form with pivot rows strictly increasing, `u` accumulates the column
/// operations (a_new = a_old * u), and the return value is the pivot count.
fn column_echelon(a: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>]) -> usize {
    if a.is_empty() {
        return 0;
    }
    let ncols = u.len();
    let nrows = a.len();
    let mut pivot_col = 0usize;
    for row in 0..nrows {
        if pivot_col == ncols {
            break;
        }
        // Chase the gcd of this row into a single column at or after pivot_col.
        loop {
            let mut best: Option<usize> = None;
            for j in pivot_col..ncols {
                if !a[row][j].is_zero() {
                    best = match best {
                        None => Some(j),
                        Some(b) if a[row][j].magnitude() < a[row][b].magnitude() => Some(j),
                        keep => keep,
                    };
                }
            }
            let Some(jmin) = best else { break };
            let mut reduced_any = false;
            for j in pivot_col..ncols {
                if j == jmin || a[row][j].is_zero() {
                    continue;
                }
                let q = quotient_round(&a[row][j], &a[row][jmin]);
                if !q.is_zero() {
                    column_axpy(a, u, j, jmin, &q);
                }
                if !a[row][j].is_zero() {
                    reduced_any = true;
                }
            }
            if !reduced_any {
                // Only jmin is nonzero on this row; move it into place.
                swap_columns(a, u, pivot_col, jmin);
                if a[row][pivot_col].is_negative() {
                    negate_column(a, u, pivot_col);
                }
                pivot_col += 1;
                break;
            }
        }
    }
    pivot_col
}

/// col_j -= q * col_k on both the matrix and the transform.
fn column_axpy(a: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], j: usize, k: usize, q: &BigInt) {
    for row in a.iter_mut() {
        let t = &row[k] * q;
        row[j] -= t;
    }
    for row in u.iter_mut() {
        let t = &row[k] * q;
        row[j] -= t;
    }
}

fn swap_columns(a: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], j: usize, k: usize) {
    if j == k {
        return;
    }
    for row in a.iter_mut() {
        row.swap(j, k);
    }
    for row in u.iter_mut() {
        row.swap(j, k);
    }
}

fn negate_column(a: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], j: usize) {
    for row in a.iter_mut() {
        let v = -row[j].clone();
        row[j] = v;
    }
    for row in u.iter_mut() {
        let v = -row[j].clone();
        row[j] = v;
    }
}

/// Truncating-toward-smaller-remainder quotient used during gcd chasing.
fn quotient_round(a: &BigInt, b: &BigInt) -> BigInt {
    let two_a: BigInt = a * 2;
    let two_b: BigInt = b * 2;
    let shifted = if (two_a.is_negative()) == (b.is_negative()) { two_a + b } else { two_a - b };
    shifted / two_b
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

fn normalize_sign(v: &mut [BigInt]) {
    if let Some(first) = v.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in v.iter_mut() {
                *x = -x.clone();
            }
        }
    }
}

/// Prime-exponent data of a spectrum: one row per Gaussian prime occurring in
/// any lambda_j, in deterministic order; plus the unit exponents.
fn exponent_matrix(lambdas: &[GaussianRational]) -> Result<(Vec<Vec<BigInt>>, Vec<i64>)> {
    let mut factorizations = Vec::with_capacity(lambdas.len());
    for l in lambdas {
        if l.is_zero() {
            return Err(Error::ZeroArgument("spectrum entry"));
        }
        factorizations.push(gauss_factor(l)?);
    }
    let mut primes: std::collections::BTreeMap<(BigInt, BigInt, BigInt), usize> =
        std::collections::BTreeMap::new();
    for f in &factorizations {
        for (p, _) in &f.factors {
            let key = (p.norm(), p.re.clone(), p.im.clone());
            let next = primes.len();
            primes.entry(key).or_insert(next);
        }
    }
    let mut rows = vec![vec![BigInt::zero(); lambdas.len()]; primes.len()];
    let mut units = Vec::with_capacity(lambdas.len());
    for (j, f) in factorizations.iter().enumerate() {
        units.push(f.unit_exp as i64);
        for (p, e) in &f.factors {
            let key = (p.norm(), p.re.clone(), p.im.clone());
            rows[primes[&key]][j] = BigInt::from(*e);
        }
    }
    Ok((rows, units))
}

/// Order of the group of roots of unity inside the multiplicative group
/// generated by the lambdas; always 1, 2 or 4.
pub fn torsion_order(lambdas: &[GaussianRational]) -> Result<usize> {
    let (rows, units) = exponent_matrix(lambdas)?;
    let kernel = integer_kernel(&rows, lambdas.len());
    // The image of the kernel under e -> sum e_j * unit_j (mod 4) is the
    // subgroup of Z/4 the generated roots of unity form.
    let mut g: i64 = 4;
    for e in &kernel.basis {
        let phi = unit_character(e, &units);
        g = g.gcd(&phi);
    }
    Ok((4 / g) as usize)
}

/// All integer relations prod lambda_j^{e_j} = 1, as a sublattice of Z^n.
pub fn relation_lattice(lambdas: &[GaussianRational]) -> Result<IntLattice> {
    let (rows, units) = exponent_matrix(lambdas)?;
    let kernel = integer_kernel(&rows, lambdas.len());
    if kernel.basis.is_empty() {
        return Ok(IntLattice { ambient_rank: lambdas.len(), basis: Vec::new() });
    }
    // Inside the kernel, a combination c of basis vectors is a relation iff
    // sum c_i * phi_i = 0 mod 4, where phi_i is the unit character of the
    // i-th basis vector. Solutions c are the projection of the kernel of the
    // single row [phi_1 ... phi_r 4].
    let r = kernel.basis.len();
    let mut row = Vec::with_capacity(r + 1);
    for e in &kernel.basis {
        row.push(BigInt::from(unit_character(e, &units)));
    }
    row.push(BigInt::from(4));
    let combo = integer_kernel(&[row], r + 1);
    let mut basis = Vec::new();
    for c in &combo.basis {
        let mut v = vec![BigInt::zero(); lambdas.len()];
        for (i, e) in kernel.basis.iter().enumerate() {
            for (k, ek) in e.iter().enumerate() {
                v[k] += &c[i] * ek;
            }
        }
        if v.iter().any(|x| !x.is_zero()) {
            normalize_sign(&mut v);
            basis.push(v);
        }
    }
    Ok(IntLattice { ambient_rank: lambdas.len(), basis })
}

/// sum e_j * unit_j reduced into 0..4.
fn unit_character(e: &[BigInt], units: &[i64]) -> i64 {
    let mut s = BigInt::zero();
    for (ej, uj) in e.iter().zip(units) {
        s += ej * BigInt::from(*uj);
    }
    ((s % 4u8 + 4u8) % 4u8).try_into().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn q(re: i64, im: i64, den: i64) -> GaussianRational {
        GaussianRational::from_parts(re, im, den).unwrap()
    }

    #[test]
    fn kernel_examples() {
        let k = integer_kernel(&[big(&[1, -1])], 2);
        assert_eq!(k.basis, vec![big(&[1, 1])]);

        let k = integer_kernel(&[big(&[2, 2])], 2);
        assert_eq!(k.basis, vec![big(&[1, -1])]);

        let k = integer_kernel(&[big(&[1, 0]), big(&[0, 1])], 2);
        assert!(k.basis.is_empty());

        let k = integer_kernel(&[big(&[6, 10, 15])], 3);
        assert_eq!(k.rank(), 2);
        for e in &k.basis {
            let s: BigInt = e[0].clone() * 6 + e[1].clone() * 10 + e[2].clone() * 15;
            assert!(s.is_zero());
        }
    }

    #[test]
    fn solve_integer_examples() {
        let rows = vec![big(&[2, 4])];
        assert!(solve_integer(&rows, 2, &big(&[3])).is_none());
        let x = solve_integer(&rows, 2, &big(&[6])).unwrap();
        assert_eq!(x[0].clone() * 2 + x[1].clone() * 4, BigInt::from(6));

        let rows = vec![big(&[1, 2]), big(&[3, 4])];
        let x = solve_integer(&rows, 2, &big(&[5, 11])).unwrap();
        assert_eq!(x, big(&[1, 2]));
    }

    #[test]
    fn torsion_of_single_generators() {
        assert_eq!(torsion_order(&[q(2, 0, 1)]).unwrap(), 1);
        assert_eq!(torsion_order(&[q(-1, 0, 1)]).unwrap(), 2);
        assert_eq!(torsion_order(&[q(0, 1, 1)]).unwrap(), 4);
        assert_eq!(torsion_order(&[q(3, 4, 5)]).unwrap(), 1);
    }

    #[test]
    fn torsion_of_mixed_tuples() {
        // 2i = (1+i)^2 and 2 = i^3 (1+i)^2; the ratio is the unit i.
        assert_eq!(torsion_order(&[q(0, 2, 1), q(2, 0, 1)]).unwrap(), 4);
        assert_eq!(torsion_order(&[q(2, 0, 1), q(3, 0, 1)]).unwrap(), 1);
        assert_eq!(torsion_order(&[q(-2, 0, 1), q(2, 0, 1)]).unwrap(), 2);
    }

    #[test]
    fn relation_lattice_examples() {
        let l = relation_lattice(&[q(-1, 0, 1)]).unwrap();
        assert_eq!(l.basis, vec![big(&[2])]);

        let l = relation_lattice(&[q(2, 0, 1), q(1, 0, 2)]).unwrap();
        assert_eq!(l.basis, vec![big(&[1, 1])]);

        let l = relation_lattice(&[q(2, 0, 1), q(3, 0, 1)]).unwrap();
        assert!(l.basis.is_empty());

        let l = relation_lattice(&[q(0, 1, 1)]).unwrap();
        assert_eq!(l.basis, vec![big(&[4])]);
    }

    #[test]
    fn relations_evaluate_to_one() {
        let lambdas = [q(0, 2, 1), q(2, 0, 1), q(-4, 0, 1), q(1, 1, 1)];
        let l = relation_lattice(&lambdas).unwrap();
        assert!(!l.basis.is_empty());
        for e in &l.basis {
            let mut acc = GaussianRational::one();
            for (lam, exp) in lambdas.iter().zip(e) {
                let exp_i64 = i64::try_from(exp.clone()).unwrap();
                acc = &acc * &lam.pow(exp_i64).unwrap();
            }
            assert!(acc.is_one(), "relation {e:?} evaluated to {acc}");
        }
    }
}
