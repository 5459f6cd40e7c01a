//! Exact Jordan-Chevalley decomposition M = S + N over Q(i).
//!
//! The semisimple part is found by a Newton iteration on the squarefree part
//! of the characteristic polynomial, so no eigenvectors are ever computed.
//! Eigenvalues are still extracted exactly (divisor enumeration over the
//! Gaussian integers); a characteristic polynomial with an irreducible factor
//! of degree two or more over Q(i) is rejected.

use std::collections::HashSet;

use num_traits::One;

use crate::error::{Error, Result};
use crate::factor::gauss_factor;
use crate::gaussian::GaussianRational;
use crate::gaussint::GaussInt;
use crate::matrix::Mat;

/// Dense polynomial, index = degree.
pub type Poly = Vec<GaussianRational>;

pub fn poly_trim(p: &mut Poly) {
    while p.last().is_some_and(GaussianRational::is_zero) {
        p.pop();
    }
}

pub fn poly_degree(p: &Poly) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn poly_eval(p: &Poly, x: &GaussianRational) -> GaussianRational {
    let mut acc = GaussianRational::zero();
    for c in p.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

pub fn poly_eval_mat(p: &Poly, m: &Mat) -> Mat {
    let n = m.nrows();
    let mut acc = Mat::zero(n, n);
    for c in p.iter().rev() {
        acc = acc.mul(m);
        if !c.is_zero() {
            acc = acc.add(&Mat::identity(n).scale(c));
        }
    }
    acc
}

pub fn poly_deriv(p: &Poly) -> Poly {
    let mut out: Poly = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * &GaussianRational::from_int(k as i64))
        .collect();
    poly_trim(&mut out);
    out
}

/// Euclidean division; the divisor must be nonzero.
pub fn poly_divmod(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let db = poly_degree(b).expect("division by zero polynomial");
    let lead_inv = b[db].inv().expect("leading coefficient nonzero");
    let mut rem = a.clone();
    poly_trim(&mut rem);
    let mut quot: Poly = Vec::new();
    while let Some(dr) = poly_degree(&rem) {
        if dr < db {
            break;
        }
        let factor = &rem[dr] * &lead_inv;
        let shift = dr - db;
        if quot.len() <= shift {
            quot.resize(shift + 1, GaussianRational::zero());
        }
        quot[shift] = factor.clone();
        for (k, bc) in b.iter().enumerate() {
            let t = bc * &factor;
            rem[k + shift] = &rem[k + shift] - &t;
        }
        poly_trim(&mut rem);
    }
    (quot, rem)
}

/// Monic gcd by the Euclidean algorithm.
pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    let mut x = a.clone();
    let mut y = b.clone();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while poly_degree(&y).is_some() {
        let (_, r) = poly_divmod(&x, &y);
        x = y;
        y = r;
    }
    if let Some(d) = poly_degree(&x) {
        let inv = x[d].inv().expect("nonzero");
        for c in &mut x {
            *c = &*c * &inv;
        }
    }
    x
}

/// Characteristic polynomial (monic) by the Faddeev-LeVerrier recurrence,
/// which needs only traces and matrix products.
pub fn charpoly(m: &Mat) -> Poly {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    let mut coeffs = vec![GaussianRational::zero(); n + 1];
    coeffs[n] = GaussianRational::one();
    if n == 0 {
        return coeffs;
    }
    let mut aux = m.clone();
    let mut c = -&aux.trace();
    coeffs[n - 1] = c.clone();
    for k in 2..=n {
        aux = m.mul(&aux.add(&Mat::identity(n).scale(&c)));
        c = -&(&aux.trace() * &GaussianRational::from_int(k as i64).inv().expect("nonzero"));
        coeffs[n - k] = c.clone();
    }
    coeffs
}

/// Quotient by (x - r), assuming r is a root.
fn deflate(p: &Poly, r: &GaussianRational) -> Poly {
    let d = poly_degree(p).expect("nonconstant");
    let mut q = vec![GaussianRational::zero(); d];
    let mut carry = p[d].clone();
    for k in (1..=d).rev() {
        q[k - 1] = carry.clone();
        carry = &p[k - 1] + &(&carry * r);
    }
    debug_assert!(carry.is_zero(), "deflation by a non-root");
    q
}

/// All divisors of a nonzero Gaussian integer, up to units.
fn gauss_divisors(g: &GaussInt) -> Vec<GaussInt> {
    let as_rational = GaussianRational::new(g.re.clone(), g.im.clone(), num_bigint::BigInt::one())
        .expect("integral input");
    let factorization = gauss_factor(&as_rational).expect("nonzero input");
    let mut divisors = vec![GaussInt::one()];
    for (prime, exp) in &factorization.factors {
        let mut extended = Vec::with_capacity(divisors.len() * (*exp as usize + 1));
        for d in &divisors {
            let mut power = d.clone();
            extended.push(power.clone());
            for _ in 0..*exp {
                power = power.mul(prime);
                extended.push(power.clone());
            }
        }
        divisors = extended;
    }
    divisors
}

/// Scales a Q(i) polynomial to a primitive Gaussian-integer polynomial.
fn primitive_integer_poly(p: &Poly) -> Vec<GaussInt> {
    use num_bigint::BigInt;
    use num_integer::Integer;
    let mut lcm = BigInt::one();
    for c in p {
        lcm = lcm.lcm(c.den());
    }
    let mut out: Vec<GaussInt> = p
        .iter()
        .map(|c| {
            let f = &lcm / c.den();
            GaussInt::new(c.num_re() * &f, c.num_im() * &f)
        })
        .collect();
    let mut content = GaussInt::zero();
    for g in &out {
        content = content.gcd(g);
    }
    if !content.is_zero() && !content.is_unit() {
        for g in &mut out {
            *g = g.div_exact(&content).expect("content divides");
        }
    }
    out
}

/// All roots of p in Q(i), with multiplicity, by the rational-root theorem
/// over Z[i] and repeated deflation. Errors when a nonconstant factor without
/// Q(i) roots remains.
pub fn qi_roots(p: &Poly) -> Result<Vec<GaussianRational>> {
    let mut work = p.clone();
    poly_trim(&mut work);
    if work.is_empty() {
        return Err(Error::Internal("root search on the zero polynomial".into()));
    }
    let mut roots = Vec::new();
    while poly_degree(&work).is_some_and(|d| d >= 1) {
        if work[0].is_zero() {
            roots.push(GaussianRational::zero());
            work = deflate(&work, &GaussianRational::zero());
            continue;
        }
        let zi = primitive_integer_poly(&work);
        let d = zi.len() - 1;
        let lead_divisors = gauss_divisors(&zi[d]);
        let const_divisors = gauss_divisors(&zi[0]);
        let mut tried: HashSet<GaussianRational> = HashSet::new();
        let mut found = None;
        'search: for num in &const_divisors {
            for den in &lead_divisors {
                for unit in 0..4u8 {
                    let candidate = ratio(&num.mul_unit(unit), den);
                    if !tried.insert(candidate.clone()) {
                        continue;
                    }
                    if poly_eval(&work, &candidate).is_zero() {
                        found = Some(candidate);
                        break 'search;
                    }
                }
            }
        }
        match found {
            Some(r) => {
                work = deflate(&work, &r);
                roots.push(r);
            }
            None => return Err(Error::SpectrumNotInQi),
        }
    }
    Ok(roots)
}

fn ratio(num: &GaussInt, den: &GaussInt) -> GaussianRational {
    use num_bigint::BigInt;
    let n = GaussianRational::new(num.re.clone(), num.im.clone(), BigInt::one()).expect("den 1");
    let d = GaussianRational::new(den.re.clone(), den.im.clone(), BigInt::one()).expect("den 1");
    n.div(&d).expect("nonzero divisor")
}

/// M = S + N with S semisimple, N nilpotent, SN = NS, both polynomials in M.
/// Requires the characteristic polynomial to split over Q(i).
pub fn jordan_chevalley(m: &Mat) -> Result<(Mat, Mat)> {
    let (s, n, _) = jordan_with_spectrum(m)?;
    Ok((s, n))
}

/// As `jordan_chevalley`, also returning the distinct eigenvalues.
pub fn jordan_with_spectrum(m: &Mat) -> Result<(Mat, Mat, Vec<GaussianRational>)> {
    let dim = m.nrows();
    assert_eq!(dim, m.ncols());
    if dim == 0 {
        return Ok((m.clone(), m.clone(), Vec::new()));
    }
    let p = charpoly(m);
    let dp = poly_deriv(&p);
    let g = poly_gcd(&p, &dp);
    let (q, rem) = poly_divmod(&p, &g);
    debug_assert!(rem.iter().all(GaussianRational::is_zero));
    let eigenvalues = qi_roots(&q)?;
    let dq = poly_deriv(&q);

    let mut s = m.clone();
    let iterations = (usize::BITS - dim.leading_zeros()) as usize + 1;
    for _ in 0..iterations {
        let qs = poly_eval_mat(&q, &s);
        if qs.is_zero() {
            break;
        }
        let derivative = poly_eval_mat(&dq, &s);
        let inv = derivative
            .inverse()
            .ok_or_else(|| Error::Internal("Newton step hit a singular derivative".into()))?;
        s = s.sub(&qs.mul(&inv));
    }
    if !poly_eval_mat(&q, &s).is_zero() {
        return Err(Error::Internal("semisimple iteration did not stabilize".into()));
    }
    let n = m.sub(&s);
    if n.nilpotency_index().is_none() {
        return Err(Error::Internal("residual part failed the nilpotency check".into()));
    }
    Ok((s, n, eigenvalues))
}

/// Lagrange projectors P_mu = prod_{nu != mu} (S - nu I) / (mu - nu) onto the
/// eigenspaces of a semisimple matrix with the given distinct eigenvalues.
pub fn spectral_projectors(s: &Mat, eigenvalues: &[GaussianRational]) -> Vec<Mat> {
    let dim = s.nrows();
    let mut projectors = Vec::with_capacity(eigenvalues.len());
    for mu in eigenvalues {
        let mut p = Mat::identity(dim);
        for nu in eigenvalues {
            if nu == mu {
                continue;
            }
            let shifted = s.sub(&Mat::identity(dim).scale(nu));
            let scale = (mu - nu).inv().expect("distinct eigenvalues");
            p = p.mul(&shifted.scale(&scale));
        }
        projectors.push(p);
    }
    debug_assert!({
        let sum = projectors.iter().fold(Mat::zero(dim, dim), |a, b| a.add(b));
        sum.is_identity()
    });
    projectors
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> GaussianRational {
        GaussianRational::from_int(v)
    }

    fn mat(rows: &[&[i64]]) -> Mat {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect())
    }

    #[test]
    fn charpoly_agrees_with_hand_computation() {
        let m = mat(&[&[1, 2], &[3, 4]]);
        // x^2 - 5x - 2
        assert_eq!(charpoly(&m), vec![q(-2), q(-5), q(1)]);
        let p = charpoly(&mat(&[&[2, 1, 0], &[0, 2, 0], &[0, 0, 3]]));
        // (x-2)^2 (x-3) = x^3 - 7x^2 + 16x - 12
        assert_eq!(p, vec![q(-12), q(16), q(-7), q(1)]);
    }

    #[test]
    fn cayley_hamilton_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = rng.gen_range(1..5);
            let mut m = Mat::zero(n, n);
            for i in 0..n {
                for j in 0..n {
                    *m.at_mut(i, j) = GaussianRational::from_parts(
                        rng.gen_range(-3..=3),
                        rng.gen_range(-2..=2),
                        1,
                    )
                    .unwrap();
                }
            }
            assert!(poly_eval_mat(&charpoly(&m), &m).is_zero());
        }
    }

    #[test]
    fn root_extraction() {
        // (x - 2)(x - 3)
        let p = vec![q(6), q(-5), q(1)];
        let mut roots = qi_roots(&p).unwrap();
        roots.sort();
        let mut expected = vec![q(2), q(3)];
        expected.sort();
        assert_eq!(roots, expected);

        // (x - i)(x + i) = x^2 + 1
        let p = vec![q(1), q(0), q(1)];
        let roots = qi_roots(&p).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.contains(&GaussianRational::i()));

        // x^2 - 2 has no roots in Q(i)
        let p = vec![q(-2), q(0), q(1)];
        assert!(matches!(qi_roots(&p), Err(Error::SpectrumNotInQi)));

        // (2x - 1)(x - 2): a non-integral rational root
        let p = vec![q(2), q(-5), q(2)];
        let roots = qi_roots(&p).unwrap();
        assert!(roots.contains(&GaussianRational::from_ratio(1, 2).unwrap()));
    }

    #[test]
    fn jordan_of_a_jordan_block() {
        let m = mat(&[&[1, 1], &[0, 1]]);
        let (s, n) = jordan_chevalley(&m).unwrap();
        assert!(s.is_identity());
        assert_eq!(n, mat(&[&[0, 1], &[0, 0]]));
    }

    #[test]
    fn jordan_of_diagonal_is_trivial() {
        let m = mat(&[&[2, 0], &[0, 5]]);
        let (s, n) = jordan_chevalley(&m).unwrap();
        assert_eq!(s, m);
        assert!(n.is_zero());
    }

    #[test]
    fn jordan_with_distinct_eigenvalues_is_semisimple() {
        let m = mat(&[&[2, 1], &[0, 3]]);
        let (s, n, eig) = jordan_with_spectrum(&m).unwrap();
        assert_eq!(s, m);
        assert!(n.is_zero());
        let mut eig = eig;
        eig.sort();
        assert_eq!(eig, vec![q(2), q(3)]);
    }

    #[test]
    fn jordan_splits_a_mixed_block_matrix() {
        let m = mat(&[&[2, 1, 0], &[0, 2, 0], &[0, 0, 3]]);
        let (s, n, eig) = jordan_with_spectrum(&m).unwrap();
        assert_eq!(s.add(&n), m);
        assert_eq!(s.mul(&n), n.mul(&s));
        assert_eq!(n.nilpotency_index(), Some(2));
        assert_eq!(s, mat(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, 3]]));
        assert_eq!(eig.len(), 2);
    }

    #[test]
    fn jordan_rejects_irrational_spectrum() {
        let m = mat(&[&[0, 2], &[1, 0]]);
        assert!(matches!(jordan_chevalley(&m), Err(Error::SpectrumNotInQi)));
    }

    #[test]
    fn projectors_resolve_identity_and_commute() {
        let m = mat(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, 3]]);
        let eig = vec![q(2), q(3)];
        let ps = spectral_projectors(&m, &eig);
        assert_eq!(ps.len(), 2);
        let sum = ps[0].add(&ps[1]);
        assert!(sum.is_identity());
        assert!(ps[0].mul(&ps[1]).is_zero());
        let rebuilt = ps[0].scale(&q(2)).add(&ps[1].scale(&q(3)));
        assert_eq!(rebuilt, m);
    }
}
