//! Multi-indices and the graded monomial basis of a truncated polynomial ring.
//!
//! Monomials are ordered by total degree first; within a degree, the monomial
//! whose exponent vector is lexicographically larger comes first. In two
//! variables the basis therefore reads 1, x1, x2, x1^2, x1 x2, x2^2, ...
//! Every matrix in this crate indexes its rows and columns by this order.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

/// Exponent vector of a monomial x^alpha = x1^{a1} ... xn^{an}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(nvars: usize) -> Self {
        MultiIndex(vec![0; nvars])
    }

    /// The standard basis exponent e_i (a single x_{i+1}).
    pub fn unit(nvars: usize, i: usize) -> Self {
        let mut v = vec![0; nvars];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.0.len(), other.0.len());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise difference, or None when any entry would go negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        debug_assert_eq!(self.0.len(), other.0.len());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for (a, b) in self.0.iter().zip(&other.0) {
                match b.cmp(a) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "x{}^{}", i + 1, e)?;
            }
        }
        Ok(())
    }
}

/// All multi-indices in `nvars` variables of total degree at most `order`,
/// sorted in the basis order above.
pub fn monomials_upto(nvars: usize, order: u32) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(basis_dim(nvars, order));
    let mut current = vec![0u32; nvars];
    for d in 0..=order {
        emit_degree(nvars, d, 0, d, &mut current, &mut out);
    }
    debug_assert!(out.windows(2).all(|w| w[0] < w[1]));
    out
}

fn emit_degree(
    nvars: usize,
    degree: u32,
    pos: usize,
    remaining: u32,
    current: &mut Vec<u32>,
    out: &mut Vec<MultiIndex>,
) {
    if pos == nvars {
        if remaining == 0 {
            out.push(MultiIndex(current.clone()));
        }
        return;
    }
    if pos + 1 == nvars {
        current[pos] = remaining;
        out.push(MultiIndex(current.clone()));
        current[pos] = 0;
        return;
    }
    // Larger exponent in the earlier variable sorts first.
    for e in (0..=remaining).rev() {
        current[pos] = e;
        emit_degree(nvars, degree, pos + 1, remaining - e, current, out);
    }
    current[pos] = 0;
}

/// Number of monomials of degree at most `order` in `nvars` variables,
/// i.e. binomial(nvars + order, nvars).
pub fn basis_dim(nvars: usize, order: u32) -> usize {
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for k in 1..=nvars as u128 {
        num *= order as u128 + k;
        den *= k;
    }
    (num / den) as usize
}

/// The monomial basis of polynomials of degree <= order, with O(1) lookup of
/// a monomial's position.
#[derive(Clone, Debug)]
pub struct Basis {
    pub nvars: usize,
    pub order: u32,
    pub monomials: Vec<MultiIndex>,
    index: HashMap<MultiIndex, usize>,
}

impl PartialEq for Basis {
    /// Bases agree exactly when their parameters do; the monomial list and
    /// lookup table are derived data.
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.order == other.order
    }
}

impl Eq for Basis {}

impl Basis {
    pub fn new(nvars: usize, order: u32) -> Self {
        let monomials = monomials_upto(nvars, order);
        let index = monomials.iter().cloned().zip(0..).collect();
        Basis { nvars, order, monomials, index }
    }

    pub fn dim(&self) -> usize {
        self.monomials.len()
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.index.get(alpha).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    #[test]
    fn two_variable_order_is_pinned() {
        let basis = monomials_upto(2, 2);
        let expected: Vec<MultiIndex> =
            [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]].iter().map(|v| mi(v)).collect();
        assert_eq!(basis, expected);
    }

    #[test]
    fn ordering_respects_degree_then_first_variable() {
        assert!(mi(&[1, 0]) < mi(&[0, 1]));
        assert!(mi(&[0, 1]) < mi(&[2, 0]));
        assert!(mi(&[2, 0]) < mi(&[1, 1]));
        assert!(mi(&[3, 0, 0]) < mi(&[2, 1, 0]));
        assert!(mi(&[2, 1, 0]) < mi(&[2, 0, 1]));
    }

    #[test]
    fn dimensions_match_binomials() {
        assert_eq!(basis_dim(1, 5), 6);
        assert_eq!(basis_dim(2, 3), 10);
        assert_eq!(basis_dim(3, 4), 35);
        assert_eq!(monomials_upto(3, 4).len(), 35);
    }

    #[test]
    fn basis_positions_round_trip() {
        let b = Basis::new(3, 3);
        for (k, m) in b.monomials.iter().enumerate() {
            assert_eq!(b.position(m), Some(k));
        }
        assert_eq!(b.position(&mi(&[4, 0, 0])), None);
    }

    #[test]
    fn display_forms() {
        assert_eq!(mi(&[0, 0]).to_string(), "1");
        assert_eq!(mi(&[1, 0]).to_string(), "x1");
        assert_eq!(mi(&[2, 3]).to_string(), "x1^2*x2^3");
        assert_eq!(mi(&[0, 1, 1]).to_string(), "x2*x3");
    }
}
