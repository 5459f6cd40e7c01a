//! Closed-form expressions in one scalar parameter `t`.
//!
//! An [`ExpPoly`] is a finite sum of terms `c * base^t * t^p` (multiplicative
//! characters) or `c * exp(freq*t) * t^p` (additive characters), with exact
//! Gaussian-rational data throughout. Matrices of these expressions
//! ([`ExpMat`]) describe one-parameter families of truncated-jet operators:
//! discrete iteration `F^t` in the multiplicative kind, flows `exp(tV)` in the
//! exponential kind. Both interpolations are produced here, discrete from the
//! multiplicative Jordan splitting of an operator and continuous by solving
//! the defining linear ODE column by column.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::GaussianRational;
use crate::jets::{as_operator, vf_as_operator, JetDiffeo, JetOperator, JetVectorField};
use crate::jordan::{jordan_with_spectrum, spectral_projectors};
use crate::matrix::Mat;
use crate::series::TruncatedSeries;

/// Which character family the `t`-dependence ranges over.
///
/// Multiplicative terms look like `base^t` and compose by multiplying bases;
/// exponential terms look like `exp(freq*t)` and compose by adding
/// frequencies. The two kinds never mix inside one expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharKind {
    /// Terms `c * base^t * t^p` with nonzero `base`.
    Mult,
    /// Terms `c * exp(freq * t) * t^p`.
    Exp,
}

/// A finite sum of character terms in the parameter `t`.
///
/// Keys are `(charge, power)` where `charge` is the base (multiplicative
/// kind) or the frequency (exponential kind); values are the coefficients.
/// Zero coefficients are never stored. In the multiplicative kind a zero
/// charge is rejected, since `0^t` has no value at `t <= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpPoly {
    kind: CharKind,
    terms: BTreeMap<(GaussianRational, u32), GaussianRational>,
}

impl ExpPoly {
    pub fn zero(kind: CharKind) -> Self {
        ExpPoly { kind, terms: BTreeMap::new() }
    }

    /// The constant expression `c` (charge the kind's identity: base 1, or
    /// frequency 0).
    pub fn constant(kind: CharKind, c: &GaussianRational) -> Self {
        let mut p = ExpPoly::zero(kind);
        p.add_term(&Self::trivial_charge(kind), 0, c);
        p
    }

    /// A single term `c * char(charge)^t * t^power`.
    pub fn term(
        kind: CharKind,
        charge: &GaussianRational,
        power: u32,
        c: &GaussianRational,
    ) -> Result<Self> {
        if kind == CharKind::Mult && charge.is_zero() {
            return Err(Error::ZeroArgument("character base"));
        }
        let mut p = ExpPoly::zero(kind);
        p.add_term(charge, power, c);
        Ok(p)
    }

    fn trivial_charge(kind: CharKind) -> GaussianRational {
        match kind {
            CharKind::Mult => GaussianRational::one(),
            CharKind::Exp => GaussianRational::zero(),
        }
    }

    pub fn kind(&self) -> CharKind {
        self.kind
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterates terms as `(charge, power, coefficient)`, charge-major.
    pub fn terms(&self) -> impl Iterator<Item = (&GaussianRational, u32, &GaussianRational)> {
        self.terms.iter().map(|((ch, p), c)| (ch, *p, c))
    }

    fn add_term(&mut self, charge: &GaussianRational, power: u32, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        let key = (charge.clone(), power);
        let entry = self.terms.entry(key.clone()).or_insert_with(GaussianRational::zero);
        *entry = &*entry + c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    fn check_kind(&self, other: &ExpPoly) -> Result<()> {
        if self.kind != other.kind {
            return Err(Error::MixedCharacterKinds);
        }
        Ok(())
    }

    pub fn add(&self, other: &ExpPoly) -> Result<ExpPoly> {
        self.check_kind(other)?;
        let mut out = self.clone();
        for ((ch, p), c) in &other.terms {
            out.add_term(ch, *p, c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> ExpPoly {
        let mut out = ExpPoly::zero(self.kind);
        for ((ch, p), c) in &self.terms {
            out.add_term(ch, *p, &-c);
        }
        out
    }

    pub fn sub(&self, other: &ExpPoly) -> Result<ExpPoly> {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &GaussianRational) -> ExpPoly {
        let mut out = ExpPoly::zero(self.kind);
        for ((ch, p), c) in &self.terms {
            out.add_term(ch, *p, &(c * s));
        }
        out
    }

    /// Product of two expressions. Charges combine by the kind's group law:
    /// bases multiply, frequencies add.
    pub fn mul(&self, other: &ExpPoly) -> Result<ExpPoly> {
        self.check_kind(other)?;
        let mut out = ExpPoly::zero(self.kind);
        for ((ch_a, p_a), c_a) in &self.terms {
            for ((ch_b, p_b), c_b) in &other.terms {
                let charge = match self.kind {
                    CharKind::Mult => ch_a * ch_b,
                    CharKind::Exp => ch_a + ch_b,
                };
                out.add_term(&charge, p_a + p_b, &(c_a * c_b));
            }
        }
        Ok(out)
    }

    /// Derivative in `t`. Only exponential-kind expressions have a
    /// rational-coefficient derivative; `d/dt base^t` would need `log(base)`.
    pub fn dt(&self) -> Result<ExpPoly> {
        if self.kind != CharKind::Exp {
            return Err(Error::MixedCharacterKinds);
        }
        let mut out = ExpPoly::zero(CharKind::Exp);
        for ((freq, p), c) in &self.terms {
            out.add_term(freq, *p, &(c * freq));
            if *p > 0 {
                out.add_term(freq, p - 1, &(c * &GaussianRational::from_int(*p as i64)));
            }
        }
        Ok(out)
    }

    /// Exact evaluation at an integer parameter value.
    ///
    /// Multiplicative expressions evaluate exactly at every integer (negative
    /// `t` inverts the bases). Exponential expressions evaluate exactly only
    /// where every character value is rational: when all frequencies are zero
    /// (a polynomial) or at `t = 0`.
    pub fn eval_int(&self, t: i64) -> Result<GaussianRational> {
        let tq = GaussianRational::from_int(t);
        let mut acc = GaussianRational::zero();
        for ((ch, p), c) in &self.terms {
            let char_val = match self.kind {
                CharKind::Mult => ch.pow(t)?,
                CharKind::Exp => {
                    if !ch.is_zero() && t != 0 {
                        return Err(Error::MixedCharacterKinds);
                    }
                    GaussianRational::one()
                }
            };
            let tp = tq.pow(*p as i64).expect("nonnegative power");
            acc = &acc + &(&(c * &char_val) * &tp);
        }
        Ok(acc)
    }

    /// Floating-point evaluation at a real parameter value.
    ///
    /// Multiplicative characters use the principal branch of `base^t`, i.e.
    /// `exp(t Log base)` with the argument in `(-pi, pi]`.
    pub fn eval_num(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((ch, p), c) in &self.terms {
            let (re, im) = ch.to_f64();
            let z = Complex64::new(re, im);
            let char_val = match self.kind {
                CharKind::Mult => (z.ln() * t).exp(),
                CharKind::Exp => (z * t).exp(),
            };
            let (cre, cim) = c.to_f64();
            acc += Complex64::new(cre, cim) * char_val * t.powi(*p as i32);
        }
        acc
    }
}

impl fmt::Display for ExpPoly {
    /// Renders as a `+`-joined sum of `coeff*char*t^p` factors, e.g.
    /// `(1/2)*(2)^t*t^2 + (3)^t` or `(2)*exp((1+i)*t)*t`. Coefficients other
    /// than 1 are parenthesized; the trivial character and `t^0` are
    /// omitted. Contains no commas, so the output embeds directly in CSV.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((ch, p), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut factors: Vec<String> = Vec::new();
            if !c.is_one() {
                factors.push(format!("({})", c));
            }
            let trivial = *ch == Self::trivial_charge(self.kind);
            if !trivial {
                match self.kind {
                    CharKind::Mult => factors.push(format!("({})^t", ch)),
                    CharKind::Exp => factors.push(format!("exp(({})*t)", ch)),
                }
            }
            match *p {
                0 => {}
                1 => factors.push("t".to_string()),
                k => factors.push(format!("t^{}", k)),
            }
            if factors.is_empty() {
                factors.push("1".to_string());
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// A matrix of [`ExpPoly`] entries, all of one character kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpMat {
    kind: CharKind,
    nrows: usize,
    ncols: usize,
    entries: Vec<ExpPoly>,
}

impl ExpMat {
    pub fn zero(kind: CharKind, nrows: usize, ncols: usize) -> Self {
        ExpMat { kind, nrows, ncols, entries: vec![ExpPoly::zero(kind); nrows * ncols] }
    }

    pub fn kind(&self) -> CharKind {
        self.kind
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn at(&self, i: usize, j: usize) -> &ExpPoly {
        &self.entries[i * self.ncols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: ExpPoly) -> Result<()> {
        if v.kind() != self.kind {
            return Err(Error::MixedCharacterKinds);
        }
        self.entries[i * self.ncols + j] = v;
        Ok(())
    }

    /// Entrywise exact evaluation at an integer parameter value.
    pub fn eval_int(&self, t: i64) -> Result<Mat> {
        let mut m = Mat::zero(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                *m.at_mut(i, j) = self.at(i, j).eval_int(t)?;
            }
        }
        Ok(m)
    }

    /// Entrywise floating-point evaluation.
    pub fn eval_num(&self, t: f64) -> Vec<Vec<Complex64>> {
        (0..self.nrows)
            .map(|i| (0..self.ncols).map(|j| self.at(i, j).eval_num(t)).collect())
            .collect()
    }

    /// Entrywise derivative in `t` (exponential kind only).
    pub fn dt(&self) -> Result<ExpMat> {
        let mut out = ExpMat::zero(self.kind, self.nrows, self.ncols);
        for (k, e) in self.entries.iter().enumerate() {
            out.entries[k] = e.dt()?;
        }
        Ok(out)
    }

    /// Left multiplication by a constant matrix: `m * self`.
    pub fn lmul_const(&self, m: &Mat) -> Result<ExpMat> {
        if m.ncols() != self.nrows {
            return Err(Error::Internal("dimension mismatch in lmul_const".into()));
        }
        let mut out = ExpMat::zero(self.kind, m.nrows(), self.ncols);
        for i in 0..m.nrows() {
            for j in 0..self.ncols {
                let mut acc = ExpPoly::zero(self.kind);
                for k in 0..self.nrows {
                    if m.at(i, k).is_zero() {
                        continue;
                    }
                    acc = acc.add(&self.at(k, j).scale(m.at(i, k)))?;
                }
                out.entries[i * self.ncols + j] = acc;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &ExpMat) -> Result<ExpMat> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::Internal("dimension mismatch in ExpMat::sub".into()));
        }
        let mut out = ExpMat::zero(self.kind, self.nrows, self.ncols);
        for (k, (a, b)) in self.entries.iter().zip(&other.entries).enumerate() {
            out.entries[k] = a.sub(b)?;
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }
}

/// Solves `y' = lambda * y + rhs(t)`, `y(0) = y0`, for exponential-kind
/// right-hand sides, returning the unique exponential-polynomial solution.
///
/// Each right-hand term `c * exp(mu t) t^k` contributes a particular
/// solution by undetermined coefficients when `mu != lambda`, and the
/// resonant primitive `c * exp(lambda t) t^(k+1) / (k+1)` when `mu = lambda`.
/// A final homogeneous term `a * exp(lambda t)` matches the initial value.
pub fn solve_scalar_ode(
    lambda: &GaussianRational,
    rhs: &ExpPoly,
    y0: &GaussianRational,
) -> Result<ExpPoly> {
    if rhs.kind() != CharKind::Exp {
        return Err(Error::MixedCharacterKinds);
    }
    let mut sol = ExpPoly::zero(CharKind::Exp);
    for (mu, k, c) in rhs.terms() {
        if mu == lambda {
            let kq = GaussianRational::from_ratio(1, (k as i64) + 1).expect("k + 1 > 0");
            sol = sol.add(&ExpPoly::term(CharKind::Exp, mu, k + 1, &(c * &kq))?)?;
        } else {
            // Ansatz sum_j a_j exp(mu t) t^j for j <= k. Matching powers of t
            // in y' - lambda y = c exp(mu t) t^k gives, with nu = mu - lambda:
            //   a_k * nu = c,   a_j * nu + (j+1) a_{j+1} = 0  for j < k.
            let nu = mu - lambda;
            let nu_inv = nu.inv().expect("nu nonzero off resonance");
            let mut a = c * &nu_inv;
            sol = sol.add(&ExpPoly::term(CharKind::Exp, mu, k, &a)?)?;
            for j in (0..k).rev() {
                let j1 = GaussianRational::from_int((j as i64) + 1);
                a = &-&(&a * &j1) * &nu_inv;
                sol = sol.add(&ExpPoly::term(CharKind::Exp, mu, j, &a)?)?;
            }
        }
    }
    let at_zero = value_at_zero(&sol);
    let a0 = y0 - &at_zero;
    sol = sol.add(&ExpPoly::term(CharKind::Exp, lambda, 0, &a0)?)?;
    Ok(sol)
}

/// Value of an exponential-kind expression at `t = 0` (exact: every
/// character is 1 there, and `t^p` vanishes for `p > 0`).
fn value_at_zero(p: &ExpPoly) -> GaussianRational {
    let mut acc = GaussianRational::zero();
    for (_, pow, c) in p.terms() {
        if pow == 0 {
            acc = &acc + c;
        }
    }
    acc
}

/// The flow `exp(tV)` of a vector field whose linear part is lower
/// triangular, as a matrix of exponential-kind expressions acting on jet
/// coefficient columns.
///
/// Column `j` of the result solves `y' = D y` with `y(0) = e_j`, where
/// `D = vf_as_operator(V)`; this is the coefficient-space statement of
/// `d/dt (h o Phi_t) = (Dh) o Phi_t` read one basis column at a time.
/// Entries are solved in the order that makes `D` strictly triangular off
/// the diagonal: degree ascending, same-degree positions reversed.
pub fn flow_operator(v: &JetVectorField) -> Result<ExpMat> {
    if !v.has_lower_triangular_linear_part() {
        return Err(Error::NonTriangularLinearPart);
    }
    let d = vf_as_operator(v);
    let mat = d.matrix();
    let dim = d.dim();
    let traversal = triangular_traversal(&d);
    let mut rank = vec![0usize; dim];
    for (r, &i) in traversal.iter().enumerate() {
        rank[i] = r;
    }

    let mut out = ExpMat::zero(CharKind::Exp, dim, dim);
    for j in 0..dim {
        let mut col: Vec<ExpPoly> = vec![ExpPoly::zero(CharKind::Exp); dim];
        // Row i of the ODE: col_i' = sum_k D[i][k] col_k with col_i(0) =
        // delta_{ij}. Every off-diagonal dependence points at a row solved
        // earlier in traversal order, so the right-hand side is known.
        for &i in &traversal {
            let mut rhs = ExpPoly::zero(CharKind::Exp);
            for k in 0..dim {
                if k == i || mat.at(i, k).is_zero() {
                    continue;
                }
                debug_assert!(rank[k] < rank[i], "dependence must respect traversal order");
                rhs = rhs.add(&col[k].scale(mat.at(i, k)))?;
            }
            let y0 = if i == j { GaussianRational::one() } else { GaussianRational::zero() };
            col[i] = solve_scalar_ode(mat.at(i, i), &rhs, &y0)?;
        }
        for (i, e) in col.into_iter().enumerate() {
            out.set(i, j, e)?;
        }
    }
    Ok(out)
}

/// Basis positions in the order that triangularizes operators with lower
/// triangular linear part: degree ascending, same-degree positions reversed.
fn triangular_traversal(op: &JetOperator) -> Vec<usize> {
    let mons = &op.basis().monomials;
    let mut order: Vec<usize> = (0..op.dim()).collect();
    order.sort_by(|&a, &b| mons[a].degree().cmp(&mons[b].degree()).then_with(|| b.cmp(&a)));
    order
}

/// The discrete iteration `F^t` of a jet map whose linear part is lower
/// triangular with all eigenvalues in `Q(i)`, as a matrix of
/// multiplicative-kind expressions.
///
/// Splits the operator `M` of `F` multiplicatively as `M = U * S` with `S`
/// semisimple and `U` unipotent (they commute), then interpolates each
/// factor: `S^t = sum_mu mu^t P_mu` over spectral projectors, and
/// `U^t = sum_k binom(t,k) (U - I)^k`, a finite sum since `U - I` is
/// nilpotent. `binom(t,k)` expands to a rational polynomial in `t`.
pub fn power_operator(f: &JetDiffeo) -> Result<ExpMat> {
    if !f.has_lower_triangular_linear_part() {
        return Err(Error::NonTriangularLinearPart);
    }
    let op = as_operator(f);
    let m = op.matrix();
    let dim = op.dim();
    let (s, _n, spectrum) = jordan_with_spectrum(m)?;
    let s_inv = s.inverse().ok_or(Error::SingularLinearPart)?;
    let u = s_inv.mul(m);

    // Semisimple interpolation: sum over distinct eigenvalues.
    let projectors = spectral_projectors(&s, &spectrum);
    let mut s_t = ExpMat::zero(CharKind::Mult, dim, dim);
    for (mu, p) in spectrum.iter().zip(&projectors) {
        if mu.is_zero() {
            return Err(Error::SingularLinearPart);
        }
        for i in 0..dim {
            for j in 0..dim {
                if p.at(i, j).is_zero() {
                    continue;
                }
                let term = ExpPoly::term(CharKind::Mult, mu, 0, p.at(i, j))?;
                let cur = s_t.at(i, j).add(&term)?;
                s_t.set(i, j, cur)?;
            }
        }
    }

    // Unipotent interpolation. binom(t,k) = prod_{j<k} (t - j) / k! is built
    // iteratively: binom(t,k) = binom(t,k-1) * (t - (k-1)) / k.
    let nil = u.sub(&Mat::identity(dim));
    let cap = nil.nilpotency_index().ok_or(Error::NonUnipotentLinearPart)?;
    let mut u_t = ExpMat::zero(CharKind::Mult, dim, dim);
    let t_poly = ExpPoly::term(
        CharKind::Mult,
        &GaussianRational::one(),
        1,
        &GaussianRational::one(),
    )?;
    let mut binom = ExpPoly::constant(CharKind::Mult, &GaussianRational::one());
    let mut nil_pow = Mat::identity(dim);
    for k in 0..cap.max(1) {
        if k > 0 {
            let shift =
                ExpPoly::constant(CharKind::Mult, &GaussianRational::from_int((k as i64) - 1));
            let inv_k = GaussianRational::from_ratio(1, k as i64).expect("k > 0");
            binom = binom.mul(&t_poly.sub(&shift)?)?.scale(&inv_k);
            nil_pow = nil_pow.mul(&nil);
        }
        for i in 0..dim {
            for j in 0..dim {
                if nil_pow.at(i, j).is_zero() {
                    continue;
                }
                let cur = u_t.at(i, j).add(&binom.scale(nil_pow.at(i, j)))?;
                u_t.set(i, j, cur)?;
            }
        }
    }

    // M^t = U^t S^t entrywise (the factors commute).
    let mut out = ExpMat::zero(CharKind::Mult, dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = ExpPoly::zero(CharKind::Mult);
            for k in 0..dim {
                if u_t.at(i, k).is_zero() || s_t.at(k, j).is_zero() {
                    continue;
                }
                acc = acc.add(&u_t.at(i, k).mul(s_t.at(k, j))?)?;
            }
            out.set(i, j, acc)?;
        }
    }
    Ok(out)
}

/// True when every entry of a multiplicative-kind matrix uses no positive
/// power of `t`. Iteration matrices of maps with semisimple linear part and
/// no resonant terms have this shape.
pub fn semisimple_coefficient_check(m: &ExpMat) -> bool {
    (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| m.at(i, j).terms().all(|(_, p, _)| p == 0)))
}

/// Applies an interpolation matrix at integer time `t` to the coefficient
/// column of coordinate `coord`, reading off that coordinate of the time-`t`
/// map exactly. `op` must be the jet operator the matrix was built from.
pub fn interpolated_coordinate(
    m: &ExpMat,
    op: &JetOperator,
    coord: usize,
    t: i64,
) -> Result<TruncatedSeries> {
    let mt = m.eval_int(t)?;
    let var = TruncatedSeries::variable(op.nvars(), op.order(), coord);
    let col = op.series_to_column(&var);
    let image = mt.matvec(&col);
    Ok(op.column_to_series(&image))
}
