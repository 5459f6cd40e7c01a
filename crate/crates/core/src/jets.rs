//! Jets of formal diffeomorphisms and singular vector fields, and the linear
//! operators they induce on the jet space C_p[[x]].
//!
//! A diffeomorphism F acts on functions by pullback, h -> h o F. On the
//! monomial basis this gives a matrix whose column at x^alpha holds the
//! coefficients of the product of component powers. With that convention the
//! operator of a composition multiplies in reverse:
//! as_operator(F o G) = as_operator(G) * as_operator(F).
//! All tests and callers rely on this identity in exactly this order.

use crate::error::{Error, Result};
use crate::gaussian::GaussianRational;
use crate::matrix::Mat;
use crate::multiindex::{Basis, MultiIndex};
use crate::series::TruncatedSeries;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetDiffeo {
    nvars: usize,
    order: u32,
    components: Vec<TruncatedSeries>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetVectorField {
    nvars: usize,
    order: u32,
    components: Vec<TruncatedSeries>,
}

/// Eigenvalues of a triangular linear part, in variable order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spectrum {
    pub eigenvalues: Vec<GaussianRational>,
}

fn validate_components(components: &[TruncatedSeries]) -> Result<(usize, u32)> {
    let nvars = components.len();
    if nvars == 0 {
        return Err(Error::ZeroArgument("component list"));
    }
    let order = components[0].order();
    for c in components {
        if c.nvars() != nvars {
            return Err(Error::VariableCountMismatch { expected: nvars, found: c.nvars() });
        }
        if c.order() != order {
            return Err(Error::OrderMismatch { expected: order, found: c.order() });
        }
        if !c.constant_term().is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
    }
    Ok((nvars, order))
}

/// Linear-part matrix of a component list: entry (i, j) is the coefficient
/// of x_{j+1} in component i.
fn linear_part_of(components: &[TruncatedSeries], nvars: usize) -> Mat {
    let mut l = Mat::zero(nvars, nvars);
    for (i, c) in components.iter().enumerate() {
        for j in 0..nvars {
            *l.at_mut(i, j) = c.coeff(&MultiIndex::unit(nvars, j));
        }
    }
    l
}

fn is_lower_triangular(l: &Mat) -> bool {
    for i in 0..l.nrows() {
        for j in (i + 1)..l.ncols() {
            if !l.at(i, j).is_zero() {
                return false;
            }
        }
    }
    true
}

/// Applies a constant matrix to a component vector: out_i = sum_j L_ij c_j.
fn apply_linear(l: &Mat, components: &[TruncatedSeries]) -> Vec<TruncatedSeries> {
    let nvars = components.len();
    let order = components[0].order();
    (0..l.nrows())
        .map(|i| {
            let mut acc = TruncatedSeries::zero(components[0].nvars(), order);
            for (j, c) in components.iter().enumerate().take(nvars) {
                if !l.at(i, j).is_zero() {
                    acc = acc.add(&c.scale(l.at(i, j))).expect("same shape");
                }
            }
            acc
        })
        .collect()
}

impl JetDiffeo {
    pub fn new(components: Vec<TruncatedSeries>) -> Result<Self> {
        let (nvars, order) = validate_components(&components)?;
        let l = linear_part_of(&components, nvars);
        if l.inverse().is_none() {
            return Err(Error::SingularLinearPart);
        }
        Ok(JetDiffeo { nvars, order, components })
    }

    pub fn identity(nvars: usize, order: u32) -> Self {
        let components =
            (0..nvars).map(|i| TruncatedSeries::variable(nvars, order, i)).collect();
        JetDiffeo { nvars, order, components }
    }

    pub fn linear_from_matrix(l: &Mat, order: u32) -> Result<Self> {
        assert_eq!(l.nrows(), l.ncols());
        let nvars = l.nrows();
        let identity = JetDiffeo::identity(nvars, order);
        JetDiffeo::new(apply_linear(l, &identity.components))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn components(&self) -> &[TruncatedSeries] {
        &self.components
    }

    pub fn linear_part(&self) -> Mat {
        linear_part_of(&self.components, self.nvars)
    }

    pub fn has_lower_triangular_linear_part(&self) -> bool {
        is_lower_triangular(&self.linear_part())
    }

    pub fn has_unipotent_linear_part(&self) -> bool {
        let l = self.linear_part();
        l.sub(&Mat::identity(self.nvars)).nilpotency_index().is_some()
    }

    /// Diagonal of the linear part; requires lower-triangular shape so the
    /// diagonal really is the spectrum.
    pub fn spectrum(&self) -> Result<Spectrum> {
        let l = self.linear_part();
        if !is_lower_triangular(&l) {
            return Err(Error::NonTriangularLinearPart);
        }
        Ok(Spectrum { eigenvalues: (0..self.nvars).map(|i| l.at(i, i).clone()).collect() })
    }

    /// (F o G)(x) = F(G(x)); the result order is the minimum of the two.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.nvars != other.nvars {
            return Err(Error::VariableCountMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        let components = self
            .components
            .iter()
            .map(|c| c.compose(&other.components))
            .collect::<Result<Vec<_>>>()?;
        JetDiffeo::new(components)
    }

    /// Compositional inverse, by Newton updates G <- G + L^{-1}(x - F(G)).
    /// Each update extends the matched degree by at least one.
    pub fn inverse(&self) -> Result<Self> {
        let l_inv = self.linear_part().inverse().ok_or(Error::SingularLinearPart)?;
        let id = JetDiffeo::identity(self.nvars, self.order);
        let mut g = JetDiffeo::new(apply_linear(&l_inv, &id.components))?;
        for _ in 0..self.order {
            let fg = self.compose(&g)?;
            let residual: Vec<TruncatedSeries> = id
                .components
                .iter()
                .zip(&fg.components)
                .map(|(x, c)| x.sub(c))
                .collect::<Result<Vec<_>>>()?;
            if residual.iter().all(TruncatedSeries::is_zero) {
                break;
            }
            let correction = apply_linear(&l_inv, &residual);
            let components = g
                .components
                .iter()
                .zip(&correction)
                .map(|(a, b)| a.add(b))
                .collect::<Result<Vec<_>>>()?;
            g = JetDiffeo { nvars: self.nvars, order: self.order, components };
        }
        debug_assert!(self.compose(&g).unwrap() == id);
        Ok(g)
    }

    /// F^k by repeated squaring; negative k through the inverse.
    pub fn power(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = JetDiffeo::identity(self.nvars, self.order);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.compose(&sq)?;
            }
        }
        Ok(acc)
    }
}

impl JetVectorField {
    pub fn new(components: Vec<TruncatedSeries>) -> Result<Self> {
        let (nvars, order) = validate_components(&components)?;
        Ok(JetVectorField { nvars, order, components })
    }

    pub fn zero(nvars: usize, order: u32) -> Self {
        let components = (0..nvars).map(|_| TruncatedSeries::zero(nvars, order)).collect();
        JetVectorField { nvars, order, components }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn components(&self) -> &[TruncatedSeries] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(TruncatedSeries::is_zero)
    }

    pub fn linear_part(&self) -> Mat {
        linear_part_of(&self.components, self.nvars)
    }

    pub fn has_lower_triangular_linear_part(&self) -> bool {
        is_lower_triangular(&self.linear_part())
    }

    pub fn has_nilpotent_linear_part(&self) -> bool {
        self.linear_part().nilpotency_index().is_some()
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        let l = self.linear_part();
        if !is_lower_triangular(&l) {
            return Err(Error::NonTriangularLinearPart);
        }
        Ok(Spectrum { eigenvalues: (0..self.nvars).map(|i| l.at(i, i).clone()).collect() })
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        JetVectorField {
            nvars: self.nvars,
            order: self.order,
            components: self.components.iter().map(|s| s.scale(c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.nvars != other.nvars {
            return Err(Error::VariableCountMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        JetVectorField::new(components)
    }
}

/// The induced operator on the monomial basis of C_p[[x]].
#[derive(Clone, Debug, PartialEq)]
pub struct JetOperator {
    nvars: usize,
    order: u32,
    basis: Basis,
    matrix: Mat,
}

impl JetOperator {
    pub fn from_matrix(nvars: usize, order: u32, matrix: Mat) -> Result<Self> {
        let basis = Basis::new(nvars, order);
        if matrix.nrows() != basis.dim() || matrix.ncols() != basis.dim() {
            return Err(Error::Internal(format!(
                "operator matrix is {}x{}, expected {}",
                matrix.nrows(),
                matrix.ncols(),
                basis.dim()
            )));
        }
        Ok(JetOperator { nvars, order, basis, matrix })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn series_to_column(&self, f: &TruncatedSeries) -> Vec<GaussianRational> {
        let mut col = vec![GaussianRational::zero(); self.basis.dim()];
        for (alpha, c) in f.terms() {
            let pos = self.basis.position(alpha).expect("degree within order");
            col[pos] = c.clone();
        }
        col
    }

    pub fn column_to_series(&self, col: &[GaussianRational]) -> TruncatedSeries {
        TruncatedSeries::from_terms(
            self.nvars,
            self.order,
            col.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (self.basis.monomials[k].clone(), c.clone())),
        )
    }

    /// Image of a series under the operator.
    pub fn apply(&self, f: &TruncatedSeries) -> Result<TruncatedSeries> {
        if f.nvars() != self.nvars {
            return Err(Error::VariableCountMismatch { expected: self.nvars, found: f.nvars() });
        }
        if f.order() != self.order {
            return Err(Error::OrderMismatch { expected: self.order, found: f.order() });
        }
        let col = self.series_to_column(f);
        Ok(self.column_to_series(&self.matrix.matvec(&col)))
    }

    /// Image of the basis monomial x^alpha, read off a matrix column.
    pub fn image_of(&self, alpha: &MultiIndex) -> Option<TruncatedSeries> {
        let pos = self.basis.position(alpha)?;
        Some(self.column_to_series(&self.matrix.col(pos)))
    }

    /// Multiplicativity on all basis pairs within the truncation order.
    /// A pullback operator of an automorphism must pass this exactly.
    pub fn is_automorphism(&self) -> bool {
        let images: Vec<TruncatedSeries> =
            (0..self.dim()).map(|j| self.column_to_series(&self.matrix.col(j))).collect();
        for (a, alpha) in self.basis.monomials.iter().enumerate() {
            for (b, beta) in self.basis.monomials.iter().enumerate() {
                if alpha.degree() + beta.degree() > self.order || a > b {
                    continue;
                }
                let sum = alpha.add(beta);
                let pos = self.basis.position(&sum).expect("within order");
                let lhs = &images[pos];
                let rhs = images[a].mul(&images[b]).expect("same shape");
                if *lhs != rhs {
                    return false;
                }
            }
        }
        true
    }

    /// Leibniz identity on all basis pairs within the truncation order.
    pub fn is_derivation(&self) -> bool {
        let images: Vec<TruncatedSeries> =
            (0..self.dim()).map(|j| self.column_to_series(&self.matrix.col(j))).collect();
        for (a, alpha) in self.basis.monomials.iter().enumerate() {
            for (b, beta) in self.basis.monomials.iter().enumerate() {
                if alpha.degree() + beta.degree() > self.order || a > b {
                    continue;
                }
                let sum = alpha.add(beta);
                let pos = self.basis.position(&sum).expect("within order");
                let x_alpha = TruncatedSeries::monomial(
                    self.nvars,
                    self.order,
                    alpha.clone(),
                    GaussianRational::one(),
                );
                let x_beta = TruncatedSeries::monomial(
                    self.nvars,
                    self.order,
                    beta.clone(),
                    GaussianRational::one(),
                );
                let rhs = images[a]
                    .mul(&x_beta)
                    .and_then(|left| images[b].mul(&x_alpha).and_then(|right| left.add(&right)))
                    .expect("same shape");
                if images[pos] != rhs {
                    return false;
                }
            }
        }
        true
    }

    /// Reads the coordinate images off the operator and validates them as a
    /// diffeomorphism.
    pub fn extract_diffeo(&self) -> Result<JetDiffeo> {
        let components = (0..self.nvars)
            .map(|i| {
                self.image_of(&MultiIndex::unit(self.nvars, i))
                    .expect("coordinates are basis monomials")
            })
            .collect();
        JetDiffeo::new(components)
    }

    pub fn extract_vector_field(&self) -> Result<JetVectorField> {
        let components = (0..self.nvars)
            .map(|i| {
                self.image_of(&MultiIndex::unit(self.nvars, i))
                    .expect("coordinates are basis monomials")
            })
            .collect();
        JetVectorField::new(components)
    }
}

/// Pullback operator of F: column at x^alpha holds the coefficients of
/// prod_i F_i^{alpha_i}. Images are built incrementally from one fewer power.
pub fn as_operator(f: &JetDiffeo) -> JetOperator {
    let basis = Basis::new(f.nvars(), f.order());
    let dim = basis.dim();
    let mut images: Vec<TruncatedSeries> = Vec::with_capacity(dim);
    images.push(TruncatedSeries::one(f.nvars(), f.order()));
    for alpha in basis.monomials.iter().skip(1) {
        let i = alpha.0.iter().position(|&e| e > 0).expect("nonzero index");
        let prev = alpha.checked_sub(&MultiIndex::unit(f.nvars(), i)).expect("positive entry");
        let prev_pos = basis.position(&prev).expect("smaller degree");
        images.push(images[prev_pos].mul(&f.components()[i]).expect("same shape"));
    }
    let mut matrix = Mat::zero(dim, dim);
    for (j, img) in images.iter().enumerate() {
        for (beta, c) in img.terms() {
            let i = basis.position(beta).expect("within order");
            *matrix.at_mut(i, j) = c.clone();
        }
    }
    JetOperator { nvars: f.nvars(), order: f.order(), basis, matrix }
}

/// Operator of the derivation h -> sum_i V_i dh/dx_i. The derivative of a
/// basis monomial is exact, so columns are exact shifted copies of the V_i.
pub fn vf_as_operator(v: &JetVectorField) -> JetOperator {
    let basis = Basis::new(v.nvars(), v.order());
    let dim = basis.dim();
    let mut matrix = Mat::zero(dim, dim);
    for (j, alpha) in basis.monomials.iter().enumerate() {
        let mut image = TruncatedSeries::zero(v.nvars(), v.order());
        for i in 0..v.nvars() {
            if alpha.0[i] == 0 {
                continue;
            }
            let gamma = alpha.checked_sub(&MultiIndex::unit(v.nvars(), i)).expect("positive");
            let term = v.components()[i]
                .shift(&gamma)
                .scale(&GaussianRational::from_int(alpha.0[i] as i64));
            image = image.add(&term).expect("same shape");
        }
        for (beta, c) in image.terms() {
            let i = basis.position(beta).expect("within order");
            *matrix.at_mut(i, j) = c.clone();
        }
    }
    JetOperator { nvars: v.nvars(), order: v.order(), basis, matrix }
}

/// The multiset {sum_i alpha_i lambda_i : 0 < |alpha| <= p} in basis order;
/// the off-constant diagonal of the derivation operator when the linear part
/// is lower-triangular.
pub fn jet_spectrum(v: &JetVectorField, p: u32) -> Result<Vec<GaussianRational>> {
    let spec = v.spectrum()?;
    let basis = Basis::new(v.nvars(), p);
    Ok(basis
        .monomials
        .iter()
        .filter(|alpha| alpha.degree() > 0)
        .map(|alpha| {
            let mut s = GaussianRational::zero();
            for (i, &e) in alpha.0.iter().enumerate() {
                if e > 0 {
                    let t = &spec.eigenvalues[i] * &GaussianRational::from_int(e as i64);
                    s = &s + &t;
                }
            }
            s
        })
        .collect())
}

/// Accumulates sum_k (A^k v) c_k for a matvec-driven series, stopping when
/// the running power vanishes. The cap is the dimension: for the nilpotent
/// operators used here the chain must die by then.
fn matvec_series(
    a: &Mat,
    v: &[GaussianRational],
    coeff: impl Fn(usize) -> GaussianRational,
) -> Result<Vec<GaussianRational>> {
    let dim = a.nrows();
    let mut acc: Vec<GaussianRational> = v.iter().map(|x| x * &coeff(0)).collect();
    let mut power = v.to_vec();
    for k in 1..=dim {
        power = a.matvec(&power);
        if power.iter().all(GaussianRational::is_zero) {
            return Ok(acc);
        }
        let c = coeff(k);
        for (t, p) in acc.iter_mut().zip(&power) {
            *t = &*t + &(p * &c);
        }
    }
    Err(Error::Internal("matrix power chain did not terminate".into()))
}

fn factorial(k: usize) -> GaussianRational {
    let mut f = GaussianRational::one();
    for j in 2..=k as i64 {
        f = &f * &GaussianRational::from_int(j);
    }
    f
}

/// Time-1 map of a vector field with nilpotent linear part. The induced
/// operator is then nilpotent on the jet space, so the exponential series is
/// a finite sum and the components are exact.
pub fn exp_vf(v: &JetVectorField) -> Result<JetDiffeo> {
    if !v.has_nilpotent_linear_part() {
        return Err(Error::NonNilpotentLinearPart);
    }
    let op = vf_as_operator(v);
    let a = op.matrix();
    let components = (0..v.nvars())
        .map(|i| {
            let xi = TruncatedSeries::variable(v.nvars(), v.order(), i);
            let col = op.series_to_column(&xi);
            let image = matvec_series(a, &col, |k| factorial(k).inv().expect("nonzero"))?;
            Ok(op.column_to_series(&image))
        })
        .collect::<Result<Vec<_>>>()?;
    JetDiffeo::new(components)
}

/// Logarithm of a diffeomorphism with unipotent linear part: the unique
/// vector field with exp_vf(V) = F at this order. The operator logarithm is
/// computed as a finite series in N = as_operator(F) - I; the result is then
/// certified to be a derivation by rebuilding its operator and comparing.
pub fn log_unipotent(f: &JetDiffeo) -> Result<JetVectorField> {
    if !f.has_unipotent_linear_part() {
        return Err(Error::NonUnipotentLinearPart);
    }
    let op = as_operator(f);
    let dim = op.dim();
    let n = op.matrix().sub(&Mat::identity(dim));
    let mut log = Mat::zero(dim, dim);
    let mut power = Mat::identity(dim);
    for k in 1..=dim {
        power = power.mul(&n);
        if power.is_zero() {
            break;
        }
        if k == dim {
            return Err(Error::Internal("operator of a unipotent jet must be unipotent".into()));
        }
        let sign = if k % 2 == 1 { 1 } else { -1 };
        let c = &GaussianRational::from_int(sign) * &GaussianRational::from_int(k as i64).inv()?;
        log = log.add(&power.scale(&c));
    }
    let log_op = JetOperator::from_matrix(f.nvars(), f.order(), log)?;
    let v = log_op.extract_vector_field()?;
    if vf_as_operator(&v).matrix() != log_op.matrix() {
        return Err(Error::Internal("operator logarithm is not a derivation".into()));
    }
    Ok(v)
}

/// F o G o F^{-1} o G^{-1}.
pub fn group_commutator(f: &JetDiffeo, g: &JetDiffeo) -> Result<JetDiffeo> {
    f.compose(g)?.compose(&f.inverse()?)?.compose(&g.inverse()?)
}

/// Multiplicative Jordan decomposition F = F_ss o F_u at order p, with F_ss
/// inducing a semisimple operator, F_u a unipotent linear part, and the two
/// commuting. Both factors are read off the additive decomposition of the
/// pullback operator M: with M = S + N, the factors' operators are S and
/// S^{-1} M; since as_operator reverses composition, M = (S^{-1}M) * S is
/// exactly the operator of F_ss o F_u.
pub fn multiplicative_jordan(f: &JetDiffeo) -> Result<(JetDiffeo, JetDiffeo)> {
    let op = as_operator(f);
    let (s, _n, _eig) = crate::jordan::jordan_with_spectrum(op.matrix())?;
    let s_inv = s
        .inverse()
        .ok_or_else(|| Error::Internal("semisimple factor of an invertible jet is singular".into()))?;
    let u = s_inv.mul(op.matrix());
    let s_op = JetOperator::from_matrix(f.nvars(), f.order(), s)?;
    if !s_op.is_automorphism() {
        return Err(Error::Internal(
            "semisimple part failed the multiplicativity check".into(),
        ));
    }
    let f_ss = s_op.extract_diffeo()?;
    let f_u = JetOperator::from_matrix(f.nvars(), f.order(), u)?.extract_diffeo()?;
    if !f_u.has_unipotent_linear_part() {
        return Err(Error::Internal("unipotent factor has a non-unipotent linear part".into()));
    }
    if f_ss.compose(&f_u)? != f_u.compose(&f_ss)? {
        return Err(Error::Internal("Jordan factors do not commute".into()));
    }
    debug_assert!(f_ss.compose(&f_u).unwrap() == *f);
    Ok((f_ss, f_u))
}

/// A finite set of jets forming a group under composition.
#[derive(Clone, Debug)]
pub struct FiniteGroupAction {
    nvars: usize,
    order: u32,
    elements: Vec<JetDiffeo>,
}

impl FiniteGroupAction {
    /// Validates closure and the presence of the identity. Inverses follow:
    /// in a finite set closed under composition each element's powers cycle.
    pub fn new(elements: Vec<JetDiffeo>) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(Error::NotAGroup("element list is empty".into()));
        };
        let (nvars, order) = (first.nvars(), first.order());
        for e in &elements {
            if e.nvars() != nvars || e.order() != order {
                return Err(Error::NotAGroup("elements disagree on nvars or order".into()));
            }
        }
        let id = JetDiffeo::identity(nvars, order);
        if !elements.contains(&id) {
            return Err(Error::NotAGroup("identity element is missing".into()));
        }
        for a in &elements {
            for b in &elements {
                let c = a.compose(b)?;
                if !elements.contains(&c) {
                    return Err(Error::NotAGroup(
                        "set is not closed under composition".into(),
                    ));
                }
            }
        }
        Ok(FiniteGroupAction { nvars, order, elements })
    }

    /// Closes a generating set under composition, up to a hard size cap.
    pub fn generate(generators: Vec<JetDiffeo>, cap: usize) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(Error::NotAGroup("generator list is empty".into()));
        };
        let (nvars, order) = (first.nvars(), first.order());
        let mut elements = vec![JetDiffeo::identity(nvars, order)];
        let mut frontier = generators.clone();
        while let Some(g) = frontier.pop() {
            if elements.contains(&g) {
                continue;
            }
            elements.push(g.clone());
            if elements.len() > cap {
                return Err(Error::NotAGroup(format!(
                    "closure exceeded {cap} elements; the generated group is not finite at \
                     this order or the cap is too small"
                )));
            }
            for e in elements.clone() {
                frontier.push(e.compose(&g)?);
                frontier.push(g.compose(&e)?);
            }
        }
        FiniteGroupAction::new(elements)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn elements(&self) -> &[JetDiffeo] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Averages the group action against its linear part:
/// U = (1/|K|) sum_g (dg)^{-1} o g. The result has identity linear part and
/// intertwines every element with its linear part: U o g = dg o U.
pub fn bochner_average(k: &FiniteGroupAction) -> Result<JetDiffeo> {
    let nvars = k.nvars();
    let order = k.order();
    let mut sum: Vec<TruncatedSeries> =
        (0..nvars).map(|_| TruncatedSeries::zero(nvars, order)).collect();
    for g in k.elements() {
        let l_inv = g.linear_part().inverse().ok_or(Error::SingularLinearPart)?;
        let straightened = apply_linear(&l_inv, g.components());
        for (s, c) in sum.iter_mut().zip(&straightened) {
            *s = s.add(c)?;
        }
    }
    let scale = GaussianRational::from_int(k.len() as i64).inv()?;
    let u = JetDiffeo::new(sum.into_iter().map(|s| s.scale(&scale)).collect())?;
    for g in k.elements() {
        let lhs = u.compose(g)?;
        let rhs = JetDiffeo::linear_from_matrix(&g.linear_part(), order)?.compose(&u)?;
        if lhs != rhs {
            return Err(Error::Internal(
                "averaged map fails the intertwining identity".into(),
            ));
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s1(text: &str, order: u32) -> TruncatedSeries {
        TruncatedSeries::parse(text, &["x"], order).unwrap()
    }

    fn d1(text: &str, order: u32) -> JetDiffeo {
        JetDiffeo::new(vec![s1(text, order)]).unwrap()
    }

    fn d2(cx: &str, cy: &str, order: u32) -> JetDiffeo {
        let parse = |t| TruncatedSeries::parse(t, &["x", "y"], order).unwrap();
        JetDiffeo::new(vec![parse(cx), parse(cy)]).unwrap()
    }

    #[test]
    fn compose_and_inverse() {
        let f = d1("x+x^2", 4);
        assert_eq!(f.compose(&f).unwrap(), d1("x+2*x^2+2*x^3+x^4", 4));

        let inv = f.inverse().unwrap();
        assert_eq!(inv, d1("x-x^2+2*x^3-5*x^4", 4));
        assert_eq!(f.compose(&inv).unwrap(), JetDiffeo::identity(1, 4));
        assert_eq!(inv.compose(&f).unwrap(), JetDiffeo::identity(1, 4));

        let half = GaussianRational::from_ratio(1, 2).unwrap();
        let lin = d1("2*x", 3);
        assert_eq!(
            lin.inverse().unwrap().components()[0],
            s1("x", 3).scale(&half)
        );
    }

    #[test]
    fn powers_match_iterated_composition() {
        let f = d2("x+y^2", "y+x^2", 5);
        let mut acc = JetDiffeo::identity(2, 5);
        for k in 0..5 {
            assert_eq!(f.power(k).unwrap(), acc);
            acc = f.compose(&acc).unwrap();
        }
        let inv = f.inverse().unwrap();
        assert_eq!(f.power(-3).unwrap(), inv.power(3).unwrap());
    }

    #[test]
    fn operator_of_scaling_is_diagonal() {
        let f = d1("2*x", 2);
        let op = as_operator(&f);
        let m = op.matrix();
        for (k, expected) in [1i64, 2, 4].iter().enumerate() {
            assert_eq!(*m.at(k, k), GaussianRational::from_int(*expected));
        }
        assert!(op.is_automorphism());
    }

    #[test]
    fn operator_composition_reverses_order() {
        let f = d2("x+y^2", "y", 3);
        let g = d2("x", "y+x^2", 3);
        let lhs = as_operator(&f.compose(&g).unwrap());
        let rhs = as_operator(&g).matrix().mul(as_operator(&f).matrix());
        assert_eq!(*lhs.matrix(), rhs);
    }

    #[test]
    fn operator_columns_hold_pullback_images() {
        let f = d1("x+x^2", 2);
        let op = as_operator(&f);
        let image_x = op.image_of(&MultiIndex(vec![1])).unwrap();
        assert_eq!(image_x, s1("x+x^2", 2));
        let image_x2 = op.image_of(&MultiIndex(vec![2])).unwrap();
        assert_eq!(image_x2, s1("x^2", 2));
    }

    #[test]
    fn derivation_operator_and_spectrum() {
        let v = JetVectorField::new(vec![s1("x", 2)]).unwrap();
        let op = vf_as_operator(&v);
        for (k, expected) in [0i64, 1, 2].iter().enumerate() {
            assert_eq!(*op.matrix().at(k, k), GaussianRational::from_int(*expected));
        }
        assert!(op.is_derivation());

        let parse = |t| TruncatedSeries::parse(t, &["x", "y"], 2).unwrap();
        let w =
            JetVectorField::new(vec![parse("2*x"), parse("x+3*y")]).unwrap();
        let spec: Vec<i64> = vec![2, 3, 4, 5, 6];
        let computed = jet_spectrum(&w, 2).unwrap();
        assert_eq!(
            computed,
            spec.iter().map(|&v| GaussianRational::from_int(v)).collect::<Vec<_>>()
        );
        let wop = vf_as_operator(&w);
        for (k, val) in computed.iter().enumerate() {
            assert_eq!(wop.matrix().at(k + 1, k + 1), val);
        }
    }

    #[test]
    fn spectrum_requires_triangular_linear_part() {
        let parse = |t| TruncatedSeries::parse(t, &["x", "y"], 2).unwrap();
        let v = JetVectorField::new(vec![parse("y"), parse("x")]).unwrap();
        assert!(matches!(jet_spectrum(&v, 2), Err(Error::NonTriangularLinearPart)));
    }

    #[test]
    fn exp_of_quadratic_field() {
        let v = JetVectorField::new(vec![s1("x^2", 4)]).unwrap();
        let f = exp_vf(&v).unwrap();
        assert_eq!(f, d1("x+x^2+x^3+x^4", 4));

        let zero = JetVectorField::zero(2, 3);
        assert_eq!(exp_vf(&zero).unwrap(), JetDiffeo::identity(2, 3));

        let parse = |t| TruncatedSeries::parse(t, &["x", "y"], 3).unwrap();
        let shear = JetVectorField::new(vec![parse("y"), parse("0")]).unwrap();
        assert_eq!(exp_vf(&shear).unwrap(), d2("x+y", "y", 3));
    }

    #[test]
    fn exp_rejects_non_nilpotent_linear_part() {
        let v = JetVectorField::new(vec![s1("x", 3)]).unwrap();
        assert!(matches!(exp_vf(&v), Err(Error::NonNilpotentLinearPart)));
    }

    #[test]
    fn log_round_trips() {
        let f = d1("x+x^2+x^3+x^4", 4);
        let v = log_unipotent(&f).unwrap();
        assert_eq!(v.components()[0], s1("x^2", 4));

        let g = d1("x+x^2", 4);
        let w = log_unipotent(&g).unwrap();
        assert_eq!(exp_vf(&w).unwrap(), g);
        let three_halves = GaussianRational::from_ratio(3, 2).unwrap();
        assert_eq!(w.components()[0].coeff(&MultiIndex(vec![4])), three_halves);

        assert_eq!(
            log_unipotent(&JetDiffeo::identity(2, 3)).unwrap(),
            JetVectorField::zero(2, 3)
        );
    }

    #[test]
    fn commutator_raises_contact_order() {
        let g1 = d1("x+x^2", 5);
        let g2 = d1("x+x^3", 5);
        let g3 = group_commutator(&g1, &g2).unwrap();
        let delta = g3.components()[0].sub(&s1("x", 5)).unwrap();
        assert_eq!(delta.valuation(), Some(4));

        let lin_a = d1("2*x", 3);
        let lin_b = d1("3*x", 3);
        assert_eq!(
            group_commutator(&lin_a, &lin_b).unwrap(),
            JetDiffeo::identity(1, 3)
        );
    }

    #[test]
    fn group_validation() {
        let id = JetDiffeo::identity(1, 4);
        let invol = d1("-x+x^2-x^3+x^4", 4);
        assert_eq!(invol.compose(&invol).unwrap(), id);
        let k = FiniteGroupAction::new(vec![id.clone(), invol.clone()]).unwrap();
        assert_eq!(k.len(), 2);

        assert!(FiniteGroupAction::new(vec![invol.clone()]).is_err());
        let not_closed = vec![id, d1("2*x", 4)];
        assert!(FiniteGroupAction::new(not_closed).is_err());

        let generated = FiniteGroupAction::generate(vec![invol], 16).unwrap();
        assert_eq!(generated.len(), 2);
    }

    #[test]
    fn averaging_linearizes_an_involution() {
        // -x/(1+x) at order 4; an exact involution.
        let invol = d1("-x+x^2-x^3+x^4", 4);
        let k = FiniteGroupAction::generate(vec![invol.clone()], 8).unwrap();
        let u = bochner_average(&k).unwrap();
        let half = GaussianRational::from_ratio(1, 2).unwrap();
        assert_eq!(u.components()[0].coeff(&MultiIndex(vec![1])), GaussianRational::one());
        assert_eq!(u.components()[0].coeff(&MultiIndex(vec![2])), -&half);
        // Conjugation sends the involution to its linear part.
        let conj = u.compose(&invol).unwrap().compose(&u.inverse().unwrap()).unwrap();
        assert_eq!(conj, d1("-x", 4));
    }

    #[test]
    fn averaging_fixes_linear_groups() {
        let id = JetDiffeo::identity(1, 3);
        let minus = d1("-x", 3);
        let k = FiniteGroupAction::new(vec![id.clone(), minus]).unwrap();
        assert_eq!(bochner_average(&k).unwrap(), id);
    }
}
