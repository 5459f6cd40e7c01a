//! Embedding a power of a jet diffeomorphism into a formal flow.
//!
//! A map F whose linear part has eigenvalues lambda_1..lambda_n in Q(i)
//! need not itself be the time-1 map of a vector field, but F^k is, where k
//! is the order of the group of roots of unity inside the multiplicative
//! group the eigenvalues generate. The generator splits as V_s + V_n:
//!
//! * V_n = log(F_u^k) is exact; the unipotent factor F_u comes from the
//!   multiplicative Jordan decomposition of F and its logarithm is a finite
//!   series.
//! * V_s acts on each eigenspace of the semisimple factor by the scalar
//!   k * sum_i alpha_i (theta_i + tau delta_i), where theta_i stands for the
//!   principal logarithm of lambda_i, tau for 2 pi i, and the rational
//!   corrections delta in (1/k)Z^n repair the branch mismatches that the
//!   principal choice leaves on multiplicative relations among the
//!   eigenvalues. Coefficients stay symbolic in theta and tau, so exactness
//!   is preserved; numeric instantiation is a ring homomorphism.
//!
//! Verification is two-tier: commutation [V_s, V_n] = 0 is certified
//! exactly (every spectral projector commutes with the operator of V_n),
//! and the identity e^{V_s + V_n} = F^k is checked numerically in double
//! precision, with the residual reported.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::expoly::{power_operator, ExpMat};
use crate::gaussian::GaussianRational;
use crate::jets::{
    as_operator, exp_vf, log_unipotent, multiplicative_jordan, vf_as_operator, JetDiffeo,
    JetVectorField, Spectrum,
};
use crate::jordan::{jordan_with_spectrum, spectral_projectors};
use crate::lattice::{relation_lattice, solve_integer, torsion_order};
use crate::matrix::Mat;
use crate::multiindex::MultiIndex;

/// Tolerance for recognizing the integer winding numbers that principal
/// logarithms leave on exact multiplicative relations.
const WINDING_TOL: f64 = 1e-9;

/// A scalar in the logarithm-symbol ring: a Q(i)-combination of the symbols
/// th_1..th_n (standing for the principal logarithms Log lambda_i) plus a
/// Q(i) multiple of tau = 2 pi i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogCoeff {
    theta: Vec<GaussianRational>,
    tau: GaussianRational,
}

impl LogCoeff {
    pub fn zero(nvars: usize) -> Self {
        LogCoeff { theta: vec![GaussianRational::zero(); nvars], tau: GaussianRational::zero() }
    }

    pub fn new(theta: Vec<GaussianRational>, tau: GaussianRational) -> Self {
        LogCoeff { theta, tau }
    }

    /// Coefficients of the logarithm symbols th_i.
    pub fn theta(&self) -> &[GaussianRational] {
        &self.theta
    }

    /// Coefficient of tau = 2 pi i.
    pub fn tau(&self) -> &GaussianRational {
        &self.tau
    }

    pub fn is_zero(&self) -> bool {
        self.theta.iter().all(|c| c.is_zero()) && self.tau.is_zero()
    }

    /// Numeric instantiation: `logs[i]` substitutes for th_i.
    pub fn eval_num(&self, logs: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, l) in self.theta.iter().zip(logs) {
            acc += to_c(c) * l;
        }
        acc + to_c(&self.tau) * Complex64::new(0.0, 2.0 * PI)
    }
}

impl fmt::Display for LogCoeff {
    /// `2*th1 + (-1)*tau` style: `+`-joined, coefficients other than one
    /// parenthesized, `tau` meaning 2 pi i. Comma-free.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (i, c) in self.theta.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if c.is_one() {
                parts.push(format!("th{}", i + 1));
            } else {
                parts.push(format!("({})*th{}", c, i + 1));
            }
        }
        if !self.tau.is_zero() {
            if self.tau.is_one() {
                parts.push("tau".to_string());
            } else {
                parts.push(format!("({})*tau", self.tau));
            }
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// The semisimple summand of the flow generator: a weight from the
/// logarithm-symbol ring on each spectral projector of the semisimple
/// factor's operator.
#[derive(Clone, Debug)]
pub struct SemisimplePart {
    eigenvalues: Vec<GaussianRational>,
    weights: Vec<LogCoeff>,
    projectors: Vec<Mat>,
    delta: Vec<GaussianRational>,
}

impl SemisimplePart {
    /// Distinct eigenvalues of the semisimple factor's operator.
    pub fn eigenvalues(&self) -> &[GaussianRational] {
        &self.eigenvalues
    }

    /// Weight of the flow generator on each eigenvalue's projector, aligned
    /// with `eigenvalues`.
    pub fn weights(&self) -> &[LogCoeff] {
        &self.weights
    }

    pub fn projectors(&self) -> &[Mat] {
        &self.projectors
    }

    /// Branch corrections delta_i, each in (1/k)Z.
    pub fn delta(&self) -> &[GaussianRational] {
        &self.delta
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|w| w.is_zero())
    }

    /// Numeric operator of V_s: sum of eval(weight) * projector.
    pub fn operator_num(&self, logs: &[Complex64]) -> Vec<Vec<Complex64>> {
        let dim = self.projectors.first().map_or(0, |p| p.nrows());
        let mut out = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for (w, p) in self.weights.iter().zip(&self.projectors) {
            let wv = w.eval_num(logs);
            for i in 0..dim {
                for j in 0..dim {
                    if !p.at(i, j).is_zero() {
                        out[i][j] += wv * to_c(p.at(i, j));
                    }
                }
            }
        }
        out
    }
}

/// Everything produced by embedding F^k into a flow.
#[derive(Clone, Debug)]
pub struct EmbeddingResult {
    k: usize,
    v_n: JetVectorField,
    v_s: SemisimplePart,
    family: ExpMat,
    residual: f64,
}

impl EmbeddingResult {
    /// The smallest power of F lying on the constructed flow.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Exact nilpotent summand of the generator.
    pub fn v_n(&self) -> &JetVectorField {
        &self.v_n
    }

    /// Symbolic semisimple summand of the generator.
    pub fn v_s(&self) -> &SemisimplePart {
        &self.v_s
    }

    /// The discrete family F^{kt} as a matrix of t-expressions.
    pub fn family(&self) -> &ExpMat {
        &self.family
    }

    /// Largest entrywise deviation of e^{V_s+V_n} from the operator of F^k
    /// in the double-precision verification.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Plain-text report: k, the exact nilpotent components, the symbolic
    /// weights, branch corrections, and the verification residual.
    pub fn report(&self, names: &[&str]) -> String {
        let mut lines = Vec::new();
        lines.push(format!("k = {}", self.k));
        for (i, c) in self.v_n.components().iter().enumerate() {
            lines.push(format!("V_n[{}] = {}", names[i], c.to_text(names)));
        }
        for (mu, w) in self.v_s.eigenvalues.iter().zip(&self.v_s.weights) {
            lines.push(format!("V_s weight on eigenvalue ({}) = {}", mu, w));
        }
        let delta = self
            .v_s
            .delta
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        lines.push(format!("delta = {}", delta));
        lines.push(format!("residual = {:.14e}", self.residual));
        lines.join("\n")
    }
}

/// Order of the group of roots of unity inside the multiplicative group the
/// eigenvalues generate; the k whose power of F embeds into a flow.
pub fn roots_of_unity_order(spec: &Spectrum) -> Result<usize> {
    torsion_order(&spec.eigenvalues)
}

/// Exact flow generator for a map with unipotent linear part (the k = 1
/// case): the unique V with exp_vf(V) = F at the stored order.
pub fn takens_embed(f: &JetDiffeo) -> Result<JetVectorField> {
    log_unipotent(f)
}

/// Embeds F^k into a formal flow, k the torsion order of the spectrum.
///
/// Requires a lower triangular linear part with eigenvalues in Q(i) (the
/// decomposition route also needs the full operator spectrum in Q(i), which
/// triangularity grants). The branch corrections are solved from the
/// relation lattice of the eigenvalues; their existence in (1/k)Z^n is part
/// of the theory, so failure to solve reports an internal error.
pub fn embed_power_in_flow(f: &JetDiffeo) -> Result<EmbeddingResult> {
    let lambdas = f.spectrum()?.eigenvalues;
    for l in &lambdas {
        if l.is_zero() {
            return Err(Error::SingularLinearPart);
        }
    }
    let k = torsion_order(&lambdas)?;
    let delta = solve_branch_corrections(&lambdas, k)?;
    let assembled = assemble_generator(f, k, &delta)?;

    if f.has_unipotent_linear_part() {
        // k = 1 and V_s = 0 here, so the flow generator is exact; insist on
        // the exact round trip rather than the numeric one.
        let fk = f.power(k as i64)?;
        if exp_vf(&assembled.v_n)? != fk {
            return Err(Error::Internal("exact unipotent round trip failed".into()));
        }
    }

    let fk = f.power(k as i64)?;
    let family = power_operator(&fk)?;
    Ok(EmbeddingResult {
        k,
        v_n: assembled.v_n,
        v_s: assembled.v_s,
        family,
        residual: assembled.residual,
    })
}

/// Residual of a candidate generator built with a caller-chosen iterate
/// count and branch corrections, against the operator of F^k.
///
/// Exists to demonstrate necessity of the torsion order: for k smaller than
/// the true torsion order no choice of corrections makes the residual
/// vanish, which tests probe by sweeping candidate deltas.
pub fn branch_attempt_residual(
    f: &JetDiffeo,
    k: usize,
    delta: &[GaussianRational],
) -> Result<f64> {
    if k == 0 {
        return Err(Error::ZeroArgument("iterate count"));
    }
    Ok(assemble_generator(f, k, delta)?.residual)
}

struct AssembledGenerator {
    v_n: JetVectorField,
    v_s: SemisimplePart,
    residual: f64,
}

/// Builds V_n and V_s for the given iterate count and branch corrections,
/// certifies [V_s, V_n] = 0 exactly, and measures the numeric residual of
/// e^{V_s+V_n} against the operator of F^k.
fn assemble_generator(
    f: &JetDiffeo,
    k: usize,
    delta: &[GaussianRational],
) -> Result<AssembledGenerator> {
    let lambdas = f.spectrum()?.eigenvalues;
    if delta.len() != lambdas.len() {
        return Err(Error::VariableCountMismatch {
            expected: lambdas.len(),
            found: delta.len(),
        });
    }

    let (_f_ss, f_u) = multiplicative_jordan(f)?;
    let fu_k = f_u.power(k as i64)?;
    let v_n = log_unipotent(&fu_k)?;

    let op = as_operator(f);
    let (s, _nil, eigs) = jordan_with_spectrum(op.matrix())?;
    let projectors = spectral_projectors(&s, &eigs);

    // Deglex-first representative exponent for each eigenvalue of S; the
    // weight of V_s on that eigenvalue's projector is read off from it.
    let mut reps: BTreeMap<GaussianRational, MultiIndex> = BTreeMap::new();
    for alpha in &op.basis().monomials {
        let mu = monomial_eigenvalue(&lambdas, alpha)?;
        reps.entry(mu).or_insert_with(|| alpha.clone());
    }
    let kq = GaussianRational::from_int(k as i64);
    let mut weights = Vec::with_capacity(eigs.len());
    for mu in &eigs {
        let alpha = reps
            .get(mu)
            .ok_or_else(|| Error::Internal("eigenvalue without a monomial representative".into()))?;
        let mut theta = Vec::with_capacity(lambdas.len());
        let mut tau = GaussianRational::zero();
        for (i, &a) in alpha.0.iter().enumerate() {
            let aq = GaussianRational::from_int(a as i64);
            theta.push(&kq * &aq);
            tau = &tau + &(&(&kq * &aq) * &delta[i]);
        }
        weights.push(LogCoeff::new(theta, tau));
    }

    // Exact commutation certificate: the operator of V_n commutes with each
    // projector, hence with V_s whatever values the symbols take.
    let d_n = vf_as_operator(&v_n);
    for p in &projectors {
        if p.mul(d_n.matrix()) != d_n.matrix().mul(p) {
            return Err(Error::Internal(
                "nilpotent generator does not commute with a spectral projector".into(),
            ));
        }
    }

    let v_s = SemisimplePart { eigenvalues: eigs, weights, projectors, delta: delta.to_vec() };

    // Numeric verification: exponentiate V_s + V_n in double precision and
    // compare with the exact operator of F^k.
    let logs: Vec<Complex64> = lambdas.iter().map(|l| to_c(l).ln()).collect();
    let mut gen_num = v_s.operator_num(&logs);
    let dn = d_n.matrix();
    for i in 0..dn.nrows() {
        for j in 0..dn.ncols() {
            if !dn.at(i, j).is_zero() {
                gen_num[i][j] += to_c(dn.at(i, j));
            }
        }
    }
    let flow_num = cmat_exp(&gen_num);
    let mk = as_operator(&f.power(k as i64)?);
    let mut residual: f64 = 0.0;
    for i in 0..mk.dim() {
        for j in 0..mk.dim() {
            let diff = flow_num[i][j] - to_c(mk.matrix().at(i, j));
            residual = residual.max(diff.norm());
        }
    }

    Ok(AssembledGenerator { v_n, v_s, residual })
}

/// Product of eigenvalue powers lambda^alpha.
fn monomial_eigenvalue(
    lambdas: &[GaussianRational],
    alpha: &MultiIndex,
) -> Result<GaussianRational> {
    let mut mu = GaussianRational::one();
    for (l, &a) in lambdas.iter().zip(&alpha.0) {
        if a > 0 {
            mu = &mu * &l.pow(a as i64)?;
        }
    }
    Ok(mu)
}

/// Solves for delta in (1/k)Z^n making the corrected logarithm
/// sum_i e_i (th_i + tau delta_i) vanish on every relation e among the
/// eigenvalues.
///
/// On a relation the principal logarithms sum to an integer multiple of
/// 2 pi i; that winding integer r(e) is additive in e, so prescribing
/// sum_i e_i delta_i = -r(e) on a lattice basis determines a consistent
/// correction. The scaled system E d = -k r is solved over the integers.
fn solve_branch_corrections(
    lambdas: &[GaussianRational],
    k: usize,
) -> Result<Vec<GaussianRational>> {
    let n = lambdas.len();
    let lattice = relation_lattice(lambdas)?;
    if lattice.basis.is_empty() {
        return Ok(vec![GaussianRational::zero(); n]);
    }
    let mut rhs = Vec::with_capacity(lattice.basis.len());
    for e in &lattice.basis {
        let r = winding_integer(e, lambdas)?;
        rhs.push(BigInt::from(-(k as i64)) * r);
    }
    let d = solve_integer(&lattice.basis, n, &rhs).ok_or_else(|| {
        Error::Internal("branch corrections must exist at the torsion order".into())
    })?;
    let kq = GaussianRational::from_int(k as i64);
    d.iter()
        .map(|di| {
            let num = GaussianRational::from_int(
                di.to_i64().ok_or_else(|| Error::Internal("branch correction overflow".into()))?,
            );
            num.div(&kq)
        })
        .collect()
}

/// The integer r with sum_i e_i Log lambda_i = 2 pi i r, for a relation e.
fn winding_integer(e: &[BigInt], lambdas: &[GaussianRational]) -> Result<BigInt> {
    let mut arg_sum = 0.0;
    let mut mod_sum = 0.0;
    for (ei, l) in e.iter().zip(lambdas) {
        let c = ei.to_f64().unwrap_or(f64::NAN);
        let z = to_c(l);
        arg_sum += c * z.im.atan2(z.re);
        mod_sum += c * z.norm().ln();
    }
    if mod_sum.abs() > WINDING_TOL {
        return Err(Error::Internal("relation vector does not annihilate the moduli".into()));
    }
    let turns = arg_sum / (2.0 * PI);
    let r = turns.round();
    if (turns - r).abs() > WINDING_TOL {
        return Err(Error::Internal("winding number of a relation is not an integer".into()));
    }
    Ok(BigInt::from(r as i64))
}

fn to_c(q: &GaussianRational) -> Complex64 {
    let (re, im) = q.to_f64();
    Complex64::new(re, im)
}

/// Matrix exponential by scaling and squaring with a Taylor tail; adequate
/// for the small well-scaled verification matrices used here.
fn cmat_exp(a: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = a.len();
    let norm = a
        .iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = 0.5f64.powi(squarings as i32);
    let b: Vec<Vec<Complex64>> =
        a.iter().map(|row| row.iter().map(|z| z * scale).collect()).collect();

    let mut result = cmat_identity(n);
    let mut term = cmat_identity(n);
    for k in 1..=60 {
        term = cmat_mul(&term, &b);
        let factor = 1.0 / k as f64;
        let mut biggest = 0.0f64;
        for row in term.iter_mut() {
            for z in row.iter_mut() {
                *z *= factor;
                biggest = biggest.max(z.norm());
            }
        }
        cmat_add_assign(&mut result, &term);
        if biggest < 1e-20 {
            break;
        }
    }
    for _ in 0..squarings {
        result = cmat_mul(&result, &result);
    }
    result
}

fn cmat_identity(n: usize) -> Vec<Vec<Complex64>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
                .collect()
        })
        .collect()
}

fn cmat_mul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = a.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for kk in 0..n {
            let aik = a[i][kk];
            if aik.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[kk][j];
            }
        }
    }
    out
}

fn cmat_add_assign(a: &mut [Vec<Complex64>], b: &[Vec<Complex64>]) {
    for (ra, rb) in a.iter_mut().zip(b) {
        for (za, zb) in ra.iter_mut().zip(rb) {
            *za += zb;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::TruncatedSeries;

    fn q(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    fn qr(n: i64, d: i64) -> GaussianRational {
        GaussianRational::from_ratio(n, d).unwrap()
    }

    fn diffeo(texts: &[&str], names: &[&str], order: u32) -> JetDiffeo {
        JetDiffeo::new(
            texts.iter().map(|t| TruncatedSeries::parse(t, names, order).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn torsion_orders_of_small_spectra() {
        let spec = |v: Vec<GaussianRational>| Spectrum { eigenvalues: v };
        assert_eq!(roots_of_unity_order(&spec(vec![q(2)])).unwrap(), 1);
        assert_eq!(roots_of_unity_order(&spec(vec![q(-1)])).unwrap(), 2);
        assert_eq!(roots_of_unity_order(&spec(vec![GaussianRational::i()])).unwrap(), 4);
        assert_eq!(
            roots_of_unity_order(&spec(vec![
                &q(2) * &GaussianRational::i(),
                q(2)
            ]))
            .unwrap(),
            4
        );
    }

    #[test]
    fn takens_embed_of_identity_is_zero() {
        let id = JetDiffeo::identity(2, 4);
        assert!(takens_embed(&id).unwrap().is_zero());
    }

    #[test]
    fn takens_embed_of_the_standard_parabolic() {
        // x/(1-x) = x + x^2 + ... has flow generator exactly x^2 d/dx.
        let f = diffeo(&["x + x^2 + x^3 + x^4 + x^5"], &["x"], 5);
        let v = takens_embed(&f).unwrap();
        let expect = TruncatedSeries::parse("x^2", &["x"], 5).unwrap();
        assert_eq!(v.components(), &[expect]);
    }

    #[test]
    fn takens_round_trip_in_two_variables() {
        let f = diffeo(&["x + y", "y + x^2"], &["x", "y"], 4);
        let v = takens_embed(&f).unwrap();
        assert_eq!(exp_vf(&v).unwrap(), f);
    }

    #[test]
    fn takens_embed_rejects_nonunipotent_input() {
        let f = diffeo(&["2*x"], &["x"], 3);
        assert!(matches!(takens_embed(&f), Err(Error::NonUnipotentLinearPart)));
    }

    #[test]
    fn unipotent_embedding_is_exact_with_k_one() {
        let f = diffeo(&["x + x^2"], &["x"], 5);
        let r = embed_power_in_flow(&f).unwrap();
        assert_eq!(r.k(), 1);
        assert!(r.v_s().is_zero());
        assert_eq!(exp_vf(r.v_n()).unwrap(), f);
        assert!(r.residual() < 1e-12);
    }

    #[test]
    fn reflection_with_quadratic_term_embeds_at_k_two() {
        let f = diffeo(&["-x - x^2"], &["x"], 4);
        let r = embed_power_in_flow(&f).unwrap();
        assert_eq!(r.k(), 2);
        assert_eq!(r.v_s().delta(), &[qr(-1, 2)]);
        assert!(r.residual() <= 1e-9, "residual {}", r.residual());
        // The numeric weights all vanish: the semisimple factor squares to
        // the identity, whose logarithm on this branch choice is zero.
        let logs = [to_c(&q(-1)).ln()];
        for w in r.v_s().weights() {
            assert!(w.eval_num(&logs).norm() < 1e-12);
        }
    }

    #[test]
    fn no_single_step_branch_embeds_the_reflection() {
        // For F = -x - x^2 the torsion order is 2; with k = 1 every integer
        // branch correction leaves a visible residual.
        let f = diffeo(&["-x - x^2"], &["x"], 4);
        for d in -2..=2 {
            let res = branch_attempt_residual(&f, 1, &[q(d)]).unwrap();
            assert!(res > 1e-3, "delta = {} gave residual {}", d, res);
        }
    }

    #[test]
    fn diagonal_linear_map_embeds_directly() {
        let f = diffeo(&["2*x", "3*y"], &["x", "y"], 2);
        let r = embed_power_in_flow(&f).unwrap();
        assert_eq!(r.k(), 1);
        assert!(r.v_n().is_zero());
        assert_eq!(r.v_s().delta(), &[q(0), q(0)]);
        assert!(r.residual() <= 1e-9);
        // The weight on the eigenvalue 6 space (monomial xy) is th1 + th2.
        let pos = r.v_s().eigenvalues().iter().position(|m| m == &q(6)).unwrap();
        assert_eq!(
            r.v_s().weights()[pos],
            LogCoeff::new(vec![q(1), q(1)], q(0))
        );
    }

    #[test]
    fn rotation_by_i_with_resonant_term_embeds_at_k_four() {
        // F = ix + x^5: the quintic term is resonant (i^5 = i), and the
        // fourth power x - 4i x^5 is unipotent.
        let f = diffeo(&["i*x + x^5"], &["x"], 5);
        let r = embed_power_in_flow(&f).unwrap();
        assert_eq!(r.k(), 4);
        assert_eq!(r.v_s().delta(), &[qr(-1, 4)]);
        assert!(r.residual() <= 1e-9, "residual {}", r.residual());
        let f4 = f.power(4).unwrap();
        let expect = TruncatedSeries::parse("x - 4*i*x^5", &["x"], 5).unwrap();
        assert_eq!(f4.components(), &[expect]);
    }

    #[test]
    fn torsion_depends_only_on_the_spectrum() {
        // Conjugating by a shear changes the map but not the spectrum.
        let f = diffeo(&["-x", "2*y + x^2"], &["x", "y"], 3);
        let c = diffeo(&["x", "y + x^2"], &["x", "y"], 3);
        let conj = c.compose(&f).unwrap().compose(&c.inverse().unwrap()).unwrap();
        let k1 = torsion_order(&f.spectrum().unwrap().eigenvalues).unwrap();
        let k2 = torsion_order(&conj.spectrum().unwrap().eigenvalues).unwrap();
        assert_eq!(k1, 2);
        assert_eq!(k1, k2);
    }

    #[test]
    fn embedding_family_evaluates_to_iterates() {
        let f = diffeo(&["-x - x^2"], &["x"], 4);
        let r = embed_power_in_flow(&f).unwrap();
        // family is F^{2t}: at t = 1 it is the operator of F^2.
        let m1 = r.family().eval_int(1).unwrap();
        let f2 = f.power(2).unwrap();
        assert_eq!(&m1, as_operator(&f2).matrix());
        let m2 = r.family().eval_int(2).unwrap();
        assert_eq!(&m2, as_operator(&f.power(4).unwrap()).matrix());
    }

    #[test]
    fn report_mentions_the_key_fields() {
        let f = diffeo(&["-x - x^2"], &["x"], 4);
        let r = embed_power_in_flow(&f).unwrap();
        let report = r.report(&["x"]);
        assert!(report.contains("k = 2"));
        assert!(report.contains("V_n[x] ="));
        assert!(report.contains("delta = -1/2"));
        assert!(report.contains("residual = "));
        assert!(!report.contains(','));
    }

    #[test]
    fn log_coeff_display() {
        let w = LogCoeff::new(vec![q(2), q(0)], qr(-1, 2));
        assert_eq!(w.to_string(), "(2)*th1 + (-1/2)*tau");
        assert_eq!(LogCoeff::zero(2).to_string(), "0");
        let u = LogCoeff::new(vec![q(1)], q(0));
        assert_eq!(u.to_string(), "th1");
    }

    #[test]
    fn winding_integers_on_relations() {
        // (-1)^2 = 1 winds once around; 2 * Log(-1) = 2 pi i.
        let r = winding_integer(&[BigInt::from(2)], &[q(-1)]).unwrap();
        assert_eq!(r, BigInt::from(1));
        // i^4 = 1 likewise: 4 * (i pi / 2) = 2 pi i.
        let r = winding_integer(&[BigInt::from(4)], &[GaussianRational::i()]).unwrap();
        assert_eq!(r, BigInt::from(1));
        // 2 and 1/2 are reciprocal: no winding.
        let r = winding_integer(
            &[BigInt::from(1), BigInt::from(1)],
            &[q(2), qr(1, 2)],
        )
        .unwrap();
        assert_eq!(r, BigInt::from(0));
    }
}
