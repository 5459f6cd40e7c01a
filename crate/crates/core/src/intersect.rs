//! Local intersection multiplicities by colength of ideals of jets.
//!
//! An ideal of the formal power series ring is described by finitely many
//! generators known to a fixed jet order. The colength of its order-m jet
//! image decides finiteness of the full colength: the quotient by the ideal
//! has dimension greater than m exactly when the quotient of the order-m jet
//! space by the jets of the ideal does. Scanning m upward therefore either
//! certifies a finite multiplicity with a stabilization witness or reports
//! that the cap was exhausted (the non-proper case never stabilizes).
//!
//! Multiplicities compose with the group action by pulling ideals back
//! through inverse diffeomorphisms, giving iteration sequences mu_k and
//! fixed-point indices of iterates.

use std::fmt;

use crate::error::{Error, Result};
use crate::gaussian::GaussianRational;
use crate::jets::JetDiffeo;
use crate::matrix::rank_qi;
use crate::multiindex::{basis_dim, Basis};
use crate::series::TruncatedSeries;

/// Finitely many generators of an ideal, all carried to one jet order.
#[derive(Clone, Debug, PartialEq)]
pub struct IdealGens {
    nvars: usize,
    order: u32,
    gens: Vec<TruncatedSeries>,
}

impl IdealGens {
    /// Zero generators are permitted (they add nothing to the ideal); an
    /// empty generator list is not.
    pub fn new(gens: Vec<TruncatedSeries>) -> Result<Self> {
        let first = gens.first().ok_or(Error::ZeroArgument("generator list"))?;
        let (nvars, order) = (first.nvars(), first.order());
        for g in &gens {
            if g.nvars() != nvars {
                return Err(Error::VariableCountMismatch { expected: nvars, found: g.nvars() });
            }
            if g.order() != order {
                return Err(Error::OrderMismatch { expected: order, found: g.order() });
            }
        }
        Ok(IdealGens { nvars, order, gens })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn gens(&self) -> &[TruncatedSeries] {
        &self.gens
    }

    /// Concatenation, generating the sum of the two ideals.
    pub fn concat(&self, other: &IdealGens) -> Result<IdealGens> {
        let mut gens = self.gens.clone();
        gens.extend_from_slice(&other.gens);
        IdealGens::new(gens)
    }
}

/// Outcome of a multiplicity scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MultResult {
    /// The colength stabilized: it equals `value`, first witnessed at jet
    /// order `stabilized_at` where `value <= stabilized_at`.
    Finite { value: usize, stabilized_at: u32 },
    /// No jet order up to the cap certified finiteness.
    ExceededCap(u32),
}

impl fmt::Display for MultResult {
    /// `finite:v@m` or `exceeded:cap`; comma-free for CSV embedding.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MultResult::Finite { value, stabilized_at } => {
                write!(f, "finite:{}@{}", value, stabilized_at)
            }
            MultResult::ExceededCap(cap) => write!(f, "exceeded:{}", cap),
        }
    }
}

/// Dimension of the order-m jet space modulo the order-m jets of the ideal.
///
/// The jet image is spanned by the truncations of x^gamma * f_i over all
/// monomials x^gamma of degree at most m and all generators f_i; the
/// colength is the jet-space dimension minus the exact rank of that span.
pub fn jet_colength(ideal: &IdealGens, m: u32) -> Result<usize> {
    if m > ideal.order() {
        return Err(Error::OrderTooLow { needed: m, have: ideal.order() });
    }
    let basis = Basis::new(ideal.nvars(), m);
    let dim = basis.dim();
    let mut rows: Vec<Vec<GaussianRational>> = Vec::new();
    for gamma in &basis.monomials {
        for g in ideal.gens() {
            let shifted = g.shift(gamma).truncate(m);
            if shifted.is_zero() {
                continue;
            }
            let mut row = vec![GaussianRational::zero(); dim];
            for (beta, c) in shifted.terms() {
                row[basis.position(beta).expect("degree at most m")] = c.clone();
            }
            rows.push(row);
        }
    }
    Ok(dim - rank_qi(&rows))
}

/// Colength of an ideal, decided by scanning jet orders up to `cap`.
///
/// The first m with jet_colength(I, m) <= m certifies that the full
/// colength equals that jet colength; if no m up to the cap qualifies the
/// scan is inconclusive (in particular, every ideal of infinite colength
/// ends up here).
pub fn colength_scan(ideal: &IdealGens, cap: u32) -> Result<MultResult> {
    if ideal.order() < cap {
        return Err(Error::OrderTooLow { needed: cap, have: ideal.order() });
    }
    for m in 0..=cap {
        let v = jet_colength(ideal, m)?;
        if v <= m as usize {
            return Ok(MultResult::Finite { value: v, stabilized_at: m });
        }
    }
    Ok(MultResult::ExceededCap(cap))
}

/// Intersection multiplicity of two ideals: the colength of their sum.
pub fn multiplicity(iv: &IdealGens, iw: &IdealGens, cap: u32) -> Result<MultResult> {
    colength_scan(&iv.concat(iw)?, cap)
}

/// Pullback of an ideal along a diffeomorphism: generators composed with
/// the inverse map.
///
/// With composition written (F o G)(x) = F(G(x)), the induced identity is
/// pullback(F o G, I) = pullback(F, pullback(G, I)).
pub fn pullback(f: &JetDiffeo, ideal: &IdealGens) -> Result<IdealGens> {
    if f.nvars() != ideal.nvars() {
        return Err(Error::VariableCountMismatch { expected: ideal.nvars(), found: f.nvars() });
    }
    if f.order() != ideal.order() {
        return Err(Error::OrderMismatch { expected: ideal.order(), found: f.order() });
    }
    let f_inv = f.inverse()?;
    let gens = ideal
        .gens()
        .iter()
        .map(|g| g.compose(f_inv.components()))
        .collect::<Result<Vec<_>>>()?;
    IdealGens::new(gens)
}

/// The sequence mu_k = multiplicity(pullback(F^k, I_V), I_W) for k = 0..kmax.
///
/// Pullbacks are accumulated incrementally (one composition with the inverse
/// per step). When `parallel` is set the per-k colength scans run on
/// multiple threads; the output is sorted by k and identical to the
/// sequential result either way.
pub fn mu_sequence(
    f: &JetDiffeo,
    iv: &IdealGens,
    iw: &IdealGens,
    kmax: u32,
    cap: u32,
    parallel: bool,
) -> Result<Vec<(u32, MultResult)>> {
    let f_inv = f.inverse()?;
    let mut pulled: Vec<IdealGens> = Vec::with_capacity(kmax as usize + 1);
    pulled.push(iv.clone());
    for _ in 1..=kmax {
        let prev = pulled.last().expect("nonempty");
        let gens = prev
            .gens()
            .iter()
            .map(|g| g.compose(f_inv.components()))
            .collect::<Result<Vec<_>>>()?;
        pulled.push(IdealGens::new(gens)?);
    }

    let scans = if parallel {
        scan_parallel(&pulled, iw, cap)
    } else {
        pulled.iter().map(|ideal| multiplicity(ideal, iw, cap)).collect()
    };
    scans
        .into_iter()
        .enumerate()
        .map(|(k, r)| r.map(|m| (k as u32, m)))
        .collect()
}

/// Runs the per-k scans on a strided pool of scoped threads. Slot order, and
/// with it determinism, does not depend on thread scheduling.
fn scan_parallel(
    pulled: &[IdealGens],
    iw: &IdealGens,
    cap: u32,
) -> Vec<Result<MultResult>> {
    let nthreads = std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1)
        .min(pulled.len())
        .max(1);
    let mut slots: Vec<Option<Result<MultResult>>> = vec![None; pulled.len()];
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..nthreads)
            .map(|t| {
                s.spawn(move || {
                    let mut out = Vec::new();
                    let mut k = t;
                    while k < pulled.len() {
                        out.push((k, multiplicity(&pulled[k], iw, cap)));
                        k += nthreads;
                    }
                    out
                })
            })
            .collect();
        for h in handles {
            for (k, r) in h.join().expect("scan thread panicked") {
                slots[k] = Some(r);
            }
        }
    });
    slots.into_iter().map(|s| s.expect("every k scanned")).collect()
}

/// Index of the origin as a fixed point of the k-th iterate: the colength
/// of the ideal generated by the components of F^k - id.
pub fn fixed_point_index(f: &JetDiffeo, k: u32, cap: u32) -> Result<MultResult> {
    if k == 0 {
        return Err(Error::ZeroArgument("iterate index"));
    }
    let fk = f.power(k as i64)?;
    let gens = fk
        .components()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let xi = TruncatedSeries::variable(f.nvars(), f.order(), i);
            c.sub(&xi)
        })
        .collect::<Result<Vec<_>>>()?;
    colength_scan(&IdealGens::new(gens)?, cap)
}

/// Total jet-space dimension at order m in n variables; the ceiling any
/// colength scan works inside.
pub fn jet_space_dim(nvars: usize, m: u32) -> usize {
    basis_dim(nvars, m)
}
