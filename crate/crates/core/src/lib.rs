//! Exact computation with jets of formal diffeomorphisms and singular vector
//! fields at a fixed point.
//!
//! Everything runs over the field Q(i) with arbitrary-precision integers, so
//! results are exact unless a function is explicitly documented as numeric.
//! The main objects:
//!
//! * [`GaussianRational`]: the coefficient field.
//! * [`TruncatedSeries`]: elements of C_p[[x]], series modulo degree p+1.
//! * [`JetDiffeo`] and [`JetVectorField`]: tuples of series forming a jet of
//!   a diffeomorphism or a vector field vanishing at the origin.
//! * [`JetOperator`]: the induced linear operator on the monomial basis of
//!   the jet space, where composition turns into matrix multiplication.
//! * [`ExpPoly`]: exponential polynomials in a time variable, the exact
//!   closed forms of flows e^{tV} and discrete orbits F^t.
//!
//! On top sit intersection multiplicities of ideals (`intersect`), Jordan
//! decompositions and finite-group averaging (`jets`, `jordan`), and the
//! embedding of a power of a diffeomorphism into a formal flow (`embed`).

// TEMP pub mod embed;
pub mod error;
pub mod expoly;
pub mod factor;
pub mod gaussian;
pub mod gaussint;
pub mod intersect;
pub mod jets;
pub mod jordan;
pub mod lattice;
pub mod matrix;
pub mod multiindex;
pub mod series;

// TEMP embed reexport
pub use error::{Error, Result};
// TEMP expoly reexport
pub use factor::{gauss_factor, GaussianFactorization};
pub use gaussian::GaussianRational;
pub use gaussint::GaussInt;
// TEMP intersect reexport
pub use jets::{
    as_operator, bochner_average, exp_vf, group_commutator, jet_spectrum, log_unipotent,
    multiplicative_jordan, vf_as_operator, FiniteGroupAction, JetDiffeo, JetOperator,
    JetVectorField, Spectrum,
};
pub use jordan::{charpoly, jordan_chevalley, jordan_with_spectrum, spectral_projectors};
pub use lattice::{integer_kernel, relation_lattice, solve_integer, torsion_order, IntLattice};
pub use matrix::{rank_qi, Mat};
pub use multiindex::{basis_dim, monomials_upto, Basis, MultiIndex};
pub use series::TruncatedSeries;
