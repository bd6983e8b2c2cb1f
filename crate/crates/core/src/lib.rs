//! Numerical laboratory for singular-value profiles, K-functionals, optimal
//! row+column decompositions, operator factorizations, Schur-Horn
//! constructions and operator-inequality witnesses, all at dense-matrix
//! scale with analytic or brute-force oracles alongside.
//!
//! Modules:
//! - [`matcore`]: dense complex linear algebra (Jacobi eigensolver, SVD,
//!   polar decomposition, functional calculus, Haar unitaries);
//! - [`profile`]: step-function singular-number profiles, L_p / weak-L_p
//!   norms, exact and proxy K-functionals;
//! - [`rowcol`]: row/column stacks and the Rademacher / Haar-surrogate
//!   models for `G x`;
//! - [`decomp`]: the `m_1` convex program with dual certificates and the
//!   spectral truncation lemma;
//! - [`factor`]: extraction of `x = alpha u + u beta` and its K-functional
//!   equivalence experiments;
//! - [`schurhorn`]: Chan-Li construction and the weak-L_2 separation
//!   families;
//! - [`ineq`]: constructive witnesses for the operator inequalities and the
//!   power-theorem harness.

pub mod decomp;
pub mod error;
pub mod factor;
pub mod ineq;
pub mod matcore;
pub mod profile;
pub mod rowcol;
pub mod schurhorn;

pub use error::{Error, Result};
pub use matcore::Matrix;
pub use profile::Profile;
pub use rowcol::OpSequence;
