//! Self-contained dense complex linear algebra: Hermitian eigendecomposition
//! (cyclic Jacobi), SVD via the Gram matrix, polar decomposition, functional
//! calculus, spectral projections and Haar-random unitaries.
//!
//! Everything is a pure function of its inputs (plus explicit seeds), so
//! concurrent use on shared immutable data is safe.

mod eig;
mod haar;
mod matrix;
pub mod random;
mod svd;

pub use eig::{
    herm_eig, herm_eigenvalues, psd_fn, psd_pseudo_inverse, pseudo_sqrt_inv, spectral_projection,
    support_projection, HermEig, Side, DEFAULT_RANK_TOL, EIG_TOL, HERM_TOL, PSD_TOL,
};
pub use haar::{haar_unitary, haar_unitary_from_rng, householder_qr};
pub use matrix::Matrix;
pub use svd::{
    nuclear_norm, op_norm, polar, polar_with_tol, schatten_norm, singular_values, svd, svt,
    PolarParts, Svd, SVD_TOL,
};
