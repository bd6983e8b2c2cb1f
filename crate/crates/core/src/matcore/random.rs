//! Seedable samplers for the randomized suites (witness trials, solver
//! instance generation). All take an explicit `Rng` so runs reproduce.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::haar::haar_unitary_from_rng;
use super::matrix::Matrix;

/// Complex Ginibre matrix: independent entries (N + iN)/sqrt(2).
pub fn gaussian(rows: usize, cols: usize, rng: &mut impl Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Real Gaussian matrix.
pub fn gaussian_real(rows: usize, cols: usize, rng: &mut impl Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        Complex64::new(re, 0.0)
    })
}

/// Random Hermitian matrix (hermitized Ginibre).
pub fn hermitian(n: usize, rng: &mut impl Rng) -> Matrix {
    gaussian(n, n, rng).hermitize()
}

/// Random PSD matrix g g* / n.
pub fn psd(n: usize, rng: &mut impl Rng) -> Matrix {
    let g = gaussian(n, n, rng);
    g.mul(&g.adjoint()).scale(1.0 / n as f64).hermitize()
}

/// Random PSD contraction: psd scaled so the top eigenvalue is `top <= 1`.
pub fn psd_contraction(n: usize, top: f64, rng: &mut impl Rng) -> Matrix {
    let a = psd(n, rng);
    let lmax = super::eig::herm_eigenvalues(&a)
        .expect("hermitian by construction")
        .first()
        .copied()
        .unwrap_or(0.0);
    if lmax <= 0.0 {
        return a;
    }
    a.scale(top / lmax)
}

/// Haar-random rank-k orthogonal projection.
pub fn projection(n: usize, rank: usize, rng: &mut impl Rng) -> Matrix {
    assert!(rank <= n);
    let u = haar_unitary_from_rng(n, rng);
    let cols = u.col_slice(0, rank.max(1));
    if rank == 0 {
        return Matrix::zeros(n, n);
    }
    cols.mul(&cols.adjoint()).hermitize()
}
