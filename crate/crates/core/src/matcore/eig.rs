//! Cyclic Jacobi eigensolver for complex Hermitian matrices, plus the
//! functional calculus built on top of it.
//!
//! Jacobi is chosen over QR-type solvers because it is unconditionally
//! stable, dependency-free and accurate to machine precision at the matrix
//! sizes this crate targets (n up to a few thousand).

use num_complex::Complex64;

use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Relative tolerance for the hermitianity precondition.
pub const HERM_TOL: f64 = 1e-10;
/// Relative tolerance for eigendecomposition invariants.
pub const EIG_TOL: f64 = 1e-12;
/// Relative tolerance below which a negative eigenvalue disqualifies a
/// claimed-PSD input.
pub const PSD_TOL: f64 = 1e-8;
/// Default relative cutoff for numerical rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 60;

/// Hermitian eigendecomposition: `a = basis . diag(eigenvalues) . basis*`,
/// eigenvalues sorted nonincreasing (ties keep original Jacobi order).
#[derive(Debug, Clone)]
pub struct HermEig {
    pub eigenvalues: Vec<f64>,
    pub basis: Matrix,
}

/// Which side of a spectral threshold a projection covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Eigenvalues `>= threshold`.
    Above,
    /// Eigenvalues `< threshold`.
    Below,
}

pub fn herm_eig(a: &Matrix) -> Result<HermEig> {
    let (values, basis) = jacobi(a, true)?;
    Ok(HermEig {
        eigenvalues: values,
        basis: basis.expect("vectors requested"),
    })
}

/// Eigenvalues only (skips eigenvector accumulation; noticeably faster for
/// the profile paths that never need vectors).
pub fn herm_eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    Ok(jacobi(a, false)?.0)
}

fn jacobi(a: &Matrix, want_vectors: bool) -> Result<(Vec<f64>, Option<Matrix>)> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let defect = a.hermitian_defect();
    if defect > HERM_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let n = a.rows();

    // Work on the exactly hermitized copy so the sweep sees a_qp = conj(a_pq).
    let mut w = a.hermitize();
    let mut v = want_vectors.then(|| Matrix::identity(n));

    if n == 1 {
        return Ok((vec![w.get(0, 0).re], v));
    }

    let scale = w.frobenius_norm();
    if scale == 0.0 {
        return Ok((vec![0.0; n], v));
    }
    let stop = 1e-14 * scale;
    let skip = stop / n as f64;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off_sq = 0.0;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = w.get(p, q);
                let r = apq.norm();
                if r <= skip {
                    continue;
                }
                let phase = apq / r;
                let app = w.get(p, p).re;
                let aqq = w.get(q, q).re;

                let theta = (aqq - app) / (2.0 * r);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                // Rows p and q of the conjugated matrix; columns follow by
                // hermitian symmetry.
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let apk = w.get(p, k);
                    let aqk = w.get(q, k);
                    let new_pk = apk * c - aqk * (phase * s);
                    let new_qk = apk * s + aqk * (phase * c);
                    w.set(p, k, new_pk);
                    w.set(k, p, new_pk.conj());
                    w.set(q, k, new_qk);
                    w.set(k, q, new_qk.conj());
                }
                let csr = 2.0 * c * s * r;
                w.set(p, p, Complex64::new(c * c * app + s * s * aqq - csr, 0.0));
                w.set(q, q, Complex64::new(s * s * app + c * c * aqq + csr, 0.0));
                w.set(p, q, Complex64::new(0.0, 0.0));
                w.set(q, p, Complex64::new(0.0, 0.0));

                if let Some(vm) = v.as_mut() {
                    let pc = phase.conj();
                    for k in 0..n {
                        let vkp = vm.get(k, p);
                        let vkq = vm.get(k, q);
                        vm.set(k, p, vkp * c - vkq * (pc * s));
                        vm.set(k, q, vkp * s + vkq * (pc * c));
                    }
                }
            }
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                off_sq += w.get(p, q).norm_sqr();
            }
        }
        if off_sq <= stop * stop {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| w.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap().then(i.cmp(&j)));

    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let basis = v.map(|vm| {
        Matrix::from_fn(n, n, |r, c| vm.get(r, order[c]))
    });
    Ok((values, basis))
}

/// Functional calculus on a PSD matrix: returns `basis . diag(f(lambda)) . basis*`.
///
/// Eigenvalues in `[-PSD_TOL * scale, 0)` are clamped to zero before `f` is
/// applied; anything more negative rejects the input.
pub fn psd_fn(a: &Matrix, f: impl Fn(f64) -> f64) -> Result<Matrix> {
    let eig = herm_eig(a)?;
    let scale = eig
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .fold(0.0f64, f64::max);
    let floor = -PSD_TOL * scale.max(f64::MIN_POSITIVE);
    if let Some(&min) = eig
        .eigenvalues
        .iter()
        .min_by(|a, b| a.partial_cmp(b).unwrap())
    {
        if min < floor {
            return Err(Error::NotPsd(min, scale));
        }
    }
    let mapped: Vec<f64> = eig.eigenvalues.iter().map(|&l| f(l.max(0.0))).collect();
    Ok(reassemble(&eig.basis, &mapped))
}

/// Moore-Penrose inverse square root of a PSD matrix: eigenvalues above
/// `rank_tol * lambda_max` map to `lambda^{-1/2}`, the rest to zero.
pub fn pseudo_sqrt_inv(a: &Matrix, rank_tol: f64) -> Result<Matrix> {
    thresholded_fn(a, rank_tol, |l| 1.0 / l.sqrt())
}

/// Moore-Penrose pseudo-inverse of a PSD matrix.
pub fn psd_pseudo_inverse(a: &Matrix, rank_tol: f64) -> Result<Matrix> {
    thresholded_fn(a, rank_tol, |l| 1.0 / l)
}

/// Support projection of a PSD matrix at a relative rank cutoff.
pub fn support_projection(a: &Matrix, rank_tol: f64) -> Result<Matrix> {
    thresholded_fn(a, rank_tol, |_| 1.0)
}

fn thresholded_fn(a: &Matrix, rank_tol: f64, f: impl Fn(f64) -> f64) -> Result<Matrix> {
    let eig = herm_eig(a)?;
    let lmax = eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let cut = rank_tol * lmax;
    let mapped: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| if l > cut && l > 0.0 { f(l) } else { 0.0 })
        .collect();
    Ok(reassemble(&eig.basis, &mapped))
}

/// Orthogonal projection onto the span of eigenvectors on one side of a
/// threshold. `Above` keeps eigenvalues `>= threshold`, `Below` the rest.
pub fn spectral_projection(a: &Matrix, threshold: f64, side: Side) -> Result<Matrix> {
    let eig = herm_eig(a)?;
    let mapped: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| {
            let above = l >= threshold;
            match side {
                Side::Above if above => 1.0,
                Side::Below if !above => 1.0,
                _ => 0.0,
            }
        })
        .collect();
    Ok(reassemble(&eig.basis, &mapped))
}

/// `basis . diag(values) . basis*`, hermitized exactly.
fn reassemble(basis: &Matrix, values: &[f64]) -> Matrix {
    let n = basis.rows();
    let mut scaled = basis.clone();
    for c in 0..n {
        for r in 0..n {
            let x = scaled.get(r, c) * values[c];
            scaled.set(r, c, x);
        }
    }
    let out = scaled.mul(&basis.adjoint());
    out.hermitize()
}
