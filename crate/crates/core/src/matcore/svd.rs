//! SVD through the Hermitian eigenproblem of the Gram matrix, plus the polar
//! decomposition and Schatten norms derived from it.

use num_complex::Complex64;

use super::eig::{herm_eig, herm_eigenvalues, DEFAULT_RANK_TOL};
use super::matrix::Matrix;
use crate::error::Result;

/// Relative tolerance for SVD invariants.
pub const SVD_TOL: f64 = 1e-12;

/// Thin SVD: `a = left . diag(singulars) . right*` with `k = min(rows, cols)`
/// columns on each side and singular values sorted nonincreasing.
#[derive(Debug, Clone)]
pub struct Svd {
    pub left: Matrix,
    pub singulars: Vec<f64>,
    pub right: Matrix,
}

/// Polar decomposition `a = isometry . modulus`.
///
/// The isometry is truncated to the numerical rank of `a`, so it is a true
/// partial isometry; the modulus is `(a* a)^{1/2}` reassembled from all
/// singular values.
#[derive(Debug, Clone)]
pub struct PolarParts {
    pub isometry: Matrix,
    pub modulus: Matrix,
}

pub fn svd(a: &Matrix) -> Result<Svd> {
    if a.rows() < a.cols() {
        // Work on the adjoint so the Gram matrix is the small side.
        let s = svd(&a.adjoint())?;
        return Ok(Svd {
            left: s.right,
            singulars: s.singulars,
            right: s.left,
        });
    }
    let (m, n) = (a.rows(), a.cols());
    let gram = a.adjoint_mul(a).hermitize();
    let eig = herm_eig(&gram)?;

    let mut sigma = vec![0.0f64; n];
    let mut left = Matrix::zeros(m, n);
    let s1 = eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    // Columns below this are treated as exact kernel and completed by
    // Gram-Schmidt against the recovered ones.
    let cut = (m.max(n) as f64) * f64::EPSILON * s1;

    let mut deferred = Vec::new();
    let mut kept: Vec<usize> = Vec::new();
    for i in 0..n {
        // w = a v_i; taking sigma = |w| makes left.diag.right* = a V V* = a
        // up to the dropped kernel directions.
        let mut w = vec![Complex64::new(0.0, 0.0); m];
        for r in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..n {
                acc += a.get(r, c) * eig.basis.get(c, i);
            }
            w[r] = acc;
        }
        let nrm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm > cut {
            // Modified Gram-Schmidt against previous columns keeps the left
            // factor orthonormal when singular values cluster.
            for &j in &kept {
                let mut dot = Complex64::new(0.0, 0.0);
                for r in 0..m {
                    dot += left.get(r, j).conj() * w[r];
                }
                for (r, wr) in w.iter_mut().enumerate() {
                    *wr -= dot * left.get(r, j);
                }
            }
            let nrm2 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm2 > 0.5 * nrm {
                sigma[i] = nrm;
                for (r, wr) in w.iter().enumerate() {
                    left.set(r, i, *wr / nrm2);
                }
                kept.push(i);
                continue;
            }
        }
        sigma[i] = 0.0;
        deferred.push(i);
    }

    // Complete the kernel columns from the canonical basis.
    if !deferred.is_empty() {
        let mut existing: Vec<usize> = kept.clone();
        let mut cursor = 0usize;
        for &i in &deferred {
            'candidates: while cursor < m {
                let mut w = vec![Complex64::new(0.0, 0.0); m];
                w[cursor] = Complex64::new(1.0, 0.0);
                cursor += 1;
                for &j in &existing {
                    let mut dot = Complex64::new(0.0, 0.0);
                    for r in 0..m {
                        dot += left.get(r, j).conj() * w[r];
                    }
                    for (r, wr) in w.iter_mut().enumerate() {
                        *wr -= dot * left.get(r, j);
                    }
                }
                let nrm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if nrm > 1e-3 {
                    for (r, wr) in w.iter().enumerate() {
                        left.set(r, i, *wr / nrm);
                    }
                    existing.push(i);
                    break 'candidates;
                }
            }
        }
    }

    // Re-sort in case |a v_i| perturbed the ordering of near-equal values.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap().then(i.cmp(&j)));
    let singulars: Vec<f64> = order.iter().map(|&i| sigma[i]).collect();
    let left = Matrix::from_fn(m, n, |r, c| left.get(r, order[c]));
    let right = Matrix::from_fn(n, n, |r, c| eig.basis.get(r, order[c]));

    Ok(Svd {
        left,
        singulars,
        right,
    })
}

/// Singular values only, via the eigenvalues of the smaller Gram matrix.
pub fn singular_values(a: &Matrix) -> Result<Vec<f64>> {
    let gram = if a.rows() < a.cols() {
        a.mul(&a.adjoint()).hermitize()
    } else {
        a.adjoint_mul(a).hermitize()
    };
    let vals = herm_eigenvalues(&gram)?;
    Ok(vals.into_iter().map(|l| l.max(0.0).sqrt()).collect())
}

/// Operator norm (largest singular value).
pub fn op_norm(a: &Matrix) -> Result<f64> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

/// Nuclear norm (sum of singular values).
pub fn nuclear_norm(a: &Matrix) -> Result<f64> {
    Ok(singular_values(a)?.iter().sum())
}

/// Schatten p-(quasi)norm; `p = inf` gives the operator norm.
///
/// For p < 1 singular values below the Gram noise floor (~sqrt(eps) s_1)
/// are dropped: the eigenvalues of `a* a` cannot resolve zeros below it,
/// and the quasi-norm amplifies them (a spurious 1e-8 s_1 contributes
/// 1e-4 at p = 1/2).
pub fn schatten_norm(a: &Matrix, p: f64) -> Result<f64> {
    let s = singular_values(a)?;
    if p.is_infinite() {
        return Ok(s.first().copied().unwrap_or(0.0));
    }
    let s1 = s.first().copied().unwrap_or(0.0);
    let floor = if p < 1.0 {
        (a.rows().max(a.cols()) as f64) * f64::EPSILON.sqrt() * s1
    } else {
        0.0
    };
    Ok(s.iter()
        .filter(|&&x| x > floor)
        .map(|x| x.powf(p))
        .sum::<f64>()
        .powf(1.0 / p))
}

pub fn polar(a: &Matrix) -> Result<PolarParts> {
    polar_with_tol(a, DEFAULT_RANK_TOL)
}

pub fn polar_with_tol(a: &Matrix, rank_tol: f64) -> Result<PolarParts> {
    let s = svd(a)?;
    let k = s.singulars.len();
    let s1 = s.singulars.first().copied().unwrap_or(0.0);
    let cut = rank_tol * s1;

    let mut isometry = Matrix::zeros(a.rows(), a.cols());
    for i in 0..k {
        if s.singulars[i] <= cut {
            break;
        }
        for r in 0..a.rows() {
            for c in 0..a.cols() {
                let add = s.left.get(r, i) * s.right.get(c, i).conj();
                let cur = isometry.get(r, c);
                isometry.set(r, c, cur + add);
            }
        }
    }
    // modulus = right . diag(sigma) . right*
    let n = a.cols();
    let mut scaled = s.right.clone();
    for c in 0..k {
        for r in 0..n {
            let x = scaled.get(r, c) * s.singulars[c];
            scaled.set(r, c, x);
        }
    }
    let modulus = scaled.mul(&s.right.adjoint()).hermitize();
    Ok(PolarParts { isometry, modulus })
}

/// Singular value soft-thresholding: the proximal map of the nuclear norm.
pub fn svt(a: &Matrix, tau: f64) -> Result<Matrix> {
    let s = svd(a)?;
    let mut out = Matrix::zeros(a.rows(), a.cols());
    for i in 0..s.singulars.len() {
        let shrunk = (s.singulars[i] - tau).max(0.0);
        if shrunk == 0.0 {
            continue;
        }
        for r in 0..a.rows() {
            for c in 0..a.cols() {
                let add = s.left.get(r, i) * s.right.get(c, i).conj() * shrunk;
                let cur = out.get(r, c);
                out.set(r, c, cur + add);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn reconstruct(s: &Svd) -> Matrix {
        let k = s.singulars.len();
        let mut scaled = s.left.clone();
        for c in 0..k {
            for r in 0..s.left.rows() {
                let x = scaled.get(r, c) * s.singulars[c];
                scaled.set(r, c, x);
            }
        }
        scaled.mul(&s.right.adjoint())
    }

    #[test]
    fn matrix_unit_singulars() {
        let e12 = Matrix::unit(2, 0, 1);
        let s = svd(&e12).unwrap();
        assert!((s.singulars[0] - 1.0).abs() < 1e-14);
        assert!(s.singulars[1].abs() < 1e-14);
    }

    #[test]
    fn rank_one_two_by_two() {
        // [[1,1],[0,0]]: Gram eigenvalues are 2 and 0.
        let a = Matrix::from_real(2, 2, &[1.0, 1.0, 0.0, 0.0]);
        let s = svd(&a).unwrap();
        assert!((s.singulars[0] - 2.0f64.sqrt()).abs() < 1e-14);
        assert!(s.singulars[1].abs() < 1e-14);
        assert!(reconstruct(&s).sub(&a).max_abs() < 1e-14);
    }

    #[test]
    fn diagonal_abs() {
        let a = Matrix::diag(&[-3.0, 2.0]);
        let s = svd(&a).unwrap();
        assert_eq!(s.singulars, vec![3.0, 2.0]);
    }

    #[test]
    fn random_reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for (m, n) in [(4usize, 4usize), (6, 3), (3, 7), (8, 8)] {
            let a = random::gaussian(m, n, &mut rng);
            let s = svd(&a).unwrap();
            let s1 = s.singulars[0];
            assert!(
                reconstruct(&s).sub(&a).max_abs() <= SVD_TOL.max(1e-13) * s1,
                "reconstruction failed for {m}x{n}"
            );
            let k = m.min(n);
            let gl = s.left.adjoint_mul(&s.left);
            let gr = s.right.adjoint_mul(&s.right);
            assert!(gl.sub(&Matrix::identity(k)).max_abs() <= 1e-12);
            assert!(gr.sub(&Matrix::identity(k)).max_abs() <= 1e-12);
            for w in s.singulars.windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn unitary_invariance_of_singular_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let a = random::gaussian(5, 5, &mut rng);
        let u = crate::matcore::haar_unitary(5, 101);
        let v = crate::matcore::haar_unitary(5, 102);
        let s0 = singular_values(&a).unwrap();
        let s1 = singular_values(&u.mul(&a).mul(&v)).unwrap();
        for (x, y) in s0.iter().zip(&s1) {
            assert!((x - y).abs() <= 1e-10 * s0[0]);
        }
    }

    #[test]
    fn mu_homogeneity_of_powers() {
        // singulars(psd_fn(|a|, t -> t^p)) = singulars(|a|)^p elementwise
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let a = random::gaussian(5, 5, &mut rng);
        let modulus = polar(&a).unwrap().modulus;
        let s = singular_values(&modulus).unwrap();
        for p in [0.5, 2.0] {
            let powered = crate::matcore::psd_fn(&modulus, |t| t.powf(p)).unwrap();
            let sp = singular_values(&powered).unwrap();
            for (x, y) in sp.iter().zip(&s) {
                assert!((x - y.powf(p)).abs() <= 1e-10 * s[0].powf(p).max(1.0));
            }
        }
    }

    #[test]
    fn polar_matrix_unit() {
        let e12 = Matrix::unit(2, 0, 1);
        let p = polar(&e12).unwrap();
        assert!(p.isometry.sub(&e12).max_abs() < 1e-13);
        assert!(p.modulus.sub(&Matrix::unit(2, 1, 1)).max_abs() < 1e-13);
    }

    #[test]
    fn polar_of_psd_is_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let a = random::psd(4, &mut rng);
        let p = polar(&a).unwrap();
        let support = crate::matcore::support_projection(&a, DEFAULT_RANK_TOL).unwrap();
        assert!(p.isometry.sub(&support).max_abs() <= 1e-9);
        assert!(p.modulus.sub(&a).max_abs() <= 1e-10 * a.max_abs());
    }

    #[test]
    fn polar_two_by_two_by_hand() {
        // a = [[0,-2],[1,0]]: a*a = diag(1,4), isometry [[0,-1],[1,0]], modulus diag(1,2)
        let a = Matrix::from_real(2, 2, &[0.0, -2.0, 1.0, 0.0]);
        let p = polar(&a).unwrap();
        let want_iso = Matrix::from_real(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!(p.isometry.sub(&want_iso).max_abs() < 1e-13);
        assert!(p.modulus.sub(&Matrix::diag(&[1.0, 2.0])).max_abs() < 1e-13);
    }

    #[test]
    fn polar_partial_isometry_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        // rank-deficient input
        let b = random::gaussian(4, 2, &mut rng);
        let c = random::gaussian(2, 4, &mut rng);
        let a = b.mul(&c);
        let p = polar(&a).unwrap();
        let u = &p.isometry;
        let uuu = u.mul(&u.adjoint()).mul(u);
        assert!(uuu.sub(u).max_abs() <= 1e-10);
        // u* u equals the support projection of the modulus
        let supp = crate::matcore::support_projection(&p.modulus, DEFAULT_RANK_TOL).unwrap();
        assert!(u.adjoint_mul(u).sub(&supp).max_abs() <= 1e-10);
        // reconstruction
        assert!(u.mul(&p.modulus).sub(&a).max_abs() <= 1e-10 * a.max_abs());
    }

    #[test]
    fn svt_shrinks_singular_values() {
        let a = Matrix::diag(&[3.0, 1.0, 0.2]);
        let out = svt(&a, 0.5).unwrap();
        assert!(out.sub(&Matrix::diag(&[2.5, 0.5, 0.0])).max_abs() < 1e-13);
    }
}
