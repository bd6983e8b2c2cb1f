//! Haar-distributed random unitaries via QR of a complex Ginibre matrix.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::Matrix;

/// Haar-random unitary, deterministic per seed.
///
/// QR of a complex Gaussian matrix alone is not Haar; the diagonal of R must
/// be phase-corrected (multiply Q by diag(r_ii / |r_ii|)).
pub fn haar_unitary(dim: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_unitary_from_rng(dim, &mut rng)
}

pub fn haar_unitary_from_rng(dim: usize, rng: &mut impl Rng) -> Matrix {
    let g = Matrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let (q, r) = householder_qr(&g);
    let mut u = q;
    for c in 0..dim {
        let d = r.get(c, c);
        let m = d.norm();
        let phase = if m > 0.0 {
            d / m
        } else {
            Complex64::new(1.0, 0.0)
        };
        for row in 0..dim {
            let x = u.get(row, c) * phase;
            u.set(row, c, x);
        }
    }
    u
}

/// Householder QR of a square complex matrix: `a = q r` with unitary `q` and
/// upper-triangular `r`.
pub fn householder_qr(a: &Matrix) -> (Matrix, Matrix) {
    assert!(a.is_square());
    let n = a.rows();
    let mut r = a.clone();
    let mut q = Matrix::identity(n);

    for k in 0..n {
        // Reflector annihilating r[k+1.., k].
        let mut norm_sq = 0.0;
        for i in k..n {
            norm_sq += r.get(i, k).norm_sqr();
        }
        let norm = norm_sq.sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = r.get(k, k);
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        // v = x + phase * |x| * e_k avoids cancellation; H = I - 2 v v* / (v*v)
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        for i in k..n {
            v[i] = r.get(i, k);
        }
        v[k] += phase * norm;
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vv == 0.0 {
            continue;
        }
        let tau = 2.0 / vv;

        // r <- H r
        for c in k..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in k..n {
                dot += v[i].conj() * r.get(i, c);
            }
            dot *= tau;
            for i in k..n {
                let x = r.get(i, c) - dot * v[i];
                r.set(i, c, x);
            }
        }
        // q <- q H  (H hermitian)
        for row in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in k..n {
                dot += q.get(row, i) * v[i];
            }
            dot *= tau;
            for i in k..n {
                let x = q.get(row, i) - dot * v[i].conj();
                q.set(row, i, x);
            }
        }
    }
    (q, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dim_one_is_unit_modulus() {
        let u = haar_unitary(1, 42);
        assert!((u.get(0, 0).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn unitary_to_machine_precision() {
        for seed in [0u64, 7, 123] {
            let u = haar_unitary(16, seed);
            let gram = u.adjoint_mul(&u);
            assert!(gram.sub(&Matrix::identity(16)).max_abs() <= 1e-12);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = haar_unitary(8, 5);
        let b = haar_unitary(8, 5);
        assert_eq!(a, b);
        let c = haar_unitary(8, 6);
        assert!(a.sub(&c).max_abs() > 1e-3);
    }

    #[test]
    fn qr_reconstructs() {
        let u = haar_unitary(5, 1);
        let a = u.scale(2.0);
        let (q, r) = householder_qr(&a);
        assert!(q.mul(&r).sub(&a).max_abs() <= 1e-13 * a.max_abs());
        // r upper triangular
        for i in 1..5 {
            for j in 0..i {
                assert!(r.get(i, j).norm() < 1e-12);
            }
        }
    }
}
