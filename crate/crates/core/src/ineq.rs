//! Constructive witnesses for four operator inequalities, each built exactly
//! the way its proof builds them, so the proofs become executable checks:
//!
//! i.   `a <= b` gives a contraction `c = a^{1/2} b^{-1/2}` with `a = c b c*`;
//! ii.  `a <= b` gives a partial isometry `u` (polar factor of
//!      `a^{1/2} b^{1/2}`) with `a^2 <= u b^2 u*`;
//! iii. `(a+b)^alpha <= 2^{alpha-1} u (a^alpha + b^alpha) u*`, by operator
//!      convexity for alpha in [1,2] and doubling through ii beyond;
//! iv.  `(a+b)^theta <= u a^theta u* + v b^theta v*` via the contractions
//!      `a^{1/2} x^{-1/2}`, `b^{1/2} x^{-1/2}` and Jensen.
//!
//! Violations are normalized by the natural scale of each item so a single
//! tolerance (1e-8) governs all four.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{
    herm_eigenvalues, op_norm, polar, psd_fn, pseudo_sqrt_inv, support_projection, Matrix,
    DEFAULT_RANK_TOL,
};
use crate::profile::{power_theorem_check, ConstantLedger, Profile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessItem {
    I,
    II,
    III,
    IV,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabeledMatrix {
    /// Which proof step produced the matrix.
    pub role: String,
    pub matrix: Matrix,
}

/// Outcome of one witness construction.
///
/// `violation` is the most negative eigenvalue of the asserted PSD
/// difference divided by the item's scale; for item i (an equality claim)
/// it is minus the normalized residual, so "violation >= -1e-8" reads the
/// same across items. `contraction_excess` is `max(0, |w|_inf - 1)` over
/// the constructed witnesses.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessReport {
    pub item: WitnessItem,
    pub witnesses: Vec<LabeledMatrix>,
    pub violation: f64,
    pub contraction_excess: f64,
}

fn check_dominance(a: &Matrix, b: &Matrix) -> Result<f64> {
    let diff = b.sub(a).hermitize();
    let scale = op_norm(b)?.max(f64::MIN_POSITIVE);
    let min = herm_eigenvalues(&diff)?.last().copied().unwrap_or(0.0);
    if min < -1e-8 * scale {
        return Err(Error::NotPsd(min, scale));
    }
    Ok(scale)
}

fn min_eigenvalue(m: &Matrix) -> Result<f64> {
    Ok(herm_eigenvalues(&m.hermitize())?
        .last()
        .copied()
        .unwrap_or(0.0))
}

/// `c = a^{1/2} b^{-1/2}` (pseudo-inverse square root); `a = c b c*` with
/// `|c|_inf <= 1`. Errors with `KernelMismatch` when `a` carries mass on the
/// kernel of `b`, where the epsilon-limit of the proof degenerates.
pub fn witness_i(a: &Matrix, b: &Matrix) -> Result<WitnessReport> {
    let b_norm = check_dominance(a, b)?;

    let supp_b = support_projection(b, DEFAULT_RANK_TOL)?;
    let ident = Matrix::identity(b.rows());
    let off = ident.sub(&supp_b);
    let leak = op_norm(&off.mul(a).mul(&off))?;
    let a_norm = op_norm(a)?.max(f64::MIN_POSITIVE);
    if leak > 1e-8 * a_norm {
        return Err(Error::KernelMismatch(leak / a_norm));
    }

    let a_half = psd_fn(a, f64::sqrt)?;
    let b_inv_half = pseudo_sqrt_inv(b, DEFAULT_RANK_TOL)?;
    let c = a_half.mul(&b_inv_half);

    let residual = op_norm(&a.sub(&c.mul(b).mul(&c.adjoint())))?;
    let contraction_excess = (op_norm(&c)? - 1.0).max(0.0);
    Ok(WitnessReport {
        item: WitnessItem::I,
        witnesses: vec![LabeledMatrix {
            role: "contraction c = a^{1/2} b^{-1/2}".into(),
            matrix: c,
        }],
        violation: -residual / b_norm,
        contraction_excess,
    })
}

/// Partial isometry `u` from the polar decomposition of `a^{1/2} b^{1/2}`;
/// certifies `a^2 <= u b^2 u*`.
pub fn witness_ii(a: &Matrix, b: &Matrix) -> Result<WitnessReport> {
    let b_norm = check_dominance(a, b)?;

    let a_half = psd_fn(a, f64::sqrt)?;
    let b_half = psd_fn(b, f64::sqrt)?;
    let u = polar(&a_half.mul(&b_half))?.isometry;

    let b_sq = b.mul(b);
    let a_sq = a.mul(a);
    let diff = u.mul(&b_sq).mul(&u.adjoint()).sub(&a_sq);
    let violation = min_eigenvalue(&diff)? / (b_norm * b_norm);
    let contraction_excess = (op_norm(&u)? - 1.0).max(0.0);
    Ok(WitnessReport {
        item: WitnessItem::II,
        witnesses: vec![LabeledMatrix {
            role: "polar isometry of a^{1/2} b^{1/2}".into(),
            matrix: u,
        }],
        violation,
        contraction_excess,
    })
}

/// Witness for `(a+b)^alpha <= 2^{alpha-1} u (a^alpha + b^alpha) u*`.
/// `u = 1` for alpha in [1,2]; beyond, the doubling chain composes polar
/// isometries from item ii.
pub fn witness_iii(a: &Matrix, b: &Matrix, alpha: f64) -> Result<WitnessReport> {
    if !(alpha >= 1.0) {
        return Err(Error::InvalidParam(format!("alpha must be >= 1, got {alpha}")));
    }
    let n = a.rows();
    let x = a.add(b).hermitize();

    // alpha = alpha0 * 2^k with alpha0 in (1, 2] (or exactly alpha when <= 2)
    let mut alpha0 = alpha;
    let mut doublings = 0usize;
    while alpha0 > 2.0 {
        alpha0 *= 0.5;
        doublings += 1;
    }

    let mut u = Matrix::identity(n);
    let mut witnesses = vec![];
    let mut cur = alpha0;
    for step in 0..doublings {
        // current certified bound: (a+b)^cur <= B, B = 2^{cur-1} u (a^cur+b^cur) u*
        let lhs = psd_fn(&x, |t| t.powf(cur))?;
        let sum_pow = psd_fn(a, |t| t.powf(cur))?.add(&psd_fn(b, |t| t.powf(cur))?);
        let bound = u
            .mul(&sum_pow)
            .mul(&u.adjoint())
            .scale(2.0f64.powf(cur - 1.0))
            .hermitize();
        // item ii applied to the pair (lhs, bound) squares the inequality
        let lhs_half = psd_fn(&lhs, f64::sqrt)?;
        let bound_half = psd_fn(&bound.hermitize(), f64::sqrt)?;
        let v = polar(&lhs_half.mul(&bound_half))?.isometry;
        witnesses.push(LabeledMatrix {
            role: format!("doubling step {} polar isometry (alpha {cur} -> {})", step + 1, 2.0 * cur),
            matrix: v.clone(),
        });
        u = v.mul(&u);
        cur *= 2.0;
    }

    let lhs = psd_fn(&x, |t| t.powf(alpha))?;
    let sum_pow = psd_fn(a, |t| t.powf(alpha))?.add(&psd_fn(b, |t| t.powf(alpha))?);
    let rhs = u
        .mul(&sum_pow)
        .mul(&u.adjoint())
        .scale(2.0f64.powf(alpha - 1.0));
    let scale = op_norm(&x)?.max(f64::MIN_POSITIVE).powf(alpha);
    let violation = min_eigenvalue(&rhs.sub(&lhs))? / scale;
    let contraction_excess = (op_norm(&u)? - 1.0).max(0.0);
    witnesses.push(LabeledMatrix {
        role: "composed partial isometry u".into(),
        matrix: u,
    });
    Ok(WitnessReport {
        item: WitnessItem::III,
        witnesses,
        violation,
        contraction_excess,
    })
}

/// Witness for `(a+b)^theta <= u a^theta u* + v b^theta v*`, theta in (0,1].
/// `u` and `v` are adjoints of the polar isometries of
/// `(a^{1/2} x^{-1/2}) x^{theta/2}` and its b-analogue.
pub fn witness_iv(a: &Matrix, b: &Matrix, theta: f64) -> Result<WitnessReport> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidParam(format!(
            "theta must lie in (0,1], got {theta}"
        )));
    }
    let x = a.add(b).hermitize();
    let x_norm = op_norm(&x)?.max(f64::MIN_POSITIVE);

    let x_inv_half = pseudo_sqrt_inv(&x, DEFAULT_RANK_TOL)?;
    let contraction_a = psd_fn(a, f64::sqrt)?.mul(&x_inv_half);
    let contraction_b = psd_fn(b, f64::sqrt)?.mul(&x_inv_half);
    let x_theta_half = psd_fn(&x, |t| t.powf(theta / 2.0))?;

    // y = contraction . x^{theta/2} = w |y|; the proof's partial isometry is w*.
    let u = polar(&contraction_a.mul(&x_theta_half))?.isometry.adjoint();
    let v = polar(&contraction_b.mul(&x_theta_half))?.isometry.adjoint();

    let a_theta = psd_fn(a, |t| t.powf(theta))?;
    let b_theta = psd_fn(b, |t| t.powf(theta))?;
    let rhs = u
        .mul(&a_theta)
        .mul(&u.adjoint())
        .add(&v.mul(&b_theta).mul(&v.adjoint()));
    let lhs = psd_fn(&x, |t| t.powf(theta))?;
    let violation = min_eigenvalue(&rhs.sub(&lhs))? / x_norm.powf(theta);
    let contraction_excess = (op_norm(&u)? - 1.0)
        .max(op_norm(&v)? - 1.0)
        .max((op_norm(&contraction_a)? - 1.0).max(op_norm(&contraction_b)? - 1.0))
        .max(0.0);
    Ok(WitnessReport {
        item: WitnessItem::IV,
        witnesses: vec![
            LabeledMatrix {
                role: "contraction a^{1/2} x^{-1/2}".into(),
                matrix: contraction_a,
            },
            LabeledMatrix {
                role: "contraction b^{1/2} x^{-1/2}".into(),
                matrix: contraction_b,
            },
            LabeledMatrix {
                role: "partial isometry u (a side)".into(),
                matrix: u,
            },
            LabeledMatrix {
                role: "partial isometry v (b side)".into(),
                matrix: v,
            },
        ],
        violation,
        contraction_excess,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerRow {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub t: f64,
    pub ratio: f64,
}

/// Power-theorem property harness over random profiles and a parameter grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerSuiteReport {
    pub rows: Vec<PowerRow>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// All ratios inside the frozen envelope [1/4, 4].
    pub envelope_ok: bool,
    /// On the exact pairs (p = 1, q = inf) the theorem-bounded direction
    /// holds within the Holmstedt slack `c_{1,alpha} A(alpha)^alpha`.
    pub exact_direction_ok: bool,
}

pub fn power_theorem_suite(seed: u64, trials: usize) -> Result<PowerSuiteReport> {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let ledger = ConstantLedger::default();
    let t_grid: Vec<f64> = (1..=12).map(|i| 0.25 * i as f64).collect();

    let mut rows = Vec::new();
    let (mut min_ratio, mut max_ratio) = (f64::INFINITY, 0.0f64);
    let mut envelope_ok = true;
    let mut exact_direction_ok = true;

    for _ in 0..trials {
        let steps: Vec<(f64, f64)> = (0..10)
            .map(|_| (rng.gen::<f64>() * 3.0, rng.gen::<f64>() + 0.02))
            .collect();
        let f = Profile::new(steps)?;
        for &p in &[0.5, 1.0, 2.0] {
            for &alpha in &[0.5, 1.0, 2.0] {
                for &q in &[f64::INFINITY, 4.0 * p] {
                    for &(t, ratio) in power_theorem_check(&f, p, q, alpha, &t_grid)?.iter() {
                        min_ratio = min_ratio.min(ratio);
                        max_ratio = max_ratio.max(ratio);
                        if !(0.25..=4.0).contains(&ratio) {
                            envelope_ok = false;
                        }
                        if p == 1.0 && q.is_infinite() {
                            let bound =
                                ledger.c_p_alpha(p, alpha) * ledger.a(alpha).powf(alpha);
                            if ratio > bound + 1e-12 {
                                exact_direction_ok = false;
                            }
                        }
                        rows.push(PowerRow {
                            p,
                            q,
                            alpha,
                            t,
                            ratio,
                        });
                    }
                }
            }
        }
    }
    Ok(PowerSuiteReport {
        rows,
        min_ratio,
        max_ratio,
        envelope_ok,
        exact_direction_ok,
    })
}

/// Random dominated pair: `a = b^{1/2} rho b^{1/2}` with a PSD contraction
/// `rho` guarantees `0 <= a <= b` exactly.
pub fn random_dominated_pair(n: usize, rng: &mut impl rand::Rng) -> (Matrix, Matrix) {
    use crate::matcore::random;
    let b = random::psd(n, rng);
    let rho = random::psd_contraction(n, 0.9, rng);
    let b_half = psd_fn(&b, f64::sqrt).expect("psd by construction");
    let a = b_half.mul(&rho).mul(&b_half).hermitize();
    (a, b)
}
