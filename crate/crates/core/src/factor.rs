//! Extraction of the factorization `x = alpha u + u beta` from an optimal
//! row+column decomposition, the K-functional equivalence experiment it
//! feeds, and the commutator K-ratio report.
//!
//! The construction follows the duality argument: with `alpha = |(Ry)*|`,
//! `beta = |Cz|`, `v = alpha^+ y` and `w = z beta^+`, the dual element
//! forces `e u = v` and `u f = w` at exact optimality; `u = v + (1-e) w` is
//! the canonical completion. At numerical optimality the compatibility
//! `v f = e w` holds only approximately and is surfaced as a residual
//! rather than assumed.

use serde::{Deserialize, Serialize};

use crate::decomp::DecompositionResult;
use crate::error::{Error, Result};
use crate::matcore::{herm_eig, herm_eigenvalues, op_norm, psd_fn, Matrix};
use crate::profile::{profile_of, Profile};
use crate::rowcol::{g_profile, gram_col, gram_row, GModel, OpSequence};

/// Default relative rank cutoff for the support projections. Supports that
/// flicker at this threshold are the dominant source of residual noise, so
/// callers can override it.
pub const DEFAULT_SUPPORT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorizationResult {
    pub alpha: Matrix,
    pub beta: Matrix,
    pub u: OpSequence,
    /// `max_i |x_i - alpha u_i - u_i beta|_inf`.
    pub r_factor: f64,
    /// `max_i |v_i f - e w_i|_inf`, the dual-compatibility residual.
    pub r_consistency: f64,
    /// Spectral violation of `s(alpha) <= sum u_i u_i* <= 1`.
    pub r_row: f64,
    /// Spectral violation of `s(beta) <= sum u_i* u_i <= 1`.
    pub r_col: f64,
}

pub fn extract_factorization(
    x: &OpSequence,
    decomposition: &DecompositionResult,
    rank_tol: f64,
) -> Result<FactorizationResult> {
    let y = &decomposition.y;
    let z = &decomposition.z;
    let scale = x.scale_inf()?;

    let eig_a = herm_eig(&gram_row(y))?;
    let eig_b = herm_eig(&gram_col(z))?;
    let sing_a: Vec<f64> = eig_a.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
    let sing_b: Vec<f64> = eig_b.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
    let alpha_top = sing_a.first().copied().unwrap_or(0.0);
    let beta_top = sing_b.first().copied().unwrap_or(0.0);
    if alpha_top <= rank_tol * scale && beta_top <= rank_tol * scale && scale > 0.0 {
        return Err(Error::DegenerateSupport);
    }

    // Support cutoff relative to the joint scale: a factor that is tiny
    // against the other is solver noise, not genuine support, and feeding it
    // through the pseudo-inverse would inject O(1) garbage into u.
    let cut = rank_tol * alpha_top.max(beta_top);
    let alpha = assemble(&eig_a.basis, &sing_a, |s| s);
    let beta = assemble(&eig_b.basis, &sing_b, |s| s);
    let e = assemble(&eig_a.basis, &sing_a, |s| if s > cut { 1.0 } else { 0.0 });
    let f = assemble(&eig_b.basis, &sing_b, |s| if s > cut { 1.0 } else { 0.0 });
    let alpha_pinv = assemble(&eig_a.basis, &sing_a, |s| if s > cut { 1.0 / s } else { 0.0 });
    let beta_pinv = assemble(&eig_b.basis, &sing_b, |s| if s > cut { 1.0 / s } else { 0.0 });

    // y = alpha v with e v = v; z = w beta with w f = w.
    let v = y.left_mul(&alpha_pinv);
    let w = z.right_mul(&beta_pinv);

    let ident = Matrix::identity(x.dim());
    let ec = ident.sub(&e);
    let u = v.add(&w.left_mul(&ec));

    let mut r_factor = 0.0f64;
    for ((xi, ui), _) in x.items().iter().zip(u.items()).zip(y.items()) {
        let rec = alpha.mul(ui).add(&ui.mul(&beta));
        r_factor = r_factor.max(op_norm(&xi.sub(&rec))?);
    }

    let mut r_consistency = 0.0f64;
    for (vi, wi) in v.items().iter().zip(w.items()) {
        let lhs = vi.mul(&f);
        let rhs = e.mul(wi);
        r_consistency = r_consistency.max(op_norm(&lhs.sub(&rhs))?);
    }

    let r_row = sandwich_violation(&gram_row(&u), &e)?;
    let r_col = sandwich_violation(&gram_col(&u), &f)?;

    Ok(FactorizationResult {
        alpha,
        beta,
        u,
        r_factor,
        r_consistency,
        r_row,
        r_col,
    })
}

/// `basis . diag(f(values)) . basis*`.
fn assemble(basis: &Matrix, values: &[f64], f: impl Fn(f64) -> f64) -> Matrix {
    let n = basis.rows();
    let mut scaled = basis.clone();
    for c in 0..n {
        let fv = f(values[c]);
        for r in 0..n {
            let x = scaled.get(r, c) * fv;
            scaled.set(r, c, x);
        }
    }
    scaled.mul(&basis.adjoint()).hermitize()
}

/// Largest spectral violation of `p <= m <= 1` (zero when the sandwich holds).
fn sandwich_violation(m: &Matrix, p: &Matrix) -> Result<f64> {
    let upper = herm_eigenvalues(m)?
        .first()
        .copied()
        .unwrap_or(0.0)
        .max(1.0)
        - 1.0;
    let lower = herm_eigenvalues(&p.sub(m).hermitize())?
        .first()
        .copied()
        .unwrap_or(0.0)
        .max(0.0);
    Ok(upper.max(lower))
}

/// Symmetrized decomposition for self-adjoint input families: when every
/// `x_i = x_i*`, the pair `((y + z*)/2, (z + y*)/2)` is feasible with the
/// same objective, and extraction from it yields `beta = alpha`.
pub fn symmetrize_decomposition(result: &DecompositionResult) -> DecompositionResult {
    let y_sym = result.y.add(&result.z.adjoint()).scale(0.5);
    let z_sym = result.z.add(&result.y.adjoint()).scale(0.5);
    DecompositionResult {
        y: y_sym,
        z: z_sym,
        primal: result.primal,
        dual_bound: result.dual_bound,
        gap: result.gap,
        iterations: result.iterations,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatioRow {
    pub t: f64,
    pub ratio: f64,
}

/// Per-t ratios `[K_t(alpha) + K_t(beta)] / K_t(Gx)` at (p, inf).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KtAlphaReport {
    pub per_t: Vec<RatioRow>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub model: String,
    /// The sup-norm Khintchine hypothesis behind the equivalence holds for
    /// the free model; Rademacher runs are out of hypothesis and labeled so.
    pub in_hypothesis: bool,
}

pub fn kt_alpha_equivalence(
    x: &OpSequence,
    fac: &FactorizationResult,
    p: f64,
    t_grid: &[f64],
    model: GModel,
) -> Result<KtAlphaReport> {
    if !(p > 0.0) {
        return Err(Error::InvalidParam("p must be positive".into()));
    }
    let g = g_profile(x, model)?;
    let pa = profile_of(&fac.alpha, 1.0)?;
    let pb = profile_of(&fac.beta, 1.0)?;

    let mut per_t = Vec::with_capacity(t_grid.len());
    let (mut min_ratio, mut max_ratio) = (f64::INFINITY, 0.0f64);
    for &t in t_grid {
        let num = pa.k_proxy(p, f64::INFINITY, t)? + pb.k_proxy(p, f64::INFINITY, t)?;
        let den = g.k_proxy(p, f64::INFINITY, t)?;
        let ratio = if den > 0.0 {
            num / den
        } else if num > 0.0 {
            f64::INFINITY
        } else {
            1.0
        };
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
        per_t.push(RatioRow { t, ratio });
    }
    Ok(KtAlphaReport {
        per_t,
        min_ratio,
        max_ratio,
        model: model.label(),
        in_hypothesis: model.is_surrogate(),
    })
}

/// Report-only commutator K ratios:
/// `K_{t^theta}(alpha^theta b + b beta^theta, p/theta, q/theta)` against
/// `[K_t(alpha b + b beta, p, q)]^theta |b|_inf^{1-theta}`.
/// No pass/fail is attached; the comparison constant is not pinned.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommutatorReport {
    pub per_t: Vec<RatioRow>,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

pub fn commutator_k_ratio(
    alpha: &Matrix,
    beta: &Matrix,
    b: &Matrix,
    theta: f64,
    p: f64,
    q: f64,
    t_grid: &[f64],
) -> Result<CommutatorReport> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidParam("theta must lie in (0,1)".into()));
    }
    let b_norm = op_norm(b)?;
    if b_norm <= 0.0 {
        return Err(Error::InvalidParam("b must be nonzero".into()));
    }
    let alpha_theta = psd_fn(alpha, |t| t.powf(theta))?;
    let beta_theta = psd_fn(beta, |t| t.powf(theta))?;

    let numerator_matrix = alpha_theta.mul(b).add(&b.mul(&beta_theta));
    let denominator_matrix = alpha.mul(b).add(&b.mul(beta));
    let num_profile = profile_of(&numerator_matrix, 1.0)?;
    let den_profile = profile_of(&denominator_matrix, 1.0)?;

    let mut per_t = Vec::with_capacity(t_grid.len());
    let (mut min_ratio, mut max_ratio) = (f64::INFINITY, 0.0f64);
    for &t in t_grid {
        let num = num_profile.k_proxy(p / theta, q / theta, t.powf(theta))?;
        let den = den_profile.k_proxy(p, q, t)?.powf(theta) * b_norm.powf(1.0 - theta);
        let ratio = if den > 0.0 {
            num / den
        } else if num > 0.0 {
            f64::INFINITY
        } else {
            1.0
        };
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
        per_t.push(RatioRow { t, ratio });
    }
    Ok(CommutatorReport {
        per_t,
        min_ratio,
        max_ratio,
    })
}

/// K values of a matrix profile on a grid; convenience for reports.
pub fn matrix_k_profile(a: &Matrix, p: f64, q: f64, t_grid: &[f64]) -> Result<Vec<RatioRow>> {
    let prof: Profile = profile_of(a, 1.0)?;
    t_grid
        .iter()
        .map(|&t| {
            Ok(RatioRow {
                t,
                ratio: prof.k_proxy(p, q, t)?,
            })
        })
        .collect()
}
