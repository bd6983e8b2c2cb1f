//! Singular-number profiles as nonincreasing step functions, their L_p and
//! weak-L_p quasi-norms, and K-functionals between L_p spaces.
//!
//! The K-functional for the pair (L_1, L_inf) is exact: `K_t = int_0^t mu`.
//! For other pairs the module's canonical K is a Holmstedt-type proxy; all
//! downstream claims involving it are stated as two-sided equivalences with
//! empirical envelopes, never exact values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{singular_values, Matrix};

/// Nonincreasing step function (value, width pairs). Represents
/// `mu_t = value_k` for `t` inside the k-th width interval and 0 beyond the
/// total width.
///
/// Canonical form: steps sorted by value nonincreasing, zero-value and
/// zero-width steps dropped. Since zero values sort to the tail, dropping
/// them never changes the function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileRepr", into = "ProfileRepr")]
pub struct Profile {
    steps: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct ProfileRepr {
    steps: Vec<[f64; 2]>,
}

impl TryFrom<ProfileRepr> for Profile {
    type Error = Error;

    fn try_from(r: ProfileRepr) -> Result<Self> {
        Profile::new(r.steps.into_iter().map(|[v, w]| (v, w)).collect())
    }
}

impl From<Profile> for ProfileRepr {
    fn from(p: Profile) -> Self {
        ProfileRepr {
            steps: p.steps.iter().map(|&(v, w)| [v, w]).collect(),
        }
    }
}

impl Profile {
    /// Canonicalizing constructor. Rejects negative values, nonpositive or
    /// non-finite widths.
    pub fn new(mut steps: Vec<(f64, f64)>) -> Result<Self> {
        for &(v, w) in &steps {
            if !v.is_finite() || !w.is_finite() {
                return Err(Error::NonFinite);
            }
            if v < 0.0 {
                return Err(Error::InvalidParam(format!("negative profile value {v}")));
            }
            if w < 0.0 {
                return Err(Error::InvalidParam(format!("negative step width {w}")));
            }
        }
        steps.retain(|&(v, w)| v > 0.0 && w > 0.0);
        steps.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        Ok(Profile { steps })
    }

    pub fn empty() -> Self {
        Profile { steps: Vec::new() }
    }

    /// One step per value, all with the same width.
    pub fn from_values(values: &[f64], width: f64) -> Result<Self> {
        Profile::new(values.iter().map(|&v| (v, width)).collect())
    }

    pub fn steps(&self) -> &[(f64, f64)] {
        &self.steps
    }

    pub fn total_width(&self) -> f64 {
        self.steps.iter().map(|s| s.1).sum()
    }

    pub fn top_value(&self) -> f64 {
        self.steps.first().map(|s| s.0).unwrap_or(0.0)
    }

    /// `mu_t`: the step value at position t (0 beyond the total width).
    pub fn value_at(&self, t: f64) -> f64 {
        if t < 0.0 {
            return self.top_value();
        }
        let mut cum = 0.0;
        for &(v, w) in &self.steps {
            cum += w;
            if t < cum {
                return v;
            }
        }
        0.0
    }

    /// Equality as functions up to a value tolerance, ignoring breakpoint
    /// slivers narrower than `wtol`. Used to compare profiles computed by
    /// different numerical routes.
    pub fn approx_eq(&self, other: &Profile, vtol: f64, wtol: f64) -> bool {
        let mut breaks: Vec<f64> = vec![0.0];
        let mut cum = 0.0;
        for &(_, w) in &self.steps {
            cum += w;
            breaks.push(cum);
        }
        cum = 0.0;
        for &(_, w) in &other.steps {
            cum += w;
            breaks.push(cum);
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for pair in breaks.windows(2) {
            if pair[1] - pair[0] <= wtol {
                continue;
            }
            let mid = 0.5 * (pair[0] + pair[1]);
            if (self.value_at(mid) - other.value_at(mid)).abs() > vtol {
                return false;
            }
        }
        true
    }

    /// New profile with every value mapped through `v -> v^e`.
    pub fn pow_values(&self, e: f64) -> Profile {
        Profile {
            steps: self.steps.iter().map(|&(v, w)| (v.powf(e), w)).collect(),
        }
    }

    /// L_p (quasi-)norm `(sum v_k^p w_k)^{1/p}`; `p = inf` gives the top value.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.top_value();
        }
        self.steps
            .iter()
            .map(|&(v, w)| v.powf(p) * w)
            .sum::<f64>()
            .powf(1.0 / p)
    }

    /// Weak-L_p quasi-norm `sup_t t^{1/p} mu_t`. The sup over each constant
    /// step is attained at its right endpoint.
    pub fn weak_lp(&self, p: f64) -> f64 {
        assert!(p.is_finite() && p > 0.0);
        let mut cum = 0.0;
        let mut best = 0.0f64;
        for &(v, w) in &self.steps {
            cum += w;
            best = best.max(cum.powf(1.0 / p) * v);
        }
        best
    }

    /// `int_0^T mu^p`, exact step accumulation with a final partial step.
    pub fn integral_power(&self, p: f64, t_upper: f64) -> f64 {
        let mut remaining = t_upper.max(0.0);
        let mut acc = 0.0;
        for &(v, w) in &self.steps {
            if remaining <= 0.0 {
                break;
            }
            let take = w.min(remaining);
            acc += v.powf(p) * take;
            remaining -= take;
        }
        acc
    }

    /// Exact K-functional for the pair (L_1, L_inf): `int_0^t mu`.
    pub fn k_exact_1_inf(&self, t: f64) -> f64 {
        self.integral_power(1.0, t)
    }

    /// Holmstedt-type K expression for 0 < p < q <= inf. With
    /// `1/r = 1/p - 1/q`:
    /// `(int_0^{t^r} mu^p)^{1/p} + t (int_{t^r}^inf mu^q)^{1/q}`.
    /// For `q = inf` this reduces to `(int_0^{t^p} mu^p)^{1/p}`.
    pub fn k_proxy(&self, p: f64, q: f64, t: f64) -> Result<f64> {
        if !(p > 0.0) || !(q > p) {
            return Err(Error::InvalidParam(format!(
                "k_proxy needs 0 < p < q, got p={p}, q={q}"
            )));
        }
        if q.is_infinite() {
            return Ok(self.integral_power(p, t.powf(p)).powf(1.0 / p));
        }
        let r = 1.0 / (1.0 / p - 1.0 / q);
        let split = t.powf(r);
        let head = self.integral_power(p, split).powf(1.0 / p);
        let tail_q = (self.lp_norm(q).powf(q) - self.integral_power(q, split)).max(0.0);
        Ok(head + t * tail_q.powf(1.0 / q))
    }
}

/// Profile of a matrix: one step per singular value, all of width `weight`.
/// The weight encodes the trace normalization of the ambient factor (1 for
/// the standard trace, 2^{-N} per Rademacher block, 1/D for the Haar
/// surrogate).
pub fn profile_of(a: &Matrix, weight: f64) -> Result<Profile> {
    let s = singular_values(a)?;
    Profile::from_values(&s, weight)
}

/// Disjoint union of measure spaces: pool all steps and re-sort. Realizes the
/// singular-number profile of block-diagonal operators.
pub fn merge<'a>(profiles: impl IntoIterator<Item = &'a Profile>) -> Profile {
    let mut steps = Vec::new();
    for p in profiles {
        steps.extend_from_slice(&p.steps);
    }
    Profile::new(steps).expect("merging canonical profiles cannot fail")
}

/// Ratios `k_proxy(f,p,q,t) / [k_proxy(f^{1/alpha}, p alpha, q alpha, t^{1/alpha})]^alpha`
/// on a t-grid. Both sides zero count as ratio 1.
pub fn power_theorem_check(
    f: &Profile,
    p: f64,
    q: f64,
    alpha: f64,
    t_grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParam(format!("alpha must be > 0, got {alpha}")));
    }
    let root = f.pow_values(1.0 / alpha);
    let mut out = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let lhs = f.k_proxy(p, q, t)?;
        let rhs = root
            .k_proxy(p * alpha, q * alpha, t.powf(1.0 / alpha))?
            .powf(alpha);
        let ratio = if rhs == 0.0 {
            if lhs == 0.0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            lhs / rhs
        };
        out.push((t, ratio));
    }
    Ok(out)
}

/// Parameter bundle for K-functional experiments.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KParams {
    pub p: f64,
    pub q: f64,
    pub t: f64,
    pub alpha: f64,
    pub theta: f64,
}

impl KParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.q > self.p) {
            return Err(Error::InvalidParam(format!(
                "need 0 < p < q <= inf, got p={}, q={}",
                self.p, self.q
            )));
        }
        if !(self.t > 0.0) {
            return Err(Error::InvalidParam("t must be positive".into()));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidParam("alpha must be positive".into()));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::InvalidParam("theta must lie in (0,1)".into()));
        }
        Ok(())
    }
}

/// The constants the equivalences are quoted against.
///
/// `a(1) = 1` is exact; for other p no closed value is available, so the
/// ledger stores a configurable envelope default. `b_p` is the assumed
/// lower-Khintchine constant of the variable model and `c_inf` the
/// sup-norm Khintchine constant (2 for free Haar unitaries; reported, not
/// proved, for the matrix surrogate).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstantLedger {
    pub a_default: f64,
    pub b_p: f64,
    pub c_inf: f64,
}

impl Default for ConstantLedger {
    fn default() -> Self {
        ConstantLedger {
            a_default: 2.0,
            b_p: std::f64::consts::SQRT_2,
            c_inf: 2.0,
        }
    }
}

impl ConstantLedger {
    /// Equivalence constant of the q = inf formula per p (exact 1 at p = 1).
    pub fn a(&self, p: f64) -> f64 {
        if (p - 1.0).abs() < 1e-15 {
            1.0
        } else {
            self.a_default
        }
    }

    /// `c_{p,alpha} = max(1, 2^{1/(p alpha) - 1}) . max(2^{alpha-1}, 2^{1-alpha})`.
    pub fn c_p_alpha(&self, p: f64, alpha: f64) -> f64 {
        let left = 1.0f64.max(2.0f64.powf(1.0 / (p * alpha) - 1.0));
        let right = 2.0f64.powf(alpha - 1.0).max(2.0f64.powf(1.0 - alpha));
        left * right
    }

    /// `C_p = max(A_p (A_p^p B_p^p + 1)^{1/p}, 4 A_p)`.
    pub fn big_c(&self, p: f64) -> f64 {
        let a = self.a(p);
        let one = a * (a.powf(p) * self.b_p.powf(p) + 1.0).powf(1.0 / p);
        one.max(4.0 * a)
    }
}
