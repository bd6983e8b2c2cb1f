//! The R, C and G operators on finite sequences of square matrices: row and
//! column stacks, their Gram operators, and the exact Rademacher-average
//! model (plus a seeded Haar-unitary surrogate) for `G x = sum_i x_i (x) xi_i`.
//!
//! Trace convention: standard (unnormalized) trace on the matrix side,
//! normalized trace on the probability factor. This makes `|Gx|_inf`
//! directly comparable with `|Rx|_inf`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{haar_unitary, schatten_norm, singular_values, Matrix};
use crate::profile::{merge, profile_of, Profile};

/// Exact Rademacher enumeration refuses beyond this many summands
/// (2^16 = 65536 sign patterns); exactness is the point, so there is no
/// silent subsampling.
pub const RADEMACHER_CAP: usize = 16;

/// Finite sequence (x_1, ..., x_N) of d x d matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OpSequenceRepr", into = "OpSequenceRepr")]
pub struct OpSequence {
    dim: usize,
    items: Vec<Matrix>,
}

#[derive(Serialize, Deserialize)]
struct OpSequenceRepr {
    dim: usize,
    items: Vec<Matrix>,
}

impl TryFrom<OpSequenceRepr> for OpSequence {
    type Error = Error;

    fn try_from(r: OpSequenceRepr) -> Result<Self> {
        OpSequence::new(r.dim, r.items)
    }
}

impl From<OpSequence> for OpSequenceRepr {
    fn from(x: OpSequence) -> Self {
        OpSequenceRepr {
            dim: x.dim,
            items: x.items,
        }
    }
}

impl OpSequence {
    pub fn new(dim: usize, items: Vec<Matrix>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::EmptySequence);
        }
        for m in &items {
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::Dim(format!(
                    "sequence of dim {dim} contains a {}x{} item",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(OpSequence { dim, items })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[Matrix] {
        &self.items
    }

    /// Entrywise adjoint sequence (x_i*).
    pub fn adjoint(&self) -> OpSequence {
        OpSequence {
            dim: self.dim,
            items: self.items.iter().map(|m| m.adjoint()).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> OpSequence {
        OpSequence {
            dim: self.dim,
            items: self.items.iter().map(|m| m.scale(s)).collect(),
        }
    }

    pub fn add(&self, other: &OpSequence) -> OpSequence {
        assert_eq!(self.dim, other.dim);
        assert_eq!(self.len(), other.len());
        OpSequence {
            dim: self.dim,
            items: self
                .items
                .iter()
                .zip(&other.items)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &OpSequence) -> OpSequence {
        assert_eq!(self.dim, other.dim);
        OpSequence {
            dim: self.dim,
            items: self
                .items
                .iter()
                .zip(&other.items)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    /// Left multiplication (a x_i) by a fixed matrix.
    pub fn left_mul(&self, a: &Matrix) -> OpSequence {
        OpSequence {
            dim: self.dim,
            items: self.items.iter().map(|m| a.mul(m)).collect(),
        }
    }

    /// Right multiplication (x_i a).
    pub fn right_mul(&self, a: &Matrix) -> OpSequence {
        OpSequence {
            dim: self.dim,
            items: self.items.iter().map(|m| m.mul(a)).collect(),
        }
    }

    pub fn zeros_like(&self) -> OpSequence {
        OpSequence {
            dim: self.dim,
            items: vec![Matrix::zeros(self.dim, self.dim); self.items.len()],
        }
    }

    /// max_i |x_i|_inf, the natural scale of a sequence.
    pub fn scale_inf(&self) -> Result<f64> {
        let mut s = 0.0f64;
        for m in &self.items {
            s = s.max(crate::matcore::op_norm(m)?);
        }
        Ok(s)
    }

    /// Re Tr sum_i a_i* b_i, the trace pairing of two sequences.
    pub fn pairing(&self, other: &OpSequence) -> f64 {
        self.items
            .iter()
            .zip(&other.items)
            .map(|(a, b)| a.adjoint_mul(b).trace().re)
            .sum()
    }
}

/// Variable family behind G: exact Rademacher signs or a finite-dimensional
/// Haar-unitary surrogate for free Haar unitaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GModel {
    Rademacher,
    HaarSurrogate { dim: usize, seed: u64 },
}

impl GModel {
    pub fn label(&self) -> String {
        match self {
            GModel::Rademacher => "rademacher".to_string(),
            GModel::HaarSurrogate { dim, seed } => format!("haar-surrogate(D={dim},seed={seed})"),
        }
    }

    /// The sup-norm Khintchine hypothesis behind the factorization
    /// equivalence holds for the free model only.
    pub fn is_surrogate(&self) -> bool {
        matches!(self, GModel::HaarSurrogate { .. })
    }
}

/// Horizontal stack [x_1 ... x_N] (d x Nd); its singular values are those of Rx.
pub fn row_stack(x: &OpSequence) -> Matrix {
    let refs: Vec<&Matrix> = x.items().iter().collect();
    Matrix::hstack(&refs)
}

/// Vertical stack (Nd x d); its singular values are those of Cx.
pub fn col_stack(x: &OpSequence) -> Matrix {
    let refs: Vec<&Matrix> = x.items().iter().collect();
    Matrix::vstack(&refs)
}

/// Unstack a d x Nd row stack into a sequence.
pub fn unstack_row(stack: &Matrix, dim: usize) -> Result<OpSequence> {
    if stack.rows() != dim || stack.cols() % dim != 0 {
        return Err(Error::Dim("row stack shape mismatch".into()));
    }
    let n = stack.cols() / dim;
    let items = (0..n)
        .map(|i| stack.col_slice(i * dim, (i + 1) * dim))
        .collect();
    OpSequence::new(dim, items)
}

/// Unstack an Nd x d column stack into a sequence.
pub fn unstack_col(stack: &Matrix, dim: usize) -> Result<OpSequence> {
    if stack.cols() != dim || stack.rows() % dim != 0 {
        return Err(Error::Dim("column stack shape mismatch".into()));
    }
    let n = stack.rows() / dim;
    let items = (0..n)
        .map(|i| stack.row_slice(i * dim, (i + 1) * dim))
        .collect();
    OpSequence::new(dim, items)
}

/// `sum_i x_i x_i* = |( Rx )*|^2`.
pub fn gram_row(x: &OpSequence) -> Matrix {
    let mut acc = Matrix::zeros(x.dim(), x.dim());
    for m in x.items() {
        acc = acc.add(&m.mul(&m.adjoint()));
    }
    acc.hermitize()
}

/// `sum_i x_i* x_i = |Cx|^2`.
pub fn gram_col(x: &OpSequence) -> Matrix {
    let mut acc = Matrix::zeros(x.dim(), x.dim());
    for m in x.items() {
        acc = acc.add(&m.adjoint_mul(m));
    }
    acc.hermitize()
}

/// Singular-number profile of `Gx`.
///
/// Rademacher: exact enumeration of all 2^N sign blocks, each of width 2^{-N}
/// (block-diagonal structure of the commutative probability factor).
/// Haar surrogate: one (d D) x (d D) matrix `sum_i x_i (x) U_i` with width
/// 1/D per singular value; seeded, labeled surrogate by the caller.
pub fn g_profile(x: &OpSequence, model: GModel) -> Result<Profile> {
    match model {
        GModel::Rademacher => {
            let n = x.len();
            if n > RADEMACHER_CAP {
                return Err(Error::CapExceeded {
                    n,
                    cap: RADEMACHER_CAP,
                });
            }
            let blocks = 1usize << n;
            let weight = 1.0 / blocks as f64;
            // Sign blocks are independent; enumerate in parallel.
            let all: Vec<Vec<f64>> = (0..blocks)
                .into_par_iter()
                .map(|pattern| {
                    let mut s = Matrix::zeros(x.dim(), x.dim());
                    for (i, m) in x.items().iter().enumerate() {
                        if pattern >> i & 1 == 0 {
                            s = s.add(m);
                        } else {
                            s = s.sub(m);
                        }
                    }
                    singular_values(&s)
                })
                .collect::<Result<_>>()?;
            let profiles: Vec<Profile> = all
                .into_iter()
                .map(|vals| Profile::from_values(&vals, weight))
                .collect::<Result<_>>()?;
            Ok(merge(profiles.iter()))
        }
        GModel::HaarSurrogate { dim, seed } => {
            if dim == 0 {
                return Err(Error::InvalidParam("surrogate dimension must be >= 1".into()));
            }
            let mut acc = Matrix::zeros(x.dim() * dim, x.dim() * dim);
            for (i, m) in x.items().iter().enumerate() {
                let u = haar_unitary(dim, seed.wrapping_add(i as u64).wrapping_mul(0x9e3779b9));
                acc = acc.add(&m.kron(&u));
            }
            profile_of(&acc, 1.0 / dim as f64)
        }
    }
}

/// Outcome of the row/column splitting identities for a projection commuting
/// with `|(Rx)*|`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrickReport {
    /// Relative deviation in `|Rx|_p^p = |R(ex)|_p^p + |R((1-e)x)|_p^p`.
    pub row_split_deviation: f64,
    /// Positive part of `|C(fx)|_p - |Cx|_p`, relative.
    pub col_contraction_excess: f64,
    pub max_deviation: f64,
}

/// Verifies the splitting identity for rows and the contraction inequality
/// for columns. `e` must commute with `|(Rx)*|` (build it from
/// `spectral_projection` of the row Gram); the column inequality is checked
/// with the same projection but holds for arbitrary ones.
pub fn lemma_trick_check(x: &OpSequence, e: &Matrix, p: f64) -> Result<TrickReport> {
    let d = x.dim();
    if e.rows() != d || e.cols() != d {
        return Err(Error::Dim("projection dimension mismatch".into()));
    }
    let gram = gram_row(x);
    let modulus = crate::matcore::psd_fn(&gram, f64::sqrt)?;
    let scale = crate::matcore::op_norm(&modulus)?.max(f64::MIN_POSITIVE);
    let comm = e.mul(&modulus).sub(&modulus.mul(e)).max_abs() / scale;
    if comm > 1e-8 {
        return Err(Error::NotCommuting(comm));
    }

    let ident = Matrix::identity(d);
    let ex = x.left_mul(e);
    let fx = x.left_mul(&ident.sub(e));
    let total = schatten_norm(&row_stack(x), p)?.powf(p);
    let head = schatten_norm(&row_stack(&ex), p)?.powf(p);
    let tail = schatten_norm(&row_stack(&fx), p)?.powf(p);
    let row_split_deviation = (total - head - tail).abs() / total.max(f64::MIN_POSITIVE);

    let col_total = schatten_norm(&col_stack(x), p)?;
    let col_proj = schatten_norm(&col_stack(&x.left_mul(e)), p)?;
    let col_contraction_excess =
        (col_proj - col_total).max(0.0) / col_total.max(f64::MIN_POSITIVE);

    Ok(TrickReport {
        row_split_deviation,
        col_contraction_excess,
        max_deviation: row_split_deviation.max(col_contraction_excess),
    })
}
