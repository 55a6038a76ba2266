//! Dense symmetric kernels: SVD via the symmetric eigendecomposition,
//! entrywise and singular-value soft thresholding, matrix norms, and the
//! projections onto `T`, index sets and the golfing sampling operator.

mod projections;
mod selected;

pub use projections::{project_set, project_t, project_tperp, r_gamma_k, IndexSet, SubspaceBasis};

use faer::{Mat, Side};

use crate::error::{invalid, Error, Result};
use crate::matrix::SymMatrix;

/// SVD of a symmetric matrix `M = V diag(l) V^T`, written as
/// `M = sum_k s_k (sign_k v_k) v_k^T` with `s_k = |l_k|`.
#[derive(Debug, Clone)]
pub struct SymSvd {
    /// Singular values, non-increasing.
    pub values: Vec<f64>,
    /// Sign of the eigenvalue behind each singular value.
    pub signs: Vec<f64>,
    n: usize,
    // column k (contiguous) is the k-th singular vector
    vectors: Vec<f64>,
}

impl SymSvd {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Right singular vector `k` (the left one is `signs[k]` times this).
    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.n..(k + 1) * self.n]
    }

    /// Signed eigenvalue `signs[k] * values[k]`.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        self.signs[k] * self.values[k]
    }

    /// `sum_k f(s_k) sign_k v_k v_k^T`, skipping terms with `f(s_k) == 0`.
    pub fn reassemble_with(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.n;
        let kept: Vec<(usize, f64)> = (0..self.values.len())
            .filter_map(|k| {
                let w = f(self.values[k]) * self.signs[k];
                (w != 0.0).then_some((k, w))
            })
            .collect();
        if kept.is_empty() {
            return SymMatrix::zeros(n);
        }
        let r = kept.len();
        let v = Mat::from_fn(n, r, |i, c| self.vector(kept[c].0)[i]);
        let vw = Mat::from_fn(n, r, |i, c| v[(i, c)] * kept[c].1);
        let prod = &vw * v.transpose();
        SymMatrix::from_faer(&prod)
    }

    pub fn reassemble(&self) -> SymMatrix {
        self.reassemble_with(|s| s)
    }
}

/// SVD of a symmetric matrix through its eigendecomposition.
pub fn svd_sym(m: &SymMatrix) -> Result<SymSvd> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = m.n();
    let evd = m
        .to_faer()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| invalid(format!("eigendecomposition failed: {e:?}")))?;
    let lambda = evd.S().column_vector();
    let u = evd.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| lambda[b].abs().total_cmp(&lambda[a].abs()));
    let mut vectors = Vec::with_capacity(n * n);
    for &k in &order {
        vectors.extend((0..n).map(|i| u[(i, k)]));
    }
    Ok(SymSvd {
        values: order.iter().map(|&k| lambda[k].abs()).collect(),
        signs: order.iter().map(|&k| if lambda[k] < 0.0 { -1.0 } else { 1.0 }).collect(),
        n,
        vectors,
    })
}

/// Eigenvalues only; cheaper than [`svd_sym`] when vectors are not needed.
pub fn eigenvalues_sym(m: &SymMatrix) -> Result<Vec<f64>> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    m.to_faer()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| invalid(format!("eigendecomposition failed: {e:?}")))
}

#[inline]
pub(crate) fn shrink(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Entrywise soft thresholding: every entry moves toward zero by `t`.
pub fn soft_threshold(m: &SymMatrix, t: f64) -> Result<SymMatrix> {
    if !(t >= 0.0) {
        return Err(invalid(format!("threshold must be non-negative, got {t}")));
    }
    Ok(m.map(|v| shrink(v, t)))
}

/// Singular value soft thresholding (proximal map of `t * ||.||_*`).
pub fn sv_threshold(m: &SymMatrix, t: f64) -> Result<SymMatrix> {
    if !(t >= 0.0) {
        return Err(invalid(format!("threshold must be non-negative, got {t}")));
    }
    Ok(sv_threshold_with_norm(m, t)?.0)
}

/// [`sv_threshold`] together with the nuclear norm of the result. Takes the
/// selected-eigenpair route when at most a quarter of the spectrum survives,
/// the full decomposition otherwise.
pub(crate) fn sv_threshold_with_norm(m: &SymMatrix, t: f64) -> Result<(SymMatrix, f64)> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = m.n();
    if let Some(sel) = selected::eigenpairs_above(m, t, n / 4) {
        let weights: Vec<f64> = sel.values.iter().map(|&l| l - t.copysign(l)).collect();
        let nuclear = weights.iter().map(|w| w.abs()).sum();
        if weights.is_empty() {
            return Ok((SymMatrix::zeros(n), nuclear));
        }
        let v = &sel.vectors;
        let vw = Mat::from_fn(n, weights.len(), |i, c| v[(i, c)] * weights[c]);
        return Ok((SymMatrix::from_faer(&(&vw * v.transpose())), nuclear));
    }
    let svd = svd_sym(m)?;
    let nuclear = svd.values.iter().map(|s| (s - t).max(0.0)).sum();
    Ok((svd.reassemble_with(|s| (s - t).max(0.0)), nuclear))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    /// Sum of absolute entries.
    L1,
    /// Largest absolute entry.
    Linf,
    Fro,
    Nuclear,
    Spectral,
}

/// The named matrix norm. Spectral and nuclear norms go through the
/// eigenvalues; a non-finite matrix yields `NaN` for those two.
pub fn norm(m: &SymMatrix, kind: NormKind) -> f64 {
    match kind {
        NormKind::L1 => m.l1(),
        NormKind::Linf => m.max_abs(),
        NormKind::Fro => m.frobenius(),
        NormKind::Nuclear => eigenvalues_sym(m).map_or(f64::NAN, |l| l.iter().map(|v| v.abs()).sum()),
        NormKind::Spectral => eigenvalues_sym(m).map_or(f64::NAN, |l| l.iter().fold(0.0, |a, v| a.max(v.abs()))),
    }
}

pub fn spectral_norm(m: &SymMatrix) -> f64 {
    norm(m, NormKind::Spectral)
}

pub fn nuclear_norm(m: &SymMatrix) -> f64 {
    norm(m, NormKind::Nuclear)
}
