//! Eigenpairs of a symmetric matrix with `|lambda| > t`, for the low-rank
//! case: Householder tridiagonalization, Sturm bisection for the wanted
//! eigenvalues, inverse iteration for their vectors, back-transformation.
//! Every returned pair is checked against the input; callers fall back to
//! a full decomposition when `None` is returned.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::tridiag::{tridiag_in_place, tridiag_in_place_scratch};
use faer::linalg::householder::{
    apply_block_householder_sequence_on_the_left_in_place_scratch,
    apply_block_householder_sequence_on_the_left_in_place_with_conj,
};
use faer::linalg::qr::no_pivoting::factor::recommended_block_size;
use faer::{Conj, Mat, Par};

use crate::matrix::SymMatrix;

pub(crate) struct Selected {
    /// Signed eigenvalues.
    pub values: Vec<f64>,
    /// One column per value.
    pub vectors: Mat<f64>,
}

// inverse iteration sweeps per vector
const INVERSE_STEPS: usize = 3;
// relative gap below which eigenvalues are reorthogonalized as a cluster
const CLUSTER_GAP: f64 = 1e-3;
// accepted residual and loss of orthogonality, relative to the norm bound
const CHECK_TOL: f64 = 1e-9;

struct Tridiagonal {
    d: Vec<f64>,
    e: Vec<f64>,
    pivmin: f64,
}

impl Tridiagonal {
    /// Eigenvalues of the block `lo..hi` strictly below `x`.
    fn count_below(&self, lo: usize, hi: usize, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.d[lo] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in (lo + 1)..hi {
            if q.abs() < self.pivmin {
                q = -self.pivmin;
            }
            q = self.d[i] - x - self.e[i - 1] * self.e[i - 1] / q;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue of block `lo..hi` inside `[-bound, bound]`.
    fn bisect(&self, lo: usize, hi: usize, k: usize, bound: f64) -> f64 {
        let (mut a, mut b) = (-bound, bound);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if b - a <= 2.0 * f64::EPSILON * a.abs().max(b.abs()) + self.pivmin || mid == a || mid == b {
                break;
            }
            if self.count_below(lo, hi, mid) > k {
                b = mid;
            } else {
                a = mid;
            }
        }
        0.5 * (a + b)
    }

    /// Solves `(T - lambda I) x = rhs` on block `lo..hi` by Gaussian
    /// elimination with partial pivoting; tiny pivots are replaced.
    fn shifted_solve(&self, lo: usize, hi: usize, lambda: f64, rhs: &mut [f64], tiny: f64) {
        let m = hi - lo;
        // rows hold (diag, first super, second super) after elimination
        let mut diag: Vec<f64> = (0..m).map(|i| self.d[lo + i] - lambda).collect();
        let mut up1: Vec<f64> = (0..m).map(|i| if i + 1 < m { self.e[lo + i] } else { 0.0 }).collect();
        let mut up2 = vec![0.0; m];
        for i in 0..m.saturating_sub(1) {
            let sub = self.e[lo + i];
            if sub.abs() > diag[i].abs() {
                // swap rows i and i + 1
                let (nd, nu1, nu2) = (sub, diag[i + 1], up1[i + 1]);
                let (od, ou1) = (diag[i], up1[i]);
                diag[i] = nd;
                up1[i] = nu1;
                up2[i] = nu2;
                rhs.swap(i, i + 1);
                let f = od / nd;
                diag[i + 1] = ou1 - f * nu1;
                up1[i + 1] = -f * nu2;
                rhs[i + 1] -= f * rhs[i];
            } else {
                if diag[i].abs() < tiny {
                    diag[i] = tiny.copysign(diag[i]);
                }
                let f = sub / diag[i];
                up2[i] = 0.0;
                diag[i + 1] -= f * up1[i];
                rhs[i + 1] -= f * rhs[i];
            }
        }
        if diag[m - 1].abs() < tiny {
            diag[m - 1] = tiny.copysign(diag[m - 1]);
        }
        for i in (0..m).rev() {
            let mut v = rhs[i];
            if i + 1 < m {
                v -= up1[i] * rhs[i + 1];
            }
            if i + 2 < m {
                v -= up2[i] * rhs[i + 2];
            }
            rhs[i] = v / diag[i];
        }
    }
}

fn normalize(v: &mut [f64]) -> bool {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    true
}

/// All eigenpairs with `|lambda| > t`, or `None` if there are more than
/// `max_count` of them or a check fails.
pub(crate) fn eigenpairs_above(m: &SymMatrix, t: f64, max_count: usize) -> Option<Selected> {
    let n = m.n();
    if n < 2 || !(t >= 0.0) {
        return None;
    }
    let mut a = Mat::<f64>::from_fn(n, n, |i, j| m.get(i, j));
    let bs = recommended_block_size::<f64>(n, n);
    let mut h = Mat::<f64>::zeros(bs, n - 1);
    {
        let mut mem = MemBuffer::new(tridiag_in_place_scratch::<f64>(n, Par::Seq, Default::default()));
        tridiag_in_place(a.as_mut(), h.as_mut(), Par::Seq, MemStack::new(&mut mem), Default::default());
    }
    let d: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    let mut e: Vec<f64> = (0..n - 1).map(|i| a[(i + 1, i)]).collect();
    let bound = (0..n)
        .map(|i| d[i].abs() + if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < n { e[i].abs() } else { 0.0 })
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let split_tol = 4.0 * f64::EPSILON * bound;
    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 0..n - 1 {
        if e[i].abs() <= split_tol {
            e[i] = 0.0;
            blocks.push((start, i + 1));
            start = i + 1;
        }
    }
    blocks.push((start, n));
    let emax2 = e.iter().fold(0.0f64, |acc, x| acc.max(x * x));
    let tri = Tridiagonal { d, e, pivmin: f64::MIN_POSITIVE * emax2.max(1.0) };

    // (block start, block end, signed value)
    let mut wanted: Vec<(usize, usize, f64)> = Vec::new();
    for &(lo, hi) in &blocks {
        let size = hi - lo;
        let below = tri.count_below(lo, hi, -t);
        let above = size - tri.count_below(lo, hi, t);
        if below + above + wanted.len() > max_count {
            return None;
        }
        for k in (0..below).chain((size - above)..size) {
            let lambda = tri.bisect(lo, hi, k, bound * (1.0 + 1e-12));
            if lambda.abs() > t {
                wanted.push((lo, hi, lambda));
            }
        }
    }
    let r = wanted.len();
    let mut vectors = Mat::<f64>::zeros(n, r);
    let tiny = f64::EPSILON * bound;
    for idx in 0..r {
        let (lo, hi, lambda) = wanted[idx];
        let size = hi - lo;
        let cluster: Vec<usize> = (0..idx)
            .filter(|&j| wanted[j].0 == lo && (wanted[j].2 - lambda).abs() <= CLUSTER_GAP * bound)
            .collect();
        let mut x: Vec<f64> = (0..size).map(|i| 1.0 + ((i * 7919 + idx * 104_729) % 1013) as f64 / 1013.0).collect();
        for _ in 0..INVERSE_STEPS {
            tri.shifted_solve(lo, hi, lambda, &mut x, tiny);
            for &j in &cluster {
                let dot: f64 = (0..size).map(|i| x[i] * vectors[(lo + i, j)]).sum();
                for i in 0..size {
                    x[i] -= dot * vectors[(lo + i, j)];
                }
            }
            if !normalize(&mut x) {
                return None;
            }
        }
        for i in 0..size {
            vectors[(lo + i, idx)] = x[i];
        }
    }
    if r > 0 {
        let mut mem =
            MemBuffer::new(apply_block_householder_sequence_on_the_left_in_place_scratch::<f64>(n - 1, bs, r));
        apply_block_householder_sequence_on_the_left_in_place_with_conj(
            a.as_ref().submatrix(1, 0, n - 1, n - 1),
            h.as_ref(),
            Conj::No,
            vectors.as_mut().subrows_mut(1, n - 1),
            Par::Seq,
            MemStack::new(&mut mem),
        );
    }

    let values: Vec<f64> = wanted.iter().map(|w| w.2).collect();
    let g = m.to_faer();
    let gv = &g * &vectors;
    let gram = vectors.transpose() * &vectors;
    for c in 0..r {
        let res: f64 = (0..n).map(|i| (gv[(i, c)] - values[c] * vectors[(i, c)]).powi(2)).sum::<f64>().sqrt();
        if !(res <= CHECK_TOL * bound) {
            return None;
        }
        for c2 in 0..r {
            let target = if c == c2 { 1.0 } else { 0.0 };
            if !((gram[(c, c2)] - target).abs() <= CHECK_TOL) {
                return None;
            }
        }
    }
    Some(Selected { values, vectors })
}
