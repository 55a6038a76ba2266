use crate::clustering::Clustering;
use crate::error::{invalid, Error, Result};
use crate::graph::PartialGraph;
use crate::matrix::SymMatrix;

/// Orthonormal basis of the column space of `K*`: column `c` is the
/// indicator of cluster `c` scaled by `1/sqrt(|c|)`.
///
/// Products with `UU^T` are block averages, so projections onto `T` cost
/// `O(n^2)` instead of a dense matrix product.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    labels: Vec<usize>,
    sizes: Vec<usize>,
}

impl SubspaceBasis {
    pub fn new(c: &Clustering) -> Self {
        Self { labels: c.labels().to_vec(), sizes: c.sizes().to_vec() }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn rank(&self) -> usize {
        self.sizes.len()
    }

    /// `U` as a row-major `n x p` array.
    pub fn u(&self) -> Vec<f64> {
        let p = self.rank();
        let mut u = vec![0.0; self.n() * p];
        for (i, &c) in self.labels.iter().enumerate() {
            u[i * p + c] = 1.0 / (self.sizes[c] as f64).sqrt();
        }
        u
    }

    /// `UU^T`: `1/|c|` on each diagonal block, zero elsewhere.
    pub fn uut(&self) -> SymMatrix {
        let l = &self.labels;
        SymMatrix::from_fn(self.n(), |i, j| if l[i] == l[j] { 1.0 / self.sizes[l[i]] as f64 } else { 0.0 })
    }

    fn check(&self, m: &SymMatrix) -> Result<()> {
        if m.n() != self.n() {
            return Err(Error::SizeMismatch { expected: self.n(), got: m.n() });
        }
        Ok(())
    }
}

/// `P_T(M) = UU^T M + M UU^T - UU^T M UU^T`.
pub fn project_t(m: &SymMatrix, b: &SubspaceBasis) -> Result<SymMatrix> {
    b.check(m)?;
    let n = m.n();
    let p = b.rank();
    // row_mean[c * n + j] = mean of column j over the rows of cluster c
    let mut row_mean = vec![0.0; p * n];
    for i in 0..n {
        let c = b.labels[i];
        for (acc, &v) in row_mean[c * n..(c + 1) * n].iter_mut().zip(m.row(i)) {
            *acc += v;
        }
    }
    for c in 0..p {
        let inv = 1.0 / b.sizes[c] as f64;
        row_mean[c * n..(c + 1) * n].iter_mut().for_each(|v| *v *= inv);
    }
    let mut block_mean = vec![0.0; p * p];
    for c in 0..p {
        for j in 0..n {
            block_mean[c * p + b.labels[j]] += row_mean[c * n + j];
        }
        for d in 0..p {
            block_mean[c * p + d] /= b.sizes[d] as f64;
        }
    }
    Ok(SymMatrix::from_fn(n, |i, j| {
        let (ci, cj) = (b.labels[i], b.labels[j]);
        row_mean[ci * n + j] + row_mean[cj * n + i] - block_mean[ci * p + cj]
    }))
}

/// `P_{T^perp}(M) = M - P_T(M)`.
pub fn project_tperp(m: &SymMatrix, b: &SubspaceBasis) -> Result<SymMatrix> {
    Ok(m - &project_t(m, b)?)
}

/// A set of node pairs, interpreted symmetrically. Diagonal pairs `(i, i)`
/// may be stored but most sets in this crate hold off-diagonal pairs only
/// and leave the diagonal to the `include_diagonal` flag of [`project_set`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    n: usize,
    mask: Vec<bool>,
}

impl IndexSet {
    pub fn empty(n: usize) -> Self {
        Self { n, mask: vec![false; n * n] }
    }

    /// All off-diagonal pairs.
    pub fn all_pairs(n: usize) -> Self {
        let mut s = Self { n, mask: vec![true; n * n] };
        for i in 0..n {
            s.mask[i * n + i] = false;
        }
        s
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut s = Self::empty(n);
        for (k, (i, j)) in pairs.into_iter().enumerate() {
            for idx in [i, j] {
                if idx >= n {
                    return Err(Error::IndexOutOfRange { line: k + 1, index: idx, n });
                }
            }
            s.insert(i, j);
        }
        Ok(s)
    }

    /// Observed off-diagonal pairs of `g` (`Omega_obs` without its diagonal).
    pub fn observed(g: &PartialGraph) -> Self {
        let mut s = Self::empty(g.n());
        for p in g.observed() {
            s.insert(p.i, p.j);
        }
        s
    }

    /// Off-diagonal support of `m`.
    pub fn support(m: &SymMatrix) -> Self {
        let n = m.n();
        let mut s = Self::empty(n);
        for i in 0..n {
            for j in (i + 1)..n {
                if m.get(i, j) != 0.0 {
                    s.insert(i, j);
                }
            }
        }
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, i: usize, j: usize) {
        self.mask[i * self.n + j] = true;
        self.mask[j * self.n + i] = true;
    }

    #[inline]
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.mask[i * self.n + j]
    }

    /// Stored pairs with `i <= j`, in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| (i..n).filter(move |&j| self.contains(i, j)).map(move |j| (i, j)))
    }

    pub fn len(&self) -> usize {
        self.pairs().count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    /// Off-diagonal pairs not in `self`.
    pub fn complement(&self) -> Self {
        let mut s = Self { n: self.n, mask: self.mask.iter().map(|b| !b).collect() };
        for i in 0..self.n {
            s.mask[i * self.n + i] = false;
        }
        s
    }

    fn combine(&self, other: &Self, f: impl Fn(bool, bool) -> bool) -> Self {
        assert_eq!(self.n, other.n, "index set dimension mismatch");
        Self { n: self.n, mask: self.mask.iter().zip(&other.mask).map(|(&a, &b)| f(a, b)).collect() }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && !b)
    }
}

/// Zeroes every entry of `m` outside `s`. Diagonal entries are kept when
/// `include_diagonal` is set or when `(i, i)` is stored in `s`.
pub fn project_set(m: &SymMatrix, s: &IndexSet, include_diagonal: bool) -> Result<SymMatrix> {
    if s.n() != m.n() {
        return Err(Error::SizeMismatch { expected: m.n(), got: s.n() });
    }
    Ok(SymMatrix::from_fn(m.n(), |i, j| {
        let keep = s.contains(i, j) || (i == j && include_diagonal);
        if keep {
            m.get(i, j)
        } else {
            0.0
        }
    }))
}

/// Golfing sampling operator: keeps the diagonal, scales off-diagonal
/// entries in `gk` by `1/q`, and zeroes the rest.
pub fn r_gamma_k(m: &SymMatrix, gk: &IndexSet, q: f64) -> Result<SymMatrix> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(invalid(format!("sampling rate q = {q} outside (0, 1]")));
    }
    if gk.n() != m.n() {
        return Err(Error::SizeMismatch { expected: m.n(), got: gk.n() });
    }
    let inv = 1.0 / q;
    Ok(SymMatrix::from_fn(m.n(), |i, j| {
        if i == j {
            m.get(i, i)
        } else if gk.contains(i, j) {
            inv * m.get(i, j)
        } else {
            0.0
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sym(n: usize, rng: &mut ChaCha8Rng) -> SymMatrix {
        SymMatrix::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
    }

    /// Dense `UU^T M + M UU^T - UU^T M UU^T` with explicit matrix products.
    fn project_t_dense(m: &SymMatrix, b: &SubspaceBasis) -> SymMatrix {
        let n = m.n();
        let mul = |x: &[f64], y: &[f64]| -> Vec<f64> {
            let mut out = vec![0.0; n * n];
            for i in 0..n {
                for k in 0..n {
                    for j in 0..n {
                        out[i * n + j] += x[i * n + k] * y[k * n + j];
                    }
                }
            }
            out
        };
        let a = b.uut();
        let (a, m) = (a.as_slice(), m.as_slice());
        let am = mul(a, m);
        let ma = mul(m, a);
        let ama = mul(&am, a);
        let data: Vec<f64> = (0..n * n).map(|k| am[k] + ma[k] - ama[k]).collect();
        SymMatrix::from_fn(n, |i, j| 0.5 * (data[i * n + j] + data[j * n + i]))
    }

    #[test]
    fn project_t_matches_dense_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for labels in [vec![0, 0, 1, 1, 1, 2], vec![0; 5], vec![0, 1, 0, 2, 1, 3, 3]] {
            let c = Clustering::from_labels(&labels).unwrap();
            let b = SubspaceBasis::new(&c);
            let m = random_sym(c.n(), &mut rng);
            let fast = project_t(&m, &b).unwrap();
            let dense = project_t_dense(&m, &b);
            assert!((&fast - &dense).max_abs() < 1e-12);
        }
    }

    #[test]
    fn project_t_hand_example() {
        let b = SubspaceBasis::new(&Clustering::single(2).unwrap());
        let m = SymMatrix::from_diag(&[1.0, 0.0]);
        let p = project_t(&m, &b).unwrap();
        let expect = SymMatrix::from_rows(&[vec![0.75, 0.25], vec![0.25, -0.25]]).unwrap();
        assert!((&p - &expect).max_abs() < 1e-15);
    }

    #[test]
    fn uut_lies_in_t() {
        let b = SubspaceBasis::new(&Clustering::from_labels(&[0, 1, 1, 0, 2]).unwrap());
        let uut = b.uut();
        assert!((&project_t(&uut, &b).unwrap() - &uut).max_abs() < 1e-14);
        assert!(project_tperp(&uut, &b).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn u_columns_orthonormal() {
        let b = SubspaceBasis::new(&Clustering::from_labels(&[0, 1, 1, 0, 2, 1]).unwrap());
        let (n, p) = (b.n(), b.rank());
        let u = b.u();
        for a in 0..p {
            for c in 0..p {
                let dot: f64 = (0..n).map(|i| u[i * p + a] * u[i * p + c]).sum();
                let want = if a == c { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn dimension_mismatch_errors() {
        let b = SubspaceBasis::new(&Clustering::single(3).unwrap());
        assert!(project_t(&SymMatrix::zeros(2), &b).is_err());
        assert!(project_set(&SymMatrix::zeros(2), &IndexSet::empty(3), true).is_err());
        assert!(IndexSet::from_pairs(3, [(0, 3)]).is_err());
    }

    #[test]
    fn project_set_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_sym(5, &mut rng);
        assert_eq!(project_set(&m, &IndexSet::all_pairs(5), true).unwrap(), m);
        assert_eq!(project_set(&m, &IndexSet::empty(5), false).unwrap(), SymMatrix::zeros(5));
        let s = IndexSet::from_pairs(5, [(0, 1), (3, 2), (4, 4)]).unwrap();
        let inside = project_set(&m, &s, false).unwrap();
        let outside = project_set(&m, &s.complement(), false).unwrap();
        let diag_rest = SymMatrix::from_fn(5, |i, j| if i == j && i != 4 { m.get(i, i) } else { 0.0 });
        let total = &(&inside + &outside) + &diag_rest;
        assert_eq!(total, m);
        assert_eq!(inside.get(4, 4), m.get(4, 4));
        assert_eq!(inside.get(2, 3), m.get(2, 3));
    }

    #[test]
    fn r_gamma_k_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = random_sym(4, &mut rng);
        assert_eq!(r_gamma_k(&m, &IndexSet::all_pairs(4), 1.0).unwrap(), m);
        assert_eq!(r_gamma_k(&m, &IndexSet::empty(4), 0.3).unwrap(), SymMatrix::from_diag(&m.diag()));

        let mut one = SymMatrix::zeros(2);
        one.set(0, 1, 1.0);
        let out = r_gamma_k(&one, &IndexSet::from_pairs(2, [(0, 1)]).unwrap(), 0.5).unwrap();
        assert_eq!(out.get(0, 1), 2.0);
        assert_eq!(out.get(1, 0), 2.0);
        assert!(r_gamma_k(&m, &IndexSet::empty(4), 0.0).is_err());
        assert!(r_gamma_k(&m, &IndexSet::empty(4), 1.5).is_err());
    }

    #[test]
    fn index_set_algebra() {
        let a = IndexSet::from_pairs(4, [(0, 1), (1, 2)]).unwrap();
        let b = IndexSet::from_pairs(4, [(1, 2), (2, 3)]).unwrap();
        assert_eq!(a.union(&b).len(), 3);
        assert_eq!(a.intersection(&b).pairs().collect::<Vec<_>>(), vec![(1, 2)]);
        assert_eq!(a.difference(&b).pairs().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(a.complement().len(), 4);
        assert!(IndexSet::empty(3).is_empty());
    }
}
