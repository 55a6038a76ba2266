//! Disagreement counting, the ideal matrices `K*` / `B*`, and the validity
//! test that turns a solver output back into a clustering.

use crate::clustering::Clustering;
use crate::error::{invalid, Error, Result};
use crate::graph::PartialGraph;
use crate::matrix::SymMatrix;
use crate::tolerances::Tolerances;

fn check_sizes(g: &PartialGraph, c: &Clustering) -> Result<()> {
    if g.n() != c.n() {
        return Err(Error::SizeMismatch { expected: g.n(), got: c.n() });
    }
    Ok(())
}

/// Observed missing edges inside clusters plus observed edges across
/// clusters. Unobserved pairs never count.
pub fn count_disagreements(g: &PartialGraph, c: &Clustering) -> Result<usize> {
    check_sizes(g, c)?;
    Ok(g.observed().iter().filter(|p| c.same_cluster(p.i, p.j) != p.edge).count())
}

/// Block-diagonal all-ones matrix of the clustering, diagonal included.
pub fn build_kstar(c: &Clustering) -> SymMatrix {
    SymMatrix::from_fn(c.n(), |i, j| if c.same_cluster(i, j) { 1.0 } else { 0.0 })
}

/// Observed disagreement matrix: `-1` at observed missing within-cluster
/// edges, `+1` at observed cross-cluster edges, zero elsewhere.
pub fn build_bstar(g: &PartialGraph, c: &Clustering) -> Result<SymMatrix> {
    check_sizes(g, c)?;
    let mut b = SymMatrix::zeros(g.n());
    for p in g.observed() {
        match (c.same_cluster(p.i, p.j), p.edge) {
            (true, false) => b.set(p.i, p.j, -1.0),
            (false, true) => b.set(p.i, p.j, 1.0),
            _ => {}
        }
    }
    Ok(b)
}

/// `I + A` restricted to the observed pairs, with the diagonal always 1.
pub fn observed_data(g: &PartialGraph) -> SymMatrix {
    let mut d = SymMatrix::identity(g.n());
    for p in g.observed().iter().filter(|p| p.edge) {
        d.set(p.i, p.j, 1.0);
    }
    d
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    pub valid: bool,
    pub clustering: Option<Clustering>,
    /// Largest `|K_ij - round(K_ij)|`.
    pub max_deviation: f64,
}

/// Rounds `k` entrywise to `{0, 1}` and accepts it iff every entry is within
/// `tol` of its rounding, the rounded diagonal is all ones, and "rounded
/// entry is 1" is an equivalence relation. On success the equivalence
/// classes are returned as the clustering.
pub fn check_validity(k: &SymMatrix, tol: f64) -> Result<ValidityReport> {
    if !(0.0..0.5).contains(&tol) {
        return Err(invalid(format!("validity tolerance {tol} outside [0, 0.5)")));
    }
    if !k.is_finite() {
        return Err(Error::NonFinite);
    }
    let asym = k.max_asymmetry();
    if asym > Tolerances::DEFAULT.symmetry {
        return Err(Error::NonSymmetric(asym));
    }
    let n = k.n();
    let round = |v: f64| v >= 0.5;
    let max_deviation = k
        .as_slice()
        .iter()
        .map(|&v| (v - if round(v) { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    let invalid = ValidityReport { valid: false, clustering: None, max_deviation };
    if max_deviation > tol || (0..n).any(|i| !round(k.get(i, i))) {
        return Ok(invalid);
    }

    // connected components of the rounded-one relation
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    let mut stack = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        stack.push(s);
        while let Some(u) = stack.pop() {
            for (v, &kv) in k.row(u).iter().enumerate() {
                if comp[v] == usize::MAX && round(kv) {
                    comp[v] = next;
                    stack.push(v);
                }
            }
        }
        next += 1;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if round(k.get(i, j)) != (comp[i] == comp[j]) {
                return Ok(invalid);
            }
        }
    }
    Ok(ValidityReport { valid: true, clustering: Some(Clustering::from_labels(&comp)?), max_deviation })
}
