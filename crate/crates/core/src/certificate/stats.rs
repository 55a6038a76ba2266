use crate::clustering::Clustering;
use crate::error::{invalid, Error, Result};
use crate::graph::PartialGraph;

/// Bad-entry counts between every node and every cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct DisagreementStats {
    /// `d[i][c]`: entries between node `i` and cluster `c` that are either
    /// unobserved or disagree with the clustering (self-pairs excluded).
    pub d: Vec<Vec<usize>>,
    /// `max d[i][c] / min(|c|, |C(i)|)`.
    pub dmax: f64,
    /// `3 (1 - 1/K_1) dmax + 1/K_p^2`.
    pub alpha: f64,
    pub kmin: usize,
    /// Largest cluster size.
    pub k1: usize,
    /// Smallest cluster size.
    pub kp: usize,
}

pub fn disagreement_stats(g: &PartialGraph, c: &Clustering) -> Result<DisagreementStats> {
    if g.n() != c.n() {
        return Err(Error::SizeMismatch { expected: g.n(), got: c.n() });
    }
    let n = g.n();
    let p = c.num_clusters();
    let mut d = vec![vec![0usize; p]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let same = c.same_cluster(i, j);
            let bad = match g.get(i, j) {
                None => true,
                Some(edge) => edge != same,
            };
            if bad {
                d[i][c.label(j)] += 1;
            }
        }
    }
    let sizes = c.sizes();
    let mut dmax = 0.0f64;
    for (i, row) in d.iter().enumerate() {
        let own = sizes[c.label(i)];
        for (cl, &count) in row.iter().enumerate() {
            dmax = dmax.max(count as f64 / sizes[cl].min(own) as f64);
        }
    }
    let (k1, kp) = (c.k_max(), c.k_min());
    let alpha = 3.0 * (1.0 - 1.0 / k1 as f64) * dmax + 1.0 / (kp * kp) as f64;
    Ok(DisagreementStats { d, dmax, alpha, kmin: kp, k1, kp })
}

/// Range of `eta` for which exact recovery is guaranteed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaInterval {
    pub lo: f64,
    pub hi: f64,
    pub feasible: bool,
}

impl EtaInterval {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// `n dmax / kmin`, the bad-entry ratio all worst-case conditions are
/// phrased in.
pub fn bad_entry_ratio(n: usize, stats: &DisagreementStats) -> f64 {
    n as f64 * stats.dmax / stats.kmin as f64
}

/// `(1 / (1 + kmin/2), 1 - kmin / ((1 + 3/(4 n dmax)) kmin - 1))` when
/// `n dmax / kmin < 1/4`; otherwise infeasible with `hi = lo`.
pub fn theorem2_interval(n: usize, stats: &DisagreementStats) -> EtaInterval {
    let kmin = stats.kmin as f64;
    let lo = 1.0 / (1.0 + kmin / 2.0);
    if bad_entry_ratio(n, stats) >= 0.25 {
        return EtaInterval { lo, hi: lo, feasible: false };
    }
    let hi = if stats.dmax == 0.0 {
        1.0
    } else {
        1.0 - kmin / ((1.0 + 3.0 / (4.0 * n as f64 * stats.dmax)) * kmin - 1.0)
    };
    EtaInterval { lo, hi, feasible: lo < hi }
}

/// Sufficient condition for `T` and the bad-entry space to meet only at 0.
pub fn check_space_intersection(n: usize, stats: &DisagreementStats) -> bool {
    bad_entry_ratio(n, stats) < 1.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem3Report {
    pub tau_ok: bool,
    pub kmin_ok: bool,
    /// `c_k sqrt(n (ln n)^4 / p0)`.
    pub kmin_threshold: f64,
    /// `1 / (1 + sqrt(n p0))`.
    pub eta: f64,
}

/// Conditions of the random-model guarantee. The constants `c_d` and `c_k`
/// are not pinned down by the theory; see [`DEFAULT_C_D`] and
/// [`DEFAULT_C_K`] for heuristic choices.
pub fn theorem3_check(n: usize, p0: f64, tau: f64, kmin: usize, c_d: f64, c_k: f64) -> Result<Theorem3Report> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    if !(p0 > 0.0 && p0 <= 1.0) {
        return Err(invalid(format!("p0 = {p0} outside (0, 1]")));
    }
    if !(0.0..1.0).contains(&tau) {
        return Err(invalid(format!("tau = {tau} outside [0, 1)")));
    }
    if !(c_d >= 0.0 && c_k >= 0.0) {
        return Err(invalid("constants must be non-negative"));
    }
    let nf = n as f64;
    let kmin_threshold = c_k * (nf * nf.ln().powi(4) / p0).sqrt();
    Ok(Theorem3Report {
        tau_ok: tau <= c_d,
        kmin_ok: kmin as f64 >= kmin_threshold,
        kmin_threshold,
        eta: 1.0 / (1.0 + (nf * p0).sqrt()),
    })
}

/// Heuristic flip-rate constant.
pub const DEFAULT_C_D: f64 = 0.05;
/// Heuristic cluster-size constant.
pub const DEFAULT_C_K: f64 = 1.0;
