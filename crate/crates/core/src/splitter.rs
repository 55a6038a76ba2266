//! Inexact augmented Lagrangian solver for
//!
//! ```text
//! min  eta ||B||_1 + (1 - eta) ||K||_*
//! s.t. P_obs(B + K) = P_obs(I + A)
//! ```
//!
//! Unobserved entries are handled by a free slack on the complement of the
//! observation set, so the `K` step sees a completed matrix whose unobserved
//! entries equal the current `K`, and `B` is identically zero there.

use crate::error::{invalid, Error, Result};
use crate::graph::PartialGraph;
use crate::matops::{eigenvalues_sym, nuclear_norm, shrink, sv_threshold_with_norm};
use crate::matrix::SymMatrix;
use crate::tolerances::Tolerances;
use crate::validity::observed_data;

/// Starting point of the iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Init {
    /// `B = K = 0`.
    #[default]
    Zero,
    /// `B = P_obs(I + A)`, `K = 0`.
    ObservedData,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Weight of the sparse term, in `(0, 1)`.
    pub eta: f64,
    /// Stop once both relative residuals (primal and dual) drop to this value.
    pub tol_rel: f64,
    pub max_iters: usize,
    /// Initial penalty; `None` means `1.25 / ||P_obs(I + A)||`.
    pub mu0: Option<f64>,
    /// Factor by which the penalty is raised or lowered to keep the primal
    /// and dual residuals balanced.
    pub rho: f64,
    /// Upper cap on the penalty.
    pub mu_max: f64,
    /// Over-relaxation factor in `(0, 2)`; 1 is plain alternation.
    pub relax: f64,
    pub init: Init,
}

impl SolverConfig {
    pub fn new(eta: f64) -> Self {
        Self {
            eta,
            tol_rel: Tolerances::DEFAULT.solver_rel_residual,
            max_iters: 1000,
            mu0: None,
            rho: 1.5,
            mu_max: 1e7,
            relax: 1.5,
            init: Init::Zero,
        }
    }

    pub fn with_eta(&self, eta: f64) -> Self {
        Self { eta, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(invalid(format!("eta = {} outside (0, 1)", self.eta)));
        }
        if !(self.tol_rel > 0.0) {
            return Err(invalid("tol_rel must be positive"));
        }
        if !(self.relax > 0.0 && self.relax < 2.0) {
            return Err(invalid(format!("relax = {} outside (0, 2)", self.relax)));
        }
        if !(self.rho > 1.0) {
            return Err(invalid("rho must exceed 1"));
        }
        if let Some(mu0) = self.mu0 {
            if !(mu0 > 0.0) {
                return Err(invalid("mu0 must be positive"));
            }
        }
        if !(self.mu_max > 0.0) {
            return Err(invalid("mu_max must be positive"));
        }
        Ok(())
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::new(0.1)
    }
}

#[derive(Debug, Clone)]
pub struct SplitSolution {
    /// Sparse part, zero outside the observed set.
    pub b: SymMatrix,
    /// Low-rank part.
    pub k: SymMatrix,
    pub eta: f64,
    pub iters: usize,
    /// `||P_obs(I + A - B - K)||_F / ||P_obs(I + A)||_F` at the last iterate.
    pub residual: f64,
    /// `mu ||change of the split variable||_F / ||P_obs(I + A)||_F` at the
    /// last iterate.
    pub dual_residual: f64,
    pub converged: bool,
    pub objective: f64,
    /// Lagrange multiplier of the observation constraint, supported on the
    /// observed set (diagonal included).
    pub dual: SymMatrix,
    /// Objective value after every iteration.
    pub history: Vec<f64>,
}

/// `eta ||B||_1 + (1 - eta) ||K||_*`.
pub fn objective(b: &SymMatrix, k: &SymMatrix, eta: f64) -> f64 {
    eta * b.l1() + (1.0 - eta) * nuclear_norm(k)
}

// penalty is rescaled whenever one residual exceeds the other by this factor
const BALANCE: f64 = 10.0;

/// Membership of each entry in the observed set, diagonal always included.
pub(crate) fn observed_mask(g: &PartialGraph) -> Vec<bool> {
    let n = g.n();
    let mut mask = vec![false; n * n];
    for i in 0..n {
        mask[i * n + i] = true;
    }
    for p in g.observed() {
        mask[p.i * n + p.j] = true;
        mask[p.j * n + p.i] = true;
    }
    mask
}

/// Solves the splitting program. Running out of iterations is reported via
/// `converged = false`, never as an error.
pub fn solve_split(g: &PartialGraph, cfg: &SolverConfig) -> Result<SplitSolution> {
    solve_split_from(g, cfg, None)
}

/// [`solve_split`] started from the `B`, `K` and multiplier of an earlier
/// solve on the same graph, usually at a nearby `eta`. `cfg.init` is
/// ignored when `start` is given; the penalty starts afresh.
pub fn solve_split_from(g: &PartialGraph, cfg: &SolverConfig, start: Option<&SplitSolution>) -> Result<SplitSolution> {
    cfg.validate()?;
    let n = g.n();
    if n < 2 {
        return Err(invalid("splitting needs at least two nodes"));
    }
    if g.num_observed() == 0 {
        return Err(Error::EmptyObservations);
    }
    let eta = cfg.eta;
    let mask = observed_mask(g);
    let d = observed_data(g);
    let d_norm = d.frobenius();
    if let Some(s) = start {
        if s.k.n() != n {
            return Err(Error::SizeMismatch { expected: n, got: s.k.n() });
        }
    }
    let mut mu = match cfg.mu0 {
        Some(m) => m,
        None => {
            let spec = eigenvalues_sym(&d)?.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            1.25 / spec
        }
    };

    let (mut b, mut k, mut y) = match (start, cfg.init) {
        (Some(s), _) => (s.b.clone(), s.k.clone(), s.dual.clone()),
        (None, Init::Zero) => (SymMatrix::zeros(n), SymMatrix::zeros(n), SymMatrix::zeros(n)),
        (None, Init::ObservedData) => (d.clone(), SymMatrix::zeros(n), SymMatrix::zeros(n)),
    };
    let mut history = Vec::new();
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let mut iters = 0;
    let mut nuclear = 0.0;
    let mut dual_residual = f64::INFINITY;
    let mut b_prev = b.clone();
    let mut k_prev = k.clone();

    while iters < cfg.max_iters {
        iters += 1;
        let inv_mu = 1.0 / mu;

        // K step on the completed matrix
        let g_mat = SymMatrix::from_fn(n, |i, j| {
            if mask[i * n + j] {
                d.get(i, j) - b.get(i, j) + inv_mu * y.get(i, j)
            } else {
                k.get(i, j)
            }
        });
        let t_k = (1.0 - eta) * inv_mu;
        (k, nuclear) = sv_threshold_with_norm(&g_mat, t_k)?;

        // relaxed K on the observed set
        let a = cfg.relax;
        let k_hat = SymMatrix::from_fn(n, |i, j| a * k.get(i, j) + (1.0 - a) * (d.get(i, j) - b.get(i, j)));

        // B step, observed entries only
        let t_b = eta * inv_mu;
        b = SymMatrix::from_fn(n, |i, j| {
            if mask[i * n + j] {
                shrink(d.get(i, j) - k_hat.get(i, j) + inv_mu * y.get(i, j), t_b)
            } else {
                0.0
            }
        });

        // dual ascent on the observed residual
        let z_hat =
            SymMatrix::from_fn(n, |i, j| if mask[i * n + j] { d.get(i, j) - b.get(i, j) - k_hat.get(i, j) } else { 0.0 });
        y.axpy(mu, &z_hat);
        let z = SymMatrix::from_fn(n, |i, j| if mask[i * n + j] { d.get(i, j) - b.get(i, j) - k.get(i, j) } else { 0.0 });
        residual = z.frobenius() / d_norm;
        // change of the split variable: B on the observed set, -K off it
        let mut change = 0.0;
        for idx in 0..n * n {
            let delta = if mask[idx] { b.as_slice()[idx] - b_prev.as_slice()[idx] } else { k_prev.as_slice()[idx] - k.as_slice()[idx] };
            change += delta * delta;
        }
        dual_residual = mu * change.sqrt() / d_norm;
        history.push(eta * b.l1() + (1.0 - eta) * nuclear);
        if residual <= cfg.tol_rel && dual_residual <= cfg.tol_rel {
            converged = true;
            break;
        }
        if residual > BALANCE * dual_residual {
            mu = (mu * cfg.rho).min(cfg.mu_max);
        } else if dual_residual > BALANCE * residual {
            mu /= cfg.rho;
        }
        b_prev.clone_from(&b);
        k_prev.clone_from(&k);
    }

    Ok(SplitSolution {
        objective: eta * b.l1() + (1.0 - eta) * nuclear,
        b,
        k,
        eta,
        iters,
        residual,
        dual_residual,
        converged,
        dual: y,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::Clustering;
    use crate::validity::{build_bstar, build_kstar, check_validity};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_cliques(size: usize) -> PartialGraph {
        let mut edges = Vec::new();
        for base in [0, size] {
            for i in 0..size {
                for j in (i + 1)..size {
                    edges.push((base + i, base + j));
                }
            }
        }
        PartialGraph::fully_observed(2 * size, edges).unwrap()
    }

    #[test]
    fn objective_examples() {
        let c = Clustering::from_labels(&[0, 0, 1, 1, 1]).unwrap();
        let k = build_kstar(&c);
        let val = objective(&SymMatrix::zeros(5), &k, 0.3);
        assert!((val - 0.7 * 5.0).abs() < 1e-10);
        assert_eq!(objective(&SymMatrix::zeros(3), &SymMatrix::zeros(3), 0.4), 0.0);
        assert!((objective(&SymMatrix::ones(2), &SymMatrix::zeros(2), 0.5) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn recovers_two_disjoint_cliques() {
        let g = two_cliques(4);
        let sol = solve_split(&g, &SolverConfig::new(0.3)).unwrap();
        assert!(sol.converged);
        assert!(sol.residual <= 1e-7);
        let planted = Clustering::from_sizes(&[4, 4]).unwrap();
        let report = check_validity(&sol.k, 1e-3).unwrap();
        assert_eq!(report.clustering.as_ref(), Some(&planted));
        assert!(sol.b.max_abs() < 1e-3);
        assert!((&sol.k - &build_kstar(&planted)).max_abs() < 1e-3);
        assert_eq!(build_bstar(&g, &planted).unwrap(), SymMatrix::zeros(8));
    }

    #[test]
    fn large_eta_keeps_b_empty_and_fails_validity() {
        // the sparse term is too expensive, so K reproduces the path itself
        let g = PartialGraph::fully_observed(3, [(0, 1), (1, 2)]).unwrap();
        let sol = solve_split(&g, &SolverConfig::new(0.99)).unwrap();
        assert!(sol.converged);
        assert!(sol.b.max_abs() < 1e-6);
        assert!((&sol.k - &observed_data(&g)).max_abs() < 1e-6);
        assert!(!check_validity(&sol.k, 1e-3).unwrap().valid);
    }

    #[test]
    fn b_vanishes_off_observed_set_and_iterates_stay_symmetric() {
        let g = PartialGraph::new(5, [(0, 1, true), (1, 2, true), (3, 4, false), (0, 4, true)]).unwrap();
        let sol = solve_split(&g, &SolverConfig::new(0.2)).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                if i != j && !g.is_observed(i, j) {
                    assert_eq!(sol.b.get(i, j), 0.0);
                    assert_eq!(sol.dual.get(i, j), 0.0);
                }
            }
        }
        assert!(sol.k.max_asymmetry() <= 1e-10);
        assert!(sol.b.max_asymmetry() <= 1e-10);
    }

    fn random_instance(seed: u64) -> (PartialGraph, Clustering) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(4..=9);
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
        let truth = Clustering::from_labels(&labels).unwrap();
        let mut triples = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random_bool(0.8) {
                    triples.push((i, j, truth.same_cluster(i, j) != rng.random_bool(0.15)));
                }
            }
        }
        (PartialGraph::new(n, triples).unwrap(), truth)
    }

    #[test]
    fn objective_never_exceeds_planted_split() {
        for seed in 0..20 {
            let (g, truth) = random_instance(seed);
            if g.num_observed() == 0 {
                continue;
            }
            let planted = objective(&build_bstar(&g, &truth).unwrap(), &build_kstar(&truth), 0.3);
            let sol = solve_split(&g, &SolverConfig::new(0.3)).unwrap();
            assert!(sol.converged, "seed {seed}");
            assert!(sol.objective <= planted + 1e-5, "seed {seed}: {} > {planted}", sol.objective);
            assert!((sol.objective - objective(&sol.b, &sol.k, 0.3)).abs() < 1e-6);
            // early iterates are infeasible, so only a loose comparison is meaningful
            let early = sol.history[9.min(sol.history.len() - 1)];
            assert!(*sol.history.last().unwrap() <= early * 1.01, "seed {seed}");
        }
    }

    #[test]
    fn solution_does_not_depend_on_initialization() {
        for seed in 100..120 {
            let (g, _) = random_instance(seed);
            if g.num_observed() == 0 {
                continue;
            }
            let eta = 0.25;
            let a = solve_split(&g, &SolverConfig::new(eta)).unwrap();
            let b = solve_split(&g, &SolverConfig { init: Init::ObservedData, ..SolverConfig::new(eta) }).unwrap();
            assert!(a.converged && b.converged);
            assert!((a.objective - b.objective).abs() <= 1e-5, "seed {seed}: {} vs {}", a.objective, b.objective);
        }
    }

    #[test]
    fn warm_start_reaches_the_cold_optimum() {
        for seed in 200..215 {
            let (g, _) = random_instance(seed);
            if g.num_observed() == 0 {
                continue;
            }
            let prev = solve_split(&g, &SolverConfig::new(0.4)).unwrap();
            let cold = solve_split(&g, &SolverConfig::new(0.3)).unwrap();
            let warm = solve_split_from(&g, &SolverConfig::new(0.3), Some(&prev)).unwrap();
            assert!(cold.converged && warm.converged);
            assert!((cold.objective - warm.objective).abs() <= 1e-5, "seed {seed}: {} vs {}", cold.objective, warm.objective);
        }
        let prev = solve_split(&two_cliques(3), &SolverConfig::new(0.3)).unwrap();
        assert!(solve_split_from(&two_cliques(4), &SolverConfig::new(0.3), Some(&prev)).is_err());
    }

    #[test]
    fn rounded_valid_output_is_feasible() {
        let g = two_cliques(5);
        let sol = solve_split(&g, &SolverConfig::new(0.2)).unwrap();
        let c = check_validity(&sol.k, 1e-3).unwrap().clustering.unwrap();
        let rounded = build_kstar(&c);
        let d = observed_data(&g);
        for p in g.observed() {
            let gap = d.get(p.i, p.j) - sol.b.get(p.i, p.j).round() - rounded.get(p.i, p.j);
            assert!(gap.abs() <= 1e-5);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let g = PartialGraph::new(3, []).unwrap();
        assert!(matches!(solve_split(&g, &SolverConfig::new(0.2)), Err(Error::EmptyObservations)));
        let g1 = PartialGraph::new(1, []).unwrap();
        assert!(solve_split(&g1, &SolverConfig::new(0.2)).is_err());
        let g = two_cliques(2);
        for eta in [0.0, 1.0, -0.5] {
            assert!(solve_split(&g, &SolverConfig::new(eta)).is_err());
        }
        let bad = SolverConfig { rho: 1.0, ..SolverConfig::new(0.3) };
        assert!(solve_split(&g, &bad).is_err());
    }

    #[test]
    fn non_convergence_is_reported() {
        let g = PartialGraph::fully_observed(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let cfg = SolverConfig { max_iters: 2, ..SolverConfig::new(0.3) };
        let sol = solve_split(&g, &cfg).unwrap();
        assert!(!sol.converged);
        assert_eq!(sol.iters, 2);
        assert_eq!(sol.history.len(), 2);
    }
}
