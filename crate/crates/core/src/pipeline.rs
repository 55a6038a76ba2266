//! Line search over `eta`: solve, test validity, and either return the
//! clustering induced by the first valid solution or declare failure.

use std::fmt::Write as _;

use crate::clustering::Clustering;
use crate::error::{invalid, Result};
use crate::graph::PartialGraph;
use crate::splitter::{solve_split_from, SolverConfig, SplitSolution};
use crate::tolerances::Tolerances;
use crate::validity::{check_validity, count_disagreements};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    Failure,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Success => "success",
            Status::Failure => "failure",
        }
    }
}

/// One solve of the line search.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub eta: f64,
    pub converged: bool,
    /// Converged, passed the validity test and the objective re-check.
    pub valid: bool,
    pub residual: f64,
    pub objective: f64,
    pub iters: usize,
}

#[derive(Debug, Clone)]
pub struct ClusterOutcome {
    pub status: Status,
    pub clustering: Option<Clustering>,
    pub eta_used: Option<f64>,
    /// Observed disagreements of `clustering`.
    pub disagreements: Option<usize>,
    pub trace: Vec<TraceRecord>,
    /// The valid solution behind a success.
    pub solution: Option<SplitSolution>,
}

impl ClusterOutcome {
    pub fn is_success(&self) -> bool {
        self.status == Status::Success
    }

    /// `eta,converged,valid,residual,objective` with a header row.
    pub fn trace_csv(&self) -> String {
        let mut s = String::from("eta,converged,valid,residual,objective\n");
        for r in &self.trace {
            let _ = writeln!(s, "{},{},{},{:e},{}", r.eta, r.converged, r.valid, r.residual, r.objective);
        }
        s
    }
}

/// `1 / (1 + sqrt(n p0))`.
pub fn recommended_eta(n: usize, p0: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    if !(p0 > 0.0 && p0 <= 1.0) {
        return Err(invalid(format!("p0 = {p0} outside (0, 1]")));
    }
    Ok(1.0 / (1.0 + (n as f64 * p0).sqrt()))
}

/// `0.01, 0.02, ..., 0.99`.
pub fn default_eta_grid() -> Vec<f64> {
    (1..=99).map(|k| k as f64 / 100.0).collect()
}

/// The default grid with `recommended_eta(n, p0)` tried first.
pub fn eta_grid_for(n: usize, p0: f64) -> Result<Vec<f64>> {
    let mut grid = vec![recommended_eta(n, p0)?];
    grid.extend(default_eta_grid());
    Ok(grid)
}

pub fn optimal_cluster(g: &PartialGraph, eta_grid: &[f64], cfg: &SolverConfig) -> Result<ClusterOutcome> {
    optimal_cluster_with(g, eta_grid, cfg, &Tolerances::DEFAULT)
}

/// Objective of the exact split induced by a clustering: `||K*||_* = n` and
/// every disagreement costs two entries of `B*`.
fn rounded_objective(n: usize, disagreements: usize, eta: f64) -> f64 {
    (1.0 - eta) * n as f64 + 2.0 * eta * disagreements as f64
}

/// Tries each `eta` in order. A solve that did not converge is recorded
/// but never tested for validity. A valid `K` is accepted only if its
/// rounded split attains the solver objective up to `tols.objective_match`.
pub fn optimal_cluster_with(
    g: &PartialGraph,
    eta_grid: &[f64],
    cfg: &SolverConfig,
    tols: &Tolerances,
) -> Result<ClusterOutcome> {
    if eta_grid.is_empty() {
        return Err(invalid("eta grid is empty"));
    }
    if let Some(bad) = eta_grid.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
        return Err(invalid(format!("eta = {bad} outside (0, 1)")));
    }
    let mut trace = Vec::with_capacity(eta_grid.len());
    let mut prev: Option<SplitSolution> = None;
    for &eta in eta_grid {
        let sol = solve_split_from(g, &cfg.with_eta(eta), prev.as_ref())?;
        let mut accepted = None;
        if sol.converged {
            if let Some(c) = check_validity(&sol.k, tols.validity)?.clustering {
                let disagreements = count_disagreements(g, &c)?;
                let rounded = rounded_objective(g.n(), disagreements, eta);
                if rounded - sol.objective <= tols.objective_match * rounded.max(1.0) {
                    accepted = Some((c, disagreements));
                }
            }
        }
        let valid = accepted.is_some();
        trace.push(TraceRecord {
            eta,
            converged: sol.converged,
            valid,
            residual: sol.residual,
            objective: sol.objective,
            iters: sol.iters,
        });
        if let Some((clustering, disagreements)) = accepted {
            return Ok(ClusterOutcome {
                status: Status::Success,
                clustering: Some(clustering),
                eta_used: Some(eta),
                disagreements: Some(disagreements),
                trace,
                solution: Some(sol),
            });
        }
        prev = Some(sol);
    }
    Ok(ClusterOutcome {
        status: Status::Failure,
        clustering: None,
        eta_used: None,
        disagreements: None,
        trace,
        solution: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cliques(size: usize) -> PartialGraph {
        let edges = (0..2 * size)
            .flat_map(|i| ((i + 1)..2 * size).map(move |j| (i, j)))
            .filter(|&(i, j)| i / size == j / size);
        PartialGraph::fully_observed(2 * size, edges.collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn recommended_eta_examples() {
        assert!((recommended_eta(100, 1.0).unwrap() - 1.0 / 11.0).abs() < 1e-15);
        assert_eq!(recommended_eta(1, 1.0).unwrap(), 0.5);
        assert!((recommended_eta(400, 0.25).unwrap() - 1.0 / 11.0).abs() < 1e-15);
        assert!(recommended_eta(10, 0.0).is_err());
        assert!(recommended_eta(10, 1.5).is_err());
    }

    #[test]
    fn default_grid_shape() {
        let g = default_eta_grid();
        assert_eq!(g.len(), 99);
        assert_eq!(g[0], 0.01);
        assert_eq!(g[98], 0.99);
        assert_eq!(eta_grid_for(100, 1.0).unwrap().len(), 100);
    }

    #[test]
    fn two_five_cliques_succeed() {
        let g = two_cliques(5);
        let out = optimal_cluster(&g, &default_eta_grid(), &SolverConfig::default()).unwrap();
        assert!(out.is_success());
        assert_eq!(out.clustering.unwrap(), Clustering::from_sizes(&[5, 5]).unwrap());
        assert_eq!(out.disagreements, Some(0));
        assert!(out.trace.last().unwrap().valid);
    }

    #[test]
    fn path_of_four_is_optimal_if_successful() {
        let g = PartialGraph::fully_observed(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let out = optimal_cluster(&g, &default_eta_grid(), &SolverConfig::default()).unwrap();
        if out.is_success() {
            assert_eq!(out.disagreements, Some(1));
        } else {
            assert!(out.trace.iter().all(|r| !r.valid));
        }
    }

    #[test]
    fn bad_grids_are_rejected() {
        let g = two_cliques(2);
        assert!(optimal_cluster(&g, &[], &SolverConfig::default()).is_err());
        assert!(optimal_cluster(&g, &[0.5, 1.0], &SolverConfig::default()).is_err());
    }

    #[test]
    fn unconverged_solves_are_never_valid() {
        let g = PartialGraph::fully_observed(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let cfg = SolverConfig { max_iters: 1, ..SolverConfig::default() };
        let out = optimal_cluster(&g, &[0.2, 0.3], &cfg).unwrap();
        assert_eq!(out.status, Status::Failure);
        assert!(out.trace.iter().all(|r| !r.converged && !r.valid));
        assert!(out.trace_csv().starts_with("eta,converged,valid,residual,objective\n0.2,false,false,"));
    }
}
