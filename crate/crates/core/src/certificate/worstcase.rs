use super::{CertificateReport, CertificateSets, ConditionCheck, ConditionKind};
use crate::clustering::Clustering;
use crate::error::{invalid, Result};
use crate::matops::{project_set, project_t, project_tperp, spectral_norm, IndexSet, SubspaceBasis};
use crate::matrix::SymMatrix;

#[derive(Debug, Clone)]
pub struct WorstCaseCertificate {
    /// `Q = (1 - eta) V_{UU^T} + eta S_{sgn(B*)}`.
    pub q_matrix: SymMatrix,
    /// Terms summed in the longer of the two series.
    pub series_terms: usize,
    pub converged: bool,
    /// Contraction factor estimated from two-step term ratios.
    pub theta_estimate: f64,
    /// Frobenius norm of every term of `S`, then of `V`.
    pub s_term_norms: Vec<f64>,
    pub v_term_norms: Vec<f64>,
}

struct Series {
    sum: SymMatrix,
    norms: Vec<f64>,
    converged: bool,
}

// Number of leading terms ignored when judging contraction.
const WARMUP_TERMS: usize = 3;

/// `t_0 - t_1 + t_2 - ...` with `t_{k+1} = step_k(t_k)`. Stops once a term
/// drops below `tol`; gives up when two consecutive steps fail to shrink
/// the term after the warm-up, or after `max_terms`.
fn alternating_series(
    t0: SymMatrix,
    tol: f64,
    max_terms: usize,
    mut step: impl FnMut(usize, &SymMatrix) -> Result<SymMatrix>,
) -> Result<Series> {
    let mut sum = SymMatrix::zeros(t0.n());
    let mut term = t0;
    let mut norms = Vec::new();
    for k in 0..max_terms {
        let norm = term.frobenius();
        norms.push(norm);
        if norm < tol {
            return Ok(Series { sum, norms, converged: true });
        }
        if k >= WARMUP_TERMS + 2 && norm >= norms[k - 2] {
            return Ok(Series { sum, norms, converged: false });
        }
        sum.axpy(if k % 2 == 0 { 1.0 } else { -1.0 }, &term);
        term = step(k, &term)?;
    }
    Ok(Series { sum, norms, converged: false })
}

// sqrt of the largest two-step ratio after the warm-up
fn theta_from(norms: &[f64]) -> f64 {
    norms
        .windows(3)
        .skip(WARMUP_TERMS)
        .filter(|w| w[0] > 0.0)
        .map(|w| (w[2] / w[0]).sqrt())
        .fold(0.0, f64::max)
}

/// Builds `Q` from the alternating projection series
/// `S_M = M - P_T M + P_Gp P_T M - ...` with `M = sgn(B*)` and
/// `V_N = N - P_Gp N + P_T P_Gp N - ...` with `N = UU^T`, where `P_Gp`
/// projects onto `Gamma^perp`. Failure to converge is reported in the
/// result, not as an error.
pub fn build_worstcase_certificate(
    c: &Clustering,
    bstar: &SymMatrix,
    omega_obs: &IndexSet,
    eta: f64,
    series_tol: f64,
    max_terms: usize,
) -> Result<WorstCaseCertificate> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(invalid(format!("eta = {eta} outside (0, 1)")));
    }
    if !(series_tol > 0.0) || max_terms == 0 {
        return Err(invalid("series tolerance and term budget must be positive"));
    }
    let sets = CertificateSets::new(c, bstar, omega_obs)?;
    let basis = SubspaceBasis::new(c);
    let gp = &sets.gamma_perp;

    // S: odd steps apply P_T, even steps P_Gp
    let s = alternating_series(sets.sign.clone(), series_tol, max_terms, |k, t| {
        if k % 2 == 0 {
            project_t(t, &basis)
        } else {
            project_set(t, gp, false)
        }
    })?;
    let v = alternating_series(basis.uut(), series_tol, max_terms, |k, t| {
        if k % 2 == 0 {
            project_set(t, gp, false)
        } else {
            project_t(t, &basis)
        }
    })?;

    let mut q_matrix = &v.sum * (1.0 - eta);
    q_matrix.axpy(eta, &s.sum);
    let theta_estimate = theta_from(&s.norms).max(theta_from(&v.norms));
    Ok(WorstCaseCertificate {
        q_matrix,
        series_terms: s.norms.len().max(v.norms.len()),
        converged: s.converged && v.converged,
        theta_estimate,
        s_term_norms: s.norms,
        v_term_norms: v.norms,
    })
}

/// The five optimality conditions on `Q`:
/// (a) `P_{Omega_obs^perp} Q = 0`, (b) `P_T Q = (1 - eta) UU^T`,
/// (c) `P_Omega Q = eta sgn(B*)`, (d) `||P_{T^perp} Q|| < 1 - eta`,
/// (e) `||P_{Omega^perp} Q||_inf < eta` (diagonal included).
pub fn verify_deterministic(
    cert: &WorstCaseCertificate,
    c: &Clustering,
    bstar: &SymMatrix,
    omega_obs: &IndexSet,
    eta: f64,
    equality_tol: f64,
) -> Result<CertificateReport> {
    let sets = CertificateSets::new(c, bstar, omega_obs)?;
    let basis = SubspaceBasis::new(c);
    let q = &cert.q_matrix;

    let a = project_set(q, &sets.omega_obs.complement(), false)?.max_abs();
    let b = (&project_t(q, &basis)? - &(&basis.uut() * (1.0 - eta))).frobenius();
    let c_val = (&project_set(q, &sets.omega, false)? - &(&sets.sign * eta)).max_abs();
    let d = spectral_norm(&project_tperp(q, &basis)?);
    let e = project_set(q, &sets.omega.complement(), true)?.max_abs();

    Ok(CertificateReport {
        checks: vec![
            ConditionCheck::new("a", a, equality_tol, ConditionKind::Equality),
            ConditionCheck::new("b", b, equality_tol, ConditionKind::Equality),
            ConditionCheck::new("c", c_val, equality_tol, ConditionKind::Equality),
            ConditionCheck::new("d", d, 1.0 - eta, ConditionKind::StrictLess),
            ConditionCheck::new("e", e, eta, ConditionKind::StrictLess),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::{disagreement_stats, theorem2_interval};
    use crate::graph::PartialGraph;
    use crate::validity::build_bstar;

    fn blocks(sizes: &[usize], flips: &[(usize, usize)]) -> (PartialGraph, Clustering) {
        let c = Clustering::from_sizes(sizes).unwrap();
        let n = c.n();
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .filter(|&(i, j)| c.same_cluster(i, j) != flips.contains(&(i, j)))
            .collect();
        (PartialGraph::fully_observed(n, edges).unwrap(), c)
    }

    #[test]
    fn no_disagreements_gives_scaled_uut() {
        let (g, c) = blocks(&[4, 4], &[]);
        let bstar = build_bstar(&g, &c).unwrap();
        let obs = IndexSet::observed(&g);
        let cert = build_worstcase_certificate(&c, &bstar, &obs, 0.3, 1e-10, 200).unwrap();
        assert!(cert.converged);
        assert_eq!(cert.s_term_norms, vec![0.0]);
        assert_eq!(cert.v_term_norms[0], SubspaceBasis::new(&c).uut().frobenius());
        let expect = &SubspaceBasis::new(&c).uut() * 0.7;
        assert!((&cert.q_matrix - &expect).max_abs() < 1e-12);
        let r = verify_deterministic(&cert, &c, &bstar, &obs, 0.3, 1e-8).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn feasible_instance_certifies_at_midpoint_but_not_at_large_eta() {
        // two clusters of 10, one flip per node pair set: n dmax / kmin = 20 * 0.1 / 10
        let flips = [(0, 10), (1, 2), (12, 13), (5, 15)];
        let (g, c) = blocks(&[10, 10], &flips);
        let stats = disagreement_stats(&g, &c).unwrap();
        let iv = theorem2_interval(20, &stats);
        assert!(iv.feasible, "{iv:?} {stats:?}");
        let bstar = build_bstar(&g, &c).unwrap();
        let obs = IndexSet::observed(&g);
        let eta = iv.midpoint();
        let cert = build_worstcase_certificate(&c, &bstar, &obs, eta, 1e-10, 200).unwrap();
        assert!(cert.converged);
        assert!(cert.theta_estimate < 1.0);
        let r = verify_deterministic(&cert, &c, &bstar, &obs, eta, 1e-8).unwrap();
        assert!(r.passed(), "{}", r.to_text());

        let cert = build_worstcase_certificate(&c, &bstar, &obs, 0.9, 1e-10, 200).unwrap();
        let r = verify_deterministic(&cert, &c, &bstar, &obs, 0.9, 1e-8).unwrap();
        assert!(!r.get("d").unwrap().pass || !r.get("e").unwrap().pass);
        for name in ["a", "b", "c"] {
            assert!(r.get(name).unwrap().pass);
        }
    }

    #[test]
    fn term_budget_exhaustion_is_not_an_error() {
        let (g, c) = blocks(&[3, 3], &[(0, 3), (1, 4), (2, 5), (0, 1)]);
        let bstar = build_bstar(&g, &c).unwrap();
        let cert = build_worstcase_certificate(&c, &bstar, &IndexSet::observed(&g), 0.4, 1e-14, 2).unwrap();
        assert!(!cert.converged);
        assert!(build_worstcase_certificate(&c, &bstar, &IndexSet::observed(&g), 1.0, 1e-10, 10).is_err());
    }
}
