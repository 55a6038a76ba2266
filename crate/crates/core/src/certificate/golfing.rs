use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CertificateReport, CertificateSets, ConditionCheck, ConditionKind};
use crate::clustering::Clustering;
use crate::error::{invalid, Error, Result};
use crate::matops::{project_set, project_t, project_tperp, r_gamma_k, spectral_norm, IndexSet, SubspaceBasis};
use crate::matrix::SymMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GolfingParams {
    pub k0: usize,
    pub q: f64,
}

/// `ceil(4 log n)` in the given log base, at least 1.
pub fn golfing_k0(n: f64, log_base: f64) -> usize {
    ((4.0 * n.ln() / log_base.ln()).ceil().max(1.0)) as usize
}

/// `k0 = ceil(4 ln n)` and `q` solving `p0 (1 - tau) = 1 - (1 - q)^k0`.
pub fn golfing_params(n: usize, p0: f64, tau: f64) -> Result<GolfingParams> {
    if !(p0 > 0.0 && p0 <= 1.0) || !(0.0..1.0).contains(&tau) {
        return Err(invalid(format!("need 0 < p0 <= 1 and 0 <= tau < 1, got p0 = {p0}, tau = {tau}")));
    }
    let keep = p0 * (1.0 - tau);
    if keep <= 0.0 {
        return Err(invalid("p0 (1 - tau) must be positive"));
    }
    let k0 = golfing_k0(n as f64, std::f64::consts::E);
    let q = 1.0 - (1.0 - keep).powf(1.0 / k0 as f64);
    Ok(GolfingParams { k0, q })
}

/// Splits the off-diagonal pairs of `gamma` into `k0` overlapping sets.
/// Each pair draws `k0` independent Bernoulli(`q`) memberships, redrawn
/// until at least one is set, so the union is exactly `gamma`.
pub fn sample_gamma_partition(gamma: &IndexSet, k0: usize, q: f64, seed: u64) -> Result<Vec<IndexSet>> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(invalid(format!("q = {q} outside (0, 1]")));
    }
    if k0 == 0 {
        return Err(invalid("k0 must be positive"));
    }
    let n = gamma.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parts = vec![IndexSet::empty(n); k0];
    let mut draw = vec![false; k0];
    for (i, j) in gamma.pairs().filter(|(i, j)| i != j) {
        loop {
            for d in draw.iter_mut() {
                *d = rng.random_bool(q);
            }
            if draw.iter().any(|&d| d) {
                break;
            }
        }
        for (part, &d) in parts.iter_mut().zip(&draw) {
            if d {
                part.insert(i, j);
            }
        }
    }
    Ok(parts)
}

#[derive(Debug, Clone)]
pub struct GolfingCertificate {
    /// `W^B_{k0} + eta/(1-eta) sgn(B*)`.
    pub wb: SymMatrix,
    pub wk: SymMatrix,
    pub k0: usize,
    pub q: f64,
    pub gamma_parts: Vec<IndexSet>,
    /// `||P_T(W^K_k) - UU^T||_F` for `k = 0..=k0`.
    pub residuals: Vec<f64>,
}

impl GolfingCertificate {
    /// Whether the golfing residual never increases from one step to the next.
    pub fn residual_monotone(&self) -> bool {
        self.residuals.windows(2).all(|w| w[1] <= w[0])
    }
}

/// Runs `W^B_k = W^B_{k-1} - R_k P_T(r P_T sgn(B*) + W^B_{k-1})` and
/// `W^K_k = W^K_{k-1} + R_k P_T(UU^T - W^K_{k-1})` from zero, with
/// `r = eta/(1-eta)` and `R_k` the sampling operator of `gamma_parts[k-1]`.
pub fn build_golfing_certificate(
    c: &Clustering,
    bstar: &SymMatrix,
    gamma_parts: &[IndexSet],
    q: f64,
    eta: f64,
) -> Result<GolfingCertificate> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(invalid(format!("eta = {eta} outside (0, 1)")));
    }
    let n = c.n();
    if bstar.n() != n {
        return Err(Error::SizeMismatch { expected: n, got: bstar.n() });
    }
    let basis = SubspaceBasis::new(c);
    let uut = basis.uut();
    let ratio = eta / (1.0 - eta);
    let sign = bstar.map(|v| if v == 0.0 { 0.0 } else { v.signum() });
    let target_b = &project_t(&sign, &basis)? * ratio;

    let mut wb = SymMatrix::zeros(n);
    let mut wk = SymMatrix::zeros(n);
    let mut residuals = vec![(&project_t(&wk, &basis)? - &uut).frobenius()];
    for part in gamma_parts {
        let step_b = r_gamma_k(&project_t(&(&target_b + &wb), &basis)?, part, q)?;
        wb = &wb - &step_b;
        let step_k = r_gamma_k(&project_t(&(&uut - &wk), &basis)?, part, q)?;
        wk = &wk + &step_k;
        residuals.push((&project_t(&wk, &basis)? - &uut).frobenius());
    }
    wb.axpy(ratio, &sign);
    Ok(GolfingCertificate { wb, wk, k0: gamma_parts.len(), q, gamma_parts: gamma_parts.to_vec(), residuals })
}

/// The nine conditions of the random model. `gamma` and `omega` are the
/// off-diagonal index sets; the diagonal belongs to `Gamma`.
pub fn verify_probabilistic(
    cert: &GolfingCertificate,
    c: &Clustering,
    bstar: &SymMatrix,
    gamma: &IndexSet,
    omega: &IndexSet,
    eta: f64,
    equality_tol: f64,
) -> Result<CertificateReport> {
    let omega_obs = gamma.union(omega);
    let sets = CertificateSets::new(c, bstar, &omega_obs)?;
    let basis = SubspaceBasis::new(c);
    let n = c.n() as f64;
    let ratio = eta / (1.0 - eta);
    let small = 1.0 / (2.0 * n * n);
    let quarter_ratio = 0.25 * ratio;
    let (wb, wk) = (&cert.wb, &cert.wk);
    let gamma_perp = gamma.complement();

    let s1 = project_t(wb, &basis)?.frobenius();
    let s2 = spectral_norm(&project_tperp(wb, &basis)?);
    let s3 = (&project_set(wb, omega, false)? - &(&sets.sign * ratio)).max_abs();
    let s4 = project_set(wb, &omega_obs.complement(), false)?.max_abs();
    let s5 = project_set(wb, gamma, true)?.max_abs();
    let l1 = spectral_norm(&project_tperp(wk, &basis)?);
    let l2 = (&project_t(wk, &basis)? - &basis.uut()).frobenius();
    let l3 = project_set(wk, &gamma_perp, false)?.max_abs();
    let l4 = project_set(wk, gamma, true)?.max_abs();

    Ok(CertificateReport {
        checks: vec![
            ConditionCheck::new("S1", s1, small, ConditionKind::LessEq),
            ConditionCheck::new("S2", s2, 0.25, ConditionKind::StrictLess),
            ConditionCheck::new("S3", s3, equality_tol, ConditionKind::Equality),
            ConditionCheck::new("S4", s4, equality_tol, ConditionKind::Equality),
            ConditionCheck::new("S5", s5, quarter_ratio, ConditionKind::StrictLess),
            ConditionCheck::new("L1", l1, 0.25, ConditionKind::StrictLess),
            ConditionCheck::new("L2", l2, small, ConditionKind::LessEq),
            ConditionCheck::new("L3", l3, equality_tol, ConditionKind::Equality),
            ConditionCheck::new("L4", l4, quarter_ratio, ConditionKind::StrictLess),
        ],
    })
}
