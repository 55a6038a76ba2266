//! Recovery conditions and dual certificates.
//!
//! Two constructions are provided. The worst-case one sums the alternating
//! projection series between `T` (the tangent space at `K*`) and the span
//! of the bad entries, and checks the five optimality conditions on the
//! resulting `Q`. The golfing one builds `(W^B, W^K)` from randomly split
//! observations and reports the nine conditions of the random model.
//!
//! Index sets used throughout, for a clustering and its `B*`:
//! - `Omega_obs`: observed pairs plus the diagonal;
//! - `Omega`: off-diagonal support of `B*` (observed disagreements);
//! - `Gamma`: observed non-disagreements plus the diagonal;
//! - `Gamma^perp`: every other entry, i.e. disagreements and unobserved pairs.

mod golfing;
mod stats;
mod worstcase;

use std::fmt::Write as _;

pub use golfing::{
    build_golfing_certificate, golfing_k0, golfing_params, sample_gamma_partition, verify_probabilistic,
    GolfingCertificate, GolfingParams,
};
pub use stats::{
    bad_entry_ratio, check_space_intersection, disagreement_stats, theorem2_interval, theorem3_check,
    DisagreementStats, EtaInterval, Theorem3Report, DEFAULT_C_D, DEFAULT_C_K,
};
pub use worstcase::{build_worstcase_certificate, verify_deterministic, WorstCaseCertificate};

use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::graph::PartialGraph;
use crate::matops::IndexSet;
use crate::matrix::SymMatrix;
use crate::validity::build_bstar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionKind {
    /// `value <= bound`, where the bound is a numerical tolerance for an
    /// identity that holds by construction.
    Equality,
    /// `value < bound`.
    StrictLess,
    /// `value <= bound`.
    LessEq,
}

impl ConditionKind {
    fn symbol(self) -> &'static str {
        match self {
            ConditionKind::Equality => "~=0 tol",
            ConditionKind::StrictLess => "<",
            ConditionKind::LessEq => "<=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub value: f64,
    pub bound: f64,
    pub kind: ConditionKind,
    pub pass: bool,
}

impl ConditionCheck {
    pub fn new(name: &'static str, value: f64, bound: f64, kind: ConditionKind) -> Self {
        let pass = match kind {
            ConditionKind::StrictLess => value < bound,
            ConditionKind::Equality | ConditionKind::LessEq => value <= bound,
        };
        Self { name, value, bound, kind, pass }
    }

    /// `bound - value`; positive when the inequality holds with room.
    pub fn margin(&self) -> f64 {
        self.bound - self.value
    }
}

/// The checked conditions of one certificate, in a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub checks: Vec<ConditionCheck>,
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// One line per condition: name, value, relation, bound, PASS/FAIL.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "{:<4} {:>14.6e} {:<8} {:>14.6e}  {verdict}", c.name, c.value, c.kind.symbol(), c.bound);
        }
        let _ = writeln!(s, "overall {}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("condition,value,bound,kind,margin,pass\n");
        for c in &self.checks {
            let kind = match c.kind {
                ConditionKind::Equality => "equality",
                ConditionKind::StrictLess => "strict",
                ConditionKind::LessEq => "less_eq",
            };
            let _ = writeln!(s, "{},{:e},{:e},{kind},{:e},{}", c.name, c.value, c.bound, c.margin(), c.pass);
        }
        s
    }
}

/// The index sets and sign pattern a certificate is built on.
#[derive(Debug, Clone)]
pub struct CertificateSets {
    /// Observed off-diagonal pairs; the diagonal is implied.
    pub omega_obs: IndexSet,
    pub omega: IndexSet,
    /// Off-diagonal part of `Gamma`; the diagonal is implied.
    pub gamma: IndexSet,
    /// `Gamma^perp`, off-diagonal by definition.
    pub gamma_perp: IndexSet,
    /// `sgn(B*)`.
    pub sign: SymMatrix,
}

impl CertificateSets {
    pub fn new(c: &Clustering, bstar: &SymMatrix, omega_obs: &IndexSet) -> Result<Self> {
        let n = c.n();
        for got in [bstar.n(), omega_obs.n()] {
            if got != n {
                return Err(Error::SizeMismatch { expected: n, got });
            }
        }
        let omega = IndexSet::support(bstar);
        if (0..n).any(|i| bstar.get(i, i) != 0.0) || !omega.difference(omega_obs).is_empty() {
            return Err(Error::InvalidParameter("B* must be supported on the observed off-diagonal pairs".into()));
        }
        let gamma = omega_obs.difference(&omega);
        let gamma_perp = gamma.complement();
        let sign = bstar.map(|v| if v == 0.0 { 0.0 } else { v.signum() });
        Ok(Self { omega_obs: omega_obs.clone(), omega, gamma, gamma_perp, sign })
    }

    pub fn from_graph(g: &PartialGraph, c: &Clustering) -> Result<Self> {
        Self::new(c, &build_bstar(g, c)?, &IndexSet::observed(g))
    }
}
