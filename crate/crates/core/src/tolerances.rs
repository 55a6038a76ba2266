//! Numerical tolerances shared across modules.

/// Central tolerance record. Every module reads its defaults from here so that
/// experiments are reproducible from a single place.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max-abs asymmetry accepted when constructing a symmetric matrix.
    pub symmetry: f64,
    /// Max deviation between a solver `K` and its 0/1 rounding.
    pub validity: f64,
    /// Equality conditions of the dual certificates.
    pub certificate_equality: f64,
    /// Frobenius norm below which an alternating-series term is negligible.
    pub series_term: f64,
    /// Relative gap allowed between the solver objective and the objective
    /// of its rounded (valid) solution.
    pub objective_match: f64,
    /// Relative primal and dual residual at which the splitting solver stops.
    pub solver_rel_residual: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        symmetry: 1e-12,
        validity: 1e-3,
        certificate_equality: 1e-8,
        series_term: 1e-10,
        objective_match: 1e-4,
        solver_rel_residual: 1e-7,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
