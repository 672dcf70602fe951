//! Problem parameters `(n, q, b, omega)` and their admissibility rules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the coupled system
///
/// ```text
/// -Δu + u      = |u|^{2q-2} u + b |v|^q |u|^{q-2} u
/// -Δv + ω² v   = |v|^{2q-2} v + b |u|^q |v|^{q-2} v
/// ```
///
/// posed on `R^n` and restricted to radial profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemParams {
    pub n: usize,
    pub q: f64,
    pub b: f64,
    pub omega: f64,
}

/// A single violated admissibility condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ParamViolation {
    DimensionUnsupported,
    ExponentNotAboveOne,
    ExponentNotSubcritical,
    CouplingNegative,
    OmegaBelowOne,
    NonFinite,
}

impl ParamViolation {
    pub fn reason(&self) -> &'static str {
        match self {
            ParamViolation::DimensionUnsupported => "n in {1, 2, 3} violated",
            ParamViolation::ExponentNotAboveOne => "q > 1 violated",
            ParamViolation::ExponentNotSubcritical => "q < n/(n-2) violated",
            ParamViolation::CouplingNegative => "b >= 0 violated",
            ParamViolation::OmegaBelowOne => "omega >= 1 violated",
            ParamViolation::NonFinite => "parameters must be finite",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationResult {
    pub violations: Vec<ParamViolation>,
}

impl ValidationResult {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn reasons(&self) -> Vec<&'static str> {
        self.violations.iter().map(ParamViolation::reason).collect()
    }
}

/// Upper end of the admissible exponent range, `n/(n-2)` for `n >= 3`.
pub fn critical_exponent(n: usize) -> Option<f64> {
    if n >= 3 {
        Some(n as f64 / (n as f64 - 2.0))
    } else {
        None
    }
}

pub fn validate_params(p: &ProblemParams) -> ValidationResult {
    let mut violations = Vec::new();
    if !(p.q.is_finite() && p.b.is_finite() && p.omega.is_finite()) {
        violations.push(ParamViolation::NonFinite);
        return ValidationResult { violations };
    }
    if !(1..=3).contains(&p.n) {
        violations.push(ParamViolation::DimensionUnsupported);
    }
    if p.q <= 1.0 {
        violations.push(ParamViolation::ExponentNotAboveOne);
    }
    if let Some(qc) = critical_exponent(p.n) {
        if p.q >= qc {
            violations.push(ParamViolation::ExponentNotSubcritical);
        }
    }
    if p.b < 0.0 {
        violations.push(ParamViolation::CouplingNegative);
    }
    if p.omega < 1.0 {
        violations.push(ParamViolation::OmegaBelowOne);
    }
    ValidationResult { violations }
}

impl ProblemParams {
    pub fn new(n: usize, q: f64, b: f64, omega: f64) -> Self {
        Self { n, q, b, omega }
    }

    /// Returns `self` if admissible, otherwise an error listing every failed condition.
    pub fn validated(self) -> Result<Self> {
        let v = validate_params(&self);
        if v.is_valid() {
            Ok(self)
        } else {
            Err(Error::InvalidParams(v.reasons().join("; ")))
        }
    }

    /// `2q/(q-1) - n`, the exponent relating `I(0, v0)` to `I(u0, 0)`.
    pub fn scaling_exponent(&self) -> f64 {
        2.0 * self.q / (self.q - 1.0) - self.n as f64
    }

    /// `1/2 - 1/(2q)`.
    pub fn energy_factor(&self) -> f64 {
        0.5 - 0.5 / self.q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_allows_large_q() {
        assert!(validate_params(&ProblemParams::new(1, 3.0, 2.0, 1.0)).is_valid());
    }

    #[test]
    fn three_dimensional_rejects_critical_q() {
        let v = validate_params(&ProblemParams::new(3, 3.0, 1.0, 1.0));
        assert_eq!(v.violations, vec![ParamViolation::ExponentNotSubcritical]);
        assert_eq!(v.reasons(), vec!["q < n/(n-2) violated"]);
    }

    #[test]
    fn q_equal_one_is_rejected() {
        let v = validate_params(&ProblemParams::new(2, 1.0, 0.0, 1.0));
        assert_eq!(v.reasons(), vec!["q > 1 violated"]);
    }

    #[test]
    fn collects_every_violation() {
        let v = validate_params(&ProblemParams::new(4, 0.5, -1.0, 0.5));
        assert_eq!(v.violations.len(), 4);
        assert!(ProblemParams::new(4, 0.5, -1.0, 0.5).validated().is_err());
    }

    #[test]
    fn nan_is_rejected() {
        let v = validate_params(&ProblemParams::new(1, f64::NAN, 0.0, 1.0));
        assert_eq!(v.violations, vec![ParamViolation::NonFinite]);
    }

    #[test]
    fn scaling_exponent_is_positive_in_range() {
        for &(n, q) in &[(1, 1.5), (1, 3.0), (2, 2.0), (3, 1.5), (3, 2.9)] {
            assert!(ProblemParams::new(n, q, 0.0, 1.0).scaling_exponent() > 0.0);
        }
    }
}
