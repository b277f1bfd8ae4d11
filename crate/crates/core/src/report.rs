//! Residual reports: the common output record of every verification check.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;

/// One quantitative check: estimated left and right sides, their residual,
/// the statistical error of the estimate (0 for quadrature), and the pass
/// verdict `|residual| <= max(tolerance, 3 * statistical_error)`.
///
/// `params` records everything needed to reproduce the numbers (seed, eps,
/// sample counts, grid sizes, probe function). A `BTreeMap` keeps the JSON
/// serialization byte-stable.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidualReport {
    pub check: String,
    pub anchor: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub statistical_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub params: BTreeMap<String, Value>,
}

impl ResidualReport {
    pub fn new(
        check: impl Into<String>,
        anchor: impl Into<String>,
        lhs: f64,
        rhs: f64,
        statistical_error: f64,
        tolerance: f64,
    ) -> Self {
        let residual = lhs - rhs;
        Self {
            check: check.into(),
            anchor: anchor.into(),
            lhs,
            rhs,
            residual,
            statistical_error,
            tolerance,
            pass: residual.abs() <= tolerance.max(3.0 * statistical_error),
            params: BTreeMap::new(),
        }
    }

    /// Report for a one-sided inequality `lhs <= rhs`: the residual is the
    /// violation `max(lhs - rhs, 0)`.
    pub fn inequality(
        check: impl Into<String>,
        anchor: impl Into<String>,
        lhs: f64,
        rhs: f64,
        statistical_error: f64,
        tolerance: f64,
    ) -> Self {
        let violation = (lhs - rhs).max(0.0);
        Self {
            check: check.into(),
            anchor: anchor.into(),
            lhs,
            rhs,
            residual: violation,
            statistical_error,
            tolerance,
            pass: violation <= tolerance.max(3.0 * statistical_error),
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    /// Mark failed regardless of the residual (for structural violations).
    pub fn failed(mut self, reason: &str) -> Self {
        self.pass = false;
        self.params.insert("failure".into(), Value::String(reason.into()));
        self
    }
}
