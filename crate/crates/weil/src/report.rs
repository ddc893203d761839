//! Line-oriented and JSON check reports shared by the identity suites.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Outcome of one sampled identity check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub algebra: String,
    pub n: usize,
    pub samples: usize,
    pub max_defect: f64,
    pub tol: f64,
    pub pass: bool,
}

impl CheckReport {
    pub fn new(
        name: &str,
        algebra: &str,
        n: usize,
        samples: usize,
        max_defect: f64,
        tol: f64,
    ) -> CheckReport {
        CheckReport {
            name: name.to_string(),
            algebra: algebra.to_string(),
            n,
            samples,
            max_defect,
            tol,
            pass: max_defect <= tol,
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CHECK {} algebra={} n={} samples={} max_defect={:e} tol={:e} {}",
            self.name,
            self.algebra,
            self.n,
            self.samples,
            self.max_defect,
            self.tol,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}
