use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exec;

/// Outcome of one named check.
///
/// Wall time is kept for logging but not serialized, so reports of identical
/// runs compare byte for byte.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl CheckResult {
    pub fn new(id: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            id: id.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
            detail: None,
            wall_time: Duration::ZERO,
        }
    }

    /// A check that could not be evaluated; never passes.
    pub fn failed(id: impl Into<String>, tolerance: f64, reason: String) -> Self {
        Self { detail: Some(reason), ..Self::new(id, f64::INFINITY, tolerance) }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        Self { suite: suite.into(), ..Self::default() }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn get(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.id == id)
    }

    /// Concatenates several reports under one suite name.
    pub fn merge(suite: impl Into<String>, parts: Vec<VerificationReport>) -> Self {
        let mut out = Self::new(suite);
        for part in parts {
            out.checks.extend(part.checks);
            out.notes.extend(part.notes);
        }
        out
    }
}

pub(crate) type CheckFn<'a> = Box<dyn Fn() -> Result<(f64, Option<String>)> + Sync + Send + 'a>;

/// Runs independent checks (possibly concurrently) and records them in order.
pub(crate) fn run_checks(suite: &str, checks: Vec<(String, f64, CheckFn<'_>)>) -> VerificationReport {
    let results = exec::map_indexed(checks.len(), |i| {
        let (id, tol, check) = &checks[i];
        let start = Instant::now();
        let mut result = match check() {
            Ok((residual, detail)) => CheckResult { detail, ..CheckResult::new(id.clone(), residual, *tol) },
            Err(e) => CheckResult::failed(id.clone(), *tol, e.to_string()),
        };
        result.wall_time = start.elapsed();
        log::debug!("{suite}/{id}: residual {:.3e} (tol {:.1e}) in {:?}", result.residual, tol, result.wall_time);
        result
    });
    VerificationReport { suite: suite.to_string(), checks: results, notes: Vec::new() }
}

/// Per-check tolerances of the shipped suites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub dirichlet_identity: f64,
    pub dirichlet_constraints: f64,
    pub block_resolvent: f64,
    pub factorization: f64,
    pub similarity_spectrum: f64,
    pub semigroup_formula: f64,
    pub semigroup_law: f64,
    pub q_family: f64,
    pub laplace: f64,
    pub integrated_residual: f64,
    pub trace_consistency: f64,
    pub boundary_quadrature: f64,
    pub boundedness: f64,
    pub oracle_homogeneous: f64,
    pub oracle_inhomogeneous: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            dirichlet_identity: 1e-8,
            dirichlet_constraints: 1e-9,
            block_resolvent: 1e-8,
            factorization: 1e-9,
            similarity_spectrum: 1e-6,
            semigroup_formula: 1e-9,
            semigroup_law: 1e-9,
            q_family: 1e-6,
            laplace: 1e-4,
            integrated_residual: 1e-4,
            trace_consistency: 1e-9,
            boundary_quadrature: 1e-8,
            boundedness: 1e-6,
            oracle_homogeneous: 1e-6,
            oracle_inhomogeneous: 1e-5,
        }
    }
}

impl Tolerances {
    /// Every tolerance multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dirichlet_identity: self.dirichlet_identity * factor,
            dirichlet_constraints: self.dirichlet_constraints * factor,
            block_resolvent: self.block_resolvent * factor,
            factorization: self.factorization * factor,
            similarity_spectrum: self.similarity_spectrum * factor,
            semigroup_formula: self.semigroup_formula * factor,
            semigroup_law: self.semigroup_law * factor,
            q_family: self.q_family * factor,
            laplace: self.laplace * factor,
            integrated_residual: self.integrated_residual * factor,
            trace_consistency: self.trace_consistency * factor,
            boundary_quadrature: self.boundary_quadrature * factor,
            boundedness: self.boundedness * factor,
            oracle_homogeneous: self.oracle_homogeneous * factor,
            oracle_inhomogeneous: self.oracle_inhomogeneous * factor,
        }
    }
}
