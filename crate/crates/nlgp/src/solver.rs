//! Shared solver options, convergence reports, and error taxonomy.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectral::SpectralError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    FixedPoint,
    Newton,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    pub method: Method,
    /// Damping for the fixed-point iteration, in (0, 1].
    pub damping: f64,
    /// Residual sup-norm target.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { method: Method::Newton, damping: 0.5, tol: 1e-9, max_iter: 500 }
    }
}

impl SolverOptions {
    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub(crate) fn validate(&self) {
        assert!(self.tol > 0.0, "tolerance must be positive");
        assert!(self.max_iter >= 1, "max_iter must be at least 1");
        assert!(
            self.damping > 0.0 && self.damping <= 1.0,
            "damping must lie in (0, 1]"
        );
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    pub residual_sup: f64,
    pub eta_max: f64,
    pub first_integral_defect: f64,
}

impl SolveReport {
    pub(crate) fn pending(iterations: usize, residual_sup: f64, eta_max: f64) -> Self {
        SolveReport {
            converged: false,
            iterations,
            residual_sup,
            eta_max,
            first_integral_defect: f64::NAN,
        }
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("profile density 1 - |u|^2 reached 1; the iterate left the admissible set")]
    EtaTouchesOne,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Kernel(#[from] crate::kernel::KernelError),
    #[error(
        "no convergence: residual {residual:.3e} after {iterations} iterations",
        residual = report.residual_sup,
        iterations = report.iterations
    )]
    NoConvergence { report: SolveReport },
    #[error("iterate collapsed to the trivial zero profile (nontrivial branch lost)")]
    CollapseToZero { report: SolveReport },
    #[error(
        "inner Krylov solve stagnated at Newton iteration {it} (achieved relative residual {rel:.2e})",
        it = report.iterations
    )]
    LinearSolveStagnation { report: SolveReport, rel: f64 },
    #[error("continuation chain broke at lambda = {lambda}: {source}")]
    ChainBroken {
        lambda: f64,
        #[source]
        source: Box<SolveError>,
    },
    #[error("black-soliton init must be odd with u(-L) = -1 (got u(-L) = {got})")]
    BoundaryValues { got: f64 },
    #[error(
        "line search failed to decrease the energy (gradient sup-norm {residual:.3e})",
        residual = report.residual_sup
    )]
    NonDescent { report: SolveReport },
}

impl SolveError {
    /// The partial convergence report attached to soft failures, used by the
    /// CLI to write reports even for non-converged runs.
    pub fn report(&self) -> Option<SolveReport> {
        match self {
            SolveError::NoConvergence { report }
            | SolveError::CollapseToZero { report }
            | SolveError::LinearSolveStagnation { report, .. }
            | SolveError::NonDescent { report } => Some(*report),
            SolveError::ChainBroken { source, .. } => source.report(),
            _ => None,
        }
    }
}
