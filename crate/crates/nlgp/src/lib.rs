//! Gray and black dark solitons of the one-dimensional nonlocal
//! Gross–Pitaevskii equation
//!
//! ```text
//! i ∂t Ψ = ∂xx Ψ + Ψ (𝒲 ∗ (1 − |Ψ|²)),   |Ψ| → 1 at infinity,
//! ```
//!
//! for a catalogue of interaction kernels 𝒲 (contact, gaussian, nematic,
//! vanderwaals, rectangular, three-delta, custom atom lists). Traveling
//! profiles u(x − ct) are computed on a periodic box by Fourier-multiplier
//! fixed-point iteration and Newton–Krylov solves for gray solitons
//! (0 < c < √2), and by constrained energy minimization over odd fronts for
//! black solitons (c = 0). The `analysis` module carries the diagnostic
//! toolbox: hypothesis certificates, conserved quantities, a-priori bounds,
//! oscillation detection/prediction, family thresholds, and
//! nonlocal-to-local sweep metrics.

pub mod analysis;
pub mod black;
pub mod gray;
pub mod kernel;
pub mod solver;
pub mod spectral;
mod util;

pub use analysis::{
    apriori_bounds, conserved_quantities, oscillation_predicate, oscillation_scan, thresholds,
    AnalysisError, DiagnosticsReport, OscillationReport, Profile, SweepEntry, ThresholdReport,
};
pub use black::{energy, energy_gradient, minimize_odd, solve_black, BlackProfile};
pub use gray::{
    continue_family, explicit_local_profile, reconstruct_phase, solve as solve_gray, solve_auto,
    ContinuationStep, GrayProfile,
};
pub use kernel::{Family, HypothesisReport, Kernel, KernelError, KernelSpec, SONIC_SPEED};
pub use solver::{Method, SolveError, SolveReport, SolverOptions};
pub use spectral::{Field, Grid, SpectralError};

#[doc(hidden)]
pub use util::SplitRng;
