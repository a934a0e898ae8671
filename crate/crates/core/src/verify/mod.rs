//! Independent reference computations and the packaged verification suites.
//!
//! The oracles deliberately avoid the code paths they check: [`rk4_reference`]
//! integrates the coupled system with an explicit Runge–Kutta scheme instead
//! of the matrix exponential, [`heat_series_solution`] sums the exact Fourier
//! series, and resolvents are compared against dense inverses.

mod convergence;
mod oracles;
mod report;
mod scenarios;
mod suite;
mod sweep;

pub use convergence::{
    convergence_study, refinement_levels, ConvergenceRow, ConvergenceStudy, ConvergenceTable, ORDER_RANGE,
};
pub use oracles::{dirichlet_closed_form, heat_series_solution, rk4_reference, rk4_stability_limit};
pub use report::{CheckResult, Tolerances, VerificationReport};
pub use scenarios::{shipped_scenarios, Scenario, ORACLE_DT, ORACLE_NODES, RESIDUAL_DT};
pub use suite::{run_identity_suite, run_oracle_suite, DEFAULT_SEED};
pub use sweep::{stability_sweep, sweep_report, SweepCell, SweepResult, DEFAULT_BAND};
