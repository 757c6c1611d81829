//! Scenario runner for the interferometer simulator: sweep specs, presets,
//! result tables, convergence reports and golden-file comparison.

pub mod error;
pub mod golden;
pub mod scenario;
pub mod spec;
pub mod table;

pub use error::CliError;
pub use golden::{compare_golden, GoldenDiff};
pub use scenario::{convergence_report, preset, run_scenario, ConvergenceReport, PRESETS};
pub use spec::{OutputFormat, ScenarioSpec};
pub use table::ResultTable;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ZWM_OUT_DIR";
