//! Experiment runner: builds scenario data, measures the dispersive
//! inequalities as ratios across dyadic scales, fits growth exponents and
//! emits CSV/JSON reports.

pub mod config;
pub mod experiments;
pub mod fit;
pub mod report;
pub mod scenario;

pub use config::Config;
pub use experiments::{
    build_cube_family, run_experiment, ExperimentKind, ExperimentOpts, FamilyKind, RatioRow,
    RatioTable,
};
pub use fit::{fit_growth_exponent, GrowthFit};
pub use report::{emit_report, ReportFormat};
pub use scenario::{Scenario, ScenarioKind};
