//! Batch scenarios and their reports.

pub mod cli;
pub mod config;
pub mod report;
pub mod scenario;

pub use config::{parse_body, BudgetParams, ScenarioConfig, ScenarioKind, SequenceParams};
pub use report::{format_real, write_report, Cell, Report, ReportFormat};
pub use scenario::run_scenario;
