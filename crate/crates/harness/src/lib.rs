//! Experiment harness: seeded generators, the verification suites, bound
//! checks and report writers behind the `learnaug` command-line tool.

pub mod check;
pub mod config;
pub mod error;
pub mod gen;
pub mod report;
pub mod suites;

pub use check::{BoundCheck, Quantity, STAT_SLACK};
pub use config::{ExperimentConfig, Params, ReportFormat, SeedRange};
pub use error::HarnessError;
pub use report::{emit_report, failing_records, load_jsonl, to_csv, to_jsonl, to_summary, CSV_HEADER};
pub use suites::{lb_policy, run_suite, suite_info, SuiteInfo, SuiteReport, SUITES};
