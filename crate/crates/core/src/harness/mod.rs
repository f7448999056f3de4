//! Experiment plumbing: configs, random dense sets, coverage runs, reports
//! and the acceptance suite.

pub mod config;
pub mod experiment;
pub mod report;
pub mod suite;

pub use config::{ExperimentConfig, OutputFormat, SubsetMode};
pub use experiment::{
    coverage_experiment, empirical_density, random_dense_subset, representation_count,
    shnirelman_density, RepresentationCounts,
};
pub use report::{emit_report, from_json, render, CheckResult, ExperimentReport};
pub use suite::{run_criterion, run_suite, CRITERIA};
