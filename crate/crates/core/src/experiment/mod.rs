//! Experiment harness: configuration, per-trial pipeline, λ_R sweeps and
//! CSV/JSON artifacts.

pub mod config;
pub mod output;
pub mod sweep;
pub mod trial;

pub use config::{EstimatorConfig, ExperimentConfig, GridSearchConfig, DEFAULT_SWEEP};
pub use output::{emit_figure_data, write_atomic, FigureKind, OutputDir};
pub use sweep::{run_sweep, run_trials, SummaryRow, SweepReport, SweepRow};
pub use trial::{run_trial, run_trial_at, TrialContext, TrialRecord, TrialStatus};
