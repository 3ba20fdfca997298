//! Scenario configs, Monte-Carlo experiments, certification and output.

pub mod certify;
pub mod config;
pub mod experiment;
pub mod output;
pub mod presets;

pub use certify::{certify, CertifyReport, SuiteReport};
pub use config::{Benchmark, ScenarioConfig, Sweep, SweepVariable, SEED_ENV};
pub use experiment::{aggregate, run_experiment, run_trials, ResultRow, Scheme, TrialOutcome};
pub use output::{emit_results, write_csv, write_json, OutputFormat};
pub use presets::{preset, preset_names};
