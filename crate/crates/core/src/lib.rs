//! Hyperparameter optimization toolkit.
//!
//! Four samplers (random search, grid search, a genetic algorithm and the
//! tree-structured Parzen estimator) share one ask/tell [`study::Study`] loop.
//! [`eval`] provides the objectives they are benchmarked on: cross-validated
//! ridge and logistic models, synthetic landscapes and the usual metrics.
//! [`cli`] drives tuning and sampler comparisons from a TOML manifest.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod eval;
pub mod fmt;
pub mod samplers;
pub mod search_space;
pub mod study;

pub use samplers::{Direction, History, TrialRecord, TrialState};
pub use search_space::{preset_space, Distribution, ParamPoint, ParamValue, SearchSpace};
pub use study::{load_study, run_study, save_study, SamplerConfig, Study, StudyConfig, StudyResult};
