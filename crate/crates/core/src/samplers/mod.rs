//! Suggestion strategies: random search, grid search, a genetic algorithm and
//! the tree-structured Parzen estimator.
//!
//! Every sampler is a pure function of its inputs (space, history, config and
//! the caller's generator). Scores are compared in a canonical minimization
//! frame; [`Direction::Maximize`] negates them at the boundary.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::search_space::{ParamPoint, SpaceError};

pub mod ga;
pub mod grid;
pub mod parzen;
pub mod random;
pub mod tpe;

pub use ga::{ga_crossover, ga_init, ga_mutate, ga_run, ga_select, ga_step, GaConfig, GaRun, Population};
pub use grid::{grid_next, GridCursor};
pub use parzen::{parzen_fit, parzen_pdf, parzen_sample, ParzenEstimator};
pub use random::random_suggest;
pub use tpe::{ei_ratio_score, tpe_split, tpe_suggest, tpe_suggest_logged, TpeConfig, TpeSplit};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SamplerError {
    #[error("at least {needed} completed trials are required, got {got}")]
    NotEnoughTrials { needed: usize, got: usize },

    #[error("no points to fit")]
    EmptyPoints,

    #[error("densities must be strictly positive (l = {l}, g = {g})")]
    NonPositiveDensity { l: f64, g: f64 },

    #[error("gamma must lie in (0, 1), got {0}")]
    InvalidGamma(f64),

    #[error("length mismatch: {0} members but {1} fitness values")]
    LengthMismatch(usize, usize),

    #[error("chromosomes do not share a parameter layout")]
    SpaceMismatch,

    #[error("grid cursor was built for a different space or resolution")]
    CursorMismatch,

    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Space(#[from] SpaceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Minimize,
    Maximize,
}

impl Direction {
    /// Maps a score into the minimization frame.
    pub fn canonical(self, score: f64) -> f64 {
        match self {
            Direction::Minimize => score,
            Direction::Maximize => -score,
        }
    }

    /// True if `a` is strictly better than `b`.
    pub fn is_better(self, a: f64, b: f64) -> bool {
        self.canonical(a) < self.canonical(b)
    }

    /// The worse of two scores.
    pub fn worst(self, a: f64, b: f64) -> f64 {
        if self.is_better(a, b) {
            b
        } else {
            a
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Minimize => "minimize",
            Direction::Maximize => "maximize",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrialState {
    Complete(f64),
    Failed(String),
}

/// One evaluated point.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub ordinal: u64,
    pub point: ParamPoint,
    pub state: TrialState,
    pub wall_ms: Option<f64>,
}

impl TrialRecord {
    pub fn complete(ordinal: u64, point: ParamPoint, score: f64) -> Self {
        TrialRecord {
            ordinal,
            point,
            state: TrialState::Complete(score),
            wall_ms: None,
        }
    }

    pub fn score(&self) -> Option<f64> {
        match self.state {
            TrialState::Complete(s) => Some(s),
            TrialState::Failed(_) => None,
        }
    }

    pub fn is_failed(&self) -> bool {
        matches!(self.state, TrialState::Failed(_))
    }
}

/// Trials ordered by ordinal; ordinals are dense from zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct History {
    records: Vec<TrialRecord>,
}

impl History {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a history from completed `(point, score)` pairs, numbering them
    /// from zero.
    pub fn from_scores<I>(items: I) -> Self
    where
        I: IntoIterator<Item = (ParamPoint, f64)>,
    {
        let mut h = History::new();
        for (point, score) in items {
            h.push(point, TrialState::Complete(score), None);
        }
        h
    }

    pub fn push(&mut self, point: ParamPoint, state: TrialState, wall_ms: Option<f64>) -> &TrialRecord {
        let ordinal = self.records.len() as u64;
        self.records.push(TrialRecord {
            ordinal,
            point,
            state,
            wall_ms,
        });
        self.records.last().expect("just pushed")
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[TrialRecord] {
        &self.records
    }

    pub fn get(&self, ordinal: u64) -> Option<&TrialRecord> {
        self.records.get(ordinal as usize)
    }

    /// Completed trials only; failed trials are invisible to samplers.
    pub fn completed(&self) -> impl Iterator<Item = &TrialRecord> {
        self.records.iter().filter(|r| !r.is_failed())
    }

    pub fn n_completed(&self) -> usize {
        self.completed().count()
    }

    /// Best completed record under `direction`, ties to the lower ordinal.
    pub fn best(&self, direction: Direction) -> Option<&TrialRecord> {
        let mut best: Option<&TrialRecord> = None;
        for r in self.completed() {
            let s = r.score().expect("completed");
            match best {
                Some(b) if !direction.is_better(s, b.score().expect("completed")) => {}
                _ => best = Some(r),
            }
        }
        best
    }
}
