//! Tree-structured Parzen estimator.
//!
//! Completed trials are split at the `gamma` quantile of their scores into a
//! good set (fitted as `l(x)`) and the rest (fitted as `g(x)`). Candidates are
//! drawn from `l` and the one maximizing
//! `1 / (gamma + (g/l) * (1 - gamma))` is suggested, which is the same point
//! that maximizes `l/g`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::search_space::{ParamPoint, SearchSpace};

use super::{parzen_fit, parzen_pdf, parzen_sample, random_suggest, Direction, History, SamplerError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TpeConfig {
    /// Fraction of completed trials assigned to the good density.
    pub gamma: f64,
    /// Trials sampled at random before the model is used.
    pub n_startup: usize,
    /// Candidates drawn from `l(x)` per suggestion.
    pub n_candidates: usize,
    /// Smallest kernel bandwidth as a fraction of the dimension's width.
    pub bandwidth_floor: f64,
}

impl Default for TpeConfig {
    fn default() -> Self {
        TpeConfig {
            gamma: 0.25,
            n_startup: 10,
            n_candidates: 24,
            bandwidth_floor: 0.01,
        }
    }
}

impl TpeConfig {
    pub fn validate(&self) -> Result<(), SamplerError> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(SamplerError::InvalidGamma(self.gamma));
        }
        if self.n_startup < 2 {
            return Err(SamplerError::InvalidConfig("n_startup must be at least 2".into()));
        }
        if self.n_candidates < 1 {
            return Err(SamplerError::InvalidConfig("n_candidates must be at least 1".into()));
        }
        if !(self.bandwidth_floor > 0.0 && self.bandwidth_floor.is_finite()) {
            return Err(SamplerError::InvalidConfig("bandwidth_floor must be positive".into()));
        }
        Ok(())
    }
}

/// Partition of completed trials at the `gamma` quantile.
#[derive(Debug, Clone, PartialEq)]
pub struct TpeSplit {
    pub below: Vec<ParamPoint>,
    pub above: Vec<ParamPoint>,
    pub below_ordinals: Vec<u64>,
    pub above_ordinals: Vec<u64>,
    /// Score of the worst "below" trial, in the caller's units.
    pub y_star: f64,
}

/// Splits the completed trials of `history`.
///
/// The `max(1, ceil(gamma * n))` best trials go below (capped at `n - 1` so
/// the other side is never empty). Ties go to the lower ordinal.
pub fn tpe_split(history: &History, gamma: f64, direction: Direction) -> Result<TpeSplit, SamplerError> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(SamplerError::InvalidGamma(gamma));
    }
    let mut done: Vec<_> = history
        .completed()
        .map(|r| (direction.canonical(r.score().expect("completed")), r))
        .collect();
    let n = done.len();
    if n < 2 {
        return Err(SamplerError::NotEnoughTrials { needed: 2, got: n });
    }
    done.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.ordinal.cmp(&b.1.ordinal)));
    let n_below = ((gamma * n as f64).ceil() as usize).clamp(1, n - 1);
    let y_star = done[n_below - 1].1.score().expect("completed");
    let (below, above) = done.split_at(n_below);
    Ok(TpeSplit {
        below: below.iter().map(|(_, r)| r.point.clone()).collect(),
        above: above.iter().map(|(_, r)| r.point.clone()).collect(),
        below_ordinals: below.iter().map(|(_, r)| r.ordinal).collect(),
        above_ordinals: above.iter().map(|(_, r)| r.ordinal).collect(),
        y_star,
    })
}

/// `1 / (gamma + (g/l) * (1 - gamma))`, proportional to expected improvement.
pub fn ei_ratio_score(l_density: f64, g_density: f64, gamma: f64) -> Result<f64, SamplerError> {
    if !(l_density > 0.0 && g_density > 0.0) {
        return Err(SamplerError::NonPositiveDensity {
            l: l_density,
            g: g_density,
        });
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(SamplerError::InvalidGamma(gamma));
    }
    Ok(1.0 / (gamma + (g_density / l_density) * (1.0 - gamma)))
}

/// A suggestion together with the candidate set it was chosen from.
#[derive(Debug, Clone, PartialEq)]
pub struct TpeSuggestion {
    pub point: ParamPoint,
    /// Candidates in draw order; empty during the random startup phase.
    pub candidates: Vec<ParamPoint>,
    /// `ei_ratio_score` of each candidate.
    pub scores: Vec<f64>,
    pub chosen: Option<usize>,
}

pub fn tpe_suggest<R: Rng + ?Sized>(
    space: &SearchSpace,
    history: &History,
    config: &TpeConfig,
    direction: Direction,
    rng: &mut R,
) -> Result<ParamPoint, SamplerError> {
    tpe_suggest_logged(space, history, config, direction, rng).map(|s| s.point)
}

/// Like [`tpe_suggest`] but also returns the scored candidate set.
pub fn tpe_suggest_logged<R: Rng + ?Sized>(
    space: &SearchSpace,
    history: &History,
    config: &TpeConfig,
    direction: Direction,
    rng: &mut R,
) -> Result<TpeSuggestion, SamplerError> {
    config.validate()?;
    if history.n_completed() < config.n_startup {
        return Ok(TpeSuggestion {
            point: random_suggest(space, rng),
            candidates: Vec::new(),
            scores: Vec::new(),
            chosen: None,
        });
    }
    let split = tpe_split(history, config.gamma, direction)?;
    let l = parzen_fit(&split.below, space, config)?;
    let g = parzen_fit(&split.above, space, config)?;

    let mut candidates = Vec::with_capacity(config.n_candidates);
    let mut scores = Vec::with_capacity(config.n_candidates);
    let mut chosen = 0;
    for i in 0..config.n_candidates {
        let c = parzen_sample(&l, rng);
        let s = ei_ratio_score(parzen_pdf(&l, &c)?, parzen_pdf(&g, &c)?, config.gamma)?;
        if i == 0 || s > scores[chosen] {
            chosen = i;
        }
        candidates.push(c);
        scores.push(s);
    }
    Ok(TpeSuggestion {
        point: candidates[chosen].clone(),
        candidates,
        scores,
        chosen: Some(chosen),
    })
}
