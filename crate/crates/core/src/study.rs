//! Ask/tell optimization loop with budgets, seeding and trace persistence.
//!
//! Each trial draws its randomness from a ChaCha stream selected by the
//! trial's ordinal, so the sequence of suggestions depends only on the seed
//! and the told results, not on evaluation order or timing.
//!
//! # Trace format
//!
//! A trace is UTF-8 JSON lines. The first line is the header:
//!
//! ```text
//! {"format":"hypertune-trace/1","space":{...},"direction":"minimize","budget":100,
//!  "seed":7,"sampler":{"kind":"tpe",...},"record_wall_time":false}
//! ```
//!
//! Every following line is one trial:
//!
//! ```text
//! {"ordinal":0,"params":{"x":1.2500000000000000e0},"score":1.5625000000000000e0,"wall_ms":null}
//! {"ordinal":1,"params":{"x":3.0000000000000000e0},"failure":"worker exited","wall_ms":null}
//! ```
//!
//! Reals are written with 17 significant digits. `wall_ms` is `null` unless
//! `record_wall_time` is set, which keeps traces byte-reproducible by default.

use std::fmt::Display;
use std::io::{self, BufRead, Write};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fmt::to_json_line;
use crate::samplers::ga::{ga_init, ga_step, GaConfig, Population};
use crate::samplers::tpe::{tpe_suggest_logged, TpeConfig, TpeSuggestion};
use crate::samplers::{
    grid_next, random_suggest, Direction, GridCursor, History, SamplerError, TrialRecord, TrialState,
};
use crate::search_space::{ParamPoint, SearchSpace, SpaceError};

pub const TRACE_FORMAT: &str = "hypertune-trace/1";

#[derive(Debug, thiserror::Error)]
pub enum StudyError {
    #[error("budget of {0} trials is exhausted")]
    BudgetExhausted(u64),

    #[error("the grid has no points left")]
    SearchExhausted,

    #[error("generation {generation} cannot start until all {needed} trials of the previous one are told")]
    GenerationPending { generation: u64, needed: u64 },

    #[error("score must be finite, got {0}")]
    NonFiniteScore(f64),

    #[error("budget must be at least 1")]
    ZeroBudget,

    #[error(transparent)]
    Space(#[from] SpaceError),

    #[error(transparent)]
    Sampler(#[from] SamplerError),

    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Which sampler a study uses, with its settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SamplerConfig {
    Random,
    Grid { resolution: usize },
    Tpe(TpeConfig),
    Genetic(GaConfig),
}

impl SamplerConfig {
    pub fn name(&self) -> &'static str {
        match self {
            SamplerConfig::Random => "random",
            SamplerConfig::Grid { .. } => "grid",
            SamplerConfig::Tpe(_) => "tpe",
            SamplerConfig::Genetic(_) => "genetic",
        }
    }

    pub fn validate(&self) -> Result<(), SamplerError> {
        match self {
            SamplerConfig::Random => Ok(()),
            SamplerConfig::Grid { resolution } if *resolution == 0 => {
                Err(SpaceError::ZeroResolution.into())
            }
            SamplerConfig::Grid { .. } => Ok(()),
            SamplerConfig::Tpe(c) => c.validate(),
            SamplerConfig::Genetic(c) => c.validate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub direction: Direction,
    pub budget: u64,
    pub seed: u64,
    pub sampler: SamplerConfig,
    /// Write measured wall times into the trace. Off by default because it
    /// makes traces differ between runs.
    #[serde(default)]
    pub record_wall_time: bool,
}

impl StudyConfig {
    pub fn new(direction: Direction, budget: u64, seed: u64, sampler: SamplerConfig) -> Self {
        StudyConfig {
            direction,
            budget,
            seed,
            sampler,
            record_wall_time: false,
        }
    }
}

/// Generator for the trial with the given ordinal.
pub fn trial_rng(seed: u64, ordinal: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(ordinal);
    rng
}

/// One suggestion with the sampler's diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Suggestion {
    pub ordinal: u64,
    pub point: ParamPoint,
    /// Candidate set scored by TPE, when TPE made the suggestion.
    pub tpe: Option<TpeSuggestion>,
}

#[derive(Debug, Clone)]
pub struct Study {
    space: SearchSpace,
    config: StudyConfig,
    history: History,
    best: Option<u64>,
    asked: u64,
    grid: Option<GridCursor>,
    generation: Option<(u64, Population)>,
}

impl Study {
    pub fn new(space: SearchSpace, config: StudyConfig) -> Result<Self, StudyError> {
        if config.budget == 0 {
            return Err(StudyError::ZeroBudget);
        }
        config.sampler.validate()?;
        let grid = match config.sampler {
            SamplerConfig::Grid { resolution } => Some(GridCursor::new(&space, resolution)?),
            _ => None,
        };
        Ok(Study {
            space,
            config,
            history: History::new(),
            best: None,
            asked: 0,
            grid,
            generation: None,
        })
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn config(&self) -> &StudyConfig {
        &self.config
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    pub fn best(&self) -> Option<&TrialRecord> {
        self.best.and_then(|o| self.history.get(o))
    }

    /// Number of suggestions handed out so far.
    pub fn asked(&self) -> u64 {
        self.asked
    }

    pub fn ask(&mut self) -> Result<ParamPoint, StudyError> {
        self.ask_detailed().map(|s| s.point)
    }

    pub fn ask_detailed(&mut self) -> Result<Suggestion, StudyError> {
        if self.asked >= self.config.budget {
            return Err(StudyError::BudgetExhausted(self.config.budget));
        }
        let ordinal = self.asked;
        let mut rng = trial_rng(self.config.seed, ordinal);
        let mut tpe = None;
        let point = match &self.config.sampler {
            SamplerConfig::Random => random_suggest(&self.space, &mut rng),
            SamplerConfig::Grid { resolution } => {
                let cursor = self.grid.as_mut().expect("grid cursor");
                grid_next(&self.space, *resolution, cursor)?.ok_or(StudyError::SearchExhausted)?
            }
            SamplerConfig::Tpe(cfg) => {
                let s = tpe_suggest_logged(&self.space, &self.history, cfg, self.config.direction, &mut rng)?;
                let point = s.point.clone();
                tpe = Some(s);
                point
            }
            SamplerConfig::Genetic(cfg) => {
                let cfg = cfg.clone();
                self.genetic_member(&cfg, ordinal)?
            }
        };
        self.asked += 1;
        Ok(Suggestion { ordinal, point, tpe })
    }

    fn genetic_member(&mut self, cfg: &GaConfig, ordinal: u64) -> Result<ParamPoint, StudyError> {
        let size = cfg.pop_size as u64;
        let generation = ordinal / size;
        let index = (ordinal % size) as usize;
        let cached = matches!(&self.generation, Some((g, _)) if *g == generation);
        if !cached {
            // A population is built from the generator of its first member.
            let mut gen_rng = trial_rng(self.config.seed, generation * size);
            let pop = if generation == 0 {
                ga_init(&self.space, cfg, &mut gen_rng)
            } else {
                let start = (generation - 1) * size;
                if (self.history.len() as u64) < start + size {
                    return Err(StudyError::GenerationPending {
                        generation,
                        needed: size,
                    });
                }
                let records = &self.history.records()[start as usize..(start + size) as usize];
                let parents: Vec<ParamPoint> = records.iter().map(|r| r.point.clone()).collect();
                let fitnesses = self.generation_fitnesses(records);
                ga_step(&parents, &fitnesses, &self.space, cfg, self.config.direction, &mut gen_rng)?
            };
            self.generation = Some((generation, pop));
        }
        Ok(self.generation.as_ref().expect("cached").1[index].clone())
    }

    /// Fitness per record; failed trials take the worst completed score of
    /// the generation (or of the whole history when the generation has none).
    fn generation_fitnesses(&self, records: &[TrialRecord]) -> Vec<f64> {
        let dir = self.config.direction;
        let worst_of = |it: &mut dyn Iterator<Item = f64>| it.reduce(|a, b| dir.worst(a, b));
        let worst = worst_of(&mut records.iter().filter_map(TrialRecord::score))
            .or_else(|| worst_of(&mut self.history.completed().filter_map(TrialRecord::score)))
            .unwrap_or(0.0);
        records.iter().map(|r| r.score().unwrap_or(worst)).collect()
    }

    /// Records a completed trial.
    pub fn tell(&mut self, point: ParamPoint, score: f64) -> Result<&TrialRecord, StudyError> {
        if !score.is_finite() {
            return Err(StudyError::NonFiniteScore(score));
        }
        self.tell_state(point, TrialState::Complete(score), None)
    }

    /// Records a failed trial; it is kept in the trace but ignored by samplers
    /// and best-tracking.
    pub fn tell_failed(&mut self, point: ParamPoint, reason: impl Into<String>) -> Result<&TrialRecord, StudyError> {
        self.tell_state(point, TrialState::Failed(reason.into()), None)
    }

    pub fn tell_state(
        &mut self,
        point: ParamPoint,
        state: TrialState,
        wall_ms: Option<f64>,
    ) -> Result<&TrialRecord, StudyError> {
        if self.history.len() as u64 >= self.config.budget {
            return Err(StudyError::BudgetExhausted(self.config.budget));
        }
        if let TrialState::Complete(s) = state {
            if !s.is_finite() {
                return Err(StudyError::NonFiniteScore(s));
            }
        }
        self.space.validate(&point)?;
        let point = self.space.reorder(&point);
        let dir = self.config.direction;
        let record = self.history.push(point, state, wall_ms);
        let ordinal = record.ordinal;
        if let Some(score) = record.score() {
            let improves = match self.best.and_then(|o| self.history.get(o)).and_then(TrialRecord::score) {
                Some(b) => dir.is_better(score, b),
                None => true,
            };
            if improves {
                self.best = Some(ordinal);
            }
        }
        self.asked = self.asked.max(self.history.len() as u64);
        Ok(self.history.get(ordinal).expect("just pushed"))
    }
}

/// Outcome of [`run_study`].
#[derive(Debug, Clone)]
pub struct StudyResult {
    pub study: Study,
    /// Measured wall time of each trial in milliseconds, by ordinal.
    pub wall_ms: Vec<f64>,
}

impl StudyResult {
    pub fn best(&self) -> Option<&TrialRecord> {
        self.study.best()
    }

    pub fn history(&self) -> &History {
        self.study.history()
    }

    pub fn sampler(&self) -> &'static str {
        self.study.config().sampler.name()
    }
}

/// Runs `budget` ask/tell rounds, or fewer if a grid runs out first.
///
/// Objective errors and non-finite scores mark the trial failed; the study
/// carries on.
pub fn run_study<F, E>(mut objective: F, space: &SearchSpace, config: &StudyConfig) -> Result<StudyResult, StudyError>
where
    F: FnMut(&ParamPoint) -> Result<f64, E>,
    E: Display,
{
    let mut study = Study::new(space.clone(), config.clone())?;
    let mut wall_ms = Vec::new();
    while study.asked() < config.budget {
        let point = match study.ask() {
            Ok(p) => p,
            Err(StudyError::SearchExhausted) => break,
            Err(e) => return Err(e),
        };
        let started = Instant::now();
        let outcome = objective(&point);
        let elapsed = started.elapsed().as_secs_f64() * 1e3;
        let state = match outcome {
            Ok(s) if s.is_finite() => TrialState::Complete(s),
            Ok(s) => TrialState::Failed(format!("non-finite score {s}")),
            Err(e) => TrialState::Failed(e.to_string()),
        };
        let recorded = config.record_wall_time.then_some(elapsed);
        study.tell_state(point, state, recorded)?;
        wall_ms.push(elapsed);
    }
    Ok(StudyResult { study, wall_ms })
}

#[derive(Serialize, Deserialize)]
struct TraceHeader {
    format: String,
    space: SearchSpace,
    #[serde(flatten)]
    config: StudyConfig,
}

#[derive(Serialize)]
struct TraceLine<'a> {
    ordinal: u64,
    params: &'a ParamPoint,
    #[serde(skip_serializing_if = "Option::is_none")]
    score: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<&'a str>,
    wall_ms: Option<f64>,
}

pub fn save_study<W: Write>(study: &Study, mut sink: W) -> Result<(), StudyError> {
    let header = TraceHeader {
        format: TRACE_FORMAT.to_owned(),
        space: study.space.clone(),
        config: study.config.clone(),
    };
    writeln!(sink, "{}", to_json_line(&header).map_err(io::Error::from)?)?;
    for r in study.history.records() {
        let line = TraceLine {
            ordinal: r.ordinal,
            params: &r.point,
            score: r.score(),
            failure: match &r.state {
                TrialState::Failed(m) => Some(m),
                TrialState::Complete(_) => None,
            },
            wall_ms: r.wall_ms,
        };
        writeln!(sink, "{}", to_json_line(&line).map_err(io::Error::from)?)?;
    }
    sink.flush()?;
    Ok(())
}

pub fn load_study<R: BufRead>(source: R) -> Result<Study, StudyError> {
    let malformed = |line: usize, message: String| StudyError::Malformed { line, message };
    let mut lines = source.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| malformed(1, "missing header".to_owned()))?;
    let header: TraceHeader =
        serde_json::from_str(&header?).map_err(|e| malformed(1, format!("bad header: {e}")))?;
    if header.format != TRACE_FORMAT {
        return Err(malformed(1, format!("unsupported format `{}`", header.format)));
    }
    let mut study = Study::new(header.space, header.config).map_err(|e| malformed(1, e.to_string()))?;
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        if line.is_empty() {
            return Err(malformed(line_no, "empty line".to_owned()));
        }
        let v: serde_json::Value =
            serde_json::from_str(&line).map_err(|e| malformed(line_no, e.to_string()))?;
        let obj = v
            .as_object()
            .ok_or_else(|| malformed(line_no, "record must be an object".to_owned()))?;
        let ordinal = obj
            .get("ordinal")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| malformed(line_no, "missing ordinal".to_owned()))?;
        if ordinal != study.history.len() as u64 {
            return Err(malformed(
                line_no,
                format!("expected ordinal {}, found {ordinal}", study.history.len()),
            ));
        }
        let params = obj
            .get("params")
            .ok_or_else(|| malformed(line_no, "missing params".to_owned()))?;
        let point = study
            .space
            .point_from_json(params)
            .map_err(|m| malformed(line_no, m))?;
        let state = match (obj.get("score"), obj.get("failure")) {
            (Some(s), None) => TrialState::Complete(
                s.as_f64()
                    .ok_or_else(|| malformed(line_no, "score must be a number".to_owned()))?,
            ),
            (None, Some(f)) => TrialState::Failed(
                f.as_str()
                    .ok_or_else(|| malformed(line_no, "failure must be a string".to_owned()))?
                    .to_owned(),
            ),
            _ => return Err(malformed(line_no, "exactly one of score or failure is required".to_owned())),
        };
        let wall_ms = match obj.get("wall_ms") {
            None | Some(serde_json::Value::Null) => None,
            Some(w) => Some(
                w.as_f64()
                    .ok_or_else(|| malformed(line_no, "wall_ms must be a number".to_owned()))?,
            ),
        };
        study
            .tell_state(point, state, wall_ms)
            .map_err(|e| malformed(line_no, e.to_string()))?;
    }
    if let Some(cursor) = study.grid.as_mut() {
        cursor.seek(study.history.len());
    }
    Ok(study)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search_space::{Distribution, ParamValue};

    fn line_space() -> SearchSpace {
        SearchSpace::new([("x", Distribution::uniform(0.0, 10.0).unwrap())]).unwrap()
    }

    fn x(v: f64) -> ParamPoint {
        [("x", ParamValue::Real(v))].into_iter().collect()
    }

    fn config(sampler: SamplerConfig, direction: Direction, budget: u64) -> StudyConfig {
        StudyConfig::new(direction, budget, 17, sampler)
    }

    #[test]
    fn first_random_ask_matches_trial_rng() {
        let space = crate::search_space::preset_space("gbm").unwrap();
        let mut s = Study::new(space.clone(), config(SamplerConfig::Random, Direction::Minimize, 5)).unwrap();
        let p = s.ask().unwrap();
        assert_eq!(p, random_suggest(&space, &mut trial_rng(17, 0)));
    }

    #[test]
    fn grid_delegation_and_exhaustion() {
        let mut s = Study::new(
            line_space(),
            config(SamplerConfig::Grid { resolution: 3 }, Direction::Minimize, 10),
        )
        .unwrap();
        let pts: Vec<f64> = (0..3).map(|_| s.ask().unwrap().real("x").unwrap()).collect();
        assert_eq!(pts, vec![0.0, 5.0, 10.0]);
        assert!(matches!(s.ask(), Err(StudyError::SearchExhausted)));
    }

    #[test]
    fn ask_after_budget_fails() {
        let mut s = Study::new(line_space(), config(SamplerConfig::Random, Direction::Minimize, 2)).unwrap();
        for _ in 0..2 {
            let p = s.ask().unwrap();
            s.tell(p, 1.0).unwrap();
        }
        assert!(matches!(s.ask(), Err(StudyError::BudgetExhausted(2))));
    }

    #[test]
    fn best_tracking() {
        for (dir, expect) in [(Direction::Minimize, 1), (Direction::Maximize, 0)] {
            let mut s = Study::new(line_space(), config(SamplerConfig::Random, dir, 10)).unwrap();
            for score in [3.0, 1.0, 2.0] {
                s.tell(x(1.0), score).unwrap();
            }
            assert_eq!(s.best().unwrap().ordinal, expect);
        }
        let mut s = Study::new(line_space(), config(SamplerConfig::Random, Direction::Minimize, 10)).unwrap();
        s.tell(x(1.0), 2.0).unwrap();
        s.tell(x(2.0), 2.0).unwrap();
        assert_eq!(s.best().unwrap().ordinal, 0);
    }

    #[test]
    fn tell_rejects_bad_input() {
        let mut s = Study::new(line_space(), config(SamplerConfig::Random, Direction::Minimize, 10)).unwrap();
        assert!(matches!(s.tell(x(1.0), f64::NAN), Err(StudyError::NonFiniteScore(_))));
        assert!(matches!(s.tell(x(11.0), 1.0), Err(StudyError::Space(_))));
        assert!(s.history().is_empty());
    }

    #[test]
    fn failed_trials_do_not_become_best() {
        let mut s = Study::new(line_space(), config(SamplerConfig::Random, Direction::Minimize, 10)).unwrap();
        s.tell_failed(x(1.0), "crash").unwrap();
        assert!(s.best().is_none());
        s.tell(x(2.0), 5.0).unwrap();
        assert_eq!(s.best().unwrap().ordinal, 1);
    }

    #[test]
    fn run_study_budget_and_failures() {
        let space = line_space();
        let cfg = config(SamplerConfig::Random, Direction::Minimize, 100);
        let mut calls = 0;
        let result = run_study(
            |p: &ParamPoint| {
                calls += 1;
                if calls == 5 {
                    Err("boom")
                } else {
                    Ok((p.real("x").unwrap() - 3.0).powi(2))
                }
            },
            &space,
            &cfg,
        )
        .unwrap();
        assert_eq!(result.history().len(), 100);
        assert!(result.history().records()[4].is_failed());
        assert_eq!(result.wall_ms.len(), 100);
        assert_eq!(result.sampler(), "random");
    }

    #[test]
    fn run_study_stops_on_grid_exhaustion() {
        let cfg = config(SamplerConfig::Grid { resolution: 3 }, Direction::Minimize, 100);
        let result = run_study(|p: &ParamPoint| Ok::<_, String>(p.real("x").unwrap()), &line_space(), &cfg).unwrap();
        assert_eq!(result.history().len(), 3);
    }

    #[test]
    fn genetic_study_runs_generations() {
        let space = line_space();
        let ga = GaConfig { pop_size: 5, tournament_k: 2, ..GaConfig::default() };
        let cfg = config(SamplerConfig::Genetic(ga), Direction::Minimize, 23);
        let result = run_study(
            |p: &ParamPoint| Ok::<_, String>((p.real("x").unwrap() - 3.0).powi(2)),
            &space,
            &cfg,
        )
        .unwrap();
        assert_eq!(result.history().len(), 23);
        // Elitism: each generation's best is no worse than the previous one.
        let bests: Vec<f64> = result
            .history()
            .records()
            .chunks(5)
            .map(|c| c.iter().filter_map(TrialRecord::score).fold(f64::INFINITY, f64::min))
            .collect();
        assert!(bests.windows(2).all(|w| w[1] <= w[0]), "{bests:?}");
    }

    #[test]
    fn genetic_generation_waits_for_tells() {
        let ga = GaConfig { pop_size: 2, tournament_k: 1, ..GaConfig::default() };
        let mut s = Study::new(line_space(), config(SamplerConfig::Genetic(ga), Direction::Minimize, 10)).unwrap();
        let a = s.ask().unwrap();
        let _b = s.ask().unwrap();
        assert!(matches!(s.ask(), Err(StudyError::GenerationPending { .. })));
        s.tell(a, 1.0).unwrap();
        assert!(matches!(s.ask(), Err(StudyError::GenerationPending { .. })));
    }

    fn traced(sampler: SamplerConfig, budget: u64) -> Study {
        let space = SearchSpace::new([
            ("x", Distribution::uniform(-1.0, 1.0).unwrap()),
            ("n", Distribution::int_uniform(1, 9).unwrap()),
            ("k", Distribution::categorical(["a", "b"]).unwrap()),
        ])
        .unwrap();
        let cfg = StudyConfig::new(Direction::Minimize, budget, 3, sampler);
        run_study(
            |p: &ParamPoint| {
                if p.get("k") == Some(&ParamValue::Category("b".into())) && p.real("n") == Some(9.0) {
                    return Err("unlucky".to_owned());
                }
                Ok(p.real("x").unwrap().powi(2) / 3.0 + p.real("n").unwrap())
            },
            &space,
            &cfg,
        )
        .unwrap()
        .study
    }

    fn roundtrip(study: &Study) -> (Vec<u8>, Study) {
        let mut buf = Vec::new();
        save_study(study, &mut buf).unwrap();
        let loaded = load_study(&buf[..]).unwrap();
        (buf, loaded)
    }

    #[test]
    fn trace_round_trip() {
        for study in [
            Study::new(line_space(), config(SamplerConfig::Random, Direction::Minimize, 4)).unwrap(),
            traced(SamplerConfig::Tpe(TpeConfig::default()), 100),
            traced(SamplerConfig::Genetic(GaConfig::default()), 60),
        ] {
            let (bytes, loaded) = roundtrip(&study);
            assert_eq!(loaded.history(), study.history());
            assert_eq!(loaded.config(), study.config());
            assert_eq!(loaded.space(), study.space());
            assert_eq!(loaded.best(), study.best());
            let mut again = Vec::new();
            save_study(&loaded, &mut again).unwrap();
            assert_eq!(again, bytes);
        }
    }

    #[test]
    fn loaded_study_continues_identically() {
        let full = traced(SamplerConfig::Tpe(TpeConfig::default()), 30);
        let mut partial = Study::new(full.space().clone(), StudyConfig { budget: 30, ..full.config().clone() }).unwrap();
        for r in &full.history().records()[..20] {
            partial.tell_state(r.point.clone(), r.state.clone(), None).unwrap();
        }
        let (_, mut loaded) = roundtrip(&partial);
        assert_eq!(loaded.ask().unwrap(), full.history().records()[20].point);
    }

    #[test]
    fn truncated_line_is_reported() {
        let study = traced(SamplerConfig::Random, 5);
        let mut buf = Vec::new();
        save_study(&study, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let cut = &text[..text.len() - 10];
        match load_study(cut.as_bytes()) {
            Err(StudyError::Malformed { line, .. }) => assert_eq!(line, 6),
            other => panic!("expected malformed error, got {other:?}"),
        }
    }

    #[test]
    fn header_shape() {
        let study = traced(SamplerConfig::Tpe(TpeConfig::default()), 12);
        let mut buf = Vec::new();
        save_study(&study, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(header["format"], TRACE_FORMAT);
        assert_eq!(header["sampler"]["kind"], "tpe");
        assert_eq!(header["direction"], "minimize");
        assert_eq!(header["seed"], 3);
        assert_eq!(header["space"]["k"]["kind"], "categorical");
        let rec: serde_json::Value = serde_json::from_str(text.lines().nth(1).unwrap()).unwrap();
        assert_eq!(rec["ordinal"], 0);
        assert!(rec["wall_ms"].is_null());
    }
}
