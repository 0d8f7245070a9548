//! `tune` and `compare` commands driven by a [`RunManifest`].
//!
//! `tune` writes `trace-seed{seed}.jsonl` per seed and `summary.csv` with
//! columns `seed,trials,best_ordinal,best_score` followed by one column per
//! parameter. `compare` writes `traces/{sampler}-seed{seed}.jsonl` and the
//! tables described in [`report`].
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or manifest error,
//! 3 objective setup failure.

pub mod manifest;
pub mod objective;
pub mod report;
pub mod worker;

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::fmt::format_real;
use crate::search_space::ParamValue;
use crate::study::{run_study, save_study, SamplerConfig, StudyConfig, StudyError, StudyResult};

pub use manifest::{CsvObjective, ObjectiveDef, Overrides, RunManifest};
pub use objective::{Objective, ObjectiveSource};
pub use report::{CellStatus, ComparisonReport, ConvergencePoint, ReportRow, SamplerSummary};
pub use worker::{ExternalObjective, WorkerError};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("manifest: {0}")]
    Manifest(String),

    #[error("objective setup: {0}")]
    ObjectiveSetup(String),

    #[error(transparent)]
    Study(#[from] StudyError),

    #[error("{path}: {message}")]
    Output { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Manifest(_) => 2,
            CliError::ObjectiveSetup(_) => 3,
            CliError::Study(_) | CliError::Output { .. } => 1,
        }
    }
}

fn output_error(path: &Path, e: impl ToString) -> CliError {
    CliError::Output {
        path: path.to_owned(),
        message: e.to_string(),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| output_error(path, e))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| output_error(path, e))
}

fn study_config(manifest: &RunManifest, sampler: &SamplerConfig, seed: u64) -> StudyConfig {
    let mut config = StudyConfig::new(manifest.direction, manifest.budget, seed, sampler.clone());
    config.record_wall_time = manifest.record_wall_time;
    config
}

fn trace_bytes(result: &StudyResult) -> Result<Vec<u8>, StudyError> {
    let mut buf = Vec::new();
    save_study(&result.study, &mut buf)?;
    Ok(buf)
}

fn value_cell(v: &ParamValue) -> String {
    match v {
        ParamValue::Real(x) => format_real(*x),
        other => other.to_string(),
    }
}

/// Best trial of one seed in a `tune` run.
#[derive(Debug, Clone, PartialEq)]
pub struct TuneRow {
    pub seed: u64,
    pub trials: usize,
    pub best: Option<crate::samplers::TrialRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneReport {
    pub rows: Vec<TuneRow>,
}

/// Runs one study per seed, sequentially, against one objective instance.
pub fn cmd_tune(manifest: &RunManifest) -> Result<TuneReport, CliError> {
    let sampler = manifest.tune_sampler()?;
    let source = ObjectiveSource::prepare(&manifest.objective)?;
    let mut objective = source.instantiate()?;
    create_dir(&manifest.output)?;

    let mut rows = Vec::with_capacity(manifest.seeds.len());
    for &seed in &manifest.seeds {
        let config = study_config(manifest, sampler, seed);
        let result = run_study(|p| objective.evaluate(p), &manifest.space, &config)?;
        let path = manifest.output.join(format!("trace-seed{seed}.jsonl"));
        write_file(&path, &trace_bytes(&result)?)?;
        rows.push(TuneRow {
            seed,
            trials: result.history().len(),
            best: result.best().cloned(),
        });
    }

    let path = manifest.output.join("summary.csv");
    let file = File::create(&path).map_err(|e| output_error(&path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let names: Vec<&str> = manifest.space.names().collect();
    let mut header = vec!["seed", "trials", "best_ordinal", "best_score"];
    header.extend(&names);
    w.write_record(&header).map_err(|e| output_error(&path, e))?;
    for r in &rows {
        let mut record = vec![r.seed.to_string(), r.trials.to_string()];
        match &r.best {
            Some(b) => {
                record.push(b.ordinal.to_string());
                record.push(report::real_cell(b.score()));
                record.extend(names.iter().map(|n| b.point.get(n).map(value_cell).unwrap_or_default()));
            }
            None => record.extend(std::iter::repeat_n(String::new(), 2 + names.len())),
        }
        w.write_record(&record).map_err(|e| output_error(&path, e))?;
    }
    w.flush().map_err(|e| output_error(&path, e))?;
    Ok(TuneReport { rows })
}

struct CellOutcome {
    row: ReportRow,
    convergence: Vec<ConvergencePoint>,
    trace: Option<Vec<u8>>,
}

fn run_cell(manifest: &RunManifest, source: &ObjectiveSource, sampler: &SamplerConfig, seed: u64) -> CellOutcome {
    let failed = |trials: usize, message: String| CellOutcome {
        row: ReportRow {
            sampler: sampler.name().to_owned(),
            seed,
            status: CellStatus::Failed,
            trials,
            best_ordinal: None,
            best_score: None,
            wall_ms: None,
            message,
        },
        convergence: Vec::new(),
        trace: None,
    };
    let mut objective = match source.instantiate() {
        Ok(o) => o,
        Err(e) => return failed(0, e.to_string()),
    };
    let config = study_config(manifest, sampler, seed);
    let result = match run_study(|p| objective.evaluate(p), &manifest.space, &config) {
        Ok(r) => r,
        Err(e) => return failed(0, e.to_string()),
    };
    let trace = match trace_bytes(&result) {
        Ok(t) => t,
        Err(e) => return failed(result.history().len(), e.to_string()),
    };
    let convergence = report::best_so_far(result.history(), manifest.direction)
        .into_iter()
        .map(|(ordinal, best)| ConvergencePoint {
            sampler: sampler.name().to_owned(),
            seed,
            ordinal,
            best_so_far: best,
        })
        .collect();
    let best = result.best();
    let (status, message) = match best {
        Some(_) => (CellStatus::Ok, String::new()),
        None => (CellStatus::Failed, "no trial completed".to_owned()),
    };
    CellOutcome {
        row: ReportRow {
            sampler: sampler.name().to_owned(),
            seed,
            status,
            trials: result.history().len(),
            best_ordinal: best.map(|b| b.ordinal),
            best_score: best.and_then(|b| b.score()),
            wall_ms: manifest.record_wall_time.then(|| result.wall_ms.iter().sum()),
            message,
        },
        convergence,
        trace: Some(trace),
    }
}

/// Runs every (sampler, seed) cell, possibly in parallel, and writes the
/// traces and tables. A failing cell is reported, not fatal.
pub fn cmd_compare(manifest: &RunManifest) -> Result<ComparisonReport, CliError> {
    let samplers = manifest.compare_samplers()?;
    let source = ObjectiveSource::prepare(&manifest.objective)?;
    let traces_dir = manifest.output.join("traces");
    create_dir(&traces_dir)?;

    let cells: Vec<(&SamplerConfig, u64)> = samplers
        .iter()
        .flat_map(|s| manifest.seeds.iter().map(move |&seed| (s, seed)))
        .collect();
    let outcomes: Vec<CellOutcome> = cells
        .par_iter()
        .map(|&(sampler, seed)| run_cell(manifest, &source, sampler, seed))
        .collect();

    let mut rows = Vec::with_capacity(outcomes.len());
    let mut convergence = Vec::new();
    for outcome in outcomes {
        if let Some(trace) = &outcome.trace {
            let path = traces_dir.join(format!("{}-seed{}.jsonl", outcome.row.sampler, outcome.row.seed));
            write_file(&path, trace)?;
        }
        convergence.extend(outcome.convergence);
        rows.push(outcome.row);
    }
    let summaries: Vec<SamplerSummary> = samplers.iter().map(|s| report::summarize(s.name(), &rows)).collect();
    let winner = report::pick_winner(&summaries, manifest.direction);
    let report = ComparisonReport {
        objective: manifest.objective.label(),
        direction: manifest.direction,
        rows,
        summaries,
        convergence,
        winner,
    };

    let write = |name: &str, f: &dyn Fn(&mut Vec<u8>) -> csv::Result<()>| -> Result<(), CliError> {
        let path = manifest.output.join(name);
        let mut buf = Vec::new();
        f(&mut buf).map_err(|e| output_error(&path, e))?;
        write_file(&path, &buf)
    };
    write("report.csv", &|b| report.write_report(b))?;
    write("summary.csv", &|b| report.write_summary(b))?;
    write("convergence.csv", &|b| report.write_convergence(b))?;
    write("table.csv", &|b| report.write_table(b))?;
    Ok(report)
}
