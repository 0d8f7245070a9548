//! Comparison tables and their CSV forms.
//!
//! Column orders are fixed:
//!
//! * `report.csv`: `sampler,seed,status,trials,best_ordinal,best_score,wall_ms,message`
//! * `summary.csv`: `sampler,cells,completed,median,q1,q3,iqr`
//! * `convergence.csv`: `sampler,seed,ordinal,best_so_far`
//! * `table.csv`: `objective,direction,<one median column per sampler>,winner`
//!
//! Reals use 17 significant digits; missing values are empty cells.

use std::io::Write;

use serde::Serialize;

use crate::fmt::format_real;
use crate::samplers::{Direction, History};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Ok,
    Failed,
}

/// Outcome of one (sampler, seed) study.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub sampler: String,
    pub seed: u64,
    pub status: CellStatus,
    pub trials: usize,
    pub best_ordinal: Option<u64>,
    pub best_score: Option<f64>,
    /// Total measured trial time; only filled when wall times are recorded.
    pub wall_ms: Option<f64>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerSummary {
    pub sampler: String,
    pub cells: usize,
    pub completed: usize,
    pub median: Option<f64>,
    pub q1: Option<f64>,
    pub q3: Option<f64>,
    pub iqr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergencePoint {
    pub sampler: String,
    pub seed: u64,
    pub ordinal: u64,
    pub best_so_far: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub objective: String,
    pub direction: Direction,
    /// In (sampler, seed) order.
    pub rows: Vec<ReportRow>,
    pub summaries: Vec<SamplerSummary>,
    pub convergence: Vec<ConvergencePoint>,
    /// Sampler with the best median; the earlier sampler wins ties.
    pub winner: Option<String>,
}

/// Quantile `p` of ascending `sorted` by linear interpolation between order
/// statistics at position `(n - 1) p`.
pub fn quantile(sorted: &[f64], p: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    Some(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

pub fn summarize(sampler: &str, rows: &[ReportRow]) -> SamplerSummary {
    let mine: Vec<&ReportRow> = rows.iter().filter(|r| r.sampler == sampler).collect();
    let mut scores: Vec<f64> = mine
        .iter()
        .filter(|r| r.status == CellStatus::Ok)
        .filter_map(|r| r.best_score)
        .collect();
    scores.sort_by(f64::total_cmp);
    let q1 = quantile(&scores, 0.25);
    let q3 = quantile(&scores, 0.75);
    SamplerSummary {
        sampler: sampler.to_owned(),
        cells: mine.len(),
        completed: scores.len(),
        median: quantile(&scores, 0.5),
        q1,
        q3,
        iqr: q1.zip(q3).map(|(a, b)| b - a),
    }
}

pub fn pick_winner(summaries: &[SamplerSummary], direction: Direction) -> Option<String> {
    let mut best: Option<(&str, f64)> = None;
    for s in summaries {
        if let Some(m) = s.median {
            if best.is_none_or(|(_, b)| direction.is_better(m, b)) {
                best = Some((&s.sampler, m));
            }
        }
    }
    best.map(|(name, _)| name.to_owned())
}

/// Running best over completed trials, one entry per trial.
pub fn best_so_far(history: &History, direction: Direction) -> Vec<(u64, Option<f64>)> {
    let mut best: Option<f64> = None;
    history
        .records()
        .iter()
        .map(|r| {
            if let Some(s) = r.score() {
                if best.is_none_or(|b| direction.is_better(s, b)) {
                    best = Some(s);
                }
            }
            (r.ordinal, best)
        })
        .collect()
}

pub fn real_cell(v: Option<f64>) -> String {
    v.map(format_real).unwrap_or_default()
}

fn opt_cell<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ComparisonReport {
    pub fn write_report<W: Write>(&self, sink: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(["sampler", "seed", "status", "trials", "best_ordinal", "best_score", "wall_ms", "message"])?;
        for r in &self.rows {
            w.write_record([
                r.sampler.clone(),
                r.seed.to_string(),
                match r.status {
                    CellStatus::Ok => "ok".to_owned(),
                    CellStatus::Failed => "failed".to_owned(),
                },
                r.trials.to_string(),
                opt_cell(r.best_ordinal),
                real_cell(r.best_score),
                real_cell(r.wall_ms),
                r.message.clone(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_summary<W: Write>(&self, sink: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(["sampler", "cells", "completed", "median", "q1", "q3", "iqr"])?;
        for s in &self.summaries {
            w.write_record([
                s.sampler.clone(),
                s.cells.to_string(),
                s.completed.to_string(),
                real_cell(s.median),
                real_cell(s.q1),
                real_cell(s.q3),
                real_cell(s.iqr),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_convergence<W: Write>(&self, sink: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(["sampler", "seed", "ordinal", "best_so_far"])?;
        for c in &self.convergence {
            w.write_record([
                c.sampler.clone(),
                c.seed.to_string(),
                c.ordinal.to_string(),
                real_cell(c.best_so_far),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_table<W: Write>(&self, sink: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        let mut header = vec!["objective".to_owned(), "direction".to_owned()];
        header.extend(self.summaries.iter().map(|s| s.sampler.clone()));
        header.push("winner".to_owned());
        w.write_record(&header)?;
        let mut row = vec![self.objective.clone(), self.direction.to_string()];
        row.extend(self.summaries.iter().map(|s| real_cell(s.median)));
        row.push(self.winner.clone().unwrap_or_default());
        w.write_record(&row)?;
        w.flush()?;
        Ok(())
    }
}
