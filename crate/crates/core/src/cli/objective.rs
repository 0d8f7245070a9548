//! Turning an objective definition into something that scores points.

use std::sync::Arc;

use crate::eval::{cv_objective, load_csv_path, CsvOptions, Dataset, Landscape};
use crate::search_space::ParamPoint;

use super::manifest::{CsvObjective, ObjectiveDef};
use super::worker::ExternalObjective;
use super::CliError;

/// Prepared objective shared by every study of a run.
pub enum ObjectiveSource {
    Builtin(Landscape),
    Csv { def: CsvObjective, train: Arc<Dataset> },
    Command(Vec<String>),
}

impl ObjectiveSource {
    /// Loads data or starts the worker once; failures here are setup errors.
    pub fn prepare(def: &ObjectiveDef) -> Result<Self, CliError> {
        match def {
            ObjectiveDef::Builtin { name, .. } => Ok(ObjectiveSource::Builtin(*name)),
            ObjectiveDef::Csv(c) => {
                let options = CsvOptions {
                    target: c.target.clone(),
                    categorical: c.categorical.clone(),
                    split_ratio: c.split,
                    shuffle: c.shuffle,
                    seed: c.seed,
                    positive_label: c.positive_label.clone(),
                };
                let (train, _test) = load_csv_path(&c.path, &options)
                    .map_err(|e| CliError::ObjectiveSetup(format!("{}: {e}", c.path.display())))?;
                if train.n_rows() < c.folds {
                    return Err(CliError::ObjectiveSetup(format!(
                        "{} training rows cannot fill {} folds",
                        train.n_rows(),
                        c.folds
                    )));
                }
                Ok(ObjectiveSource::Csv {
                    def: c.clone(),
                    train: Arc::new(train),
                })
            }
            ObjectiveDef::Command { command } => {
                ExternalObjective::spawn(command).map_err(|e| CliError::ObjectiveSetup(e.to_string()))?;
                Ok(ObjectiveSource::Command(command.clone()))
            }
        }
    }

    /// A fresh evaluator; command objectives get their own child process.
    pub fn instantiate(&self) -> Result<Objective, CliError> {
        Ok(match self {
            ObjectiveSource::Builtin(l) => Objective::Builtin(*l),
            ObjectiveSource::Csv { def, train } => Objective::Csv {
                def: def.clone(),
                train: Arc::clone(train),
            },
            ObjectiveSource::Command(argv) => Objective::Command(
                ExternalObjective::spawn(argv).map_err(|e| CliError::ObjectiveSetup(e.to_string()))?,
            ),
        })
    }
}

pub enum Objective {
    Builtin(Landscape),
    Csv { def: CsvObjective, train: Arc<Dataset> },
    Command(ExternalObjective),
}

impl Objective {
    pub fn evaluate(&mut self, point: &ParamPoint) -> Result<f64, String> {
        match self {
            Objective::Builtin(l) => {
                let x = point.to_vec().ok_or("builtin objectives take numeric points")?;
                l.evaluate(&x).map_err(|e| e.to_string())
            }
            Objective::Csv { def, train } => {
                cv_objective(def.model, train, point, def.folds, def.seed, def.metric())
                    .map(|s| s.value)
                    .map_err(|e| e.to_string())
            }
            Objective::Command(worker) => worker.evaluate(point).map_err(|e| e.to_string()),
        }
    }
}
