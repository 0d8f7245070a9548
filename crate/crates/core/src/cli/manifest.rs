//! TOML run manifests.
//!
//! ```toml
//! budget = 100
//! seeds = [0, 1, 2]
//! direction = "minimize"      # optional; see below
//! output = "runs/sphere"
//! record_wall_time = false    # optional
//! space = "ridge"             # preset name, or an inline table (below)
//!
//! [objective]
//! kind = "builtin"            # builtin | csv | command
//! name = "sphere"
//! dim = 3
//!
//! [sampler]                   # `tune` only
//! kind = "tpe"
//! gamma = 0.25
//!
//! [[samplers]]                # `compare` only, at least two
//! kind = "random"
//! ```
//!
//! An inline space maps names to distributions:
//!
//! ```toml
//! [space.alpha]
//! kind = "uniform"
//! low = 0.1
//! high = 1000.0
//! ```
//!
//! When `space` is omitted, builtin objectives use their default box and CSV
//! objectives the preset of their model; command objectives require it.
//! Direction defaults to the metric's direction for CSV objectives and to
//! `minimize` otherwise. A relative CSV `path` is resolved against the
//! manifest's directory; `output` is used as given.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::eval::{Landscape, Metric, ModelKind};
use crate::samplers::Direction;
use crate::search_space::{preset_space, SearchSpace};
use crate::study::SamplerConfig;

use super::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    space: Option<toml::Value>,
    objective: ObjectiveDef,
    sampler: Option<SamplerConfig>,
    samplers: Option<Vec<SamplerConfig>>,
    #[serde(default = "default_budget")]
    budget: u64,
    seeds: Vec<u64>,
    direction: Option<Direction>,
    output: PathBuf,
    #[serde(default)]
    record_wall_time: bool,
}

fn default_budget() -> u64 {
    100
}

fn default_dim() -> usize {
    2
}

fn default_folds() -> usize {
    3
}

fn default_split() -> f64 {
    0.7
}

/// Where scores come from.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveDef {
    Builtin {
        name: Landscape,
        #[serde(default = "default_dim")]
        dim: usize,
    },
    Csv(CsvObjective),
    Command {
        command: Vec<String>,
    },
}

/// Cross-validated model on the training part of a CSV file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvObjective {
    pub path: PathBuf,
    pub target: String,
    #[serde(default)]
    pub categorical: Vec<String>,
    pub model: ModelKind,
    pub metric: Option<Metric>,
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default = "default_split")]
    pub split: f64,
    #[serde(default)]
    pub shuffle: bool,
    /// Seeds both the row shuffle and the fold assignment.
    #[serde(default)]
    pub seed: u64,
    pub positive_label: Option<String>,
}

impl CsvObjective {
    pub fn metric(&self) -> Metric {
        self.metric.unwrap_or_else(|| self.model.default_metric())
    }
}

impl ObjectiveDef {
    /// Short name used in reports.
    pub fn label(&self) -> String {
        match self {
            ObjectiveDef::Builtin { name: Landscape::Branin, .. } => "branin".to_owned(),
            ObjectiveDef::Builtin { name, dim } => format!("{}-{dim}d", name.name()),
            ObjectiveDef::Csv(c) => {
                let file = c.path.file_stem().map(|s| s.to_string_lossy()).unwrap_or_default();
                format!("{}-{}-{file}", c.model.preset(), metric_name(c.metric()))
            }
            ObjectiveDef::Command { command } => {
                let program = command.first().map(String::as_str).unwrap_or("");
                let base = Path::new(program).file_name().map(|s| s.to_string_lossy()).unwrap_or_default();
                format!("command-{base}")
            }
        }
    }
}

fn metric_name(m: Metric) -> &'static str {
    match m {
        Metric::Rmse => "rmse",
        Metric::Auc => "auc",
        Metric::Kappa => "kappa",
    }
}

/// A validated manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub space: SearchSpace,
    pub objective: ObjectiveDef,
    pub sampler: Option<SamplerConfig>,
    pub samplers: Vec<SamplerConfig>,
    pub budget: u64,
    pub seeds: Vec<u64>,
    pub direction: Direction,
    pub output: PathBuf,
    pub record_wall_time: bool,
}

/// Command-line values that replace manifest fields.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub budget: Option<u64>,
    pub seeds: Option<Vec<u64>>,
    pub output: Option<PathBuf>,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Manifest(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new(""));
        Self::from_toml_str(&text, base)
    }

    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self, CliError> {
        let raw: RawManifest = toml::from_str(text).map_err(|e| CliError::Manifest(e.to_string()))?;
        let mut objective = raw.objective;
        if let ObjectiveDef::Csv(c) = &mut objective {
            if c.path.is_relative() {
                c.path = base_dir.join(&c.path);
            }
        }
        let space = resolve_space(raw.space, &objective)?;
        let direction = match (&objective, raw.direction) {
            (ObjectiveDef::Csv(c), Some(d)) if d != c.metric().direction() => {
                return Err(CliError::Manifest(format!(
                    "direction {d} contradicts metric {}, which is {}d",
                    metric_name(c.metric()),
                    c.metric().direction()
                )))
            }
            (ObjectiveDef::Csv(c), _) => c.metric().direction(),
            (_, d) => d.unwrap_or(Direction::Minimize),
        };
        let manifest = RunManifest {
            space,
            objective,
            sampler: raw.sampler,
            samplers: raw.samplers.unwrap_or_default(),
            budget: raw.budget,
            seeds: raw.seeds,
            direction,
            output: raw.output,
            record_wall_time: raw.record_wall_time,
        };
        manifest.check()?;
        Ok(manifest)
    }

    pub fn apply(&mut self, overrides: &Overrides) -> Result<(), CliError> {
        if let Some(b) = overrides.budget {
            self.budget = b;
        }
        if let Some(s) = &overrides.seeds {
            self.seeds = s.clone();
        }
        if let Some(o) = &overrides.output {
            self.output = o.clone();
        }
        self.check()
    }

    fn check(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Manifest(m));
        if self.budget == 0 {
            return bad("budget must be at least 1".into());
        }
        if self.seeds.is_empty() {
            return bad("seeds must not be empty".into());
        }
        let mut seen = HashSet::new();
        if let Some(dup) = self.seeds.iter().find(|s| !seen.insert(**s)) {
            return bad(format!("seed {dup} is listed twice"));
        }
        for s in self.sampler.iter().chain(&self.samplers) {
            s.validate().map_err(|e| CliError::Manifest(format!("sampler {}: {e}", s.name())))?;
        }
        let mut names = HashSet::new();
        if let Some(dup) = self.samplers.iter().find(|s| !names.insert(s.name())) {
            return bad(format!("sampler {} is listed twice", dup.name()));
        }
        match &self.objective {
            ObjectiveDef::Builtin { name, dim } => {
                if *name != Landscape::Branin && *dim == 0 {
                    return bad("dim must be at least 1".into());
                }
                let expected = if *name == Landscape::Branin { 2 } else { *dim };
                let numeric = self
                    .space
                    .iter()
                    .all(|(_, d)| !matches!(d, crate::search_space::Distribution::Categorical { .. }));
                if self.space.len() != expected || !numeric {
                    return bad(format!(
                        "{} needs a space of {expected} numeric parameters",
                        name.name()
                    ));
                }
            }
            ObjectiveDef::Csv(c) => {
                if c.folds < 2 {
                    return bad("folds must be at least 2".into());
                }
                if !(c.split > 0.0 && c.split < 1.0) {
                    return bad(format!("split must lie in (0, 1), got {}", c.split));
                }
                let preset = preset_space(c.model.preset()).expect("built-in preset");
                if self.space.names().ne(preset.names()) {
                    return bad(format!("the {} model is tuned over its preset parameters", c.model.preset()));
                }
                let metric_ok = matches!(
                    (c.model, c.metric()),
                    (ModelKind::Ridge, Metric::Rmse) | (ModelKind::Logistic, Metric::Auc | Metric::Kappa)
                );
                if !metric_ok {
                    return bad(format!(
                        "metric {} does not apply to the {} model",
                        metric_name(c.metric()),
                        c.model.preset()
                    ));
                }
            }
            ObjectiveDef::Command { command } => {
                if command.is_empty() {
                    return bad("command must not be empty".into());
                }
            }
        }
        Ok(())
    }

    /// The sampler for `tune`.
    pub fn tune_sampler(&self) -> Result<&SamplerConfig, CliError> {
        match (&self.sampler, self.samplers.is_empty()) {
            (Some(s), true) => Ok(s),
            (None, _) => Err(CliError::Manifest("tune needs a [sampler] table".into())),
            (Some(_), false) => Err(CliError::Manifest("tune takes [sampler], not [[samplers]]".into())),
        }
    }

    /// The samplers for `compare`.
    pub fn compare_samplers(&self) -> Result<&[SamplerConfig], CliError> {
        if self.sampler.is_some() {
            return Err(CliError::Manifest("compare takes [[samplers]], not [sampler]".into()));
        }
        if self.samplers.len() < 2 {
            return Err(CliError::Manifest("compare needs at least two [[samplers]]".into()));
        }
        Ok(&self.samplers)
    }
}

fn resolve_space(value: Option<toml::Value>, objective: &ObjectiveDef) -> Result<SearchSpace, CliError> {
    let err = |e: String| CliError::Manifest(format!("space: {e}"));
    match value {
        Some(toml::Value::String(name)) => preset_space(&name).map_err(|e| err(e.to_string())),
        Some(table @ toml::Value::Table(_)) => SearchSpace::deserialize(table).map_err(|e| err(e.to_string())),
        Some(other) => Err(err(format!("expected a preset name or a table, found {}", other.type_str()))),
        None => match objective {
            ObjectiveDef::Builtin { name, dim } => Ok(name.default_space(*dim)),
            ObjectiveDef::Csv(c) => Ok(preset_space(c.model.preset()).expect("built-in preset")),
            ObjectiveDef::Command { .. } => Err(err("required for command objectives".into())),
        },
    }
}
