//! Objectives for studies: metrics, models, cross-validation, the
//! bias-variance decomposition, synthetic landscapes and CSV loading.

pub mod bias_variance;
pub mod cv;
pub mod dataset;
pub mod metrics;
pub mod models;
pub mod synthetic;

pub use bias_variance::{bias_variance_decompose, BiasVarianceReport};
pub use cv::{cv_objective, kfold_split, CvScore, Folds, Metric, ModelKind};
pub use dataset::{load_csv_dataset, load_csv_path, CsvOptions, Dataset};
pub use metrics::{auc, cohen_kappa, rmse};
pub use models::{logistic_fit, logistic_fit_traced, logistic_loss_and_grad, ridge_fit, LinearModel, LogisticOptions};
pub use synthetic::{synthetic_objective, Landscape};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("input is empty")]
    Empty,

    #[error("both classes must be present")]
    SingleClass,

    #[error("linear system is singular")]
    Singular,

    #[error("cannot split {n} rows into {k} folds")]
    InvalidFolds { n: usize, k: usize },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("unknown objective `{0}` (expected sphere, rastrigin or branin)")]
    UnknownObjective(String),

    #[error("expected a point of dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("missing value at line {row}, column `{column}`")]
    MissingValue { row: usize, column: String },

    #[error("cannot parse `{value}` at line {row}, column `{column}` as a number")]
    Parse { row: usize, column: String, value: String },

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("csv: {0}")]
    Csv(String),
}
