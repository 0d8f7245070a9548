//! CSV ingestion with one-hot encoding and train/test splitting.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use indexmap::IndexMap;
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::EvalError;

/// Feature matrix and target with the column bookkeeping needed to interpret
/// them.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: DMatrix<f64>,
    pub target: Vec<f64>,
    pub feature_names: Vec<String>,
    /// Original categorical column -> emitted indicator column names.
    pub encoding: IndexMap<String, Vec<String>>,
}

impl Dataset {
    pub fn new(features: DMatrix<f64>, target: Vec<f64>) -> Result<Self, EvalError> {
        if features.nrows() != target.len() {
            return Err(EvalError::LengthMismatch(features.nrows(), target.len()));
        }
        let feature_names = (0..features.ncols()).map(|j| format!("x{j}")).collect();
        Ok(Dataset {
            features,
            target,
            feature_names,
            encoding: IndexMap::new(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.target.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select_rows(indices),
            target: indices.iter().map(|&i| self.target[i]).collect(),
            feature_names: self.feature_names.clone(),
            encoding: self.encoding.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvOptions {
    pub target: String,
    /// Columns read as string labels and one-hot encoded.
    pub categorical: Vec<String>,
    /// Fraction of rows in the training set; the split point is
    /// `floor(ratio * n)`.
    pub split_ratio: f64,
    /// Permute rows with `seed` before splitting; otherwise file order is kept.
    pub shuffle: bool,
    pub seed: u64,
    /// When set, the target becomes 1 for this label and 0 otherwise.
    pub positive_label: Option<String>,
}

impl CsvOptions {
    pub fn new(target: impl Into<String>) -> Self {
        CsvOptions {
            target: target.into(),
            categorical: Vec::new(),
            split_ratio: 0.7,
            shuffle: false,
            seed: 0,
            positive_label: None,
        }
    }
}

pub fn load_csv_path(path: &Path, options: &CsvOptions) -> Result<(Dataset, Dataset), EvalError> {
    let file = File::open(path).map_err(|e| EvalError::Csv(format!("{}: {e}", path.display())))?;
    load_csv_dataset(file, options)
}

/// Reads a headed CSV document and splits it into train and test sets.
///
/// Indicator columns are named `column=level`, with levels sorted and taken
/// from the whole file so both splits share one encoding. Empty cells are
/// rejected.
pub fn load_csv_dataset<R: Read>(source: R, options: &CsvOptions) -> Result<(Dataset, Dataset), EvalError> {
    if !(options.split_ratio > 0.0 && options.split_ratio < 1.0) {
        return Err(EvalError::InvalidParam(format!(
            "split ratio must lie in (0, 1), got {}",
            options.split_ratio
        )));
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| EvalError::Csv(e.to_string()))?
        .iter()
        .map(|h| h.trim().to_owned())
        .collect();
    let target_idx = header
        .iter()
        .position(|h| *h == options.target)
        .ok_or_else(|| EvalError::UnknownColumn(options.target.clone()))?;
    for c in &options.categorical {
        if !header.contains(c) {
            return Err(EvalError::UnknownColumn(c.clone()));
        }
    }

    let mut rows: Vec<Vec<String>> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| EvalError::Csv(e.to_string()))?;
        let line = i + 2;
        if rec.len() != header.len() {
            return Err(EvalError::Csv(format!(
                "line {line}: expected {} fields, found {}",
                header.len(),
                rec.len()
            )));
        }
        let row: Vec<String> = rec.iter().map(str::to_owned).collect();
        for (j, cell) in row.iter().enumerate() {
            if cell.trim().is_empty() {
                return Err(EvalError::MissingValue {
                    row: line,
                    column: header[j].clone(),
                });
            }
        }
        rows.push(row);
    }
    if rows.len() < 2 {
        return Err(EvalError::Csv("at least two data rows are required".to_owned()));
    }

    // Column plan, in file order.
    enum Col {
        Numeric(usize),
        OneHot(usize, Vec<String>),
    }
    let mut plan = Vec::new();
    let mut feature_names = Vec::new();
    let mut encoding = IndexMap::new();
    for (j, name) in header.iter().enumerate() {
        if j == target_idx {
            continue;
        }
        if options.categorical.contains(name) {
            let mut levels: Vec<String> = rows.iter().map(|r| r[j].clone()).collect();
            levels.sort();
            levels.dedup();
            let names: Vec<String> = levels.iter().map(|l| format!("{name}={l}")).collect();
            feature_names.extend(names.iter().cloned());
            encoding.insert(name.clone(), names);
            plan.push(Col::OneHot(j, levels));
        } else {
            feature_names.push(name.clone());
            plan.push(Col::Numeric(j));
        }
    }

    let n = rows.len();
    let d = feature_names.len();
    let mut features = DMatrix::zeros(n, d);
    let mut target = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let line = i + 2;
        let parse = |j: usize| -> Result<f64, EvalError> {
            row[j].trim().parse::<f64>().map_err(|_| EvalError::Parse {
                row: line,
                column: header[j].clone(),
                value: row[j].clone(),
            })
        };
        let mut col = 0;
        for entry in &plan {
            match entry {
                Col::Numeric(j) => {
                    features[(i, col)] = parse(*j)?;
                    col += 1;
                }
                Col::OneHot(j, levels) => {
                    let hit = levels.iter().position(|l| *l == row[*j]).expect("level from file");
                    features[(i, col + hit)] = 1.0;
                    col += levels.len();
                }
            }
        }
        target.push(match &options.positive_label {
            Some(label) => f64::from(row[target_idx].trim() == label.as_str()),
            None => parse(target_idx)?,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    if options.shuffle {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(options.seed));
    }
    let n_train = (options.split_ratio * n as f64).floor() as usize;
    let full = Dataset {
        features,
        target,
        feature_names,
        encoding,
    };
    Ok((full.subset(&order[..n_train]), full.subset(&order[n_train..])))
}
