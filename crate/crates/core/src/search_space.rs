//! Typed parameter domains, sampling, membership and grid enumeration.
//!
//! A [`SearchSpace`] is an ordered map from parameter names to
//! [`Distribution`]s. Iteration order is declaration order; grid enumeration
//! and serialization both depend on it.

use std::fmt;

use indexmap::IndexMap;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpaceError {
    #[error("invalid distribution for `{name}`: {reason}")]
    InvalidDistribution { name: String, reason: String },

    #[error("parameter names must be non-empty")]
    EmptyName,

    #[error("duplicate parameter name `{0}`")]
    DuplicateName(String),

    #[error("grid resolution must be at least 1")]
    ZeroResolution,

    #[error("unknown preset `{name}` (valid presets: {})", PRESET_NAMES.join(", "))]
    UnknownPreset { name: String },

    #[error("parameter `{0}` is missing from the point")]
    MissingParam(String),

    #[error("parameter `{0}` is not part of the space")]
    UnexpectedParam(String),

    #[error("value {value} is outside the domain of `{name}`")]
    OutOfDomain { name: String, value: ParamValue },
}

/// Domain of a single parameter. Numeric bounds are inclusive at both ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Distribution {
    /// Real values in `[low, high]`.
    #[serde(rename = "uniform")]
    ContinuousUniform { low: f64, high: f64 },
    /// Integers in `{low, ..., high}`.
    #[serde(rename = "int_uniform")]
    IntegerUniform { low: i64, high: i64 },
    Categorical { choices: Vec<String> },
}

impl Distribution {
    pub fn uniform(low: f64, high: f64) -> Result<Self, String> {
        let d = Distribution::ContinuousUniform { low, high };
        d.check().map(|_| d)
    }

    pub fn int_uniform(low: i64, high: i64) -> Result<Self, String> {
        let d = Distribution::IntegerUniform { low, high };
        d.check().map(|_| d)
    }

    pub fn categorical<I, S>(choices: I) -> Result<Self, String>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let d = Distribution::Categorical {
            choices: choices.into_iter().map(Into::into).collect(),
        };
        d.check().map(|_| d)
    }

    fn check(&self) -> Result<(), String> {
        match self {
            Distribution::ContinuousUniform { low, high } => {
                if !low.is_finite() || !high.is_finite() {
                    Err(format!("bounds must be finite (got {low}, {high})"))
                } else if low >= high {
                    Err(format!("low must be < high (got {low}, {high})"))
                } else {
                    Ok(())
                }
            }
            Distribution::IntegerUniform { low, high } => {
                if low > high {
                    Err(format!("low must be <= high (got {low}, {high})"))
                } else {
                    Ok(())
                }
            }
            Distribution::Categorical { choices } => {
                if choices.is_empty() {
                    return Err("at least one choice is required".to_owned());
                }
                for (i, c) in choices.iter().enumerate() {
                    if choices[..i].contains(c) {
                        return Err(format!("duplicate choice `{c}`"));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn contains(&self, value: &ParamValue) -> bool {
        contains(self, value)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ParamValue {
        sample_param(self, rng)
    }

    pub fn grid_points(&self, resolution: usize) -> Result<Vec<ParamValue>, SpaceError> {
        grid_points(self, resolution)
    }
}

/// A parameter value tagged with the kind of domain it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Real(f64),
    Category(String),
}

impl ParamValue {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            ParamValue::Real(v) => Some(v),
            ParamValue::Int(v) => Some(v as f64),
            ParamValue::Category(_) => None,
        }
    }

    pub fn as_category(&self) -> Option<&str> {
        match self {
            ParamValue::Category(c) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Real(v) => write!(f, "{}", crate::fmt::format_real(*v)),
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Category(c) => write!(f, "{c}"),
        }
    }
}

/// True iff `value` lies in the support of `dist`.
pub fn contains(dist: &Distribution, value: &ParamValue) -> bool {
    match (dist, value) {
        (Distribution::ContinuousUniform { low, high }, ParamValue::Real(v)) => {
            *low <= *v && *v <= *high
        }
        (Distribution::IntegerUniform { low, high }, ParamValue::Int(v)) => low <= v && v <= high,
        (Distribution::Categorical { choices }, ParamValue::Category(c)) => choices.contains(c),
        _ => false,
    }
}

/// Draws one value from `dist`.
///
/// Continuous draws are `low + u * (high - low)` with `u` uniform on `[0, 1)`.
pub fn sample_param<R: Rng + ?Sized>(dist: &Distribution, rng: &mut R) -> ParamValue {
    match dist {
        Distribution::ContinuousUniform { low, high } => {
            let u: f64 = rng.random();
            // Rounding can push low + u*(high-low) onto high or past it for
            // wide ranges; the result must stay in the support.
            ParamValue::Real((low + u * (high - low)).clamp(*low, *high))
        }
        Distribution::IntegerUniform { low, high } => ParamValue::Int(rng.random_range(*low..=*high)),
        Distribution::Categorical { choices } => {
            ParamValue::Category(choices[rng.random_range(0..choices.len())].clone())
        }
    }
}

/// Evenly spaced values covering `dist`, sorted and free of duplicates.
///
/// A resolution of 1 yields the midpoint (continuous), `low` (integer), or the
/// first choice (categorical). Categorical domains ignore the resolution
/// otherwise and return every choice.
pub fn grid_points(dist: &Distribution, resolution: usize) -> Result<Vec<ParamValue>, SpaceError> {
    if resolution == 0 {
        return Err(SpaceError::ZeroResolution);
    }
    let points = match dist {
        Distribution::ContinuousUniform { low, high } => {
            if resolution == 1 {
                vec![ParamValue::Real(low + 0.5 * (high - low))]
            } else {
                let last = resolution - 1;
                let step = (high - low) / last as f64;
                (0..resolution)
                    .map(|i| {
                        if i == last {
                            ParamValue::Real(*high)
                        } else {
                            ParamValue::Real(low + i as f64 * step)
                        }
                    })
                    .collect()
            }
        }
        Distribution::IntegerUniform { low, high } => {
            let span = (*high as i128) - (*low as i128);
            let count = (resolution as i128).min(span + 1);
            if count == 1 {
                vec![ParamValue::Int(*low)]
            } else {
                let gaps = count - 1;
                (0..count)
                    .map(|i| {
                        // round(i * span / gaps), half away from zero
                        let offset = (2 * i * span + gaps) / (2 * gaps);
                        ParamValue::Int((*low as i128 + offset) as i64)
                    })
                    .collect()
            }
        }
        Distribution::Categorical { choices } => {
            if resolution == 1 {
                vec![ParamValue::Category(choices[0].clone())]
            } else {
                choices.iter().cloned().map(ParamValue::Category).collect()
            }
        }
    };
    Ok(points)
}

/// Ordered collection of named parameter domains.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SearchSpace {
    params: IndexMap<String, Distribution>,
}

impl SearchSpace {
    pub fn new<I, S>(params: I) -> Result<Self, SpaceError>
    where
        I: IntoIterator<Item = (S, Distribution)>,
        S: Into<String>,
    {
        let mut map = IndexMap::new();
        for (name, dist) in params {
            let name = name.into();
            if name.is_empty() {
                return Err(SpaceError::EmptyName);
            }
            if let Err(reason) = dist.check() {
                return Err(SpaceError::InvalidDistribution { name, reason });
            }
            if map.contains_key(&name) {
                return Err(SpaceError::DuplicateName(name));
            }
            map.insert(name, dist);
        }
        Ok(SearchSpace { params: map })
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Distribution> {
        self.params.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Distribution)> {
        self.params.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.params.keys().map(String::as_str)
    }

    /// Checks that `point` has exactly this space's keys and every value is
    /// inside its domain.
    pub fn validate(&self, point: &ParamPoint) -> Result<(), SpaceError> {
        for name in point.names() {
            if !self.params.contains_key(name) {
                return Err(SpaceError::UnexpectedParam(name.to_owned()));
            }
        }
        for (name, dist) in &self.params {
            let value = point
                .get(name)
                .ok_or_else(|| SpaceError::MissingParam(name.clone()))?;
            if !dist.contains(value) {
                return Err(SpaceError::OutOfDomain {
                    name: name.clone(),
                    value: value.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn contains(&self, point: &ParamPoint) -> bool {
        self.validate(point).is_ok()
    }

    /// Parses a JSON object of parameter values, using the space to decide
    /// whether a number is a real or an integer.
    pub fn point_from_json(&self, value: &serde_json::Value) -> Result<ParamPoint, String> {
        let obj = value
            .as_object()
            .ok_or_else(|| "params must be an object".to_owned())?;
        let mut point = ParamPoint::default();
        for (name, raw) in obj {
            let dist = self
                .get(name)
                .ok_or_else(|| format!("unknown parameter `{name}`"))?;
            let v = match dist {
                Distribution::ContinuousUniform { .. } => raw
                    .as_f64()
                    .map(ParamValue::Real)
                    .ok_or_else(|| format!("`{name}` must be a number"))?,
                Distribution::IntegerUniform { .. } => raw
                    .as_i64()
                    .map(ParamValue::Int)
                    .ok_or_else(|| format!("`{name}` must be an integer"))?,
                Distribution::Categorical { .. } => raw
                    .as_str()
                    .map(|s| ParamValue::Category(s.to_owned()))
                    .ok_or_else(|| format!("`{name}` must be a string"))?,
            };
            point.insert(name.clone(), v);
        }
        self.validate(&point).map_err(|e| e.to_string())?;
        Ok(self.reorder(&point))
    }

    /// Copy of `point` with keys in declaration order. Missing keys are
    /// skipped, so validate first.
    pub fn reorder(&self, point: &ParamPoint) -> ParamPoint {
        self.names()
            .filter_map(|n| point.get(n).map(|v| (n, v.clone())))
            .collect()
    }
}

impl<'de> Deserialize<'de> for SearchSpace {
    fn deserialize<D>(deserializer: D) -> Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let params = IndexMap::<String, Distribution>::deserialize(deserializer)?;
        SearchSpace::new(params).map_err(serde::de::Error::custom)
    }
}

/// An assignment of values to every parameter of a space.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamPoint {
    values: IndexMap<String, ParamValue>,
}

impl ParamPoint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, value: ParamValue) {
        self.values.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<&ParamValue> {
        self.values.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ParamValue)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Numeric values in iteration order; `None` if any value is categorical.
    pub fn to_vec(&self) -> Option<Vec<f64>> {
        self.values.values().map(ParamValue::as_f64).collect()
    }

    pub fn real(&self, name: &str) -> Option<f64> {
        self.get(name).and_then(ParamValue::as_f64)
    }
}

impl<S: Into<String>> FromIterator<(S, ParamValue)> for ParamPoint {
    fn from_iter<T: IntoIterator<Item = (S, ParamValue)>>(iter: T) -> Self {
        ParamPoint {
            values: iter.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }
}

impl fmt::Display for ParamPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}: {v}")?;
        }
        f.write_str("}")
    }
}

pub const PRESET_NAMES: &[&str] = &[
    "ridge",
    "logistic",
    "adaboost",
    "random_forest",
    "gbm",
    "xgboost",
    "lightgbm",
];

/// Search spaces used for the benchmark model families.
pub fn preset_space(name: &str) -> Result<SearchSpace, SpaceError> {
    let boosting = || {
        SearchSpace::new([
            (
                "learning_rate",
                Distribution::ContinuousUniform { low: 0.00001, high: 1.0 },
            ),
            ("max_depth", Distribution::IntegerUniform { low: 1, high: 7 }),
            ("n_estimators", Distribution::IntegerUniform { low: 1, high: 1000 }),
        ])
    };
    match name {
        "ridge" => SearchSpace::new([(
            "alpha",
            Distribution::ContinuousUniform { low: 0.1, high: 1000.0 },
        )]),
        "logistic" => SearchSpace::new([(
            "C",
            Distribution::ContinuousUniform { low: 0.00001, high: 1.0 },
        )]),
        "random_forest" => SearchSpace::new([
            (
                "max_features",
                Distribution::ContinuousUniform { low: 0.0, high: 1.0 },
            ),
            ("n_estimators", Distribution::IntegerUniform { low: 1, high: 1000 }),
        ]),
        "adaboost" | "gbm" | "xgboost" | "lightgbm" => boosting(),
        _ => Err(SpaceError::UnknownPreset {
            name: name.to_owned(),
        }),
    }
}
