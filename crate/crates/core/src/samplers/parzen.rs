//! Per-dimension kernel mixtures used as the `l(x)` and `g(x)` densities of TPE.
//!
//! Numeric dimensions place one normal kernel on every observation and mix in
//! a uniform prior over the domain with weight `1/(n+1)`, so densities are
//! strictly positive everywhere in the domain. Kernels are not renormalized
//! for truncation at the bounds; samples falling outside are clipped.
//!
//! Integer dimensions are modelled on the continuous interval
//! `[low - 0.5, high + 0.5]`, sampled values are rounded and clamped, and the
//! density is evaluated at the integer itself.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution as _, Normal};

use crate::search_space::{Distribution, ParamPoint, ParamValue, SearchSpace};

use super::{SamplerError, TpeConfig};

/// Kernel mixture over one numeric dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericKernels {
    low: f64,
    high: f64,
    integer_bounds: Option<(i64, i64)>,
    centers: Vec<f64>,
    bandwidths: Vec<f64>,
    prior_weight: f64,
}

impl NumericKernels {
    /// Continuous mixture on `[low, high]` with explicit `(center, bandwidth)`
    /// kernels. The kernels share `1 - prior_weight` equally.
    pub fn new(
        low: f64,
        high: f64,
        kernels: &[(f64, f64)],
        prior_weight: f64,
    ) -> Result<Self, SamplerError> {
        if kernels.is_empty() {
            return Err(SamplerError::EmptyPoints);
        }
        if !(low < high) {
            return Err(SamplerError::InvalidConfig(format!(
                "kernel support [{low}, {high}] is empty"
            )));
        }
        if !(0.0..1.0).contains(&prior_weight) {
            return Err(SamplerError::InvalidConfig(format!(
                "prior weight must lie in [0, 1), got {prior_weight}"
            )));
        }
        if kernels.iter().any(|&(c, b)| !c.is_finite() || !(b > 0.0) || !b.is_finite()) {
            return Err(SamplerError::InvalidConfig(
                "kernel centers must be finite and bandwidths positive".to_owned(),
            ));
        }
        Ok(NumericKernels {
            low,
            high,
            integer_bounds: None,
            centers: kernels.iter().map(|k| k.0).collect(),
            bandwidths: kernels.iter().map(|k| k.1).collect(),
            prior_weight,
        })
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn bandwidths(&self) -> &[f64] {
        &self.bandwidths
    }

    pub fn prior_weight(&self) -> f64 {
        self.prior_weight
    }

    pub fn kernel_weight(&self) -> f64 {
        (1.0 - self.prior_weight) / self.centers.len() as f64
    }

    /// Width of the support the prior is uniform over.
    pub fn width(&self) -> f64 {
        self.high - self.low
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let kernels: f64 = self
            .centers
            .iter()
            .zip(&self.bandwidths)
            .map(|(&c, &b)| normal_pdf(x, c, b))
            .sum();
        self.prior_weight / self.width() + self.kernel_weight() * kernels
    }

    fn sample_value<R: Rng + ?Sized>(&self, rng: &mut R) -> ParamValue {
        let u: f64 = rng.random();
        let x = if u < self.prior_weight {
            let v: f64 = rng.random();
            self.low + v * (self.high - self.low)
        } else {
            let idx = (((u - self.prior_weight) / self.kernel_weight()) as usize)
                .min(self.centers.len() - 1);
            let normal = Normal::new(self.centers[idx], self.bandwidths[idx]).expect("bandwidth > 0");
            normal.sample(rng)
        };
        let x = x.clamp(self.low, self.high);
        match self.integer_bounds {
            Some((lo, hi)) => ParamValue::Int((x.round() as i64).clamp(lo, hi)),
            None => ParamValue::Real(x),
        }
    }
}

/// Smoothed choice probabilities for one categorical dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalWeights {
    choices: Vec<String>,
    weights: Vec<f64>,
}

impl CategoricalWeights {
    pub fn new(choices: Vec<String>, weights: Vec<f64>) -> Result<Self, SamplerError> {
        if choices.is_empty() || choices.len() != weights.len() {
            return Err(SamplerError::InvalidConfig(
                "categorical weights must align with a non-empty choice list".to_owned(),
            ));
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(SamplerError::InvalidConfig(
                "categorical weights must be strictly positive".to_owned(),
            ));
        }
        let total: f64 = weights.iter().sum();
        Ok(CategoricalWeights {
            choices,
            weights: weights.iter().map(|w| w / total).collect(),
        })
    }

    pub fn weight(&self, choice: &str) -> Option<f64> {
        self.choices
            .iter()
            .position(|c| c == choice)
            .map(|i| self.weights[i])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn sample_value<R: Rng + ?Sized>(&self, rng: &mut R) -> ParamValue {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (c, w) in self.choices.iter().zip(&self.weights) {
            acc += w;
            if u < acc {
                return ParamValue::Category(c.clone());
            }
        }
        ParamValue::Category(self.choices.last().expect("non-empty").clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DimensionEstimator {
    Numeric(NumericKernels),
    Categorical(CategoricalWeights),
}

/// Product of independent per-dimension mixtures over a search space.
#[derive(Debug, Clone, PartialEq)]
pub struct ParzenEstimator {
    space: SearchSpace,
    dims: Vec<DimensionEstimator>,
}

impl ParzenEstimator {
    /// Assembles an estimator from hand-built dimensions, one per space
    /// parameter in declaration order.
    pub fn from_dimensions(
        space: &SearchSpace,
        dims: Vec<DimensionEstimator>,
    ) -> Result<Self, SamplerError> {
        if dims.len() != space.len() {
            return Err(SamplerError::SpaceMismatch);
        }
        for ((_, dist), dim) in space.iter().zip(&dims) {
            let ok = matches!(
                (dist, dim),
                (Distribution::Categorical { .. }, DimensionEstimator::Categorical(_))
                    | (Distribution::ContinuousUniform { .. }, DimensionEstimator::Numeric(_))
                    | (Distribution::IntegerUniform { .. }, DimensionEstimator::Numeric(_))
            );
            if !ok {
                return Err(SamplerError::SpaceMismatch);
            }
        }
        Ok(ParzenEstimator {
            space: space.clone(),
            dims,
        })
    }

    pub fn dimensions(&self) -> &[DimensionEstimator] {
        &self.dims
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }
}

fn normal_pdf(x: f64, center: f64, bandwidth: f64) -> f64 {
    let z = (x - center) / bandwidth;
    (-0.5 * z * z).exp() / (bandwidth * (2.0 * PI).sqrt())
}

/// Support interval used for kernels of a numeric distribution.
type Support = (f64, f64, Option<(i64, i64)>);

fn numeric_support(dist: &Distribution) -> Option<Support> {
    match *dist {
        Distribution::ContinuousUniform { low, high } => Some((low, high, None)),
        Distribution::IntegerUniform { low, high } => {
            Some((low as f64 - 0.5, high as f64 + 0.5, Some((low, high))))
        }
        Distribution::Categorical { .. } => None,
    }
}

/// Bandwidth per observation: the distance to the nearest other observation,
/// floored at `floor_fraction * width`. A lone observation gets the full width.
fn bandwidths(values: &[f64], width: f64, floor_fraction: f64) -> Vec<f64> {
    let floor = floor_fraction * width;
    let n = values.len();
    if n == 1 {
        return vec![width.max(floor)];
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut out = vec![0.0; n];
    for (rank, &idx) in order.iter().enumerate() {
        let left = (rank > 0).then(|| values[idx] - values[order[rank - 1]]);
        let right = (rank + 1 < n).then(|| values[order[rank + 1]] - values[idx]);
        let nearest = match (left, right) {
            (Some(l), Some(r)) => l.min(r),
            (Some(l), None) => l,
            (None, Some(r)) => r,
            (None, None) => unreachable!("n >= 2"),
        };
        out[idx] = nearest.max(floor);
    }
    out
}

/// Fits one mixture per dimension to `points`.
pub fn parzen_fit(
    points: &[ParamPoint],
    space: &SearchSpace,
    config: &TpeConfig,
) -> Result<ParzenEstimator, SamplerError> {
    if points.is_empty() {
        return Err(SamplerError::EmptyPoints);
    }
    for p in points {
        space.validate(p)?;
    }
    let n = points.len();
    let mut dims = Vec::with_capacity(space.len());
    for (name, dist) in space.iter() {
        let dim = match dist {
            Distribution::Categorical { choices } => {
                let k = choices.len();
                let weights = choices
                    .iter()
                    .map(|c| {
                        let count = points
                            .iter()
                            .filter(|p| p.get(name).and_then(ParamValue::as_category) == Some(c))
                            .count();
                        (count + 1) as f64 / (n + k) as f64
                    })
                    .collect();
                DimensionEstimator::Categorical(CategoricalWeights {
                    choices: choices.clone(),
                    weights,
                })
            }
            _ => {
                let (low, high, integer_bounds) = numeric_support(dist).expect("numeric");
                let values: Vec<f64> = points
                    .iter()
                    .map(|p| p.real(name).expect("validated numeric"))
                    .collect();
                let bw = bandwidths(&values, high - low, config.bandwidth_floor);
                DimensionEstimator::Numeric(NumericKernels {
                    low,
                    high,
                    integer_bounds,
                    centers: values,
                    bandwidths: bw,
                    prior_weight: 1.0 / (n + 1) as f64,
                })
            }
        };
        dims.push(dim);
    }
    Ok(ParzenEstimator {
        space: space.clone(),
        dims,
    })
}

/// Joint density: the product of the per-dimension mixture densities.
pub fn parzen_pdf(est: &ParzenEstimator, point: &ParamPoint) -> Result<f64, SamplerError> {
    est.space.validate(point)?;
    let mut density = 1.0;
    for ((name, _), dim) in est.space.iter().zip(&est.dims) {
        let value = point.get(name).expect("validated");
        density *= match dim {
            DimensionEstimator::Numeric(k) => k.pdf(value.as_f64().expect("validated numeric")),
            DimensionEstimator::Categorical(w) => w
                .weight(value.as_category().expect("validated categorical"))
                .expect("validated choice"),
        };
    }
    Ok(density)
}

/// Draws one point: per dimension, a mixture component is chosen by weight
/// and then sampled.
pub fn parzen_sample<R: Rng + ?Sized>(est: &ParzenEstimator, rng: &mut R) -> ParamPoint {
    est.space
        .names()
        .zip(&est.dims)
        .map(|(name, dim)| {
            let v = match dim {
                DimensionEstimator::Numeric(k) => k.sample_value(rng),
                DimensionEstimator::Categorical(w) => w.sample_value(rng),
            };
            (name, v)
        })
        .collect()
}
