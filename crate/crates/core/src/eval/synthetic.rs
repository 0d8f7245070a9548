//! Closed-form test landscapes and small synthetic datasets.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::search_space::{Distribution, SearchSpace};

use super::dataset::Dataset;
use super::EvalError;

/// Global minimum of the Branin function.
pub const BRANIN_MINIMUM: f64 = 0.397_887_357_729_738_16;

pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64
        + x.iter()
            .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
            .sum::<f64>()
}

pub fn branin(x1: f64, x2: f64) -> f64 {
    let b = 5.1 / (4.0 * PI * PI);
    let c = 5.0 / PI;
    let t = 1.0 / (8.0 * PI);
    (x2 - b * x1 * x1 + c * x1 - 6.0).powi(2) + 10.0 * (1.0 - t) * x1.cos() + 10.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Landscape {
    Sphere,
    Rastrigin,
    Branin,
}

impl Landscape {
    pub fn parse(name: &str) -> Result<Self, EvalError> {
        match name {
            "sphere" => Ok(Landscape::Sphere),
            "rastrigin" => Ok(Landscape::Rastrigin),
            "branin" => Ok(Landscape::Branin),
            other => Err(EvalError::UnknownObjective(other.to_owned())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Landscape::Sphere => "sphere",
            Landscape::Rastrigin => "rastrigin",
            Landscape::Branin => "branin",
        }
    }

    pub fn evaluate(self, x: &[f64]) -> Result<f64, EvalError> {
        match self {
            Landscape::Branin if x.len() != 2 => Err(EvalError::DimensionMismatch {
                expected: 2,
                got: x.len(),
            }),
            Landscape::Branin => Ok(branin(x[0], x[1])),
            _ if x.is_empty() => Err(EvalError::DimensionMismatch { expected: 1, got: 0 }),
            Landscape::Sphere => Ok(sphere(x)),
            Landscape::Rastrigin => Ok(rastrigin(x)),
        }
    }

    /// Default box: `[-2, 2]^d` for sphere, `[-5.12, 5.12]^d` for rastrigin,
    /// `[-5, 10] x [0, 15]` for branin (which ignores `dim`).
    pub fn default_space(self, dim: usize) -> SearchSpace {
        let cube = |lo: f64, hi: f64| {
            SearchSpace::new((0..dim).map(|i| (format!("x{i}"), Distribution::ContinuousUniform { low: lo, high: hi })))
                .expect("valid box")
        };
        match self {
            Landscape::Sphere => cube(-2.0, 2.0),
            Landscape::Rastrigin => cube(-5.12, 5.12),
            Landscape::Branin => SearchSpace::new([
                ("x0", Distribution::ContinuousUniform { low: -5.0, high: 10.0 }),
                ("x1", Distribution::ContinuousUniform { low: 0.0, high: 15.0 }),
            ])
            .expect("valid box"),
        }
    }
}

/// Evaluates the named landscape at `x`.
pub fn synthetic_objective(name: &str, x: &[f64]) -> Result<f64, EvalError> {
    Landscape::parse(name)?.evaluate(x)
}

/// `y = X w + 0.5 + noise` with standard-normal features and fixed weights
/// `w_j = j + 1` (alternating sign).
pub fn synthetic_regression(n: usize, d: usize, noise: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = DMatrix::from_fn(n, d, |_, _| StandardNormal.sample(&mut rng));
    let w: Vec<f64> = (0..d)
        .map(|j| if j % 2 == 0 { (j + 1) as f64 } else { -((j + 1) as f64) })
        .collect();
    let y = (0..n)
        .map(|i| {
            let signal: f64 = (0..d).map(|j| x[(i, j)] * w[j]).sum::<f64>() + 0.5;
            let eps: f64 = StandardNormal.sample(&mut rng);
            signal + noise * eps
        })
        .collect();
    Dataset::new(x, y).expect("shapes agree")
}

/// Binary labels drawn from a logistic model over standard-normal features.
pub fn synthetic_classification(n: usize, d: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = DMatrix::from_fn(n, d, |_, _| StandardNormal.sample(&mut rng));
    let y = (0..n)
        .map(|i| {
            let z: f64 = (0..d).map(|j| x[(i, j)] * (1.5 - j as f64 * 0.5)).sum::<f64>() - 0.7;
            let p = 1.0 / (1.0 + (-2.0 * z).exp());
            f64::from(rng.random_bool(p))
        })
        .collect();
    Dataset::new(x, y).expect("shapes agree")
}
