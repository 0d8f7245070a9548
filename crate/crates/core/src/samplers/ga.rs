//! Genetic algorithm over parameter points.
//!
//! A chromosome is a [`ParamPoint`]; each parameter is one gene. The loop is
//! initial random population, tournament selection, uniform crossover,
//! per-gene resampling mutation, and elitism.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::search_space::{sample_param, ParamPoint, SearchSpace};

use super::{random_suggest, Direction, SamplerError};

pub type Chromosome = ParamPoint;
pub type Population = Vec<Chromosome>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub pop_size: usize,
    pub tournament_k: usize,
    pub p_crossover: f64,
    pub p_mutation: f64,
    pub elitism_count: usize,
    /// Generations for [`ga_run`]; studies are bounded by their budget instead.
    pub generations: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            pop_size: 20,
            tournament_k: 3,
            p_crossover: 0.9,
            p_mutation: 0.1,
            elitism_count: 1,
            generations: 50,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), SamplerError> {
        let bad = |m: &str| Err(SamplerError::InvalidConfig(m.to_owned()));
        if self.pop_size < 2 {
            return bad("pop_size must be at least 2");
        }
        if self.tournament_k < 1 || self.tournament_k > self.pop_size {
            return bad("tournament_k must lie in [1, pop_size]");
        }
        if !(0.0..=1.0).contains(&self.p_crossover) {
            return bad("p_crossover must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.p_mutation) {
            return bad("p_mutation must lie in [0, 1]");
        }
        if self.elitism_count >= self.pop_size {
            return bad("elitism_count must be smaller than pop_size");
        }
        Ok(())
    }
}

pub fn ga_init<R: Rng + ?Sized>(space: &SearchSpace, config: &GaConfig, rng: &mut R) -> Population {
    (0..config.pop_size).map(|_| random_suggest(space, rng)).collect()
}

/// Index of the tournament winner. Entrants are drawn uniformly with
/// replacement; ties go to the lowest population index.
pub fn tournament<R: Rng + ?Sized>(
    pop_len: usize,
    fitnesses: &[f64],
    k: usize,
    direction: Direction,
    rng: &mut R,
) -> Result<usize, SamplerError> {
    if pop_len != fitnesses.len() {
        return Err(SamplerError::LengthMismatch(pop_len, fitnesses.len()));
    }
    if pop_len == 0 || k == 0 {
        return Err(SamplerError::InvalidConfig(
            "tournament needs a non-empty population and k >= 1".to_owned(),
        ));
    }
    let mut winner = rng.random_range(0..pop_len);
    for _ in 1..k {
        let i = rng.random_range(0..pop_len);
        let (fi, fw) = (direction.canonical(fitnesses[i]), direction.canonical(fitnesses[winner]));
        if fi < fw || (fi == fw && i < winner) {
            winner = i;
        }
    }
    Ok(winner)
}

pub fn ga_select<R: Rng + ?Sized>(
    pop: &[Chromosome],
    fitnesses: &[f64],
    k: usize,
    direction: Direction,
    rng: &mut R,
) -> Result<Chromosome, SamplerError> {
    tournament(pop.len(), fitnesses, k, direction, rng).map(|i| pop[i].clone())
}

/// Uniform crossover: each gene comes from `a` or `b` with probability ½.
pub fn ga_crossover<R: Rng + ?Sized>(
    a: &Chromosome,
    b: &Chromosome,
    rng: &mut R,
) -> Result<Chromosome, SamplerError> {
    if a.len() != b.len() || a.names().zip(b.names()).any(|(x, y)| x != y) {
        return Err(SamplerError::SpaceMismatch);
    }
    Ok(a.iter()
        .zip(b.iter())
        .map(|((name, ga), (_, gb))| {
            let gene = if rng.random_bool(0.5) { ga } else { gb };
            (name, gene.clone())
        })
        .collect())
}

/// Resamples each gene from its distribution with probability `p_mutation`.
pub fn ga_mutate<R: Rng + ?Sized>(
    c: &Chromosome,
    space: &SearchSpace,
    p_mutation: f64,
    rng: &mut R,
) -> Chromosome {
    space
        .iter()
        .map(|(name, dist)| {
            let gene = c.get(name).expect("chromosome in space");
            if p_mutation > 0.0 && rng.random_bool(p_mutation) {
                (name, sample_param(dist, rng))
            } else {
                (name, gene.clone())
            }
        })
        .collect()
}

/// Population indices sorted best-first, ties by index.
pub fn rank(fitnesses: &[f64], direction: Direction) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fitnesses.len()).collect();
    order.sort_by(|&a, &b| {
        direction
            .canonical(fitnesses[a])
            .total_cmp(&direction.canonical(fitnesses[b]))
            .then(a.cmp(&b))
    });
    order
}

/// Produces the next generation.
///
/// The `elitism_count` fittest members are copied unchanged; every other slot
/// is a child of two tournament winners (or a clone of the first winner when
/// crossover is skipped), then mutated.
pub fn ga_step<R: Rng + ?Sized>(
    pop: &[Chromosome],
    fitnesses: &[f64],
    space: &SearchSpace,
    config: &GaConfig,
    direction: Direction,
    rng: &mut R,
) -> Result<Population, SamplerError> {
    if pop.len() != fitnesses.len() {
        return Err(SamplerError::LengthMismatch(pop.len(), fitnesses.len()));
    }
    config.validate()?;
    let size = pop.len();
    let mut next: Population = rank(fitnesses, direction)
        .into_iter()
        .take(config.elitism_count.min(size))
        .map(|i| pop[i].clone())
        .collect();
    let k = config.tournament_k.min(size);
    while next.len() < size {
        let first = ga_select(pop, fitnesses, k, direction, rng)?;
        let child = if config.p_crossover > 0.0 && rng.random_bool(config.p_crossover) {
            let second = ga_select(pop, fitnesses, k, direction, rng)?;
            ga_crossover(&first, &second, rng)?
        } else {
            first
        };
        next.push(ga_mutate(&child, space, config.p_mutation, rng));
    }
    Ok(next)
}

/// Summary of a standalone GA run.
#[derive(Debug, Clone, PartialEq)]
pub struct GaRun {
    /// Best fitness of each evaluated generation, generation 0 first.
    pub generation_best: Vec<f64>,
    pub best: Chromosome,
    pub best_fitness: f64,
}

/// Evolves `config.generations` generations after the initial one.
pub fn ga_run<R, F>(
    space: &SearchSpace,
    config: &GaConfig,
    direction: Direction,
    rng: &mut R,
    mut fitness: F,
) -> Result<GaRun, SamplerError>
where
    R: Rng + ?Sized,
    F: FnMut(&Chromosome) -> f64,
{
    config.validate()?;
    let mut pop = ga_init(space, config, rng);
    let mut generation_best = Vec::with_capacity(config.generations + 1);
    let mut best: Option<(Chromosome, f64)> = None;
    for generation in 0..=config.generations {
        let fits: Vec<f64> = pop.iter().map(&mut fitness).collect();
        let top = rank(&fits, direction)[0];
        generation_best.push(fits[top]);
        if best.as_ref().is_none_or(|(_, b)| direction.is_better(fits[top], *b)) {
            best = Some((pop[top].clone(), fits[top]));
        }
        if generation < config.generations {
            pop = ga_step(&pop, &fits, space, config, direction, rng)?;
        }
    }
    let (best, best_fitness) = best.expect("at least one generation");
    Ok(GaRun {
        generation_best,
        best,
        best_fitness,
    })
}
