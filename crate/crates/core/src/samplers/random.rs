use rand::Rng;

use crate::search_space::{sample_param, ParamPoint, SearchSpace};

/// Draws every parameter independently from its distribution, in space order.
pub fn random_suggest<R: Rng + ?Sized>(space: &SearchSpace, rng: &mut R) -> ParamPoint {
    space
        .iter()
        .map(|(name, dist)| (name, sample_param(dist, rng)))
        .collect()
}
