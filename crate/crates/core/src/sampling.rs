//! Ancestral (forward) sampling.
//!
//! All randomness in the crate comes from [`seeded_rng`]: ChaCha8 keyed through
//! `SeedableRng::seed_from_u64`. Bernoulli draws compare one `f64` from
//! `Rng::random` (uniform on `[0, 1)`) against the success probability, so a
//! probability of 0 never fires and 1 always does.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::network::{Assignment, Network};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Samples every node in topological order: diseases from their priors, every
/// other node from its leaky noisy-OR given the sampled parents.
pub fn sample_world(net: &Network, seed: u64) -> Assignment {
    sample_world_with(net, &mut seeded_rng(seed))
}

pub fn sample_world_with<R: Rng + ?Sized>(net: &Network, rng: &mut R) -> Assignment {
    let states = sample_states(net, rng);
    net.nodes()
        .iter()
        .zip(states)
        .map(|(n, v)| (n.id.clone(), v))
        .collect()
}

/// Dense variant of [`sample_world_with`], indexed like `net.nodes()`.
pub(crate) fn sample_states<R: Rng + ?Sized>(net: &Network, rng: &mut R) -> Vec<bool> {
    let mut states = vec![false; net.len()];
    for &i in net.topological_order() {
        let p = net.prob_present(i, |j| states[j]);
        states[i] = rng.random::<f64>() < p;
    }
    states
}
