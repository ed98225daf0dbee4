//! The shipped instance corpus and seeded random instances.

use persuasion_core::fixtures;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::format::Instance;

/// Delta used for the rain/shine and three-action files.
pub const CORPUS_DELTA: f64 = 0.1;

/// `(file stem, instance)` for every corpus file.
pub fn corpus() -> Vec<(&'static str, Instance)> {
    let d = CORPUS_DELTA;
    vec![
        ("prosecutor", Instance::Explicit(fixtures::prosecutor())),
        ("investor", Instance::Iid(fixtures::investor_iid())),
        ("investor_halved", Instance::Explicit(fixtures::investor_halved_explicit())),
        ("rain_shine_r", Instance::Explicit(fixtures::rain_shine_r(d))),
        ("rain_shine_s", Instance::Explicit(fixtures::rain_shine_s(d))),
        ("three_action_lambda", Instance::Explicit(fixtures::three_action_lambda(d))),
        ("three_action_lambda_prime", Instance::Explicit(fixtures::three_action_lambda_prime(d))),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    Explicit,
    Iid,
    Independent,
}

/// Random instance of the given shape. `types` is the number of states for
/// explicit instances.
pub fn random_instance(kind: Kind, actions: usize, types: usize, nonnegative: bool, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        Kind::Explicit => Instance::Explicit(fixtures::random_explicit(&mut rng, actions, types)),
        Kind::Iid => Instance::Iid(fixtures::random_iid(&mut rng, actions, types, nonnegative)),
        Kind::Independent => Instance::Independent(fixtures::random_independent(&mut rng, &vec![types; actions])),
    }
}
