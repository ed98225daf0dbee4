//! Small named instances with known answers, plus seeded random generators.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::exact::expand_product;
use crate::model::{DirectScheme, ExplicitInstance, IidInstance, IndependentInstance, Marginal, State};
use crate::profile::Profiles;

/// Action indices of the prosecutor instance.
pub const ACQUIT: usize = 0;
pub const CONVICT: usize = 1;
/// State indices of the prosecutor instance.
pub const INNOCENT: usize = 0;
pub const GUILTY: usize = 1;

/// A prosecutor persuading a judge. The defendant is guilty with
/// probability 1/3; the judge wants a correct verdict, the prosecutor
/// wants a conviction. Optimal value 2/3.
pub fn prosecutor() -> ExplicitInstance {
    ExplicitInstance::new(
        2,
        vec![
            State {
                prob: 2.0 / 3.0,
                sender: vec![0.0, 1.0],
                receiver: vec![1.0, 0.0],
            },
            State {
                prob: 1.0 / 3.0,
                sender: vec![0.0, 1.0],
                receiver: vec![0.0, 1.0],
            },
        ],
    )
    .expect("valid fixture")
}

/// Optimal prosecutor scheme: always convict the guilty, and convict the
/// innocent half the time.
pub fn prosecutor_optimal_scheme() -> DirectScheme {
    DirectScheme::new(vec![vec![0.5, 0.5], vec![0.0, 1.0]]).expect("valid fixture")
}

pub const LOW: usize = 0;
pub const MODERATE: usize = 1;
pub const HIGH: usize = 2;

/// Two stocks, each equally likely L/M/H. Short-term returns (what the
/// investor sees) are 0, 1.1, 2; only M has a long-term return (what the
/// adviser cares about). Optimal value 5/9, full or no information 1/3.
pub fn investor_iid() -> IidInstance {
    IidInstance::new(
        2,
        vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, 1.1, 2.0],
    )
    .expect("valid fixture")
}

/// The nine equiprobable states of [`investor_iid`], in profile order.
pub fn investor_explicit() -> ExplicitInstance {
    expand_product(&IndependentInstance::from(&investor_iid())).expect("9 states")
}

/// Recommend the unique M stock if there is one, otherwise either stock
/// uniformly.
pub fn investor_optimal_scheme() -> DirectScheme {
    let rows = Profiles::uniform(2, 3)
        .map(|p| match (p[0] == MODERATE, p[1] == MODERATE) {
            (true, false) => vec![1.0, 0.0],
            (false, true) => vec![0.0, 1.0],
            _ => vec![0.5, 0.5],
        })
        .collect();
    DirectScheme::new(rows).expect("valid fixture")
}

/// [`investor_explicit`] with receiver payoffs halved so they lie in
/// `[-1, 1]`, as the sampling-based solver requires. Scaling the receiver
/// does not change which schemes are IC, so the optimum is still 5/9.
pub fn investor_halved_explicit() -> ExplicitInstance {
    let inst = investor_explicit();
    let states = inst
        .states()
        .iter()
        .map(|s| State {
            prob: s.prob,
            sender: s.sender.clone(),
            receiver: s.receiver.iter().map(|r| r / 2.0).collect(),
        })
        .collect();
    ExplicitInstance::new(inst.actions(), states).expect("valid fixture")
}

pub const WALK: usize = 0;
pub const DRIVE: usize = 1;
pub const RAINY: usize = 0;
pub const SUNNY: usize = 1;

fn rain_shine(delta: f64, p_rainy: f64) -> ExplicitInstance {
    ExplicitInstance::new(
        2,
        vec![
            State {
                prob: p_rainy,
                sender: vec![1.0, 0.0],
                receiver: vec![1.0 - delta, 1.0],
            },
            State {
                prob: 1.0 - p_rainy,
                sender: vec![1.0, 0.0],
                receiver: vec![1.0, 0.0],
            },
        ],
    )
    .expect("valid fixture")
}

/// Commuter example, always rainy. The only IC scheme recommends driving,
/// so the city (which wants walking) gets 0.
pub fn rain_shine_r(delta: f64) -> ExplicitInstance {
    rain_shine(delta, 1.0)
}

/// Commuter example with `Pr[rainy] = 1 / (1 + 2 delta)`. Always
/// recommending a walk is IC and earns 1.
pub fn rain_shine_s(delta: f64) -> ExplicitInstance {
    rain_shine(delta, 1.0 / (1.0 + 2.0 * delta))
}

fn three_action(probs: [f64; 3]) -> ExplicitInstance {
    let states = (0..3)
        .map(|k| State {
            prob: probs[k],
            sender: vec![0.0, 0.0, 1.0],
            receiver: (0..3).map(|i| if i == k { 1.0 } else { 0.0 }).collect(),
        })
        .collect();
    ExplicitInstance::new(3, states).expect("valid fixture")
}

/// Three actions, state `k` rewards the receiver for action `k`; the sender
/// wants action 3. State probabilities `(1 - 2d, 2d, 0)`; optimum 0.
pub fn three_action_lambda(delta: f64) -> ExplicitInstance {
    three_action([1.0 - 2.0 * delta, 2.0 * delta, 0.0])
}

/// Same payoffs with probabilities `(1 - 2d, d, d)`; optimum `3d`.
pub fn three_action_lambda_prime(delta: f64) -> ExplicitInstance {
    three_action([1.0 - 2.0 * delta, delta, delta])
}

fn random_distribution<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    let mut q: Vec<f64> = w.iter().map(|v| v / total).collect();
    // push the rounding residue into the last entry
    let head: f64 = q[..m - 1].iter().sum();
    q[m - 1] = 1.0 - head;
    q
}

fn random_payoffs<R: Rng + ?Sized>(rng: &mut R, len: usize, nonnegative: bool) -> Vec<f64> {
    let lo = if nonnegative { 0.0 } else { -1.0 };
    (0..len).map(|_| rng.gen_range(lo..=1.0)).collect()
}

/// Random i.i.d. instance with strictly positive type probabilities and
/// payoffs in `[-1, 1]` (or `[0, 1]` when `nonnegative`).
pub fn random_iid<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize, nonnegative: bool) -> IidInstance {
    let q = random_distribution(rng, m);
    let xi = random_payoffs(rng, m, nonnegative);
    let rho = random_payoffs(rng, m, nonnegative);
    IidInstance::new(n, q, xi, rho).expect("generated instance is valid")
}

/// Random independent instance; action `i` has `types[i]` types.
pub fn random_independent<R: Rng + ?Sized>(rng: &mut R, types: &[usize]) -> IndependentInstance {
    let marginals = types
        .iter()
        .map(|&m| Marginal {
            q: random_distribution(rng, m),
            xi: random_payoffs(rng, m, false),
            rho: random_payoffs(rng, m, false),
        })
        .collect();
    IndependentInstance::new(marginals).expect("generated instance is valid")
}

/// Random explicit instance with payoffs in `[-1, 1]`.
pub fn random_explicit<R: Rng + ?Sized>(rng: &mut R, actions: usize, states: usize) -> ExplicitInstance {
    let probs = random_distribution(rng, states);
    let states = probs
        .into_iter()
        .map(|prob| State {
            prob,
            sender: random_payoffs(rng, actions, false),
            receiver: random_payoffs(rng, actions, false),
        })
        .collect();
    ExplicitInstance::new(actions, states).expect("generated instance is valid")
}
