//! Sample-and-solve signaling for priors known only through a sampler.
//!
//! To signal for a state `theta`, draw `K - 1` fresh states, insert `theta`
//! at a uniformly random position among them, solve the `eps`-relaxed
//! persuasion LP on that empirical distribution and signal as its row for
//! `theta` says. Because `theta` is exchangeable with the fresh samples the
//! induced scheme is `eps`-IC for the true prior, and for
//! `K >= 256 n^2 / eps^4 * ln(4n / eps)` its expected utility is within
//! `eps` of the optimum.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, RngCore};

use crate::exact::clean_row;
use crate::lp::{self, LinearProgram, Relation};
use crate::model::{sample_index, DirectScheme, ExplicitInstance};
use crate::num::{ceil, ln, powi};
use crate::{Error, Result};

/// Payoffs of every action in one sampled state.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub sender: Vec<f64>,
    pub receiver: Vec<f64>,
}

impl Sample {
    fn key(&self) -> Vec<u64> {
        self.sender.iter().chain(&self.receiver).map(|v| v.to_bits()).collect()
    }
}

/// A source of i.i.d. states with payoffs in `[-1, 1]`.
pub trait SampleOracle {
    fn action_count(&self) -> usize;

    fn draw(&self, rng: &mut dyn RngCore) -> Result<Sample>;

    /// Whether `draw` may be called from several threads at once.
    fn concurrent_draws_safe(&self) -> bool {
        false
    }
}

/// An oracle backed by an explicit finite prior, for testing.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitOracle {
    instance: ExplicitInstance,
    probs: Vec<f64>,
}

impl ExplicitOracle {
    pub fn new(instance: ExplicitInstance) -> Result<Self> {
        for (k, st) in instance.states().iter().enumerate() {
            if st.sender.iter().chain(&st.receiver).any(|v| !(-1.0..=1.0).contains(v)) {
                return Err(Error::InvalidInstance(format!(
                    "state {k} has a payoff outside [-1, 1]"
                )));
            }
        }
        let probs = instance.states().iter().map(|s| s.prob).collect();
        Ok(Self { instance, probs })
    }

    pub fn instance(&self) -> &ExplicitInstance {
        &self.instance
    }

    pub fn draw_index(&self, rng: &mut dyn RngCore) -> usize {
        sample_index(&self.probs, rng)
    }

    pub fn sample_of(&self, state: usize) -> Sample {
        let st = &self.instance.states()[state];
        Sample {
            sender: st.sender.clone(),
            receiver: st.receiver.clone(),
        }
    }
}

impl SampleOracle for ExplicitOracle {
    fn action_count(&self) -> usize {
        self.instance.actions()
    }

    fn draw(&self, rng: &mut dyn RngCore) -> Result<Sample> {
        Ok(self.sample_of(self.draw_index(rng)))
    }

    fn concurrent_draws_safe(&self) -> bool {
        true
    }
}

/// `ceil(256 n^2 / eps^4 * ln(4n / eps))`.
pub fn sample_count(n: usize, epsilon: f64) -> Result<u64> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "sample count needs epsilon > 0, got {epsilon}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let nf = n as f64;
    let k = ceil(256.0 * nf * nf / powi(epsilon, 4) * ln(4.0 * nf / epsilon));
    if k >= u64::MAX as f64 {
        return Err(Error::TooLarge {
            what: "sample count",
            size: u128::MAX,
            cap: u64::MAX as u128,
        });
    }
    Ok(k as u64)
}

/// Picks the number of samples: the formula's value by default, or
/// `requested` when it is at least that large, or when `force` is set.
pub fn resolve_sample_count(n: usize, epsilon: f64, requested: Option<usize>, force: bool) -> Result<usize> {
    match (requested, force) {
        (Some(0), _) => Err(Error::InvalidArgument("K must be at least 1".into())),
        (Some(k), true) => Ok(k),
        (Some(k), false) => {
            let guaranteed = sample_count(n, epsilon)?;
            if (k as u64) < guaranteed {
                Err(Error::InvalidArgument(format!(
                    "K = {k} is below the guaranteed sample count {guaranteed}; set force to accept it"
                )))
            } else {
                Ok(k)
            }
        }
        (None, true) => Err(Error::InvalidArgument("force needs an explicit K".into())),
        (None, false) => {
            let guaranteed = sample_count(n, epsilon)?;
            usize::try_from(guaranteed).map_err(|_| Error::TooLarge {
                what: "sample count",
                size: guaranteed as u128,
                cap: usize::MAX as u128,
            })
        }
    }
}

/// Optimal `eps`-IC scheme for the uniform distribution over `samples`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalScheme {
    pub samples: Vec<Sample>,
    /// Row `k` is the signal distribution for `samples[k]`.
    pub phi: DirectScheme,
    pub epsilon: f64,
    pub value: f64,
}

fn check_sample(s: &Sample, n: usize) -> Result<()> {
    if s.sender.len() != n || s.receiver.len() != n {
        return Err(Error::DimensionMismatch {
            axis: "sample payoffs",
            expected: n,
            found: s.sender.len().min(s.receiver.len()),
        });
    }
    if s.sender.iter().chain(&s.receiver).any(|v| !(-1.0..=1.0).contains(v)) {
        return Err(Error::InvalidArgument("sample payoff outside [-1, 1]".into()));
    }
    Ok(())
}

/// Solves the relaxed empirical LP. Identical samples share one row, which
/// gives the same optimum with far fewer variables.
pub fn solve_empirical_lp(samples: &[Sample], epsilon: f64) -> Result<EmpiricalScheme> {
    let first = samples
        .first()
        .ok_or_else(|| Error::InvalidArgument("at least one sample is required".into()))?;
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!("epsilon must be >= 0, got {epsilon}")));
    }
    let n = first.sender.len();
    for s in samples {
        check_sample(s, n)?;
    }
    let k = samples.len() as f64;

    // distinct states in order of first appearance, with their weights
    let mut index: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
    let mut distinct: Vec<(usize, f64)> = Vec::new();
    let mut slot_of = Vec::with_capacity(samples.len());
    for (i, s) in samples.iter().enumerate() {
        let slot = *index.entry(s.key()).or_insert_with(|| {
            distinct.push((i, 0.0));
            distinct.len() - 1
        });
        distinct[slot].1 += 1.0 / k;
        slot_of.push(slot);
    }

    let var = |d: usize, i: usize| d * n + i;
    let mut prog = LinearProgram::new(distinct.len() * n);
    for (d, &(rep, w)) in distinct.iter().enumerate() {
        for i in 0..n {
            prog.set_objective(var(d, i), w * samples[rep].sender[i]);
        }
        prog.add_constraint((0..n).map(|i| (var(d, i), 1.0)).collect(), Relation::Eq, 1.0);
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let coeffs = distinct
                .iter()
                .enumerate()
                .map(|(d, &(rep, w))| {
                    let r = &samples[rep].receiver;
                    (var(d, i), w * (r[i] - r[j] + epsilon))
                })
                .filter(|&(_, c)| c != 0.0)
                .collect();
            prog.add_constraint(coeffs, Relation::Ge, 0.0);
        }
    }
    let (value, point) = lp::solve(&prog)?.into_optimal("empirical persuasion LP")?;
    let rows_distinct: Vec<Vec<f64>> = (0..distinct.len())
        .map(|d| clean_row(&point[d * n..(d + 1) * n]))
        .collect();
    let rows = slot_of.iter().map(|&d| rows_distinct[d].clone()).collect();
    Ok(EmpiricalScheme {
        samples: samples.to_vec(),
        phi: DirectScheme::new(rows)?,
        epsilon,
        value,
    })
}

/// One run of the sample-and-solve scheme, with everything it drew.
#[derive(Debug, Clone, PartialEq)]
pub struct BlackboxDraw {
    pub signal: usize,
    /// Position of the input state among the samples.
    pub position: usize,
    /// Optimal value of the empirical LP.
    pub lp_value: f64,
}

/// The sample-and-solve scheme with fixed `eps` and `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlackboxScheme {
    epsilon: f64,
    samples: usize,
}

impl BlackboxScheme {
    pub fn new(epsilon: f64, samples: usize) -> Result<Self> {
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidArgument(format!("epsilon must be >= 0, got {epsilon}")));
        }
        if samples == 0 {
            return Err(Error::InvalidArgument("K must be at least 1".into()));
        }
        if epsilon == 0.0 {
            log::warn!(
                "epsilon = 0: the scheme is exactly IC but its utility need not approach the optimum; \
                 relaxing incentive compatibility is necessary for convergence"
            );
        }
        Ok(Self { epsilon, samples })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn run<O: SampleOracle + ?Sized, R: RngCore>(&self, oracle: &O, theta: &Sample, rng: &mut R) -> Result<BlackboxDraw> {
        let rng: &mut dyn RngCore = rng;
        check_sample(theta, oracle.action_count())?;
        let position = rng.gen_range(0..self.samples);
        let mut all = Vec::with_capacity(self.samples);
        for k in 0..self.samples {
            if k == position {
                all.push(theta.clone());
            } else {
                all.push(oracle.draw(rng)?);
            }
        }
        let emp = solve_empirical_lp(&all, self.epsilon)?;
        let signal = emp.phi.sample(position, rng);
        Ok(BlackboxDraw {
            signal,
            position,
            lp_value: emp.value,
        })
    }

    pub fn signal<O: SampleOracle + ?Sized, R: RngCore>(&self, oracle: &O, theta: &Sample, rng: &mut R) -> Result<usize> {
        self.run(oracle, theta, rng).map(|d| d.signal)
    }
}

/// One-shot form of [`BlackboxScheme::signal`].
pub fn blackbox_signal<O: SampleOracle + ?Sized, R: RngCore>(
    oracle: &O,
    theta: &Sample,
    epsilon: f64,
    samples: usize,
    rng: &mut R,
) -> Result<usize> {
    BlackboxScheme::new(epsilon, samples)?.signal(oracle, theta, rng)
}
