//! Persuasion instances, direct schemes, posteriors, and IC auditing.
//!
//! Actions and signals are 0-based throughout: signal `i` of a
//! [`DirectScheme`] recommends action `i`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::num::abs;
use crate::{Error, Result, PROB_SUM_TOL, TIE_TOL};

/// One state of nature: its prior probability and both players' payoffs
/// for every action.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub prob: f64,
    pub sender: Vec<f64>,
    pub receiver: Vec<f64>,
}

/// An explicitly enumerated finite prior.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitInstance {
    actions: usize,
    states: Vec<State>,
}

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidInstance(format!("{what} contains non-finite value {v}")));
    }
    Ok(())
}

fn check_distribution(q: &[f64], what: &str) -> Result<()> {
    check_finite(q, what)?;
    if let Some((j, v)) = q.iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::InvalidInstance(format!("{what}[{j}] = {v} is negative")));
    }
    let total: f64 = q.iter().sum();
    if abs(total - 1.0) > PROB_SUM_TOL {
        return Err(Error::InvalidInstance(format!(
            "{what} sums to {total}, expected 1"
        )));
    }
    Ok(())
}

impl ExplicitInstance {
    pub fn new(actions: usize, states: Vec<State>) -> Result<Self> {
        if actions == 0 {
            return Err(Error::InvalidInstance("at least one action is required".into()));
        }
        if states.is_empty() {
            return Err(Error::InvalidInstance("at least one state is required".into()));
        }
        for (k, st) in states.iter().enumerate() {
            if st.sender.len() != actions {
                return Err(Error::InvalidInstance(format!(
                    "state {k}: sender payoff has {} entries, expected {actions}",
                    st.sender.len()
                )));
            }
            if st.receiver.len() != actions {
                return Err(Error::InvalidInstance(format!(
                    "state {k}: receiver payoff has {} entries, expected {actions}",
                    st.receiver.len()
                )));
            }
            check_finite(&st.sender, "sender payoff")?;
            check_finite(&st.receiver, "receiver payoff")?;
        }
        let probs: Vec<f64> = states.iter().map(|s| s.prob).collect();
        check_distribution(&probs, "state probabilities")?;
        Ok(Self { actions, states })
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    /// Prior expected receiver payoff of every action.
    pub fn prior_receiver(&self) -> Vec<f64> {
        self.prior_weighted(|s| &s.receiver)
    }

    /// Prior expected sender payoff of every action.
    pub fn prior_sender(&self) -> Vec<f64> {
        self.prior_weighted(|s| &s.sender)
    }

    fn prior_weighted(&self, f: impl Fn(&State) -> &Vec<f64>) -> Vec<f64> {
        let mut out = vec![0.0; self.actions];
        for st in &self.states {
            for (o, v) in out.iter_mut().zip(f(st)) {
                *o += st.prob * v;
            }
        }
        out
    }

    /// Same instance with states reordered: state `k` of the result is
    /// state `order[k]` of `self`.
    pub fn permuted_states(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.states.len() {
            return Err(Error::DimensionMismatch {
                axis: "state order",
                expected: self.states.len(),
                found: order.len(),
            });
        }
        let states = order.iter().map(|&k| self.states[k].clone()).collect();
        Self::new(self.actions, states)
    }
}

/// n i.i.d. actions whose type is drawn from `q`; an action of type `j`
/// pays `xi[j]` to the sender and `rho[j]` to the receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct IidInstance {
    actions: usize,
    q: Vec<f64>,
    xi: Vec<f64>,
    rho: Vec<f64>,
}

impl IidInstance {
    pub fn new(actions: usize, q: Vec<f64>, xi: Vec<f64>, rho: Vec<f64>) -> Result<Self> {
        if actions == 0 {
            return Err(Error::InvalidInstance("at least one action is required".into()));
        }
        if q.is_empty() {
            return Err(Error::InvalidInstance("at least one type is required".into()));
        }
        if xi.len() != q.len() || rho.len() != q.len() {
            return Err(Error::InvalidInstance(format!(
                "q, xi, rho must have equal lengths (got {}, {}, {})",
                q.len(),
                xi.len(),
                rho.len()
            )));
        }
        check_distribution(&q, "q")?;
        check_finite(&xi, "xi")?;
        check_finite(&rho, "rho")?;
        Ok(Self { actions, q, xi, rho })
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn types(&self) -> usize {
        self.q.len()
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    /// Relabels types: type `k` of the result is type `order[k]` of `self`.
    pub fn permuted_types(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.types() {
            return Err(Error::DimensionMismatch {
                axis: "type order",
                expected: self.types(),
                found: order.len(),
            });
        }
        let pick = |v: &[f64]| order.iter().map(|&k| v[k]).collect::<Vec<_>>();
        Self::new(self.actions, pick(&self.q), pick(&self.xi), pick(&self.rho))
    }

    pub fn has_nonnegative_payoffs(&self) -> bool {
        self.xi.iter().chain(&self.rho).all(|v| *v >= 0.0)
    }
}

/// Type distribution and payoffs of one action in an independent instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginal {
    pub q: Vec<f64>,
    pub xi: Vec<f64>,
    pub rho: Vec<f64>,
}

/// Independent, non-identical actions with explicit marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct IndependentInstance {
    marginals: Vec<Marginal>,
}

impl IndependentInstance {
    pub fn new(marginals: Vec<Marginal>) -> Result<Self> {
        if marginals.is_empty() {
            return Err(Error::InvalidInstance("at least one action is required".into()));
        }
        for (i, m) in marginals.iter().enumerate() {
            if m.q.is_empty() || m.xi.len() != m.q.len() || m.rho.len() != m.q.len() {
                return Err(Error::InvalidInstance(format!(
                    "marginal {i}: q, xi, rho must be nonempty with equal lengths"
                )));
            }
            check_distribution(&m.q, "marginal q")?;
            check_finite(&m.xi, "marginal xi")?;
            check_finite(&m.rho, "marginal rho")?;
        }
        Ok(Self { marginals })
    }

    pub fn actions(&self) -> usize {
        self.marginals.len()
    }

    pub fn marginals(&self) -> &[Marginal] {
        &self.marginals
    }
}

impl From<&IidInstance> for IndependentInstance {
    fn from(inst: &IidInstance) -> Self {
        let m = Marginal {
            q: inst.q.clone(),
            xi: inst.xi.clone(),
            rho: inst.rho.clone(),
        };
        IndependentInstance {
            marginals: vec![m; inst.actions],
        }
    }
}

/// A direct scheme: row `k` is the signal distribution for state `k`,
/// column `i` is the signal recommending action `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectScheme {
    signals: usize,
    phi: Vec<f64>,
}

const ROW_SUM_TOL: f64 = 1e-9;
const NEG_TOL: f64 = 1e-12;

impl DirectScheme {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let signals = rows.first().map(|r| r.len()).unwrap_or(0);
        if signals == 0 {
            return Err(Error::InvalidArgument("scheme needs at least one row and one signal".into()));
        }
        let mut phi = Vec::with_capacity(rows.len() * signals);
        for (k, row) in rows.iter().enumerate() {
            if row.len() != signals {
                return Err(Error::DimensionMismatch {
                    axis: "scheme row length",
                    expected: signals,
                    found: row.len(),
                });
            }
            phi.extend_from_slice(row);
            Self::check_row(k, row)?;
        }
        Ok(Self { signals, phi })
    }

    fn check_row(k: usize, row: &[f64]) -> Result<()> {
        if let Some(v) = row.iter().find(|v| !v.is_finite() || **v < -NEG_TOL) {
            return Err(Error::InvalidArgument(format!(
                "scheme row {k} has invalid entry {v}"
            )));
        }
        let total: f64 = row.iter().sum();
        if abs(total - 1.0) > ROW_SUM_TOL {
            return Err(Error::InvalidArgument(format!(
                "scheme row {k} sums to {total}, expected 1"
            )));
        }
        Ok(())
    }

    /// Builds a scheme from a per-state closure; rows are validated.
    pub fn from_fn(states: usize, signals: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let rows = (0..states)
            .map(|k| (0..signals).map(|i| f(k, i)).collect())
            .collect();
        Self::new(rows)
    }

    /// Deterministic scheme sending state `k` to signal `choice(k)`.
    pub fn deterministic(signals: usize, choices: &[usize]) -> Result<Self> {
        if let Some(&c) = choices.iter().find(|&&c| c >= signals) {
            return Err(Error::InvalidArgument(format!("signal {c} out of range")));
        }
        Self::from_fn(choices.len(), signals, |k, i| if choices[k] == i { 1.0 } else { 0.0 })
    }

    /// Full information as a direct scheme: every state recommends the
    /// receiver's best action there (ties toward the sender).
    pub fn honest(instance: &ExplicitInstance) -> Self {
        let choices: Vec<usize> = instance
            .states()
            .iter()
            .map(|s| best_response(&s.receiver, &s.sender).expect("validated instance"))
            .collect();
        Self::deterministic(instance.actions(), &choices).expect("valid choices")
    }

    /// No information: always recommend the receiver's best action under
    /// the prior.
    pub fn no_information(instance: &ExplicitInstance) -> Self {
        let a = best_response(&instance.prior_receiver(), &instance.prior_sender())
            .expect("validated instance");
        let choices = vec![a; instance.state_count()];
        Self::deterministic(instance.actions(), &choices).expect("valid choices")
    }

    pub fn states(&self) -> usize {
        self.phi.len() / self.signals
    }

    pub fn signals(&self) -> usize {
        self.signals
    }

    pub fn row(&self, state: usize) -> &[f64] {
        &self.phi[state * self.signals..(state + 1) * self.signals]
    }

    pub fn get(&self, state: usize, signal: usize) -> f64 {
        self.phi[state * self.signals + signal]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.phi.chunks(self.signals)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    /// Samples a signal for `state` from its row.
    pub fn sample<R: rand::Rng + ?Sized>(&self, state: usize, rng: &mut R) -> usize {
        sample_index(self.row(state), rng)
    }

    pub fn permuted_states(&self, order: &[usize]) -> Result<Self> {
        Self::new(order.iter().map(|&k| self.row(k).to_vec()).collect())
    }

    fn check_dims(&self, instance: &ExplicitInstance) -> Result<()> {
        if self.signals != instance.actions() {
            return Err(Error::DimensionMismatch {
                axis: "signals",
                expected: instance.actions(),
                found: self.signals,
            });
        }
        if self.states() != instance.state_count() {
            return Err(Error::DimensionMismatch {
                axis: "states",
                expected: instance.state_count(),
                found: self.states(),
            });
        }
        Ok(())
    }
}

/// Draws an index from a weight vector that sums to (about) one. The last
/// positive entry absorbs rounding.
pub(crate) fn sample_index<R: rand::Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

/// Signal probability, posterior payoffs, and the receiver's response.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSummary {
    pub signal_prob: f64,
    pub receiver: Vec<f64>,
    pub sender: Vec<f64>,
    pub best_action: usize,
    /// Set when the signal is never sent; posteriors are then all zero.
    pub zero_probability: bool,
}

pub fn posterior(instance: &ExplicitInstance, scheme: &DirectScheme, signal: usize) -> Result<PosteriorSummary> {
    scheme.check_dims(instance)?;
    if signal >= scheme.signals() {
        return Err(Error::DimensionMismatch {
            axis: "signal index",
            expected: scheme.signals(),
            found: signal,
        });
    }
    let n = instance.actions();
    let mut alpha = 0.0;
    let mut r = vec![0.0; n];
    let mut s = vec![0.0; n];
    for (k, st) in instance.states().iter().enumerate() {
        let w = st.prob * scheme.get(k, signal);
        if w == 0.0 {
            continue;
        }
        alpha += w;
        for i in 0..n {
            r[i] += w * st.receiver[i];
            s[i] += w * st.sender[i];
        }
    }
    let zero_probability = alpha <= 0.0;
    if zero_probability {
        alpha = 0.0;
        r.iter_mut().chain(s.iter_mut()).for_each(|v| *v = 0.0);
    } else {
        r.iter_mut().chain(s.iter_mut()).for_each(|v| *v /= alpha);
    }
    let best_action = best_response(&r, &s)?;
    Ok(PosteriorSummary {
        signal_prob: alpha,
        receiver: r,
        sender: s,
        best_action,
        zero_probability,
    })
}

/// Receiver's choice: argmax of `receiver`; ties (within [`TIE_TOL`]) go to
/// the action the sender prefers, then to the smallest index.
pub fn best_response(receiver: &[f64], sender: &[f64]) -> Result<usize> {
    if receiver.is_empty() {
        return Err(Error::InvalidArgument("best response of an empty payoff vector".into()));
    }
    if receiver.len() != sender.len() {
        return Err(Error::DimensionMismatch {
            axis: "sender posterior",
            expected: receiver.len(),
            found: sender.len(),
        });
    }
    let top = receiver.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut best: Option<usize> = None;
    for i in 0..receiver.len() {
        if receiver[i] < top - TIE_TOL {
            continue;
        }
        match best {
            Some(b) if sender[i] <= sender[b] + TIE_TOL => {}
            _ => best = Some(i),
        }
    }
    Ok(best.expect("nonempty"))
}

/// Objective value and IC constraint slacks of a direct scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    /// Expected sender utility when the receiver obeys.
    pub sender_utility: f64,
    /// Probability of each signal.
    pub signal_probs: Vec<f64>,
    /// `ic_slack[i][j] = sum_k prob_k * phi(k, i) * (r_i(k) - r_j(k))`.
    pub ic_slack: Vec<Vec<f64>>,
    /// Smallest off-diagonal entry of `ic_slack` (0 for a single action).
    pub min_slack: f64,
    /// Smallest `eps >= 0` for which [`AuditReport::is_epsilon_ic`] holds.
    pub epsilon_certified: f64,
}

impl AuditReport {
    pub fn is_ic(&self) -> bool {
        self.is_epsilon_ic(0.0)
    }

    /// Posterior form of the relaxed constraint: the recommended action is
    /// within `eps` of the best, i.e. `slack[i][j] >= -eps * alpha_i`, with
    /// absolute tolerance [`TIE_TOL`].
    pub fn is_epsilon_ic(&self, eps: f64) -> bool {
        self.ic_slack.iter().enumerate().all(|(i, row)| {
            row.iter()
                .all(|&v| v >= -eps * self.signal_probs[i] - TIE_TOL)
        })
    }
}

pub fn audit(instance: &ExplicitInstance, scheme: &DirectScheme) -> Result<AuditReport> {
    scheme.check_dims(instance)?;
    let n = instance.actions();
    let mut utility = 0.0;
    let mut alpha = vec![0.0; n];
    let mut slack = vec![vec![0.0; n]; n];
    for (k, st) in instance.states().iter().enumerate() {
        for i in 0..n {
            let w = st.prob * scheme.get(k, i);
            if w == 0.0 {
                continue;
            }
            alpha[i] += w;
            utility += w * st.sender[i];
            for j in 0..n {
                if j != i {
                    slack[i][j] += w * (st.receiver[i] - st.receiver[j]);
                }
            }
        }
    }
    let mut min_slack = if n > 1 { f64::INFINITY } else { 0.0 };
    let mut eps: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            min_slack = min_slack.min(slack[i][j]);
            let deficit = -slack[i][j] - TIE_TOL;
            if deficit > 0.0 && alpha[i] > 0.0 {
                eps = eps.max(deficit / alpha[i]);
            }
        }
    }
    Ok(AuditReport {
        sender_utility: utility,
        signal_probs: alpha,
        ic_slack: slack,
        min_slack,
        epsilon_certified: eps,
    })
}
