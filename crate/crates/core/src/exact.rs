//! Optimal direct schemes for explicit priors, by one LP over `phi`.

use alloc::vec;
use alloc::vec::Vec;

use crate::lp::{self, LinearProgram, Relation};
use crate::model::{audit, AuditReport, DirectScheme, ExplicitInstance, IidInstance, IndependentInstance, State};
use crate::profile::{profile_count, Profiles, DEFAULT_STATE_CAP};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    pub scheme: DirectScheme,
    pub value: f64,
    pub audit: AuditReport,
}

/// Maximizes expected sender utility over `eps`-IC direct schemes.
///
/// Variables are the raw `phi(theta, sigma_i)` with the prior folded into
/// the coefficients. The relaxed constraint for signal `i` against action
/// `j` is `sum_theta lambda phi(theta, i) (r_i - r_j + eps) >= 0`. States
/// of probability zero are left out of the program and get the row
/// `(1, 0, ..., 0)`.
pub fn solve_exact(instance: &ExplicitInstance, epsilon: f64) -> Result<ExactSolution> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!(
            "epsilon must be a finite nonnegative number, got {epsilon}"
        )));
    }
    let n = instance.actions();
    let live: Vec<usize> = (0..instance.state_count())
        .filter(|&k| instance.states()[k].prob > 0.0)
        .collect();
    let var = |slot: usize, i: usize| slot * n + i;

    let mut prog = LinearProgram::new(live.len() * n);
    for (slot, &k) in live.iter().enumerate() {
        let st = &instance.states()[k];
        for i in 0..n {
            prog.set_objective(var(slot, i), st.prob * st.sender[i]);
        }
        prog.add_constraint((0..n).map(|i| (var(slot, i), 1.0)).collect(), Relation::Eq, 1.0);
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let coeffs = live
                .iter()
                .enumerate()
                .map(|(slot, &k)| {
                    let st = &instance.states()[k];
                    (var(slot, i), st.prob * (st.receiver[i] - st.receiver[j] + epsilon))
                })
                .filter(|&(_, c)| c != 0.0)
                .collect();
            prog.add_constraint(coeffs, Relation::Ge, 0.0);
        }
    }
    let (_, x) = lp::solve(&prog)?.into_optimal("explicit persuasion LP")?;

    let mut rows = vec![first_signal_row(n); instance.state_count()];
    for (slot, &k) in live.iter().enumerate() {
        rows[k] = clean_row(&x[slot * n..(slot + 1) * n]);
    }
    let scheme = DirectScheme::new(rows)?;
    let report = audit(instance, &scheme)?;
    Ok(ExactSolution {
        value: report.sender_utility,
        scheme,
        audit: report,
    })
}

fn first_signal_row(n: usize) -> Vec<f64> {
    let mut row = vec![0.0; n];
    row[0] = 1.0;
    row
}

/// Clamps LP round-off and renormalizes so the row is a distribution.
pub(crate) fn clean_row(raw: &[f64]) -> Vec<f64> {
    let mut row: Vec<f64> = raw.iter().map(|v| if *v < 1e-13 { 0.0 } else { *v }).collect();
    let total: f64 = row.iter().sum();
    row.iter_mut().for_each(|v| *v /= total);
    row
}

/// A prior that is a product of per-action type distributions.
pub trait ProductPrior {
    fn action_count(&self) -> usize;
    /// `(q, xi, rho)` of action `i`.
    fn marginal(&self, i: usize) -> (&[f64], &[f64], &[f64]);

    fn radices(&self) -> Vec<usize> {
        (0..self.action_count()).map(|i| self.marginal(i).0.len()).collect()
    }
}

impl ProductPrior for IidInstance {
    fn action_count(&self) -> usize {
        self.actions()
    }

    fn marginal(&self, _i: usize) -> (&[f64], &[f64], &[f64]) {
        (self.q(), self.xi(), self.rho())
    }
}

impl ProductPrior for IndependentInstance {
    fn action_count(&self) -> usize {
        self.actions()
    }

    fn marginal(&self, i: usize) -> (&[f64], &[f64], &[f64]) {
        let m = &self.marginals()[i];
        (&m.q, &m.xi, &m.rho)
    }
}

/// One explicit state per type profile, in odometer order (last action
/// fastest), capped at [`DEFAULT_STATE_CAP`] states.
pub fn expand_product<P: ProductPrior + ?Sized>(prior: &P) -> Result<ExplicitInstance> {
    expand_product_capped(prior, DEFAULT_STATE_CAP)
}

pub fn expand_product_capped<P: ProductPrior + ?Sized>(prior: &P, cap: usize) -> Result<ExplicitInstance> {
    let radices = prior.radices();
    let count = profile_count(&radices, cap)?;
    let n = prior.action_count();
    let mut states = Vec::with_capacity(count);
    for theta in Profiles::new(&radices) {
        let mut prob = 1.0;
        let mut sender = Vec::with_capacity(n);
        let mut receiver = Vec::with_capacity(n);
        for (i, &t) in theta.iter().enumerate() {
            let (q, xi, rho) = prior.marginal(i);
            prob *= q[t];
            sender.push(xi[t]);
            receiver.push(rho[t]);
        }
        states.push(State { prob, sender, receiver });
    }
    normalize_probs(&mut states);
    ExplicitInstance::new(n, states)
}

/// Products of probabilities drift by a few ulps per factor; fold the
/// drift back so the total is one to within [`crate::PROB_SUM_TOL`].
fn normalize_probs(states: &mut [State]) {
    let total: f64 = states.iter().map(|s| s.prob).sum();
    if total > 0.0 {
        states.iter_mut().for_each(|s| s.prob /= total);
    }
}
