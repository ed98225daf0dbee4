//! The independent signaling scheme for i.i.d. actions.
//!
//! Each action gets its own HIGH/LOW component signal, drawn independently
//! with `Pr[HIGH | type j] = x*_j / q_j`, where `(x*, y*)` solves the
//! s-signature LP without its realizability constraints. A HIGH action is
//! recommended when there is one. With nonnegative payoffs this earns at
//! least `1 - (1 - 1/n)^n > 1 - 1/e` of the LP value, hence of the optimum.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::iid::{s_signature_base, SSignature};
use crate::lp;
use crate::model::{DirectScheme, IidInstance};
use crate::profile::{profile_count, Profiles, DEFAULT_STATE_CAP};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentSignal {
    High,
    Low,
}

/// One HIGH/LOW component per action.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ComponentSignals(pub Vec<ComponentSignal>);

impl ComponentSignals {
    pub fn highs(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, c)| **c == ComponentSignal::High)
            .map(|(i, _)| i)
    }
}

/// Optimal `(x*, y*)` of the relaxed s-signature LP and its value
/// `n xi . x*`, an upper bound on the optimal sender utility.
pub fn solve_lp3(instance: &IidInstance) -> Result<(SSignature, f64)> {
    let m = instance.types();
    let prog = s_signature_base(instance.actions(), instance.q(), instance.xi(), instance.rho());
    let (_, point) = lp::solve(&prog)?.into_optimal("relaxed s-signature LP")?;
    let ssig = SSignature {
        x: point[..m].iter().map(|v| v.max(0.0)).collect(),
        y: point[m..].iter().map(|v| v.max(0.0)).collect(),
    };
    let value = ssig.value(instance);
    Ok((ssig, value))
}

fn high_probability(x: &[f64], q: &[f64], t: usize) -> Result<f64> {
    if t >= q.len() {
        return Err(Error::DimensionMismatch {
            axis: "type index",
            expected: q.len(),
            found: t,
        });
    }
    if !(q[t] > 0.0) {
        return Err(Error::InvalidArgument(format!("type {t} has zero probability")));
    }
    if x[t] > q[t] + 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "x[{t}] = {} exceeds q[{t}] = {}",
            x[t], q[t]
        )));
    }
    Ok((x[t] / q[t]).clamp(0.0, 1.0))
}

/// Component signal for each action of profile `theta`.
pub fn independent_signal<R: Rng + ?Sized>(
    x: &[f64],
    y: &[f64],
    q: &[f64],
    theta: &[usize],
    rng: &mut R,
) -> Result<ComponentSignals> {
    if x.len() != q.len() || y.len() != q.len() {
        return Err(Error::DimensionMismatch {
            axis: "s-signature types",
            expected: q.len(),
            found: x.len().min(y.len()),
        });
    }
    theta
        .iter()
        .map(|&t| {
            let p = high_probability(x, q, t)?;
            Ok(if rng.gen::<f64>() < p {
                ComponentSignal::High
            } else {
                ComponentSignal::Low
            })
        })
        .collect::<Result<Vec<_>>>()
        .map(ComponentSignals)
}

/// Uniform among HIGH components, or uniform among all actions if none.
pub fn to_direct_recommendation<R: Rng + ?Sized>(signals: &ComponentSignals, rng: &mut R) -> usize {
    let highs: Vec<usize> = signals.highs().collect();
    if highs.is_empty() {
        rng.gen_range(0..signals.0.len())
    } else {
        highs[rng.gen_range(0..highs.len())]
    }
}

/// The end-to-end scheme: component signals, then a recommendation.
#[derive(Debug, Clone, PartialEq)]
pub struct IndependentScheme {
    ssig: SSignature,
    q: Vec<f64>,
    n: usize,
}

impl IndependentScheme {
    pub fn new(instance: &IidInstance, ssig: SSignature) -> Result<Self> {
        if !instance.has_nonnegative_payoffs() {
            log::warn!("payoffs are not all nonnegative; the 1 - 1/e guarantee does not apply");
        }
        for t in 0..instance.types() {
            if instance.q()[t] > 0.0 {
                high_probability(&ssig.x, instance.q(), t)?;
            }
        }
        Ok(Self {
            ssig,
            q: instance.q().to_vec(),
            n: instance.actions(),
        })
    }

    pub fn s_signature(&self) -> &SSignature {
        &self.ssig
    }

    pub fn components<R: Rng + ?Sized>(&self, theta: &[usize], rng: &mut R) -> Result<ComponentSignals> {
        independent_signal(&self.ssig.x, &self.ssig.y, &self.q, theta, rng)
    }

    pub fn sample<R: Rng + ?Sized>(&self, theta: &[usize], rng: &mut R) -> Result<usize> {
        let c = self.components(theta, rng)?;
        Ok(to_direct_recommendation(&c, rng))
    }

    /// Exact recommendation probabilities over the profile states.
    ///
    /// With `p_k` the HIGH probability of action `k`, action `i` is
    /// recommended with probability `p_i E[1 / (1 + H_{-i})]` plus
    /// `prod_k (1 - p_k) / n`, where `H_{-i}` counts the other HIGHs.
    pub fn to_direct(&self) -> Result<DirectScheme> {
        let n = self.n;
        let m = self.q.len();
        profile_count(&vec![m; n], DEFAULT_STATE_CAP)?;
        let rows = Profiles::uniform(n, m)
            .map(|theta| {
                let p: Vec<f64> = theta
                    .iter()
                    .map(|&t| if self.q[t] > 0.0 { (self.ssig.x[t] / self.q[t]).clamp(0.0, 1.0) } else { 0.0 })
                    .collect();
                let none: f64 = p.iter().map(|v| 1.0 - v).product();
                (0..n)
                    .map(|i| {
                        // distribution of the number of other HIGH components
                        let mut dist = vec![1.0];
                        for (k, &pk) in p.iter().enumerate() {
                            if k == i {
                                continue;
                            }
                            let mut next = vec![0.0; dist.len() + 1];
                            for (c, &w) in dist.iter().enumerate() {
                                next[c] += w * (1.0 - pk);
                                next[c + 1] += w * pk;
                            }
                            dist = next;
                        }
                        let share: f64 = dist.iter().enumerate().map(|(c, w)| w / (c + 1) as f64).sum();
                        p[i] * share + none / n as f64
                    })
                    .collect()
            })
            .collect();
        DirectScheme::new(rows)
    }
}

/// Solves the relaxed LP and wraps the solution as a scheme. Returns the
/// LP value alongside.
pub fn solve_independent(instance: &IidInstance) -> Result<(IndependentScheme, f64)> {
    let (ssig, value) = solve_lp3(instance)?;
    Ok((IndependentScheme::new(instance, ssig)?, value))
}

/// `1 - (1 - 1/n)^n`, the fraction of the LP value the scheme guarantees.
pub fn guarantee_factor(n: usize) -> f64 {
    1.0 - crate::num::powi(1.0 - 1.0 / n as f64, n)
}
