//! Optimal symmetric schemes for i.i.d. actions.
//!
//! A symmetric scheme is summarized by its s-signature `(x, y)`: `x_j` is
//! the joint probability that a given signal is sent and the action it
//! recommends has type `j`, `y_j` the same for any other action. The
//! optimal s-signature solves a small LP whose realizability constraints
//! are Border's inequalities on the reduced form `tau_j = x_j / q_j`.
//! Those are added lazily: the LP is re-solved with the most violated
//! prefix set until the reduced form passes [`border_feasible`].
//!
//! Turning an s-signature back into a scheme goes through a single-item
//! allocation rule with reduced form `tau` (one bidder per action): the
//! winner is recommended, after relabeling actions by a uniformly random
//! permutation.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::exact::{expand_product, ProductPrior};
use crate::lp::{self, LinearProgram, Relation};
use crate::model::{sample_index, DirectScheme, IidInstance};
use crate::num::{abs, powi};
use crate::profile::{permutations, profile_count, profile_index, Profiles};
use crate::{Error, Result};

/// Slack allowed on a Border inequality before it counts as violated.
pub const BORDER_TOL: f64 = 1e-9;
/// Profile cap for the exhaustive decomposition LP.
pub const DECOMPOSE_CAP: usize = 4096;
/// Largest `n` for which [`symmetrize`] averages over all `n!` relabelings.
pub const SYMMETRIZE_MAX_ACTIONS: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct SSignature {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl SSignature {
    /// Sender utility `n xi . x` of any scheme with this s-signature.
    pub fn value(&self, instance: &IidInstance) -> f64 {
        instance.actions() as f64 * crate::num::dot(instance.xi(), &self.x)
    }

    /// `rho . x - rho . y`; nonnegative iff following is a best response.
    pub fn ic_margin(&self, instance: &IidInstance) -> f64 {
        crate::num::dot(instance.rho(), &self.x) - crate::num::dot(instance.rho(), &self.y)
    }

    /// Largest violation of `|x| = |y| = 1/n` and `x + (n-1) y = q`.
    pub fn consistency_error(&self, n: usize, q: &[f64]) -> f64 {
        let inv = 1.0 / n as f64;
        let sx: f64 = self.x.iter().sum();
        let sy: f64 = self.y.iter().sum();
        let mut err = abs(sx - inv).max(abs(sy - inv));
        if n > 1 {
            for j in 0..q.len() {
                err = err.max(abs(self.x[j] + (n as f64 - 1.0) * self.y[j] - q[j]));
            }
        }
        err
    }
}

/// Per-type probability that a bidder of that type wins.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedForm {
    pub tau: Vec<f64>,
}

impl ReducedForm {
    /// `tau_j = x_j / q_j`, clipped into `[0, 1]`.
    pub fn from_ssig(ssig: &SSignature, q: &[f64]) -> Self {
        let tau = ssig
            .x
            .iter()
            .zip(q)
            .map(|(x, q)| (x / q).clamp(0.0, 1.0))
            .collect();
        Self { tau }
    }

    pub fn uniform(n: usize, m: usize) -> Self {
        Self {
            tau: vec![1.0 / n as f64; m],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BorderCheck {
    pub feasible: bool,
    /// The prefix set with the largest excess, when infeasible.
    pub violating_set: Option<Vec<usize>>,
    /// Largest `lhs - rhs` over the checked sets (may be negative).
    pub excess: f64,
}

fn check_reduced_form_args(tau: &[f64], q: &[f64], n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if tau.len() != q.len() {
        return Err(Error::DimensionMismatch {
            axis: "reduced form types",
            expected: q.len(),
            found: tau.len(),
        });
    }
    if let Some(j) = q.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::InvalidArgument(format!("q[{j}] must be strictly positive")));
    }
    if let Some(j) = tau.iter().position(|t| !(-1e-12..=1.0 + 1e-12).contains(t)) {
        return Err(Error::InvalidArgument(format!("tau[{j}] = {} is outside [0, 1]", tau[j])));
    }
    Ok(())
}

/// Border's condition for a symmetric single-item reduced form:
/// `n sum_{j in A} q_j tau_j <= 1 - (1 - q(A))^n` for every type set `A`.
/// Only the prefixes of the types sorted by decreasing `tau` need checking.
pub fn border_feasible(tau: &ReducedForm, q: &[f64], n: usize) -> Result<BorderCheck> {
    check_reduced_form_args(&tau.tau, q, n)?;
    let m = q.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| tau.tau[b].total_cmp(&tau.tau[a]).then(a.cmp(&b)));

    let mut lhs = 0.0;
    // complement mass summed from the tail avoids cancellation near q(A) = 1
    let mut rest: Vec<f64> = vec![0.0; m + 1];
    for k in (0..m).rev() {
        rest[k] = rest[k + 1] + q[order[k]];
    }
    let mut worst = f64::NEG_INFINITY;
    let mut worst_k = 0;
    for k in 0..m {
        let j = order[k];
        lhs += n as f64 * q[j] * tau.tau[j];
        let rhs = 1.0 - powi(rest[k + 1], n);
        if lhs - rhs > worst {
            worst = lhs - rhs;
            worst_k = k;
        }
    }
    let feasible = worst <= BORDER_TOL;
    let violating_set = (!feasible).then(|| {
        let mut set = order[..=worst_k].to_vec();
        set.sort_unstable();
        set
    });
    Ok(BorderCheck {
        feasible,
        violating_set,
        excess: worst,
    })
}

/// Optimal realizable s-signature and its value `n xi . x`.
///
/// Types with `q_j = 0` are removed before solving and come back with
/// `x_j = y_j = 0`.
pub fn solve_s_signature(instance: &IidInstance) -> Result<(SSignature, f64)> {
    let n = instance.actions();
    let live: Vec<usize> = (0..instance.types()).filter(|&j| instance.q()[j] > 0.0).collect();
    let q: Vec<f64> = live.iter().map(|&j| instance.q()[j]).collect();
    let xi: Vec<f64> = live.iter().map(|&j| instance.xi()[j]).collect();
    let rho: Vec<f64> = live.iter().map(|&j| instance.rho()[j]).collect();
    let m = q.len();
    let nf = n as f64;

    let mut prog = s_signature_base(n, &q, &xi, &rho);
    let max_rounds = if m < 20 { (1usize << m) + 1 } else { 1 << 20 };
    for _ in 0..max_rounds {
        let (_, point) = lp::solve(&prog)?.into_optimal("s-signature LP")?;
        let ssig = SSignature {
            x: point[..m].to_vec(),
            y: point[m..].to_vec(),
        };
        let tau = ReducedForm::from_ssig(&ssig, &q);
        let check = border_feasible(&tau, &q, n)?;
        match check.violating_set {
            None => {
                let mut x = vec![0.0; instance.types()];
                let mut y = vec![0.0; instance.types()];
                for (slot, &j) in live.iter().enumerate() {
                    x[j] = ssig.x[slot].max(0.0);
                    y[j] = ssig.y[slot].max(0.0);
                }
                let out = SSignature { x, y };
                let value = out.value(instance);
                return Ok((out, value));
            }
            Some(set) => {
                log::debug!("adding Border cut for types {set:?} (excess {:.3e})", check.excess);
                let outside: f64 = (0..m).filter(|j| !set.contains(j)).map(|j| q[j]).sum();
                let rhs = 1.0 - powi(outside, n);
                prog.add_constraint(set.iter().map(|&j| (j, nf)).collect(), Relation::Le, rhs);
            }
        }
    }
    Err(Error::Oracle("Border cutting planes did not converge".into()))
}

/// LP (3) of the independent scheme: the s-signature program without the
/// realizability constraints.
pub(crate) fn s_signature_base(n: usize, q: &[f64], xi: &[f64], rho: &[f64]) -> LinearProgram {
    let m = q.len();
    let nf = n as f64;
    let (xv, yv) = (|j: usize| j, |j: usize| m + j);
    let mut prog = LinearProgram::new(2 * m);
    for j in 0..m {
        prog.set_objective(xv(j), nf * xi[j]);
        if n > 1 {
            prog.add_constraint(vec![(xv(j), 1.0), (yv(j), nf - 1.0)], Relation::Eq, q[j]);
        } else {
            prog.add_constraint(vec![(xv(j), 1.0)], Relation::Eq, q[j]);
        }
    }
    prog.add_constraint((0..m).map(|j| (xv(j), 1.0)).collect(), Relation::Eq, 1.0 / nf);
    prog.add_constraint((0..m).map(|j| (yv(j), 1.0)).collect(), Relation::Eq, 1.0 / nf);
    let ic: Vec<(usize, f64)> = (0..m)
        .flat_map(|j| [(xv(j), rho[j]), (yv(j), -rho[j])])
        .filter(|&(_, c)| c != 0.0)
        .collect();
    prog.add_constraint(ic, Relation::Ge, 0.0);
    prog
}

/// A single-item allocation rule over `n` bidders with i.i.d. types.
/// Profile `p` (in odometer order) maps to `n + 1` probabilities; the last
/// is "no winner".
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationRule {
    n: usize,
    m: usize,
    alloc: Vec<Vec<f64>>,
}

impl AllocationRule {
    pub fn new(n: usize, m: usize, alloc: Vec<Vec<f64>>) -> Result<Self> {
        let profiles = profile_count(&vec![m; n], usize::MAX)?;
        if alloc.len() != profiles {
            return Err(Error::DimensionMismatch {
                axis: "allocation profiles",
                expected: profiles,
                found: alloc.len(),
            });
        }
        for (p, row) in alloc.iter().enumerate() {
            if row.len() != n + 1 {
                return Err(Error::DimensionMismatch {
                    axis: "allocation outcomes",
                    expected: n + 1,
                    found: row.len(),
                });
            }
            let total: f64 = row.iter().sum();
            if abs(total - 1.0) > 1e-9 || row.iter().any(|v| *v < -1e-12) {
                return Err(Error::InvalidArgument(format!(
                    "allocation for profile {p} is not a distribution"
                )));
            }
        }
        Ok(Self { n, m, alloc })
    }

    /// Each profile's item goes to a uniformly random bidder.
    pub fn uniform(n: usize, m: usize) -> Self {
        let count = Profiles::uniform(n, m).count();
        let mut row = vec![1.0 / n as f64; n + 1];
        row[n] = 0.0;
        Self {
            n,
            m,
            alloc: vec![row; count],
        }
    }

    pub fn bidders(&self) -> usize {
        self.n
    }

    pub fn types(&self) -> usize {
        self.m
    }

    pub fn outcome(&self, profile: &[usize]) -> &[f64] {
        &self.alloc[profile_index(&vec![self.m; self.n], profile)]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.alloc
    }

    /// `tau[i][j] = Pr[bidder i wins | theta_i = j]`, by exhaustive
    /// expectation over profiles.
    pub fn reduced_forms(&self, q: &[f64]) -> Vec<Vec<f64>> {
        let mut win = vec![vec![0.0; self.m]; self.n];
        for (p, theta) in Profiles::uniform(self.n, self.m).enumerate() {
            let prob: f64 = theta.iter().map(|&t| q[t]).product();
            for i in 0..self.n {
                win[i][theta[i]] += prob * self.alloc[p][i];
            }
        }
        for row in &mut win {
            for j in 0..self.m {
                row[j] /= q[j];
            }
        }
        win
    }

    /// Largest gap between any bidder's reduced form and `tau`.
    pub fn reduced_form_error(&self, tau: &ReducedForm, q: &[f64]) -> f64 {
        self.reduced_forms(q)
            .iter()
            .flat_map(|row| row.iter().zip(&tau.tau).map(|(a, b)| abs(a - b)))
            .fold(0.0, f64::max)
    }
}

/// Finds an allocation rule whose reduced form is `tau` for every bidder,
/// as a feasibility LP over all `m^n` profiles.
pub fn decompose_reduced_form(tau: &ReducedForm, q: &[f64], n: usize) -> Result<AllocationRule> {
    decompose_reduced_form_capped(tau, q, n, DECOMPOSE_CAP)
}

pub fn decompose_reduced_form_capped(tau: &ReducedForm, q: &[f64], n: usize, cap: usize) -> Result<AllocationRule> {
    let check = border_feasible(tau, q, n)?;
    if let Some(set) = check.violating_set {
        return Err(Error::InfeasibleReducedForm {
            set,
            excess: check.excess,
        });
    }
    let m = q.len();
    let profiles: Vec<Vec<usize>> = {
        profile_count(&vec![m; n], cap)?;
        Profiles::uniform(n, m).collect()
    };
    let var = |p: usize, i: usize| p * n + i;
    let mut prog = LinearProgram::new(profiles.len() * n);
    // Prefer allocating the item; ties among feasible rules do not matter.
    for v in 0..profiles.len() * n {
        prog.set_objective(v, 1.0);
        prog.set_bounds(v, 0.0, 1.0);
    }
    for p in 0..profiles.len() {
        prog.add_constraint((0..n).map(|i| (var(p, i), 1.0)).collect(), Relation::Le, 1.0);
    }
    for i in 0..n {
        for j in 0..m {
            let coeffs = profiles
                .iter()
                .enumerate()
                .filter(|(_, th)| th[i] == j)
                .map(|(p, th)| (var(p, i), th.iter().map(|&t| q[t]).product::<f64>()))
                .collect();
            prog.add_constraint(coeffs, Relation::Eq, q[j] * tau.tau[j]);
        }
    }
    let (_, point) = lp::solve(&prog)?.into_optimal("reduced-form decomposition LP")?;
    let alloc = (0..profiles.len())
        .map(|p| {
            let mut row: Vec<f64> = (0..n).map(|i| point[var(p, i)].clamp(0.0, 1.0)).collect();
            let given: f64 = row.iter().sum();
            if given > 1.0 {
                row.iter_mut().for_each(|v| *v /= given);
                row.push(0.0);
            } else {
                row.push(1.0 - given);
            }
            row
        })
        .collect();
    let rule = AllocationRule { n, m, alloc };
    let err = rule.reduced_form_error(tau, q);
    if err > 1e-8 {
        return Err(Error::ReducedFormMismatch { max_error: err });
    }
    Ok(rule)
}

/// The symmetric scheme built from an allocation rule: relabel the actions
/// by a uniform permutation, run the rule, recommend the winner.
#[derive(Debug, Clone, PartialEq)]
pub struct IidScheme {
    rule: AllocationRule,
    ssig: SSignature,
}

/// Pairs an s-signature with a rule realizing it.
pub fn scheme_from_allocation(instance: &IidInstance, ssig: &SSignature, rule: &AllocationRule) -> Result<IidScheme> {
    let n = instance.actions();
    if rule.bidders() != n || rule.types() != instance.types() {
        return Err(Error::DimensionMismatch {
            axis: "allocation rule shape",
            expected: n * instance.types(),
            found: rule.bidders() * rule.types(),
        });
    }
    // Only live types carry a reduced form; dead types never occur.
    let q = instance.q();
    let forms = rule.reduced_forms_live(q);
    let mut err: f64 = 0.0;
    for row in &forms {
        for j in (0..q.len()).filter(|&j| q[j] > 0.0) {
            err = err.max(abs(row[j] - ssig.x[j] / q[j]));
        }
    }
    if err > 1e-6 {
        return Err(Error::ReducedFormMismatch { max_error: err });
    }
    Ok(IidScheme {
        rule: rule.clone(),
        ssig: ssig.clone(),
    })
}

impl AllocationRule {
    /// Like [`AllocationRule::reduced_forms`] but leaves zero-probability
    /// types at 0 instead of dividing by zero.
    fn reduced_forms_live(&self, q: &[f64]) -> Vec<Vec<f64>> {
        let safe: Vec<f64> = q.iter().map(|v| if *v > 0.0 { *v } else { 1.0 }).collect();
        let mut win = vec![vec![0.0; self.m]; self.n];
        for (p, theta) in Profiles::uniform(self.n, self.m).enumerate() {
            let prob: f64 = theta.iter().map(|&t| q[t]).product();
            for i in 0..self.n {
                win[i][theta[i]] += prob * self.alloc[p][i];
            }
        }
        for row in &mut win {
            for j in 0..self.m {
                row[j] /= safe[j];
            }
        }
        win
    }
}

impl IidScheme {
    pub fn s_signature(&self) -> &SSignature {
        &self.ssig
    }

    pub fn rule(&self) -> &AllocationRule {
        &self.rule
    }

    /// Recommends an action for type profile `theta`.
    pub fn sample<R: Rng + ?Sized>(&self, theta: &[usize], rng: &mut R) -> usize {
        let n = self.rule.bidders();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        let relabeled: Vec<usize> = perm.iter().map(|&p| theta[p]).collect();
        let winner = sample_index(self.rule.outcome(&relabeled), rng);
        if winner == n {
            // no winner: any action, uniformly
            perm[rng.gen_range(0..n)]
        } else {
            perm[winner]
        }
    }

    /// The exact direct scheme over the profile states of
    /// [`expand_product`], averaging over all `n!` relabelings.
    pub fn to_direct(&self) -> Result<DirectScheme> {
        let n = self.rule.bidders();
        if n > SYMMETRIZE_MAX_ACTIONS + 2 {
            return Err(Error::TooLarge {
                what: "permutations to average",
                size: n as u128,
                cap: (SYMMETRIZE_MAX_ACTIONS + 2) as u128,
            });
        }
        let m = self.rule.types();
        let perms = permutations(n);
        let w = 1.0 / perms.len() as f64;
        let rows = Profiles::uniform(n, m)
            .map(|theta| {
                let mut row = vec![0.0; n];
                for perm in &perms {
                    let relabeled: Vec<usize> = perm.iter().map(|&p| theta[p]).collect();
                    let out = self.rule.outcome(&relabeled);
                    for a in 0..n {
                        row[perm[a]] += w * (out[a] + out[n] / n as f64);
                    }
                }
                row
            })
            .collect();
        DirectScheme::new(rows)
    }
}

/// Solves for the optimal s-signature and builds a scheme realizing it.
pub fn solve_iid(instance: &IidInstance) -> Result<(IidScheme, f64)> {
    let (ssig, value) = solve_s_signature(instance)?;
    let live: Vec<usize> = (0..instance.types()).filter(|&j| instance.q()[j] > 0.0).collect();
    let q_live: Vec<f64> = live.iter().map(|&j| instance.q()[j]).collect();
    let tau_live = ReducedForm {
        tau: live.iter().map(|&j| (ssig.x[j] / instance.q()[j]).clamp(0.0, 1.0)).collect(),
    };
    let n = instance.actions();
    let small = decompose_reduced_form(&tau_live, &q_live, n)?;
    // lift back to the full type set; profiles with a dead type get a
    // uniform winner (they have probability zero)
    let m = instance.types();
    let alloc = Profiles::uniform(n, m)
        .map(|theta| {
            if theta.iter().all(|t| instance.q()[*t] > 0.0) {
                let mapped: Vec<usize> = theta
                    .iter()
                    .map(|t| live.iter().position(|l| l == t).unwrap())
                    .collect();
                small.outcome(&mapped).to_vec()
            } else {
                let mut row = vec![1.0 / n as f64; n + 1];
                row[n] = 0.0;
                row
            }
        })
        .collect();
    let rule = AllocationRule { n, m, alloc };
    let scheme = scheme_from_allocation(instance, &ssig, &rule)?;
    Ok((scheme, value))
}

/// Joint probabilities `M[sigma][action][type]` of a scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct Signature {
    pub matrices: Vec<Vec<Vec<f64>>>,
}

impl Signature {
    pub fn signals(&self) -> usize {
        self.matrices.len()
    }

    /// Probability of each signal (row sum of its matrix).
    pub fn signal_probs(&self) -> Vec<f64> {
        self.matrices.iter().map(|m| m[0].iter().sum()).collect()
    }

    /// Reads off `(x, y)` by averaging the recommended rows and the other
    /// rows respectively.
    pub fn s_signature(&self) -> SSignature {
        let n = self.signals();
        let m = self.matrices[0][0].len();
        let mut x = vec![0.0; m];
        let mut y = vec![0.0; m];
        for (i, mat) in self.matrices.iter().enumerate() {
            for (j, row) in mat.iter().enumerate() {
                for k in 0..m {
                    if i == j {
                        x[k] += row[k] / n as f64;
                    } else {
                        y[k] += row[k] / (n * (n - 1)) as f64;
                    }
                }
            }
        }
        SSignature { x, y }
    }

    /// Largest deviation from the symmetric pattern `M^i_i = x`,
    /// `M^i_j = y` for `j != i`.
    pub fn symmetry_defect(&self) -> f64 {
        let s = self.s_signature();
        let mut worst: f64 = 0.0;
        for (i, mat) in self.matrices.iter().enumerate() {
            for (j, row) in mat.iter().enumerate() {
                let target = if i == j { &s.x } else { &s.y };
                worst = worst.max(crate::num::max_abs_diff(row, target));
            }
        }
        worst
    }
}

/// Signature of a scheme given over the profile states of the expansion.
pub fn signature_of(instance: &IidInstance, scheme: &DirectScheme) -> Result<Signature> {
    let n = instance.actions();
    let m = instance.types();
    let radices = instance.radices();
    let count = profile_count(&radices, crate::profile::DEFAULT_STATE_CAP)?;
    if scheme.states() != count || scheme.signals() != n {
        return Err(Error::DimensionMismatch {
            axis: "scheme states",
            expected: count,
            found: scheme.states(),
        });
    }
    let mut mats = vec![vec![vec![0.0; m]; n]; n];
    for (p, theta) in Profiles::new(&radices).enumerate() {
        let prob: f64 = theta.iter().map(|&t| instance.q()[t]).product();
        for i in 0..n {
            let w = prob * scheme.get(p, i);
            if w == 0.0 {
                continue;
            }
            for (j, &t) in theta.iter().enumerate() {
                mats[i][j][t] += w;
            }
        }
    }
    Ok(Signature { matrices: mats })
}

/// Averages a scheme over all `n!` relabelings of the actions, giving a
/// symmetric scheme with the same sender utility that is IC whenever the
/// input is.
pub fn symmetrize(instance: &IidInstance, scheme: &DirectScheme) -> Result<DirectScheme> {
    let n = instance.actions();
    if n > SYMMETRIZE_MAX_ACTIONS {
        return Err(Error::TooLarge {
            what: "actions for explicit symmetrization (use SymmetrizedSampler)",
            size: n as u128,
            cap: SYMMETRIZE_MAX_ACTIONS as u128,
        });
    }
    let expanded = expand_product(instance)?;
    if scheme.states() != expanded.state_count() || scheme.signals() != n {
        return Err(Error::DimensionMismatch {
            axis: "scheme states",
            expected: expanded.state_count(),
            found: scheme.states(),
        });
    }
    let radices = instance.radices();
    let perms = permutations(n);
    let w = 1.0 / perms.len() as f64;
    let rows = Profiles::new(&radices)
        .map(|theta| {
            let mut row = vec![0.0; n];
            for perm in &perms {
                let pre: Vec<usize> = perm.iter().map(|&p| theta[p]).collect();
                let src = scheme.row(profile_index(&radices, &pre));
                for i in 0..n {
                    row[perm[i]] += w * src[i];
                }
            }
            row
        })
        .collect();
    DirectScheme::new(rows)
}

/// Sampling form of [`symmetrize`] for any `n`: draw a relabeling, apply
/// the scheme to the relabeled profile, map the signal back.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrizedSampler {
    scheme: DirectScheme,
    radices: Vec<usize>,
}

impl SymmetrizedSampler {
    pub fn new(instance: &IidInstance, scheme: DirectScheme) -> Result<Self> {
        let radices = instance.radices();
        let count = profile_count(&radices, crate::profile::DEFAULT_STATE_CAP)?;
        if scheme.states() != count || scheme.signals() != instance.actions() {
            return Err(Error::DimensionMismatch {
                axis: "scheme states",
                expected: count,
                found: scheme.states(),
            });
        }
        Ok(Self { scheme, radices })
    }

    pub fn sample<R: Rng + ?Sized>(&self, theta: &[usize], rng: &mut R) -> usize {
        let mut perm: Vec<usize> = (0..theta.len()).collect();
        perm.shuffle(rng);
        let pre: Vec<usize> = perm.iter().map(|&p| theta[p]).collect();
        let i = self.scheme.sample(profile_index(&self.radices, &pre), rng);
        perm[i]
    }
}
