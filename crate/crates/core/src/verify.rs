//! Independent oracles for cross-checking the solvers, and a Monte-Carlo
//! evaluator for samplers.
//!
//! Nothing here reuses the solver code paths it checks: realizability is a
//! feasibility LP over the full scheme, reduced-form feasibility is a
//! max-flow, and small instances are solved by concavification.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;

use crate::blackbox::{Sample, SampleOracle};
use crate::exact::ProductPrior;
use crate::iid::{ReducedForm, Signature};
use crate::khintchine::TwoSignalSignature;
use crate::lp::{self, LinearProgram, LpStatus, Relation};
use crate::model::{best_response, sample_index, ExplicitInstance, IidInstance, IndependentInstance};
use crate::num::{abs, sqrt};
use crate::profile::{profile_count, Profiles};
use crate::{Error, Result, TIE_TOL};

/// Largest LP (scheme entries) the realizability oracle will build.
pub const REALIZABILITY_CAP: usize = 8192;
/// Per-entry tolerance when matching a signature.
pub const REALIZABILITY_TOL: f64 = 1e-9;
/// Grid resolution of the posterior simplex in [`concavification_value`].
pub const CONCAV_GRID: usize = 512;

/// Whether some scheme over the product prior has exactly this signature
/// (entrywise within [`REALIZABILITY_TOL`]).
///
/// Variables are `phi(theta, sigma)` for every profile; rows force each
/// state's signal distribution to sum to one and each
/// `M[sigma][j][t] = sum_{theta_j = t} lambda(theta) phi(theta, sigma)`.
pub fn realizability_check<P: ProductPrior + ?Sized>(sig: &Signature, prior: &P) -> Result<bool> {
    let n = prior.action_count();
    let radices = prior.radices();
    let signals = sig.signals();
    if signals == 0 {
        return Err(Error::InvalidArgument("signature has no signals".into()));
    }
    for mat in &sig.matrices {
        if mat.len() != n {
            return Err(Error::DimensionMismatch {
                axis: "signature actions",
                expected: n,
                found: mat.len(),
            });
        }
        for (j, row) in mat.iter().enumerate() {
            if row.len() != radices[j] {
                return Err(Error::DimensionMismatch {
                    axis: "signature types",
                    expected: radices[j],
                    found: row.len(),
                });
            }
        }
    }
    let count = profile_count(&radices, REALIZABILITY_CAP)?;
    if count * signals > REALIZABILITY_CAP {
        return Err(Error::TooLarge {
            what: "realizability LP variables",
            size: (count * signals) as u128,
            cap: REALIZABILITY_CAP as u128,
        });
    }
    let profiles: Vec<Vec<usize>> = Profiles::new(&radices).collect();
    let probs: Vec<f64> = profiles
        .iter()
        .map(|th| th.iter().enumerate().map(|(j, &t)| prior.marginal(j).0[t]).product())
        .collect();
    let var = |p: usize, s: usize| p * signals + s;
    let mut prog = LinearProgram::new(count * signals);
    for p in 0..count {
        prog.add_constraint((0..signals).map(|s| (var(p, s), 1.0)).collect(), Relation::Eq, 1.0);
    }
    for s in 0..signals {
        for j in 0..n {
            for t in 0..radices[j] {
                let coeffs: Vec<(usize, f64)> = (0..count)
                    .filter(|&p| profiles[p][j] == t && probs[p] > 0.0)
                    .map(|p| (var(p, s), probs[p]))
                    .collect();
                let target = sig.matrices[s][j][t];
                prog.add_constraint(coeffs.clone(), Relation::Le, target + REALIZABILITY_TOL);
                prog.add_constraint(coeffs, Relation::Ge, target - REALIZABILITY_TOL);
            }
        }
    }
    feasible(&prog, "realizability LP")
}

fn feasible(prog: &LinearProgram, context: &'static str) -> Result<bool> {
    match lp::solve(prog)?.status {
        LpStatus::Optimal => Ok(true),
        LpStatus::Infeasible => Ok(false),
        s => Err(Error::lp(s, context)),
    }
}

/// The uniform `{-1, +1}` prior the two-signal signatures live on, with
/// type 0 for `-1` and type 1 for `+1`.
fn sign_prior(n: usize) -> Result<IidInstance> {
    IidInstance::new(n, vec![0.5, 0.5], vec![0.0; 2], vec![0.0; 2])
}

/// [`realizability_check`] for a two-signal signature on uniform signs.
pub fn realizability_check_two_signal(sig: &TwoSignalSignature) -> Result<bool> {
    let n = sig.actions();
    if sig.m_minus.len() != n {
        return Err(Error::DimensionMismatch {
            axis: "M- rows",
            expected: n,
            found: sig.m_minus.len(),
        });
    }
    let full = Signature {
        matrices: vec![
            sig.m_plus.iter().map(|r| r.to_vec()).collect(),
            sig.m_minus.iter().map(|r| r.to_vec()).collect(),
        ],
    };
    realizability_check(&full, &sign_prior(n)?)
}

/// Largest `n` for [`realizable_by_mixture`]: `2^(2^n)` deterministic schemes.
pub const MIXTURE_MAX: usize = 3;

/// Realizability of a two-signal signature decided by brute force: list
/// every deterministic two-signal scheme, compute its signature, and ask an
/// LP whether the target is a convex combination of them.
pub fn realizable_by_mixture(sig: &TwoSignalSignature) -> Result<bool> {
    let n = sig.actions();
    if n > MIXTURE_MAX {
        return Err(Error::TooLarge {
            what: "actions for exhaustive two-signal search",
            size: n as u128,
            cap: MIXTURE_MAX as u128,
        });
    }
    let states = 1usize << n;
    let w = 1.0 / states as f64;
    let schemes = 1usize << states;
    // entry (s, i, t) of the signature of deterministic scheme `d`, where
    // bit `code` of `d` set means state `code` sends `+`
    let entry = |d: usize, plus: bool, i: usize, t: usize| -> f64 {
        (0..states)
            .filter(|&c| (c >> i & 1) == t && ((d >> c & 1) == 1) == plus)
            .count() as f64
            * w
    };
    let mut prog = LinearProgram::new(schemes);
    prog.add_constraint((0..schemes).map(|d| (d, 1.0)).collect(), Relation::Eq, 1.0);
    for (plus, mats) in [(true, &sig.m_plus), (false, &sig.m_minus)] {
        for i in 0..n {
            for t in 0..2 {
                let coeffs: Vec<(usize, f64)> = (0..schemes)
                    .map(|d| (d, entry(d, plus, i, t)))
                    .filter(|&(_, c)| c != 0.0)
                    .collect();
                prog.add_constraint(coeffs.clone(), Relation::Le, mats[i][t] + REALIZABILITY_TOL);
                prog.add_constraint(coeffs, Relation::Ge, mats[i][t] - REALIZABILITY_TOL);
            }
        }
    }
    feasible(&prog, "two-signal mixture LP")
}

/// Whether some allocation rule over `n` i.i.d. bidders with type
/// distribution `q` has symmetric reduced form `tau`.
///
/// Solved as a max-flow: the source feeds each profile its probability,
/// each profile passes flow to any (bidder, own type) node, and node
/// `(i, t)` drains at most `q_t tau_t` to the sink. The reduced form is
/// feasible iff the flow saturates every drain.
pub fn allocation_exists(tau: &ReducedForm, q: &[f64], n: usize) -> Result<bool> {
    let m = q.len();
    if tau.tau.len() != m {
        return Err(Error::DimensionMismatch {
            axis: "reduced form types",
            expected: m,
            found: tau.tau.len(),
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one bidder".into()));
    }
    if (0..m).any(|t| q[t] > 0.0 && !(tau.tau[t] >= -TIE_TOL && tau.tau[t] <= 1.0 + TIE_TOL)) {
        return Ok(false);
    }
    let count = profile_count(&vec![m; n], crate::iid::DECOMPOSE_CAP)?;
    let source = 0;
    let sink = 1;
    let profile_node = |p: usize| 2 + p;
    let type_node = |i: usize, t: usize| 2 + count + i * m + t;
    let mut net = FlowNetwork::new(2 + count + n * m);
    for (p, theta) in Profiles::uniform(n, m).enumerate() {
        let prob: f64 = theta.iter().map(|&t| q[t]).product();
        if prob <= 0.0 {
            continue;
        }
        net.add_edge(source, profile_node(p), prob);
        for (i, &t) in theta.iter().enumerate() {
            net.add_edge(profile_node(p), type_node(i, t), f64::INFINITY);
        }
    }
    let mut demand = 0.0;
    for i in 0..n {
        for t in 0..m {
            let d = q[t] * tau.tau[t].max(0.0);
            if d > 0.0 {
                net.add_edge(type_node(i, t), sink, d);
                demand += d;
            }
        }
    }
    Ok(net.max_flow(source, sink) >= demand - TIE_TOL)
}

struct Edge {
    to: usize,
    cap: f64,
}

/// Edmonds-Karp on an edge list; edge `e ^ 1` is the reverse of `e`.
struct FlowNetwork {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    const EPS: f64 = 1e-15;

    fn new(nodes: usize) -> Self {
        Self {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: f64) {
        self.adj[from].push(self.edges.len());
        self.edges.push(Edge { to, cap });
        self.adj[to].push(self.edges.len());
        self.edges.push(Edge { to: from, cap: 0.0 });
    }

    fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut total = 0.0;
        loop {
            let mut via = vec![usize::MAX; self.adj.len()];
            let mut queue = alloc::collections::VecDeque::new();
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for &e in &self.adj[u] {
                    let v = self.edges[e].to;
                    if v != s && via[v] == usize::MAX && self.edges[e].cap > Self::EPS {
                        via[v] = e;
                        queue.push_back(v);
                    }
                }
            }
            if via[t] == usize::MAX {
                return total;
            }
            let mut push = f64::INFINITY;
            let mut v = t;
            while v != s {
                let e = via[v];
                push = push.min(self.edges[e].cap);
                v = self.edges[e ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let e = via[v];
                self.edges[e].cap -= push;
                self.edges[e ^ 1].cap += push;
                v = self.edges[e ^ 1].to;
            }
            total += push;
        }
    }
}

/// Sender payoff at a posterior over the instance's states, with the
/// receiver best-responding and breaking ties toward the sender.
fn payoff_at(instance: &ExplicitInstance, post: &[f64]) -> Result<f64> {
    let n = instance.actions();
    let mut r = vec![0.0; n];
    let mut s = vec![0.0; n];
    for (st, &p) in instance.states().iter().zip(post) {
        for i in 0..n {
            r[i] += p * st.receiver[i];
            s[i] += p * st.sender[i];
        }
    }
    Ok(s[best_response(&r, &s)?])
}

/// Optimal sender value by concavification, for at most three states.
///
/// The payoff `v(p)` is piecewise linear on the cells cut out of the
/// posterior simplex by the receiver's indifference lines, so its concave
/// envelope is attained on cell vertices. Those are evaluated exactly,
/// together with a grid of resolution `1/512`, and the envelope at the
/// prior is read off the candidate set.
pub fn concavification_value(instance: &ExplicitInstance) -> Result<f64> {
    let k = instance.state_count();
    let prior: Vec<f64> = instance.states().iter().map(|s| s.prob).collect();
    match k {
        1 => payoff_at(instance, &prior),
        2 => concavify_two(instance, prior[1]),
        3 => concavify_three(instance, &prior),
        _ => Err(Error::TooLarge {
            what: "states for concavification",
            size: k as u128,
            cap: 3,
        }),
    }
}

/// Points along `p = (1 - t, t)`.
fn concavify_two(instance: &ExplicitInstance, t0: f64) -> Result<f64> {
    let n = instance.actions();
    let (a, b) = (&instance.states()[0], &instance.states()[1]);
    let mut ts: Vec<f64> = (0..=CONCAV_GRID).map(|g| g as f64 / CONCAV_GRID as f64).collect();
    for i in 0..n {
        for j in i + 1..n {
            // (1 - t) d0 + t d1 = 0
            let d0 = a.receiver[i] - a.receiver[j];
            let d1 = b.receiver[i] - b.receiver[j];
            if d0 != d1 {
                let t = d0 / (d0 - d1);
                if (0.0..=1.0).contains(&t) {
                    ts.push(t);
                }
            }
        }
    }
    ts.push(t0);
    let pts: Vec<(f64, f64)> = ts
        .iter()
        .map(|&t| Ok((t, payoff_at(instance, &[1.0 - t, t])?)))
        .collect::<Result<_>>()?;
    let mut best = f64::NEG_INFINITY;
    for &(tl, vl) in &pts {
        if tl > t0 {
            continue;
        }
        for &(tr, vr) in &pts {
            if tr < t0 {
                continue;
            }
            let v = if tr - tl <= 0.0 {
                vl.max(vr)
            } else {
                vl + (vr - vl) * (t0 - tl) / (tr - tl)
            };
            best = best.max(v);
        }
    }
    Ok(best)
}

fn concavify_three(instance: &ExplicitInstance, prior: &[f64]) -> Result<f64> {
    let n = instance.actions();
    let st = instance.states();
    let g = CONCAV_GRID;
    let mut pts: Vec<[f64; 3]> = Vec::new();
    for a in 0..=g {
        for b in 0..=g - a {
            let c = g - a - b;
            pts.push([a as f64 / g as f64, b as f64 / g as f64, c as f64 / g as f64]);
        }
    }
    // Indifference lines d . p = 0 and the simplex edges p_k = 0.
    let mut lines: Vec<[f64; 3]> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let d = [
                st[0].receiver[i] - st[0].receiver[j],
                st[1].receiver[i] - st[1].receiver[j],
                st[2].receiver[i] - st[2].receiver[j],
            ];
            if d.iter().any(|v| *v != 0.0) {
                lines.push(d);
            }
        }
    }
    for k in 0..3 {
        let mut e = [0.0; 3];
        e[k] = 1.0;
        lines.push(e);
    }
    for (x, l1) in lines.iter().enumerate() {
        for l2 in &lines[x + 1..] {
            // p is orthogonal to both lines and to nothing else: p ~ l1 x l2
            let c = [
                l1[1] * l2[2] - l1[2] * l2[1],
                l1[2] * l2[0] - l1[0] * l2[2],
                l1[0] * l2[1] - l1[1] * l2[0],
            ];
            let sum = c[0] + c[1] + c[2];
            if abs(sum) < 1e-14 {
                continue;
            }
            let p = [c[0] / sum, c[1] / sum, c[2] / sum];
            if p.iter().all(|v| *v >= -1e-12) {
                let p = p.map(|v| v.max(0.0));
                let s = p[0] + p[1] + p[2];
                pts.push(p.map(|v| v / s));
            }
        }
    }
    pts.push([prior[0], prior[1], prior[2]]);
    // Max sum w v(p) over weights with sum w p = prior.
    let mut prog = LinearProgram::new(pts.len());
    for (c, p) in pts.iter().enumerate() {
        prog.set_objective(c, payoff_at(instance, p)?);
    }
    prog.add_constraint((0..pts.len()).map(|c| (c, 1.0)).collect(), Relation::Eq, 1.0);
    for k in 0..2 {
        let coeffs = pts.iter().enumerate().map(|(c, p)| (c, p[k])).filter(|&(_, v)| v != 0.0).collect();
        prog.add_constraint(coeffs, Relation::Eq, prior[k]);
    }
    let (value, _) = lp::solve(&prog)?.into_optimal("concavification LP")?;
    Ok(value)
}

/// A prior that can be sampled and whose states carry payoff vectors.
pub trait Prior {
    type State;
    fn action_count(&self) -> usize;
    fn draw(&self, rng: &mut dyn RngCore) -> Result<Self::State>;
    fn sender(&self, state: &Self::State, action: usize) -> f64;
    fn receiver(&self, state: &Self::State, action: usize) -> f64;
}

impl Prior for ExplicitInstance {
    type State = usize;

    fn action_count(&self) -> usize {
        self.actions()
    }

    fn draw(&self, rng: &mut dyn RngCore) -> Result<usize> {
        let w: Vec<f64> = self.states().iter().map(|s| s.prob).collect();
        Ok(sample_index(&w, rng))
    }

    fn sender(&self, state: &usize, action: usize) -> f64 {
        self.states()[*state].sender[action]
    }

    fn receiver(&self, state: &usize, action: usize) -> f64 {
        self.states()[*state].receiver[action]
    }
}

impl Prior for IidInstance {
    type State = Vec<usize>;

    fn action_count(&self) -> usize {
        self.actions()
    }

    fn draw(&self, rng: &mut dyn RngCore) -> Result<Vec<usize>> {
        Ok((0..self.actions()).map(|_| sample_index(self.q(), rng)).collect())
    }

    fn sender(&self, theta: &Vec<usize>, action: usize) -> f64 {
        self.xi()[theta[action]]
    }

    fn receiver(&self, theta: &Vec<usize>, action: usize) -> f64 {
        self.rho()[theta[action]]
    }
}

impl Prior for IndependentInstance {
    type State = Vec<usize>;

    fn action_count(&self) -> usize {
        self.actions()
    }

    fn draw(&self, rng: &mut dyn RngCore) -> Result<Vec<usize>> {
        Ok(self.marginals().iter().map(|m| sample_index(&m.q, rng)).collect())
    }

    fn sender(&self, theta: &Vec<usize>, action: usize) -> f64 {
        self.marginals()[action].xi[theta[action]]
    }

    fn receiver(&self, theta: &Vec<usize>, action: usize) -> f64 {
        self.marginals()[action].rho[theta[action]]
    }
}

/// A sampling oracle viewed as a prior whose states are payoff samples.
#[derive(Debug, Clone)]
pub struct OraclePrior<O>(pub O);

impl<O: SampleOracle> Prior for OraclePrior<O> {
    type State = Sample;

    fn action_count(&self) -> usize {
        self.0.action_count()
    }

    fn draw(&self, rng: &mut dyn RngCore) -> Result<Sample> {
        self.0.draw(rng)
    }

    fn sender(&self, s: &Sample, action: usize) -> f64 {
        s.sender[action]
    }

    fn receiver(&self, s: &Sample, action: usize) -> f64 {
        s.receiver[action]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    /// Slack the receiver grants a recommendation, per unit of signal
    /// probability.
    pub epsilon: f64,
    /// Width of the statistical band, in standard errors.
    pub z: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { epsilon: 0.0, z: 3.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub trials: usize,
    pub mean_sender_utility: f64,
    pub std_error: f64,
    /// `ic_slack[i][j]` estimates `E[1[sigma = i] (r_i - r_j)]`.
    pub ic_slack: Vec<Vec<f64>>,
    pub ic_slack_se: Vec<Vec<f64>>,
    pub signal_freq: Vec<f64>,
    /// Empirical `E[r | sigma]`, zeros for signals never sent.
    pub posterior_receiver: Vec<Vec<f64>>,
    /// The receiver's action on each signal.
    pub response: Vec<usize>,
    /// Fraction of trials where the receiver followed the recommendation.
    pub follow_rate: f64,
}

impl EvalReport {
    /// Every slack estimate is at least `-eps alpha_i - z se`.
    pub fn slack_within(&self, eps: f64, z: f64) -> bool {
        let n = self.ic_slack.len();
        (0..n).all(|i| {
            (0..n).all(|j| i == j || self.ic_slack[i][j] + z * self.ic_slack_se[i][j] + eps * self.signal_freq[i] >= -TIE_TOL)
        })
    }

    /// `|mean - target| <= z se`, with a floor for zero-variance runs.
    pub fn mean_within(&self, target: f64, z: f64) -> bool {
        abs(self.mean_sender_utility - target) <= z * self.std_error + 1e-12
    }
}

fn mean_se(sum: f64, sum_sq: f64, trials: usize) -> (f64, f64) {
    let t = trials as f64;
    let mean = sum / t;
    if trials < 2 {
        return (mean, 0.0);
    }
    let var = ((sum_sq / t - mean * mean) * t / (t - 1.0)).max(0.0);
    (mean, sqrt(var / t))
}

/// Simulates `trials` states, asks `signal` for a recommendation, and
/// estimates utilities and IC slacks.
///
/// The receiver follows signal `i` when every slack estimate clears
/// `-eps alpha_i - z se`, and otherwise best-responds to the empirical
/// posterior of that signal.
pub fn monte_carlo_eval<P, F, R>(prior: &P, mut signal: F, trials: usize, rng: &mut R, options: EvalOptions) -> Result<EvalReport>
where
    P: Prior + ?Sized,
    F: FnMut(&P::State, &mut dyn RngCore) -> Result<usize>,
    R: RngCore,
{
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let n = prior.action_count();
    let mut count = vec![0usize; n];
    let mut r_sum = vec![vec![0.0; n]; n];
    let mut s_sum = vec![vec![0.0; n]; n];
    let mut s_sq = vec![vec![0.0; n]; n];
    let mut d_sum = vec![vec![0.0; n]; n];
    let mut d_sq = vec![vec![0.0; n]; n];
    let mut r = vec![0.0; n];
    for _ in 0..trials {
        let state = prior.draw(rng)?;
        let sig = signal(&state, rng)?;
        if sig >= n {
            return Err(Error::Oracle(format!("signal {sig} is not an action")));
        }
        count[sig] += 1;
        for j in 0..n {
            r[j] = prior.receiver(&state, j);
            let s = prior.sender(&state, j);
            r_sum[sig][j] += r[j];
            s_sum[sig][j] += s;
            s_sq[sig][j] += s * s;
        }
        for j in 0..n {
            let d = r[sig] - r[j];
            d_sum[sig][j] += d;
            d_sq[sig][j] += d * d;
        }
    }
    let t = trials as f64;
    let mut ic_slack = vec![vec![0.0; n]; n];
    let mut ic_slack_se = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            // entries are zero off signal i, so the moments are over all trials
            let (m, se) = mean_se(d_sum[i][j], d_sq[i][j], trials);
            ic_slack[i][j] = m;
            ic_slack_se[i][j] = se;
        }
    }
    let signal_freq: Vec<f64> = count.iter().map(|&c| c as f64 / t).collect();
    let mut posterior_receiver = vec![vec![0.0; n]; n];
    let mut response = Vec::with_capacity(n);
    let mut followed = 0usize;
    let mut u_sum = 0.0;
    let mut u_sq = 0.0;
    for i in 0..n {
        let a = if count[i] == 0 {
            i
        } else {
            let c = count[i] as f64;
            posterior_receiver[i] = r_sum[i].iter().map(|v| v / c).collect();
            let follow = (0..n).all(|j| {
                j == i || ic_slack[i][j] + options.z * ic_slack_se[i][j] + options.epsilon * signal_freq[i] >= -TIE_TOL
            });
            if follow {
                i
            } else {
                let s_post: Vec<f64> = s_sum[i].iter().map(|v| v / c).collect();
                best_response(&posterior_receiver[i], &s_post)?
            }
        };
        if a == i {
            followed += count[i];
        }
        u_sum += s_sum[i][a];
        u_sq += s_sq[i][a];
        response.push(a);
    }
    let (mean_sender_utility, std_error) = mean_se(u_sum, u_sq, trials);
    Ok(EvalReport {
        trials,
        mean_sender_utility,
        std_error,
        ic_slack,
        ic_slack_se,
        signal_freq,
        posterior_receiver,
        response,
        follow_rate: followed as f64 / t,
    })
}
