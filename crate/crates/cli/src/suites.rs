//! Oracle-equivalence suites run by `persuade verify`.

use persuasion_core::approx::solve_independent;
use persuasion_core::exact::{expand_product, solve_exact};
use persuasion_core::fixtures::{random_explicit, random_iid};
use persuasion_core::iid::{
    border_feasible, decompose_reduced_form, signature_of, solve_iid, solve_s_signature, symmetrize, AllocationRule,
    ReducedForm,
};
use persuasion_core::khintchine::{khintchine_constant, realizable_two_signal, solve_khintchine_lp, TwoSignalSignature};
use persuasion_core::verify::{allocation_exists, concavification_value, realizability_check, realizable_by_mixture};
use persuasion_core::{audit, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Small,
    Full,
}

impl Suite {
    fn cases(self) -> usize {
        match self {
            Suite::Small => 20,
            Suite::Full => 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Worst observed discrepancy, where that makes sense.
    pub worst: f64,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

struct Tally {
    cases: usize,
    failures: usize,
    worst: f64,
}

impl Tally {
    fn new() -> Self {
        Self { cases: 0, failures: 0, worst: 0.0 }
    }

    fn check(&mut self, ok: bool) {
        self.cases += 1;
        self.failures += (!ok) as usize;
    }

    fn gap(&mut self, diff: f64, tol: f64) {
        self.worst = self.worst.max(diff);
        self.check(diff <= tol);
    }

    fn done(self, name: &'static str) -> SuiteResult {
        SuiteResult { name, cases: self.cases, failures: self.failures, worst: self.worst }
    }
}

/// s-signature LP against the explicit LP on the expansion.
fn iid_vs_exact(rng: &mut ChaCha8Rng, cases: usize) -> Result<SuiteResult> {
    let mut t = Tally::new();
    for _ in 0..cases {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(1..=3);
        let inst = random_iid(rng, n, m, false);
        let (_, v) = solve_s_signature(&inst)?;
        let e = solve_exact(&expand_product(&inst)?, 0.0)?.value;
        t.gap((v - e).abs(), 1e-6);
    }
    Ok(t.done("iid s-signature = explicit optimum"))
}

fn border_vs_flow(rng: &mut ChaCha8Rng, cases: usize) -> Result<SuiteResult> {
    let mut t = Tally::new();
    for _ in 0..cases {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(1..=3);
        let q = random_iid(rng, n, m, true).q().to_vec();
        let tau = ReducedForm { tau: (0..m).map(|_| rng.gen_range(0.0..(2.0 / n as f64).min(1.0))).collect() };
        t.check(border_feasible(&tau, &q, n)?.feasible == allocation_exists(&tau, &q, n)?);
    }
    Ok(t.done("Border check = max-flow oracle"))
}

fn decomposition(rng: &mut ChaCha8Rng, cases: usize) -> Result<SuiteResult> {
    let mut t = Tally::new();
    for _ in 0..cases {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(1..=3);
        let q = random_iid(rng, n, m, true).q().to_vec();
        let rows = (0..m.pow(n as u32))
            .map(|_| {
                let w: Vec<f64> = (0..=n).map(|_| rng.gen_range(0.0..1.0)).collect();
                let s: f64 = w.iter().sum();
                w.iter().map(|v| v / s).collect()
            })
            .collect();
        let forms = AllocationRule::new(n, m, rows)?.reduced_forms(&q);
        let tau = ReducedForm { tau: (0..m).map(|j| forms.iter().map(|f| f[j]).sum::<f64>() / n as f64).collect() };
        t.gap(decompose_reduced_form(&tau, &q, n)?.reduced_form_error(&tau, &q), 1e-8);
    }
    Ok(t.done("decomposition reproduces reduced form"))
}

fn khintchine(rng: &mut ChaCha8Rng, cases: usize) -> Result<SuiteResult> {
    let mut t = Tally::new();
    for _ in 0..cases {
        let n = rng.gen_range(1..=8);
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        t.gap((solve_khintchine_lp(&a)?.value - khintchine_constant(&a)?).abs(), 1e-6);
    }
    Ok(t.done("Khintchine LP = brute force"))
}

fn two_signal(rng: &mut ChaCha8Rng, cases: usize) -> Result<SuiteResult> {
    let mut t = Tally::new();
    for _ in 0..cases {
        let n = rng.gen_range(1..=3);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..0.5)).collect();
        let sig = TwoSignalSignature::from_plus_mass(&x);
        t.check(realizable_two_signal(&sig)? == realizable_by_mixture(&sig)?);
    }
    Ok(t.done("two-signal realizability = mixture search"))
}

fn concavification(rng: &mut ChaCha8Rng, cases: usize) -> Result<SuiteResult> {
    let mut t = Tally::new();
    for c in 0..cases {
        let n = rng.gen_range(1..=3);
        let inst = random_explicit(rng, n, 1 + c % 3);
        let a = concavification_value(&inst)?;
        let b = solve_exact(&inst, 0.0)?.value;
        t.gap((a - b).abs(), 1e-6);
    }
    Ok(t.done("concavification = explicit optimum"))
}

fn realizability(rng: &mut ChaCha8Rng, cases: usize) -> Result<SuiteResult> {
    let mut t = Tally::new();
    for _ in 0..cases {
        let n = rng.gen_range(1..=3);
        let m = rng.gen_range(1..=3);
        let inst = random_iid(rng, n, m, true);
        let explicit = expand_product(&inst)?;
        let schemes = [
            solve_exact(&explicit, 0.0)?.scheme,
            solve_iid(&inst)?.0.to_direct()?,
            solve_independent(&inst)?.0.to_direct()?,
        ];
        for phi in &schemes {
            t.check(realizability_check(&signature_of(&inst, phi)?, &inst)?);
        }
    }
    Ok(t.done("solver schemes are realizable"))
}

fn symmetrization(rng: &mut ChaCha8Rng, cases: usize) -> Result<SuiteResult> {
    let mut t = Tally::new();
    for _ in 0..cases {
        let n = rng.gen_range(2..=4);
        let m = rng.gen_range(1..=3);
        let inst = random_iid(rng, n, m, false);
        let explicit = expand_product(&inst)?;
        let phi = solve_exact(&explicit, 0.0)?.scheme;
        let sym = symmetrize(&inst, &phi)?;
        let du = (audit(&explicit, &phi)?.sender_utility - audit(&explicit, &sym)?.sender_utility).abs();
        let defect = signature_of(&inst, &sym)?.symmetry_defect();
        t.gap(du.max(defect), 1e-9);
    }
    Ok(t.done("symmetrization keeps utility"))
}

type SuiteFn = fn(&mut ChaCha8Rng, usize) -> Result<SuiteResult>;

/// Runs every suite; each gets its own stream derived from `seed`.
pub fn run_all(suite: Suite, seed: u64) -> Result<Vec<SuiteResult>> {
    let all: [SuiteFn; 8] = [
        iid_vs_exact,
        border_vs_flow,
        decomposition,
        khintchine,
        two_signal,
        concavification,
        realizability,
        symmetrization,
    ];
    let cases = suite.cases();
    all.iter()
        .enumerate()
        .map(|(k, f)| f(&mut ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64)), cases))
        .collect()
}
