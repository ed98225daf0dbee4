//! Argument parsing and the subcommands of `persuade`.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use persuasion_core::approx::{independent_signal, solve_independent, to_direct_recommendation, IndependentScheme};
use persuasion_core::blackbox::{resolve_sample_count, sample_count, BlackboxScheme, ExplicitOracle};
use persuasion_core::exact::{expand_product, solve_exact};
use persuasion_core::iid::{
    border_feasible, decompose_reduced_form, scheme_from_allocation, solve_iid, solve_s_signature, ReducedForm,
    SSignature,
};
use persuasion_core::khintchine::{khintchine_constant, solve_khintchine_lp};
use persuasion_core::verify::{monte_carlo_eval, EvalOptions, EvalReport, OraclePrior};
use persuasion_core::{audit, Error as CoreError, IidInstance, TIE_TOL};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{random_instance, Kind};
use crate::format::{load_instance, load_scheme, save_instance, save_scheme, IcReport, Instance, SSignatureRecord, SchemeFile};
use crate::suites::{run_all, Suite};

#[derive(Debug, Parser)]
#[command(name = "persuade", version, about = "Compute, sample, and check Bayesian persuasion signaling schemes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a scheme for an instance file.
    Solve(SolveArgs),
    /// Draw one signal for a realized state.
    Signal(SignalArgs),
    /// Run the sample-and-solve scheme with the instance as a black box.
    Blackbox(BlackboxArgs),
    /// Recompute a scheme file's value and IC slacks.
    Audit(AuditArgs),
    /// Khintchine constant of a coefficient vector.
    Khintchine(KhintchineArgs),
    /// Run the oracle-equivalence suites.
    Verify(VerifyArgs),
    /// Time the solvers on random instances.
    Bench(BenchArgs),
    /// Write a seeded random instance.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    IidOpt,
    IidApprox,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::IidOpt => "iid-opt",
            Method::IidApprox => "iid-approx",
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    pub method: Method,
    /// IC relaxation; only the exact method accepts a nonzero value.
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    /// Scheme file to write.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Seed for the Monte-Carlo value estimate used when a scheme is too
    /// large to evaluate exactly.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct SignalArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub scheme: PathBuf,
    /// State index for explicit instances, type profile otherwise.
    #[arg(long, value_delimiter = ',', required = true)]
    pub state: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BlackboxArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub epsilon: f64,
    /// Samples per signal; defaults to the guaranteed count.
    #[arg(long = "samples", short = 'K')]
    pub samples: Option<usize>,
    /// Use a K below the guaranteed count.
    #[arg(long = "force-K", requires = "samples")]
    pub force_k: bool,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub scheme: PathBuf,
}

#[derive(Debug, Args)]
pub struct KhintchineArgs {
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub a: Vec<f64>,
    /// Solve the LP over the Khintchine polytope.
    #[arg(long)]
    pub lp: bool,
    /// Enumerate all sign vectors.
    #[arg(long)]
    pub brute: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "small")]
    pub suite: Suite,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long)]
    pub actions: usize,
    /// Types per action, or states for explicit instances.
    #[arg(long)]
    pub types: usize,
    /// Draw payoffs from [0, 1] instead of [-1, 1] (iid only).
    #[arg(long)]
    pub nonnegative: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: PathBuf,
}

/// Why a command failed; decides the exit code.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Domain(_) => 1,
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        Failure::Domain(e.into())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Domain(e.into())
    }
}

type Outcome = Result<(), Failure>;

/// Shortest round-trip form, switching to exponent notation for tiny values.
fn num(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn nums(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|&x| num(x)).collect();
    format!("[{}]", parts.join(", "))
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Outcome {
    match cli.command {
        Command::Solve(a) => solve(a, out),
        Command::Signal(a) => signal(a, out),
        Command::Blackbox(a) => blackbox(a, out),
        Command::Audit(a) => audit_cmd(a, out),
        Command::Khintchine(a) => khintchine(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Bench(a) => bench(a, out),
        Command::Generate(a) => generate(a, out),
    }
}

fn require_iid(inst: &Instance, method: Method) -> anyhow::Result<&IidInstance> {
    match inst {
        Instance::Iid(i) => Ok(i),
        other => bail!("method {} needs an iid instance, got {}", method.name(), other.kind()),
    }
}

fn record(s: &SSignature) -> SSignatureRecord {
    SSignatureRecord { x: s.x.clone(), y: s.y.clone() }
}

/// IC report of a symmetric scheme from its s-signature alone: every
/// recommendation has slack `rho.x - rho.y` and probability `1/n`.
fn ssig_ic(inst: &IidInstance, s: &SSignature) -> IcReport {
    let margin = s.ic_margin(inst);
    let deficit = -margin - TIE_TOL;
    IcReport {
        min_slack: margin,
        epsilon_certified: if deficit > 0.0 { deficit * inst.actions() as f64 } else { 0.0 },
    }
}

/// `Ok(None)` when the expansion is over the size caps.
fn fits<T>(r: persuasion_core::Result<T>) -> anyhow::Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(CoreError::TooLarge { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn solve(a: SolveArgs, out: &mut dyn Write) -> Outcome {
    if !(a.epsilon >= 0.0) || !a.epsilon.is_finite() {
        return Err(Failure::Usage(format!("--epsilon must be a nonnegative number, got {}", a.epsilon)));
    }
    if a.epsilon != 0.0 && a.method != Method::Exact {
        return Err(Failure::Usage(format!("--epsilon applies only to --method exact, not {}", a.method.name())));
    }
    let inst = load_instance(&a.input)?;
    let labels = || inst.state_labels();
    let file = match a.method {
        Method::Exact => {
            let explicit = inst.explicit()?;
            let sol = solve_exact(&explicit, a.epsilon)?;
            SchemeFile {
                method: "exact".into(),
                value: sol.value,
                epsilon: a.epsilon,
                lp_bound: None,
                phi: Some(sol.scheme.to_rows()),
                states: Some(labels()?),
                s_signature: None,
                ic_report: IcReport { min_slack: sol.audit.min_slack, epsilon_certified: sol.audit.epsilon_certified },
                seed: None,
            }
        }
        Method::IidOpt => {
            let iid = require_iid(&inst, a.method)?;
            let direct = match fits(solve_iid(iid))? {
                Some((scheme, _)) => fits(scheme.to_direct())?,
                None => None,
            };
            let (ssig, value) = solve_s_signature(iid)?;
            match direct {
                Some(phi) => {
                    let rep = audit(&inst.explicit()?, &phi)?;
                    SchemeFile {
                        method: "iid-opt".into(),
                        value: rep.sender_utility,
                        epsilon: 0.0,
                        lp_bound: None,
                        phi: Some(phi.to_rows()),
                        states: Some(labels()?),
                        s_signature: Some(record(&ssig)),
                        ic_report: IcReport { min_slack: rep.min_slack, epsilon_certified: rep.epsilon_certified },
                        seed: None,
                    }
                }
                None => SchemeFile {
                    method: "iid-opt".into(),
                    value,
                    epsilon: 0.0,
                    lp_bound: None,
                    phi: None,
                    states: None,
                    ic_report: ssig_ic(iid, &ssig),
                    s_signature: Some(record(&ssig)),
                    seed: None,
                },
            }
        }
        Method::IidApprox => {
            let iid = require_iid(&inst, a.method)?;
            let (scheme, bound) = solve_independent(iid)?;
            let ssig = scheme.s_signature().clone();
            match fits(expand_product(iid))? {
                Some(explicit) => {
                    let phi = scheme.to_direct()?;
                    let rep = audit(&explicit, &phi)?;
                    SchemeFile {
                        method: "iid-approx".into(),
                        value: rep.sender_utility,
                        epsilon: 0.0,
                        lp_bound: Some(bound),
                        phi: Some(phi.to_rows()),
                        states: Some(labels()?),
                        s_signature: Some(record(&ssig)),
                        ic_report: IcReport { min_slack: rep.min_slack, epsilon_certified: rep.epsilon_certified },
                        seed: None,
                    }
                }
                None => {
                    let rep = approx_monte_carlo(iid, &scheme, a.trials, a.seed)?;
                    let ic = monte_carlo_ic(&rep);
                    SchemeFile {
                        method: "iid-approx".into(),
                        value: rep.mean_sender_utility,
                        epsilon: 0.0,
                        lp_bound: Some(bound),
                        phi: None,
                        states: None,
                        s_signature: Some(record(&ssig)),
                        ic_report: ic,
                        seed: Some(a.seed),
                    }
                }
            }
        }
    };
    writeln!(out, "method: {}", file.method)?;
    writeln!(out, "value: {}", num(file.value))?;
    if let Some(b) = file.lp_bound {
        writeln!(out, "lp_bound: {}", num(b))?;
    }
    writeln!(out, "min_slack: {}", num(file.ic_report.min_slack))?;
    writeln!(out, "epsilon_certified: {}", num(file.ic_report.epsilon_certified))?;
    if let Some(path) = &a.output {
        save_scheme(path, &file)?;
        writeln!(out, "wrote: {}", path.display())?;
    }
    Ok(())
}

fn approx_monte_carlo(iid: &IidInstance, scheme: &IndependentScheme, trials: usize, seed: u64) -> anyhow::Result<EvalReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(monte_carlo_eval(iid, |th, r| scheme.sample(th, r), trials, &mut rng, EvalOptions::default())?)
}

/// IC report from sampled slacks: the smallest estimate, and the smallest
/// `eps` that covers every estimate within three standard errors.
fn monte_carlo_ic(rep: &EvalReport) -> IcReport {
    let n = rep.ic_slack.len();
    let mut min_slack = if n > 1 { f64::INFINITY } else { 0.0 };
    let mut eps: f64 = 0.0;
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let s = rep.ic_slack[i][j];
            min_slack = min_slack.min(s);
            let low = s + 3.0 * rep.ic_slack_se[i][j];
            if low < -TIE_TOL && rep.signal_freq[i] > 0.0 {
                eps = eps.max(-low / rep.signal_freq[i]);
            }
        }
    }
    IcReport { min_slack, epsilon_certified: eps }
}

fn signal(a: SignalArgs, out: &mut dyn Write) -> Outcome {
    let inst = load_instance(&a.input)?;
    let file = load_scheme(&a.scheme)?;
    let k = inst.state_index(&a.state)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let sig = if let Some(phi) = file.direct(&inst)? {
        phi.sample(k, &mut rng)
    } else {
        let iid = match &inst {
            Instance::Iid(i) => i,
            other => return Err(anyhow!("a scheme without `phi` needs an iid instance, got {}", other.kind()).into()),
        };
        let s = file
            .s_signature
            .as_ref()
            .ok_or_else(|| anyhow!("scheme file has neither `phi` nor `s_signature`"))?;
        let ssig = SSignature { x: s.x.clone(), y: s.y.clone() };
        match file.method.as_str() {
            "iid-approx" => {
                let comps = independent_signal(&ssig.x, &ssig.y, iid.q(), &a.state, &mut rng)?;
                to_direct_recommendation(&comps, &mut rng)
            }
            "iid-opt" => {
                let rule = decompose_reduced_form(&ReducedForm::from_ssig(&ssig, iid.q()), iid.q(), iid.actions())
                    .context("sampling an iid-opt scheme rebuilds its allocation over every type profile")?;
                scheme_from_allocation(iid, &ssig, &rule)?.sample(&a.state, &mut rng)
            }
            m => return Err(anyhow!("cannot sample a scheme of method `{m}` without `phi`").into()),
        }
    };
    writeln!(out, "signal: {sig}")?;
    Ok(())
}

fn blackbox(a: BlackboxArgs, out: &mut dyn Write) -> Outcome {
    if !(a.epsilon >= 0.0) || !a.epsilon.is_finite() {
        return Err(Failure::Usage(format!("--epsilon must be a nonnegative number, got {}", a.epsilon)));
    }
    if a.trials == 0 {
        return Err(Failure::Usage("--trials must be at least 1".into()));
    }
    let inst = load_instance(&a.input)?;
    let explicit = inst.explicit()?;
    let n = explicit.actions();
    let k = resolve_sample_count(n, a.epsilon, a.samples, a.force_k).map_err(|e| Failure::Usage(e.to_string()))?;
    let oracle = ExplicitOracle::new(explicit.clone())?;
    let scheme = BlackboxScheme::new(a.epsilon, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut lp_total = 0.0;
    let rep = monte_carlo_eval(
        &OraclePrior(oracle.clone()),
        |th, mut r| {
            let d = scheme.run(&oracle, th, &mut r)?;
            lp_total += d.lp_value;
            Ok(d.signal)
        },
        a.trials,
        &mut rng,
        EvalOptions { epsilon: a.epsilon, z: 3.0 },
    )?;
    let opt = solve_exact(&explicit, 0.0)?.value;
    writeln!(out, "samples: {k}")?;
    match sample_count(n, a.epsilon) {
        Ok(f) => writeln!(out, "guaranteed_samples: {f}")?,
        Err(_) => writeln!(out, "guaranteed_samples: none")?,
    }
    writeln!(out, "trials: {}", rep.trials)?;
    writeln!(out, "optimum: {}", num(opt))?;
    writeln!(out, "mean_sender_utility: {}", num(rep.mean_sender_utility))?;
    writeln!(out, "std_error: {}", num(rep.std_error))?;
    writeln!(out, "mean_lp_value: {}", num(lp_total / a.trials as f64))?;
    writeln!(out, "follow_rate: {}", num(rep.follow_rate))?;
    writeln!(out, "signal_freq: {}", nums(&rep.signal_freq))?;
    for i in 0..n {
        writeln!(out, "ic_slack[{i}]: {}", nums(&rep.ic_slack[i]))?;
        writeln!(out, "ic_slack_se[{i}]: {}", nums(&rep.ic_slack_se[i]))?;
    }
    writeln!(out, "epsilon_ic_within_3se: {}", rep.slack_within(a.epsilon, 3.0))?;
    Ok(())
}

fn audit_cmd(a: AuditArgs, out: &mut dyn Write) -> Outcome {
    let inst = load_instance(&a.input)?;
    let file = load_scheme(&a.scheme)?;
    let (value, exact) = if let Some(phi) = file.direct(&inst)? {
        let rep = audit(&inst.explicit()?, &phi)?;
        writeln!(out, "value: {}", num(rep.sender_utility))?;
        writeln!(out, "signal_probs: {}", nums(&rep.signal_probs))?;
        writeln!(out, "min_slack: {}", num(rep.min_slack))?;
        writeln!(out, "epsilon_certified: {}", num(rep.epsilon_certified))?;
        writeln!(out, "ic: {}", rep.is_ic())?;
        (rep.sender_utility, true)
    } else {
        let iid = match &inst {
            Instance::Iid(i) => i,
            other => return Err(anyhow!("a scheme without `phi` needs an iid instance, got {}", other.kind()).into()),
        };
        let s = file
            .s_signature
            .as_ref()
            .ok_or_else(|| anyhow!("scheme file has neither `phi` nor `s_signature`"))?;
        let ssig = SSignature { x: s.x.clone(), y: s.y.clone() };
        let ic = ssig_ic(iid, &ssig);
        let consistency = ssig.consistency_error(iid.actions(), iid.q());
        if file.method == "iid-opt" {
            let border = border_feasible(&ReducedForm::from_ssig(&ssig, iid.q()), iid.q(), iid.actions())?;
            let value = ssig.value(iid);
            writeln!(out, "value: {}", num(value))?;
            writeln!(out, "consistency_error: {}", num(consistency))?;
            writeln!(out, "min_slack: {}", num(ic.min_slack))?;
            writeln!(out, "epsilon_certified: {}", num(ic.epsilon_certified))?;
            writeln!(out, "border_feasible: {}", border.feasible)?;
            (value, true)
        } else {
            // the relaxed signature bounds the scheme; its value is sampled
            writeln!(out, "relaxed_value: {}", num(ssig.value(iid)))?;
            writeln!(out, "relaxed_consistency_error: {}", num(consistency))?;
            writeln!(out, "relaxed_min_slack: {}", num(ic.min_slack))?;
            writeln!(out, "sampled_value: {}", num(file.value))?;
            if let Some(seed) = file.seed {
                writeln!(out, "sampled_seed: {seed}")?;
            }
            (file.value, false)
        }
    };
    if exact {
        let gap = (value - file.value).abs();
        writeln!(out, "stored_value: {}", num(file.value))?;
        if gap > 1e-9 {
            return Err(anyhow!("recomputed value {value} differs from the stored {} by {gap:e}", file.value).into());
        }
    }
    Ok(())
}

fn khintchine(a: KhintchineArgs, out: &mut dyn Write) -> Outcome {
    let (lp, brute) = if a.lp || a.brute { (a.lp, a.brute) } else { (true, true) };
    if brute {
        writeln!(out, "brute: {}", num(khintchine_constant(&a.a)?))?;
    }
    if lp {
        let sol = solve_khintchine_lp(&a.a)?;
        writeln!(out, "lp: {}", num(sol.value))?;
        writeln!(out, "plus_probability: {}", num(sol.plus_probability()))?;
    }
    Ok(())
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Outcome {
    let results = run_all(a.suite, a.seed)?;
    writeln!(out, "{:<44} {:>6} {:>8} {:>10}  result", "suite", "cases", "failures", "worst")?;
    for r in &results {
        writeln!(
            out,
            "{:<44} {:>6} {:>8} {:>10.2e}  {}",
            r.name,
            r.cases,
            r.failures,
            r.worst,
            if r.passed() { "PASS" } else { "FAIL" }
        )?;
    }
    let failed = results.iter().filter(|r| !r.passed()).count();
    if failed > 0 {
        return Err(anyhow!("{failed} suites failed").into());
    }
    Ok(())
}

fn bench(a: BenchArgs, out: &mut dyn Write) -> Outcome {
    writeln!(out, "{:<28} {:>12} {:>12}", "task", "size", "seconds")?;
    let mut row = |task: &str, size: String, f: &mut dyn FnMut() -> anyhow::Result<()>| -> Outcome {
        let start = Instant::now();
        f()?;
        writeln!(out, "{task:<28} {size:>12} {:>12.4}", start.elapsed().as_secs_f64())?;
        Ok(())
    };
    for states in [16, 64, 256] {
        let inst = random_instance(Kind::Explicit, 4, states, false, a.seed).explicit()?;
        row("explicit LP", format!("{states} states"), &mut || Ok(solve_exact(&inst, 0.0).map(drop)?))?;
    }
    for (n, m) in [(2, 3), (4, 3), (8, 4), (16, 6), (32, 8)] {
        let Instance::Iid(inst) = random_instance(Kind::Iid, n, m, true, a.seed) else { unreachable!() };
        row("s-signature LP", format!("n={n} m={m}"), &mut || Ok(solve_s_signature(&inst).map(drop)?))?;
        row("relaxed LP", format!("n={n} m={m}"), &mut || Ok(solve_independent(&inst).map(drop)?))?;
    }
    for k in [250, 1000, 4000] {
        let inst = random_instance(Kind::Explicit, 3, 50, false, a.seed).explicit()?;
        let oracle = ExplicitOracle::new(inst)?;
        let scheme = BlackboxScheme::new(0.2, k)?;
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        let theta = oracle.sample_of(0);
        row("sample-and-solve signal", format!("K={k}"), &mut || Ok(scheme.run(&oracle, &theta, &mut rng).map(drop)?))?;
    }
    Ok(())
}

fn generate(a: GenerateArgs, out: &mut dyn Write) -> Outcome {
    if a.actions == 0 || a.types == 0 {
        return Err(Failure::Usage("--actions and --types must be positive".into()));
    }
    let inst = random_instance(a.kind, a.actions, a.types, a.nonnegative, a.seed);
    save_instance(&a.output, &inst).context("saving the generated instance")?;
    writeln!(out, "wrote: {}", a.output.display())?;
    Ok(())
}
