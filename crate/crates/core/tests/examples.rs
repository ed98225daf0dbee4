//! Worked examples with known answers, one test per operation.

use persuasion_core::approx::{independent_signal, solve_lp3, to_direct_recommendation, ComponentSignal, ComponentSignals};
use persuasion_core::blackbox::{blackbox_signal, sample_count, solve_empirical_lp, ExplicitOracle, Sample};
use persuasion_core::exact::{expand_product, solve_exact};
use persuasion_core::fixtures::{self, *};
use persuasion_core::iid::{
    border_feasible, decompose_reduced_form, scheme_from_allocation, signature_of, solve_iid, solve_s_signature,
    symmetrize, AllocationRule, ReducedForm, SSignature,
};
use persuasion_core::khintchine::{khintchine_constant, solve_khintchine_lp, TwoSignalSignature};
use persuasion_core::lp::{self, LinearProgram, LpStatus, Relation};
use persuasion_core::verify::{
    concavification_value, monte_carlo_eval, realizability_check, realizability_check_two_signal, realizable_by_mixture,
    EvalOptions,
};
use persuasion_core::{audit, best_response, posterior, DirectScheme, ExplicitInstance, IidInstance, State};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn posterior_examples() {
    let pros = prosecutor();
    let reveal = DirectScheme::deterministic(2, &[ACQUIT, CONVICT]).unwrap();
    let p = posterior(&pros, &reveal, CONVICT).unwrap();
    assert!(close(p.signal_prob, 1.0 / 3.0, 1e-15));
    assert_eq!(p.receiver, vec![0.0, 1.0]);

    let never_second = DirectScheme::deterministic(2, &[0, 0]).unwrap();
    let p = posterior(&pros, &never_second, 1).unwrap();
    assert!(p.zero_probability);
    assert_eq!(p.signal_prob, 0.0);

    // full information on the investor: 9 states, one signal each
    let inv = investor_explicit();
    let full = DirectScheme::deterministic(9, &(0..9).collect::<Vec<_>>()).unwrap();
    let explicit9 = ExplicitInstance::new(
        9,
        inv.states()
            .iter()
            .map(|s| State { prob: s.prob, sender: vec![0.0; 9], receiver: vec![0.0; 9] })
            .collect(),
    )
    .unwrap();
    for sig in 0..9 {
        assert!(close(posterior(&explicit9, &full, sig).unwrap().signal_prob, 1.0 / 9.0, 1e-15));
    }
}

#[test]
fn best_response_examples() {
    assert_eq!(best_response(&[0.0, 0.0], &[0.0, 1.0]).unwrap(), 1);
    assert_eq!(best_response(&[0.5, 0.5], &[0.0, 1.0]).unwrap(), CONVICT);
    assert_eq!(best_response(&[0.3, 0.7, 0.1], &[5.0, -1.0, 9.0]).unwrap(), 1);
}

#[test]
fn audit_examples() {
    let pros = prosecutor();
    let always = DirectScheme::deterministic(2, &[CONVICT, CONVICT]).unwrap();
    let rep = audit(&pros, &always).unwrap();
    assert!(!rep.is_ic());
    assert!(rep.epsilon_certified > 0.0);

    let inv = investor_explicit();
    assert!(audit(&inv, &DirectScheme::honest(&inv)).unwrap().min_slack >= 0.0);
    let rep = audit(&inv, &investor_optimal_scheme()).unwrap();
    assert!(close(rep.sender_utility, 5.0 / 9.0, 1e-12));
    assert!(rep.min_slack >= 0.0);
}

#[test]
fn lp_examples() {
    let mut p = LinearProgram::new(1);
    p.set_objective(0, 1.0);
    p.add_constraint(vec![(0, 1.0)], Relation::Le, 3.0);
    assert!(close(lp::solve(&p).unwrap().value, 3.0, 1e-12));

    let mut p = LinearProgram::new(1);
    p.set_objective(0, 1.0);
    assert_eq!(lp::solve(&p).unwrap().status, LpStatus::Unbounded);

    let mut p = LinearProgram::new(2);
    p.set_objective(0, 1.0);
    p.set_objective(1, 1.0);
    p.add_constraint(vec![(0, 1.0), (1, 2.0)], Relation::Le, 4.0);
    p.add_constraint(vec![(0, 3.0), (1, 1.0)], Relation::Le, 6.0);
    let out = lp::solve(&p).unwrap();
    assert!(close(out.value, 2.8, 1e-12));
    assert!(close(out.point[0], 1.6, 1e-12) && close(out.point[1], 1.2, 1e-12));
}

#[test]
fn exact_examples() {
    let sol = solve_exact(&prosecutor(), 0.0).unwrap();
    assert!(close(sol.value, 2.0 / 3.0, 1e-9));
    assert!(close(sol.scheme.get(GUILTY, CONVICT), 1.0, 1e-9));
    assert!(close(sol.scheme.get(INNOCENT, CONVICT), 0.5, 1e-9));
    assert!(close(solve_exact(&investor_explicit(), 0.0).unwrap().value, 5.0 / 9.0, 1e-9));

    let one = ExplicitInstance::new(
        1,
        vec![
            State { prob: 0.4, sender: vec![0.5], receiver: vec![0.0] },
            State { prob: 0.6, sender: vec![-0.5], receiver: vec![1.0] },
        ],
    )
    .unwrap();
    let sol = solve_exact(&one, 0.0).unwrap();
    assert!(close(sol.value, -0.1, 1e-12));
    assert!(sol.scheme.rows().all(|r| r == [1.0]));
}

#[test]
fn expansion_examples() {
    let inv = expand_product(&investor_iid()).unwrap();
    assert_eq!(inv.state_count(), 9);
    assert!(inv.states().iter().all(|s| close(s.prob, 1.0 / 9.0, 1e-15)));
}

#[test]
fn s_signature_examples() {
    let inv = investor_iid();
    let (_, v) = solve_s_signature(&inv).unwrap();
    assert!(close(v, 5.0 / 9.0, 1e-6));
    // the recommend-the-unique-M scheme has the stated s-signature, which is optimal
    let s = signature_of(&inv, &investor_optimal_scheme()).unwrap().s_signature();
    let want = SSignature { x: vec![1.0 / 9.0, 5.0 / 18.0, 1.0 / 9.0], y: vec![2.0 / 9.0, 1.0 / 18.0, 2.0 / 9.0] };
    for k in 0..3 {
        assert!(close(s.x[k], want.x[k], 1e-12) && close(s.y[k], want.y[k], 1e-12));
    }
    assert!(close(want.value(&inv), 5.0 / 9.0, 1e-12));

    let single = IidInstance::new(3, vec![1.0], vec![0.4], vec![0.9]).unwrap();
    let (s, v) = solve_s_signature(&single).unwrap();
    assert!(close(v, 0.4, 1e-12));
    assert!(close(s.x[0], 1.0 / 3.0, 1e-12) && close(s.y[0], 1.0 / 3.0, 1e-12));

    let aligned = IidInstance::new(2, vec![0.2, 0.5, 0.3], vec![0.1, 0.6, 0.9], vec![0.1, 0.6, 0.9]).unwrap();
    let explicit = expand_product(&aligned).unwrap();
    let honest = audit(&explicit, &DirectScheme::honest(&explicit)).unwrap().sender_utility;
    assert!(close(solve_s_signature(&aligned).unwrap().1, honest, 1e-6));
}

#[test]
fn border_examples() {
    for (n, q) in [(2, vec![0.3, 0.7]), (3, vec![0.2, 0.3, 0.5])] {
        assert!(border_feasible(&ReducedForm::uniform(n, q.len()), &q, n).unwrap().feasible);
    }
    let bad = border_feasible(&ReducedForm { tau: vec![1.0, 0.0] }, &[0.5, 0.5], 2).unwrap();
    assert!(!bad.feasible);
    assert_eq!(bad.violating_set, Some(vec![0]));
    assert!(close(bad.excess, 0.25, 1e-12));
    let tight = border_feasible(&ReducedForm { tau: vec![0.75, 0.25] }, &[0.5, 0.5], 2).unwrap();
    assert!(tight.feasible);
    assert!(close(tight.excess, 0.0, 1e-12));
}

#[test]
fn decomposition_examples() {
    let q = [0.2, 0.8];
    let rule = decompose_reduced_form(&ReducedForm::uniform(3, 2), &q, 3).unwrap();
    assert!(rule.reduced_form_error(&ReducedForm::uniform(3, 2), &q) <= 1e-8);

    let tau = ReducedForm { tau: vec![0.75, 0.25] };
    let rule = decompose_reduced_form(&tau, &[0.5, 0.5], 2).unwrap();
    assert!(rule.reduced_form_error(&tau, &[0.5, 0.5]) <= 1e-8);
    // tight at {type 0}: a type-0 bidder always wins when present
    assert!(close(rule.outcome(&[0, 1])[0], 1.0, 1e-8));
    assert!(close(rule.outcome(&[1, 0])[1], 1.0, 1e-8));

    let inv = ReducedForm { tau: vec![1.0 / 3.0, 5.0 / 6.0, 1.0 / 3.0] };
    let q = [1.0 / 3.0; 3];
    assert!(decompose_reduced_form(&inv, &q, 2).unwrap().reduced_form_error(&inv, &q) <= 1e-8);
}

#[test]
fn scheme_from_allocation_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let one = IidInstance::new(1, vec![0.5, 0.5], vec![0.0, 1.0], vec![1.0, 0.0]).unwrap();
    let (scheme, _) = solve_iid(&one).unwrap();
    assert!((0..50).all(|_| scheme.sample(&[rng.gen_range(0..2)], &mut rng) == 0));

    let inst = random_iid(&mut rng, 3, 2, false);
    let q = inst.q().to_vec();
    let ssig = SSignature { x: q.iter().map(|v| v / 3.0).collect(), y: q.iter().map(|v| v / 3.0).collect() };
    let scheme = scheme_from_allocation(&inst, &ssig, &AllocationRule::uniform(3, 2)).unwrap();
    let phi = scheme.to_direct().unwrap();
    assert!(phi.rows().all(|r| r.iter().all(|v| close(*v, 1.0 / 3.0, 1e-12))));
    let s = signature_of(&inst, &phi).unwrap().s_signature();
    for k in 0..2 {
        assert!(close(s.x[k], q[k] / 3.0, 1e-12) && close(s.y[k], q[k] / 3.0, 1e-12));
    }
}

#[test]
fn iid_scheme_investor_monte_carlo() {
    let inv = investor_iid();
    let (scheme, _) = solve_iid(&inv).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let rep = monte_carlo_eval(&inv, |th, r| Ok(scheme.sample(th, r)), 1_000_000, &mut rng, EvalOptions::default()).unwrap();
    assert!(rep.mean_within(5.0 / 9.0, 3.0), "{} +- {}", rep.mean_sender_utility, rep.std_error);
    assert_eq!(rep.follow_rate, 1.0);
}

#[test]
fn symmetrize_examples() {
    let inv = investor_iid();
    let explicit = expand_product(&inv).unwrap();
    // already symmetric: fixed point
    let phi = investor_optimal_scheme();
    let before = signature_of(&inv, &phi).unwrap();
    let after = signature_of(&inv, &symmetrize(&inv, &phi).unwrap()).unwrap();
    for (a, b) in before.matrices.iter().flatten().flatten().zip(after.matrices.iter().flatten().flatten()) {
        assert!(close(*a, *b, 1e-12));
    }
    let opt = solve_exact(&explicit, 0.0).unwrap().scheme;
    let sig = signature_of(&inv, &symmetrize(&inv, &opt).unwrap()).unwrap();
    assert!(sig.symmetry_defect() < 1e-9);
    for i in 0..2 {
        for k in 0..3 {
            assert!(close(sig.matrices[i][i][k], sig.matrices[0][0][k], 1e-12));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let inst = random_iid(&mut rng, 3, 3, false);
    let explicit = expand_product(&inst).unwrap();
    let honest = DirectScheme::honest(&explicit);
    let a = audit(&explicit, &honest).unwrap().sender_utility;
    let b = audit(&explicit, &symmetrize(&inst, &honest).unwrap()).unwrap().sender_utility;
    assert!(close(a, b, 1e-9));
}

#[test]
fn lp3_examples() {
    let (s, v) = solve_lp3(&investor_iid()).unwrap();
    assert!(close(v, 2.0 / 3.0, 1e-9));
    assert!(close(s.x[MODERATE], 1.0 / 3.0, 1e-9));
    let single = IidInstance::new(2, vec![1.0], vec![0.7], vec![0.0]).unwrap();
    assert!(close(solve_lp3(&single).unwrap().1, 0.7, 1e-12));
    // constant rho: value is n max xi.x over ||x|| = 1/n, x <= q
    let flat = IidInstance::new(2, vec![0.25, 0.75], vec![1.0, 0.2], vec![0.3, 0.3]).unwrap();
    assert!(close(solve_lp3(&flat).unwrap().1, 2.0 * (0.25 * 1.0 + 0.25 * 0.2), 1e-12));
}

#[test]
fn component_signal_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let q = [0.3, 0.7];
    let n = 4;
    let x: Vec<f64> = q.iter().map(|v| v / n as f64).collect();
    let trials = 40_000;
    for t in 0..2 {
        let highs = (0..trials)
            .filter(|_| independent_signal(&x, &x, &q, &[t], &mut rng).unwrap().0[0] == ComponentSignal::High)
            .count();
        let p = highs as f64 / trials as f64;
        assert!((p - 0.25).abs() < 3.0 * (0.25 * 0.75 / trials as f64).sqrt(), "{p}");
    }
    let reveal = [0.3, 0.0];
    for _ in 0..50 {
        let th = [rng.gen_range(0..2), rng.gen_range(0..2), rng.gen_range(0..2)];
        let s = independent_signal(&reveal, &[0.0, 0.35], &q, &th, &mut rng).unwrap();
        for i in 0..3 {
            assert_eq!(s.0[i] == ComponentSignal::High, th[i] == 0);
        }
    }
    use ComponentSignal::*;
    assert_eq!(to_direct_recommendation(&ComponentSignals(vec![High, Low]), &mut rng), 0);
    let mut seen = [0; 3];
    for _ in 0..3000 {
        seen[to_direct_recommendation(&ComponentSignals(vec![High, High, Low]), &mut rng)] += 1;
    }
    assert!(seen[2] == 0 && seen[0] > 1300 && seen[1] > 1300);
    let mut seen = [0; 2];
    for _ in 0..3000 {
        seen[to_direct_recommendation(&ComponentSignals(vec![Low, Low]), &mut rng)] += 1;
    }
    assert!(seen[0] > 1300 && seen[1] > 1300);
}

#[test]
fn sample_count_examples() {
    assert_eq!(sample_count(2, 0.5).unwrap(), 45427);
    assert_eq!(sample_count(1, 1.0).unwrap(), 355);
}

#[test]
fn empirical_lp_examples() {
    let s = Sample { sender: vec![0.2, 0.9], receiver: vec![0.5, 0.4] };
    let emp = solve_empirical_lp(std::slice::from_ref(&s), 0.1).unwrap();
    assert!(close(emp.value, 0.9, 1e-12));
    assert_eq!(emp.phi.row(0), &[0.0, 1.0]);
    // identical samples behave like one
    let many = solve_empirical_lp(&vec![s.clone(); 7], 0.1).unwrap();
    assert!(close(many.value, 0.9, 1e-12));
    // no slack: the receiver insists on action 0
    assert!(close(solve_empirical_lp(&[s], 0.0).unwrap().value, 0.2, 1e-12));

    let oracle = ExplicitOracle::new(investor_halved_explicit()).unwrap();
    let support: Vec<Sample> = (0..9).map(|k| oracle.sample_of(k)).collect();
    assert!(close(solve_empirical_lp(&support, 0.0).unwrap().value, 5.0 / 9.0, 1e-9));
}

#[test]
fn blackbox_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let theta = Sample { sender: vec![0.2, 0.9], receiver: vec![0.5, 0.4] };
    let point = ExplicitOracle::new(
        ExplicitInstance::new(2, vec![State { prob: 1.0, sender: theta.sender.clone(), receiver: theta.receiver.clone() }])
            .unwrap(),
    )
    .unwrap();
    assert_eq!(blackbox_signal(&point, &theta, 0.1, 1, &mut rng).unwrap(), 1);
    for k in [2, 10, 50] {
        assert_eq!(blackbox_signal(&point, &theta, 0.1, k, &mut rng).unwrap(), 1);
    }

    let lam_s = ExplicitOracle::new(rain_shine_s(0.1)).unwrap();
    let rep = monte_carlo_eval(
        &persuasion_core::verify::OraclePrior(lam_s.clone()),
        |th, mut r| blackbox_signal(&lam_s, th, 0.2, 2000, &mut r),
        2_000,
        &mut rng,
        EvalOptions { epsilon: 0.2, z: 3.0 },
    )
    .unwrap();
    assert!(rep.mean_sender_utility >= 1.0 - 0.2 - 3.0 * rep.std_error);
}

#[test]
fn khintchine_examples() {
    for (a, k) in [(vec![1.0], 1.0), (vec![1.0, 1.0], 1.0), (vec![3.0, 1.0, 1.0], 3.0)] {
        assert!(close(khintchine_constant(&a).unwrap(), k, 1e-15));
        assert!(close(solve_khintchine_lp(&a).unwrap().value, k, 1e-9));
    }
}

#[test]
fn realizability_examples() {
    let inv = investor_iid();
    let sig = signature_of(&inv, &investor_optimal_scheme()).unwrap();
    assert!(realizability_check(&sig, &inv).unwrap());
    let mut off = sig.clone();
    off.matrices[1][0][2] += 0.1;
    assert!(!realizability_check(&off, &inv).unwrap());

    let quarter = TwoSignalSignature::from_plus_mass(&[0.25, 0.25]);
    assert_eq!(realizability_check_two_signal(&quarter).unwrap(), realizable_by_mixture(&quarter).unwrap());
    assert!(realizability_check_two_signal(&quarter).unwrap());
}

#[test]
fn concavification_examples() {
    assert!(close(concavification_value(&prosecutor()).unwrap(), 2.0 / 3.0, 1e-9));
    let c = ExplicitInstance::new(
        3,
        (0..3)
            .map(|k| State {
                prob: [0.2, 0.5, 0.3][k],
                sender: vec![-0.25; 3],
                receiver: (0..3).map(|i| (i * k) as f64 / 4.0).collect(),
            })
            .collect(),
    )
    .unwrap();
    assert!(close(concavification_value(&c).unwrap(), -0.25, 1e-12));
    let aligned = fixtures::rain_shine_s(0.1);
    let aligned = ExplicitInstance::new(
        2,
        aligned
            .states()
            .iter()
            .map(|s| State { prob: s.prob, sender: s.receiver.clone(), receiver: s.receiver.clone() })
            .collect(),
    )
    .unwrap();
    let full: f64 = aligned.states().iter().map(|s| s.prob * s.receiver.iter().cloned().fold(f64::MIN, f64::max)).sum();
    assert!(close(concavification_value(&aligned).unwrap(), full, 1e-12));
}

#[test]
fn monte_carlo_examples() {
    let inv = investor_explicit();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (phi, target) in [
        (DirectScheme::honest(&inv), 1.0 / 3.0),
        (DirectScheme::no_information(&inv), 1.0 / 3.0),
        (investor_optimal_scheme(), 5.0 / 9.0),
    ] {
        let rep = monte_carlo_eval(&inv, |k, r| Ok(phi.sample(*k, r)), 200_000, &mut rng, EvalOptions::default()).unwrap();
        assert!(rep.mean_within(target, 3.0), "{} vs {target}", rep.mean_sender_utility);
    }
}
