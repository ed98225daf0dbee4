use persuasion_core::blackbox::{solve_empirical_lp, ExplicitOracle, SampleOracle};
use persuasion_core::exact::{expand_product, solve_exact};
use persuasion_core::fixtures::{random_explicit, random_iid};
use persuasion_core::iid::{
    border_feasible, decompose_reduced_form, signature_of, solve_s_signature, symmetrize, AllocationRule, ReducedForm,
};
use persuasion_core::khintchine::{khintchine_constant, scaled, solve_khintchine_lp};
use persuasion_core::lp::{self, LinearProgram, LpStatus, Relation};
use persuasion_core::verify::{allocation_exists, realizability_check};
use persuasion_core::{audit, posterior, DirectScheme, ExplicitInstance};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_scheme(rng: &mut ChaCha8Rng, states: usize, signals: usize) -> DirectScheme {
    DirectScheme::new(
        (0..states)
            .map(|_| {
                // sparse rows exercise zero-probability signals
                let w: Vec<f64> = (0..signals)
                    .map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..1.0) })
                    .collect();
                let total: f64 = w.iter().sum();
                if total == 0.0 {
                    let mut row = vec![0.0; signals];
                    row[0] = 1.0;
                    row
                } else {
                    w.iter().map(|v| v / total).collect()
                }
            })
            .collect(),
    )
    .unwrap()
}

fn small_explicit(seed: u64, actions: usize, states: usize) -> (ExplicitInstance, DirectScheme) {
    let mut r = rng(seed);
    let inst = random_explicit(&mut r, actions, states);
    let phi = random_scheme(&mut r, states, actions);
    (inst, phi)
}

/// Best objective over all basic solutions of `max c.x, A x <= b, 0 <= x <= u`.
fn vertex_enumeration(c: &[f64], a: &[Vec<f64>], b: &[f64], u: f64) -> Option<f64> {
    let n = c.len();
    // every candidate hyperplane: constraint rows, x_k = 0, x_k = u
    let mut planes: Vec<(Vec<f64>, f64)> = a.iter().cloned().zip(b.iter().copied()).collect();
    for k in 0..n {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        planes.push((e.clone(), 0.0));
        planes.push((e, u));
    }
    let mut best: Option<f64> = None;
    let mut pick = vec![0usize; n];
    fn rec(
        start: usize,
        depth: usize,
        pick: &mut Vec<usize>,
        planes: &[(Vec<f64>, f64)],
        f: &mut dyn FnMut(&[usize]),
    ) {
        if depth == pick.len() {
            f(pick);
            return;
        }
        for p in start..planes.len() {
            pick[depth] = p;
            rec(p + 1, depth + 1, pick, planes, f);
        }
    }
    let mut visit = |chosen: &[usize]| {
        let mut m: Vec<Vec<f64>> = chosen
            .iter()
            .map(|&p| {
                let mut row = planes[p].0.clone();
                row.push(planes[p].1);
                row
            })
            .collect();
        // Gaussian elimination with partial pivoting
        for col in 0..n {
            let piv = (col..n).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs())).unwrap();
            if m[piv][col].abs() < 1e-10 {
                return;
            }
            m.swap(col, piv);
            for r in 0..n {
                if r != col {
                    let f = m[r][col] / m[col][col];
                    for k in col..=n {
                        m[r][k] -= f * m[col][k];
                    }
                }
            }
        }
        let x: Vec<f64> = (0..n).map(|k| m[k][n] / m[k][k]).collect();
        let ok = x.iter().all(|v| *v >= -1e-9 && *v <= u + 1e-9)
            && a.iter().zip(b).all(|(row, bi)| row.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= bi + 1e-9);
        if ok {
            let v: f64 = c.iter().zip(&x).map(|(p, q)| p * q).sum();
            best = Some(best.map_or(v, |b: f64| b.max(v)));
        }
    };
    rec(0, 0, &mut pick, &planes, &mut visit);
    best
}

fn random_box_lp(seed: u64, vars: usize, rows: usize) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>, LinearProgram) {
    let mut r = rng(seed);
    let c: Vec<f64> = (0..vars).map(|_| r.gen_range(-1.0..1.0)).collect();
    let a: Vec<Vec<f64>> = (0..rows).map(|_| (0..vars).map(|_| r.gen_range(-1.0..1.0)).collect()).collect();
    let b: Vec<f64> = (0..rows).map(|_| r.gen_range(-0.5..2.0)).collect();
    let mut prog = LinearProgram::new(vars);
    for k in 0..vars {
        prog.set_objective(k, c[k]);
        prog.set_bounds(k, 0.0, 5.0);
    }
    for (row, bi) in a.iter().zip(&b) {
        prog.add_constraint(row.iter().copied().enumerate().collect(), Relation::Le, *bi);
    }
    (c, a, b, prog)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn posteriors_average_to_prior(seed: u64, actions in 1usize..5, states in 1usize..7) {
        let (inst, phi) = small_explicit(seed, actions, states);
        let prior = inst.prior_receiver();
        let mut alpha_total = 0.0;
        let mut mix = vec![0.0; actions];
        for s in 0..actions {
            let p = posterior(&inst, &phi, s).unwrap();
            alpha_total += p.signal_prob;
            for i in 0..actions {
                mix[i] += p.signal_prob * p.receiver[i];
            }
        }
        prop_assert!((alpha_total - 1.0).abs() < 1e-9);
        for i in 0..actions {
            prop_assert!((mix[i] - prior[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn audit_ignores_state_order(seed: u64, actions in 1usize..5, states in 1usize..7) {
        let (inst, phi) = small_explicit(seed, actions, states);
        let mut order: Vec<usize> = (0..states).collect();
        order.shuffle(&mut rng(seed ^ 1));
        let a = audit(&inst, &phi).unwrap();
        let b = audit(&inst.permuted_states(&order).unwrap(), &phi.permuted_states(&order).unwrap()).unwrap();
        prop_assert!((a.sender_utility - b.sender_utility).abs() < 1e-12);
        prop_assert!((a.min_slack - b.min_slack).abs() < 1e-12);
    }

    #[test]
    fn certified_epsilon_zero_iff_ic(seed: u64, actions in 1usize..5, states in 1usize..7) {
        let (inst, phi) = small_explicit(seed, actions, states);
        let rep = audit(&inst, &phi).unwrap();
        prop_assert_eq!(rep.epsilon_certified == 0.0, rep.is_ic());
        prop_assert!(rep.is_epsilon_ic(rep.epsilon_certified + 1e-12));
        let honest = audit(&inst, &DirectScheme::honest(&inst)).unwrap();
        prop_assert!(honest.is_ic());
        prop_assert_eq!(honest.epsilon_certified, 0.0);
    }

    #[test]
    fn simplex_matches_vertex_enumeration(seed: u64, vars in 1usize..5, rows in 1usize..5) {
        let (c, a, b, prog) = random_box_lp(seed, vars, rows);
        let out = lp::solve(&prog).unwrap();
        match vertex_enumeration(&c, &a, &b, 5.0) {
            Some(best) => {
                prop_assert_eq!(out.status, LpStatus::Optimal);
                prop_assert!((out.value - best).abs() < 1e-9, "{} vs {}", out.value, best);
                prop_assert!(prog.residual(&out.point) <= 1e-8);
            }
            None => prop_assert_eq!(out.status, LpStatus::Infeasible),
        }
    }

    #[test]
    fn simplex_ignores_variable_order(seed: u64, vars in 1usize..7, rows in 1usize..7) {
        let (c, a, b, prog) = random_box_lp(seed, vars, rows);
        let mut perm: Vec<usize> = (0..vars).collect();
        perm.shuffle(&mut rng(seed ^ 7));
        // variable k of the copy is variable perm[k] of the original
        let mut copy = LinearProgram::new(vars);
        for k in 0..vars {
            copy.set_objective(k, c[perm[k]]);
            copy.set_bounds(k, 0.0, 5.0);
        }
        for (row, bi) in a.iter().zip(&b) {
            copy.add_constraint((0..vars).map(|k| (k, row[perm[k]])).collect(), Relation::Le, *bi);
        }
        let x = lp::solve(&prog).unwrap();
        let y = lp::solve(&copy).unwrap();
        prop_assert_eq!(x.status, y.status);
        if x.is_optimal() {
            prop_assert!((x.value - y.value).abs() < 1e-9);
        }
    }

    #[test]
    fn exact_value_bounds(seed: u64, actions in 1usize..4, states in 1usize..6) {
        let (inst, _) = small_explicit(seed, actions, states);
        let v0 = solve_exact(&inst, 0.0).unwrap();
        prop_assert!(v0.audit.is_ic());
        let honest = audit(&inst, &DirectScheme::honest(&inst)).unwrap().sender_utility;
        let none = audit(&inst, &DirectScheme::no_information(&inst)).unwrap().sender_utility;
        prop_assert!(v0.value >= honest - 1e-9);
        prop_assert!(v0.value >= none - 1e-9);
        let mut last = v0.value;
        for eps in [0.05, 0.2, 0.5] {
            let v = solve_exact(&inst, eps).unwrap();
            prop_assert!(v.value >= last - 1e-9);
            prop_assert!(v.audit.is_epsilon_ic(eps));
            last = v.value;
        }
    }

    #[test]
    fn s_signature_invariants(seed: u64, n in 1usize..5, m in 1usize..4) {
        let inst = random_iid(&mut rng(seed), n, m, false);
        let (s, v) = solve_s_signature(&inst).unwrap();
        let nf = n as f64;
        prop_assert!((s.x.iter().sum::<f64>() - 1.0 / nf).abs() < 1e-9);
        prop_assert!(s.consistency_error(n, inst.q()) < 1e-9);
        prop_assert!(s.ic_margin(&inst) >= -1e-9);
        let tau = ReducedForm::from_ssig(&s, inst.q());
        prop_assert!(border_feasible(&tau, inst.q(), n).unwrap().feasible);
        let exact = solve_exact(&expand_product(&inst).unwrap(), 0.0).unwrap().value;
        prop_assert!((v - exact).abs() < 1e-6, "{} vs {}", v, exact);
    }

    #[test]
    fn s_signature_type_relabeling(seed: u64, n in 1usize..5, m in 1usize..4) {
        let inst = random_iid(&mut rng(seed), n, m, false);
        let mut order: Vec<usize> = (0..m).collect();
        order.shuffle(&mut rng(seed ^ 3));
        let relabeled = inst.permuted_types(&order).unwrap();
        let (s, v) = solve_s_signature(&inst).unwrap();
        let (s2, v2) = solve_s_signature(&relabeled).unwrap();
        prop_assert!((v - v2).abs() < 1e-9);
        // the relabeled optimum, mapped back, is optimal for the original
        let mut back = s.clone();
        for k in 0..m {
            back.x[order[k]] = s2.x[k];
            back.y[order[k]] = s2.y[k];
        }
        prop_assert!((back.value(&inst) - v).abs() < 1e-9);
        prop_assert!(back.consistency_error(n, inst.q()) < 1e-9);
    }

    #[test]
    fn reduced_forms_round_trip(seed: u64, n in 1usize..5, m in 1usize..4) {
        let mut r = rng(seed);
        let q = random_iid(&mut r, n, m, true).q().to_vec();
        let rule = random_rule(&mut r, n, m);
        let tau = symmetric_reduced_form(&rule, &q);
        prop_assert!(border_feasible(&tau, &q, n).unwrap().feasible);
        prop_assert!(allocation_exists(&tau, &q, n).unwrap());
        let back = decompose_reduced_form(&tau, &q, n).unwrap();
        prop_assert!(back.reduced_form_error(&tau, &q) <= 1e-8);
    }

    #[test]
    fn symmetrization_keeps_utility(seed: u64, n in 1usize..4, m in 1usize..4) {
        let mut r = rng(seed);
        let inst = random_iid(&mut r, n, m, false);
        let explicit = expand_product(&inst).unwrap();
        let phi = random_scheme(&mut r, explicit.state_count(), n);
        let sym = symmetrize(&inst, &phi).unwrap();
        let a = audit(&explicit, &phi).unwrap();
        let b = audit(&explicit, &sym).unwrap();
        prop_assert!((a.sender_utility - b.sender_utility).abs() < 1e-9);
        let sig = signature_of(&inst, &sym).unwrap();
        prop_assert!(sig.symmetry_defect() < 1e-9);
        prop_assert!(realizability_check(&signature_of(&inst, &phi).unwrap(), &inst).unwrap());
    }

    #[test]
    fn empirical_value_monotone_in_epsilon(seed: u64, actions in 1usize..4, states in 1usize..6, k in 1usize..40) {
        let mut r = rng(seed);
        let inst = random_explicit(&mut r, actions, states);
        let oracle = ExplicitOracle::new(inst).unwrap();
        let samples: Vec<_> = (0..k).map(|_| oracle.draw(&mut r).unwrap()).collect();
        let mut last = f64::NEG_INFINITY;
        for eps in [0.0, 0.1, 0.3, 1.0] {
            let v = solve_empirical_lp(&samples, eps).unwrap().value;
            prop_assert!(v >= last - 1e-9);
            last = v;
        }
    }

    #[test]
    fn khintchine_lp_and_homogeneity(a in proptest::collection::vec(-3.0f64..3.0, 1..6), c in -4.0f64..4.0) {
        let k = khintchine_constant(&a).unwrap();
        prop_assert!((khintchine_constant(&scaled(&a, c)).unwrap() - c.abs() * k).abs() < 1e-9);
        let sol = solve_khintchine_lp(&a).unwrap();
        prop_assert!((sol.value - k).abs() < 1e-6);
        prop_assert!((sol.plus_probability() - 0.5).abs() < 1e-9);
    }
}

fn random_rule(r: &mut ChaCha8Rng, n: usize, m: usize) -> AllocationRule {
    let count = m.pow(n as u32);
    let alloc = (0..count)
        .map(|_| {
            let w: Vec<f64> = (0..=n).map(|_| r.gen_range(0.0..1.0)).collect();
            let total: f64 = w.iter().sum();
            w.iter().map(|v| v / total).collect()
        })
        .collect();
    AllocationRule::new(n, m, alloc).unwrap()
}

/// Bidder-averaged reduced form, which the symmetrized rule realizes.
fn symmetric_reduced_form(rule: &AllocationRule, q: &[f64]) -> ReducedForm {
    let forms = rule.reduced_forms(q);
    let n = forms.len() as f64;
    ReducedForm {
        tau: (0..q.len()).map(|t| forms.iter().map(|f| f[t]).sum::<f64>() / n).collect(),
    }
}
