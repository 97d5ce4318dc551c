use gawcga::theory::{beta_bound, lemma4_check, modulus_empirical, modulus_lp_bound, partition, xi_solve, ErrorTerms, Grid, SmoothnessModel};
use gawcga::{LqSpace, Schedules, SeqSpec};
use proptest::prelude::*;

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig { cases: n, failure_persistence: None, ..ProptestConfig::default() }
}

const H: usize = 40;

fn values(start: usize, lo: f64, hi: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), lo..hi], H + 1 - start)
}

fn explicit(values: &[f64], start: usize) -> SeqSpec {
    SeqSpec::Explicit { values: values.to_vec(), start, tail: 0.0 }
}

proptest! {
    #![proptest_config(cases(10_000))]

    #[test]
    fn power_inequality_holds_on_hypotheses(q in 1.0001f64..20.0, a in 0.0f64..1e3, b in 1.0f64..1e3) {
        prop_assert!(lemma4_check(q, a, b).unwrap());
        // direct evaluation in logs: (a + b^q)^{1/q} <= a + b
        let lhs = ((a + b.powf(q)).ln() / q).exp();
        prop_assert!(lhs <= (a + b) * (1.0 + 1e-12));
    }

    #[test]
    fn power_inequality_rejects_outside(q in 0.1f64..1.0, a in -5.0f64..-1e-9, b in 0.0f64..0.999) {
        prop_assert!(lemma4_check(q, 1.0, 2.0).is_err());
        prop_assert!(lemma4_check(2.0, a, 2.0).is_err());
        prop_assert!(lemma4_check(2.0, 1.0, b).is_err());
    }

    #[test]
    fn partition_matches_definition(
        t in prop::collection::vec(0.01f64..1.0, H),
        tp in values(1, 0.0, 0.5),
        d in values(0, 0.0, 0.3),
        dp in values(0, 0.0, 0.3),
        e in values(1, 0.0, 0.3),
        ep in values(1, 0.0, 0.3),
        q in 1.2f64..5.0,
        alpha in 0.01f64..1.0,
    ) {
        let p = q / (q - 1.0);
        let sched = Schedules {
            t: explicit(&t, 1),
            t_prime: explicit(&tp, 1),
            delta: explicit(&d, 0),
            delta_prime: explicit(&dp, 0),
            eta: explicit(&e, 1),
            eta_prime: explicit(&ep, 1),
        };
        let part = partition(&sched, p, alpha, H);
        // eta_0 of the eta-sequence is not used: the conditions read eta_{n-1} with n >= 2
        let mut l1 = Vec::new();
        let mut l2 = Vec::new();
        for n in 2..=H {
            let tn = t[n - 1];
            let c1 = d[n - 1] + dp[n - 1] >= alpha * tn.powf(p);
            let c2 = e[n - 2] + ep[n - 2] >= alpha * tn.powf(p);
            let c3 = tp[n - 1] >= alpha.powf(1.0 / p) * tn;
            if c1 || c2 || c3 { l1.push(n) } else { l2.push(n) }
        }
        prop_assert_eq!(&part.lambda1, &l1);
        prop_assert_eq!(&part.lambda2, &l2);
        let sum: f64 = l2.iter().map(|&n| t[n - 1].powf(p)).sum();
        prop_assert!((part.lambda2_tp_sum - sum).abs() <= 1e-12 * sum.max(1.0));
    }

    #[test]
    fn xi_satisfies_equation(theta in 0.01f64..0.5, t in 0.01f64..1.0, q in 1.1f64..3.0, gamma in 0.1f64..3.0) {
        for model in [SmoothnessModel::L2Exact, SmoothnessModel::LpBound { q }, SmoothnessModel::Power { gamma, q }] {
            match xi_solve(&model, theta, t) {
                Ok(xi) => {
                    let g = model.rho(xi).unwrap() - theta * t * xi;
                    prop_assert!(g.abs() <= 1e-10 * xi.max(1.0), "{:?}: residual {}", model, g);
                }
                Err(e) => prop_assert!(matches!(e, gawcga::Error::NoRoot { .. }), "{:?}", e),
            }
        }
    }

    #[test]
    fn xi_increasing_in_t(theta in 0.01f64..0.5, t1 in 0.01f64..1.0, t2 in 0.01f64..1.0) {
        let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        prop_assume!(hi - lo > 1e-6);
        let a = xi_solve(&SmoothnessModel::L2Exact, theta, lo).unwrap();
        let b = xi_solve(&SmoothnessModel::L2Exact, theta, hi).unwrap();
        prop_assert!(a < b);
    }

    #[test]
    fn beta_zero_errors_shrinks_with_grid_floor(lo in 1e-8f64..1e-2, shrink in 1.5f64..100.0, nphi in 0.01f64..10.0, nf in 0.01f64..10.0) {
        let model = SmoothnessModel::L2Exact;
        let coarse = Grid { lo, hi: 1e3, points: 200 };
        let fine = Grid { lo: lo / shrink, hi: 1e3, points: 400 };
        let a = beta_bound(&model, ErrorTerms::default(), nf, nphi, &coarse).unwrap();
        let b = beta_bound(&model, ErrorTerms::default(), nf, nphi, &fine).unwrap();
        prop_assert!(b <= a * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(cases(200))]

    #[test]
    fn empirical_modulus_below_bounds(q in 1.1f64..2.0, u in 0.0f64..3.0, seed in any::<u64>()) {
        let sp = LqSpace::<f64>::new(q).unwrap();
        let est = modulus_empirical(&sp, u, 200, seed).unwrap();
        prop_assert!(est <= u.min(modulus_lp_bound(q, u).unwrap()) + 1e-12);
        prop_assert!(est >= 0.0);
    }
}
