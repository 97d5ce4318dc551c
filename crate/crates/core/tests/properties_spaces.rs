use gawcga::{dual_exponent, lq_norm, lq_norming_functional, Element, Functional, LqSpace, NormedSpace, SmoothSpaceX};
use proptest::prelude::*;

const REL: f64 = 1e-10;
const H: usize = 24;

fn cases() -> ProptestConfig {
    ProptestConfig { cases: 10_000, failure_persistence: None, ..ProptestConfig::default() }
}

fn sparse(lo: usize, hi: usize) -> impl Strategy<Value = Element<f64>> {
    prop::collection::vec((lo..=hi, -10.0f64..10.0), 0..10).prop_map(|v| Element::from_pairs(v).unwrap())
}

fn nonzero(lo: usize, hi: usize) -> impl Strategy<Value = Element<f64>> {
    sparse(lo, hi).prop_filter("non-zero", |x| x.linf_norm() > 1e-6)
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![1.05f64..8.0, Just(2.0), Just(1.5), Just(4.0)]
}

fn x_space() -> SmoothSpaceX<f64> {
    SmoothSpaceX::with_default_exponents(H).unwrap()
}

// independent l_q norm by direct summation with scaling by the largest entry
fn lq_oracle(q: f64, x: &Element<f64>) -> f64 {
    let m = x.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    m * x.iter().map(|(_, v)| (v.abs() / m).powf(q)).sum::<f64>().powf(1.0 / q)
}

// independent theta recursion: theta_1 = |x_1|, theta_n = (theta_{n-1}^{p_n} + |x_n|^{p_n})^{1/p_n}
fn theta_oracle(x: &Element<f64>, n: usize) -> f64 {
    let mut th = x.get(1).abs();
    for k in 2..=n {
        let p = 1.0 + 2f64.powf(1.0 - k as f64);
        let m = th.max(x.get(k).abs());
        if m > 0.0 {
            th = m * ((th / m).powf(p) + (x.get(k).abs() / m).powf(p)).powf(1.0 / p);
        }
    }
    th
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(cases())]

    #[test]
    fn lq_norm_axioms(q in exponent(), x in sparse(0, 40), y in sparse(0, 40), s in -5.0f64..5.0) {
        let sp = LqSpace::<f64>::new(q).unwrap();
        let (nx, ny) = (lq_norm(&sp, &x), lq_norm(&sp, &y));
        prop_assert!(nx >= 0.0);
        prop_assert_eq!(nx == 0.0, x.is_zero());
        prop_assert!(close(lq_norm(&sp, &x.scale(s)), s.abs() * nx, REL) || (s * nx).abs() < 1e-300);
        prop_assert!(lq_norm(&sp, &x.add(&y)) <= (nx + ny) * (1.0 + REL));
        prop_assert!(close(nx, lq_oracle(q, &x), REL));
    }

    #[test]
    fn lq_holder(q in exponent(), x in sparse(0, 40), a in sparse(0, 40)) {
        let sp = LqSpace::<f64>::new(q).unwrap();
        let f = Functional::new(a, 1.0);
        let lhs = f.apply(&x).abs();
        let rhs = sp.dual_norm(&f).unwrap() * lq_norm(&sp, &x);
        prop_assert!(lhs <= rhs * (1.0 + REL) + 1e-300);
    }

    #[test]
    fn lq_norming_contract(q in exponent(), x in nonzero(0, 40)) {
        let sp = LqSpace::<f64>::new(q).unwrap();
        let f = lq_norming_functional(&sp, &x).unwrap();
        prop_assert!(close(f.apply(&x), lq_norm(&sp, &x), REL));
        prop_assert!(close(sp.dual_norm(&f).unwrap(), 1.0, REL));
        let p = dual_exponent(q).unwrap();
        prop_assert!(close(lq_oracle(p, &f.coeffs), 1.0, REL));
    }

    #[test]
    fn dual_exponent_involution(q in 1.001f64..1e3) {
        let p = dual_exponent(q).unwrap();
        prop_assert!((dual_exponent(p).unwrap() - q).abs() <= 1e-12 * q.max(1.0));
    }

    #[test]
    fn x_norm_axioms(x in sparse(1, H), y in sparse(1, H), s in -5.0f64..5.0) {
        let sp = x_space();
        let (nx, ny) = (sp.norm(&x).unwrap(), sp.norm(&y).unwrap());
        prop_assert!(nx >= 0.0);
        prop_assert_eq!(nx == 0.0, x.is_zero());
        prop_assert!(close(sp.norm(&x.scale(s)).unwrap(), s.abs() * nx, REL) || (s * nx).abs() < 1e-300);
        prop_assert!(sp.norm(&x.add(&y)).unwrap() <= (nx + ny) * (1.0 + REL));
        prop_assert!(close(nx, theta_oracle(&x, H), REL) || nx == 0.0 && theta_oracle(&x, H) == 0.0);
    }

    #[test]
    fn x_theta_monotone_and_subadditive(x in sparse(1, H), y in sparse(1, H)) {
        let sp = x_space();
        let th = sp.theta_prefix(&x, H).unwrap();
        prop_assert!(th[1..].windows(2).all(|w| w[1] >= w[0] * (1.0 - REL)));
        for n in [1, 2, 5, H] {
            let s = sp.theta_norm(&x.add(&y), n).unwrap();
            prop_assert!(s <= (sp.theta_norm(&x, n).unwrap() + sp.theta_norm(&y, n).unwrap()) * (1.0 + REL));
        }
    }

    #[test]
    fn x_holder(x in sparse(1, H), a in sparse(1, H)) {
        let sp = x_space();
        let f = Functional::new(a, 1.0);
        let lhs = f.apply(&x).abs();
        let rhs = sp.nu_dual_norm(&f, H).unwrap() * sp.theta_norm(&x, H).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + REL) + 1e-300);
    }

    #[test]
    fn x_norming_contract(x in nonzero(1, H)) {
        let sp = x_space();
        let f = sp.x_norming_functional(&x).unwrap();
        prop_assert!(close(f.apply(&x), sp.norm(&x).unwrap(), REL));
        prop_assert!(close(sp.dual_norm(&f).unwrap(), 1.0, REL));
    }

    #[test]
    fn x_initial_segment((x, m) in nonzero(1, H).prop_flat_map(|x| { let lo = x.min_index().unwrap(); (Just(x), lo..=H) })) {
        let sp = x_space();
        let xm = x.truncate(m);
        let full = sp.x_norming_functional(&x).unwrap();
        let cut = Functional::new(full.coeffs.truncate(m), 1.0);
        let nu = sp.nu_dual_norm(&cut, m).unwrap();
        prop_assume!(nu > 1e-12);
        let direct = sp.x_norming_functional(&xm).unwrap();
        for j in 1..=m {
            let lhs = cut.coeff(j) / nu;
            prop_assert!((lhs - direct.coeff(j)).abs() <= REL * direct.coeffs.linf_norm().max(1e-300), "j = {}: {} vs {}", j, lhs, direct.coeff(j));
        }
    }

    #[test]
    fn x_norm_equivalence(x in sparse(1, H)) {
        let sp = x_space();
        let rho = sp.equivalence_constant();
        let n = sp.norm(&x).unwrap();
        let l1 = x.l1_norm();
        prop_assert!(rho * l1 <= n * (1.0 + REL) + 1e-300);
        prop_assert!(n <= l1 * (1.0 + REL) + 1e-300);
    }
}
