use gawcga::{PSpec, Schedules, SeqSpec, SlackBranch, Subsequence};
use gawcga_cli::config::{DictionarySpec, ElementSpec, PolicyConfig, SpaceSpec, SweepConfig, WitnessConfig};
use gawcga_cli::RunConfig;
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 10_000, failure_persistence: None, ..ProptestConfig::default() }
}

fn real() -> impl Strategy<Value = f64> {
    prop_oneof![0.0f64..1.0, 1e-300f64..1e300, Just(0.1), Just(1.0 / 3.0)]
}

fn seq() -> impl Strategy<Value = SeqSpec> {
    prop_oneof![
        real().prop_map(SeqSpec::constant),
        (real(), 0.0f64..5.0).prop_map(|(c, a)| SeqSpec::power(c, a)),
        (prop::collection::vec(real(), 1..5), 0usize..3, real()).prop_map(|(values, start, tail)| SeqSpec::Explicit { values, start, tail }),
        (real(), real(), 1usize..5, 1usize..5)
            .prop_map(|(on, off, start, step)| SeqSpec::Indicator { on, off, subsequence: Subsequence::Arithmetic { start, step } }),
    ]
}

fn schedules() -> impl Strategy<Value = Schedules> {
    (seq(), seq(), seq(), seq(), seq(), seq()).prop_map(|(t, t_prime, delta, delta_prime, eta, eta_prime)| Schedules {
        t,
        t_prime,
        delta,
        delta_prime,
        eta,
        eta_prime,
    })
}

fn witness() -> impl Strategy<Value = WitnessConfig> {
    prop_oneof![
        (1.01f64..10.0, real(), prop::option::of(1usize..50), prop::option::of(prop::collection::vec(1usize..500, 1..6)), 1usize..500, any::<bool>())
            .prop_map(|(q, alpha, gap, n_k, horizon, rel)| WitnessConfig::UnboundedEta {
                q,
                alpha,
                gap,
                n_k,
                horizon,
                branch: if rel { SlackBranch::Relative } else { SlackBranch::Absolute },
            }),
        (1.01f64..10.0, seq(), 1usize..500).prop_map(|(q, t, horizon)| WitnessConfig::FiniteLambda1 { q, t, horizon }),
        (1.01f64..10.0, schedules(), real(), 1usize..500)
            .prop_map(|(q, schedules, alpha, horizon)| WitnessConfig::InfiniteLambda1 { q, schedules, alpha, horizon }),
        (real(), 0.01f64..0.99, 1usize..40).prop_map(|(c, r, k_max)| WitnessConfig::SmoothSpace { p: PSpec::Geometric { c, r }, k_max }),
        (prop::collection::vec(real(), 1..5), real(), 1usize..40)
            .prop_map(|(excess, tail_bound, k_max)| WitnessConfig::SmoothSpace { p: PSpec::Explicit { excess, tail_bound }, k_max }),
    ]
}

fn run_config() -> impl Strategy<Value = RunConfig> {
    let space = prop_oneof![
        (1.01f64..100.0).prop_map(|q| SpaceSpec::Lq { q }),
        ((0.1f64..2.0, 1.1f64..3.0), 1usize..100).prop_map(|((c, a), horizon)| SpaceSpec::SmoothX { p: PSpec::Power { c, a }, horizon }),
    ];
    let dict = prop_oneof![
        (0usize..2, prop::option::of(1usize..100)).prop_map(|(i0, n)| DictionarySpec::Canonical { i0, n }),
        (1usize..50).prop_map(|n| DictionarySpec::CanonicalPairs { n }),
        (1usize..50).prop_map(|k_max| DictionarySpec::GSystem { k_max }),
        prop::collection::vec(prop::collection::vec((0usize..20, -1e3f64..1e3), 1..4), 1..4).prop_map(|atoms| DictionarySpec::Explicit { atoms }),
    ];
    let element = prop_oneof![
        prop::collection::vec((0usize..100, -1e3f64..1e3), 1..8).prop_map(|entries| ElementSpec::Sparse { entries }),
        (1usize..10, 10usize..40, 0usize..2).prop_map(|(nnz, dim, first)| ElementSpec::Random { nnz, dim, first }),
    ];
    let sweep = prop::option::of(prop::collection::vec(real(), 1..4)).prop_map(|t| SweepConfig { t, delta: Some(vec![0.0, 0.1]), ..Default::default() });
    (any::<u64>(), 1usize..10_000, real(), space, prop::option::of(dict), prop::option::of(element), prop::option::of(witness()), schedules(), prop::option::of(sweep))
        .prop_map(|(seed, max_steps, stop_tol, space, dictionary, element, witness, schedules, sweep)| RunConfig {
            seed,
            max_steps,
            stop_tol,
            space: Some(space),
            dictionary,
            element,
            witness,
            schedules,
            policy: PolicyConfig::default(),
            sweep,
            ..RunConfig::default()
        })
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn witness_parameters_round_trip(w in witness()) {
        let cfg = RunConfig { witness: Some(w), ..RunConfig::default() };
        let text = cfg.to_toml().unwrap();
        let back = RunConfig::parse(&text).unwrap();
        prop_assert_eq!(back, cfg);
    }

    #[test]
    fn run_config_round_trips(cfg in run_config()) {
        let text = cfg.to_toml().unwrap();
        let back = RunConfig::parse(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_toml().unwrap(), text);
    }
}
