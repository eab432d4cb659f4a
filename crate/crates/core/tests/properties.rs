mod common;

use proptest::prelude::*;
use specsim::channel::{expected_deficiency, Channel, CoinCoupling};
use specsim::product::{
    bernoulli_power_spectrum, example_suite, mixture_spectrum, ExampleParams, WeightClassPmf,
    VERDICT_NECESSITY_VIOLATED, VERDICT_SUFFICIENT_TREND,
};
use specsim::source::{
    check_distance_bound, levy_distance, pushforward, shifted_coupling, spectrum_cdf, DeterministicMap, RealRvDist,
};
use specsim::spectrum::{build_spectrum, deficiency_measure, Pmf};

fn weights(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![0.01f64..1.0, (1u32..=4).prop_map(f64::from)], 1..=max)
}

fn pmf_from(w: &[f64], prefix: &str) -> Pmf {
    let total: f64 = w.iter().sum();
    Pmf::new(
        (0..w.len()).map(|i| format!("{prefix}{i}")).collect(),
        w.iter().map(|x| x / total).collect(),
    )
    .unwrap()
}

fn pmf(max: usize, prefix: &'static str) -> impl Strategy<Value = Pmf> {
    weights(max).prop_map(move |w| pmf_from(&w, prefix))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn spectrum_ignores_label_order(w in weights(10), rot in 0usize..10) {
        let p = pmf_from(&w, "a");
        let mut pairs: Vec<(String, f64)> = p.iter().map(|(l, q)| (l.to_string(), q)).collect();
        let k = rot % pairs.len();
        pairs.rotate_left(k);
        let q = Pmf::from_pairs(pairs).unwrap();
        prop_assert_eq!(build_spectrum(&p).unwrap(), build_spectrum(&q).unwrap());
    }

    #[test]
    fn spectrum_counts_support(p in pmf(12, "a")) {
        let s = build_spectrum(&p).unwrap();
        prop_assert!((s.support_size() - p.support_size() as f64).abs() < 1e-9);
        prop_assert!(s.is_full());
    }

    #[test]
    fn deficiency_grows_with_gamma(x in pmf(8, "x"), y in pmf(8, "y"), g in -3.0f64..3.0, dg in 0.0f64..2.0) {
        let (sx, sy) = (build_spectrum(&x).unwrap(), build_spectrum(&y).unwrap());
        let lo = deficiency_measure(&sx, &sy, g).unwrap().exact().unwrap();
        let hi = deficiency_measure(&sx, &sy, g + dg).unwrap().exact().unwrap();
        prop_assert!(lo <= hi);
        prop_assert!((0.0..=1.0).contains(&lo) && hi <= 1.0);
    }

    #[test]
    fn merging_symbols_raises_the_cdf(p in pmf(10, "x"), seed in any::<u64>(), m in 1usize..6, c in 0.0f64..5.0) {
        let map = common::random_map(&mut common::rng(seed), &p, m);
        let image = pushforward(&map, &p).unwrap();
        prop_assert!(spectrum_cdf(&image, c).unwrap() >= spectrum_cdf(&p, c).unwrap() - 1e-12);
    }

    #[test]
    fn distance_bound_holds(x in pmf(12, "x"), y in pmf(8, "y"), eps in 0.01f64..0.5, extra in 0.0f64..2.0) {
        let rep = check_distance_bound(&x, &y, eps, -eps.ln() + extra).unwrap();
        prop_assert!(rep.pass, "d = {} bound = {}", rep.d, rep.bound);
    }

    #[test]
    fn shifted_coupling_keeps_marginals(x in pmf(10, "x"), y in pmf(10, "y"), eps in 0.01f64..0.99) {
        let j = shifted_coupling(&x, &y, eps).unwrap();
        prop_assert!(j.marginal_error() <= 1e-12);
        let total: f64 = j.entries().iter().map(|e| e.2).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn levy_is_a_metric(a in pmf(6, "a"), b in pmf(6, "b"), c in pmf(6, "c")) {
        let [u, v, w] = [&a, &b, &c].map(|p| RealRvDist::self_information(p).unwrap());
        prop_assert_eq!(levy_distance(&u, &u), 0.0);
        prop_assert!((levy_distance(&u, &v) - levy_distance(&v, &u)).abs() < 1e-12);
        prop_assert!(levy_distance(&u, &w) <= levy_distance(&u, &v) + levy_distance(&v, &w) + 1e-12);
        prop_assert!(levy_distance(&u, &v) <= 1.0);
    }

    #[test]
    fn identical_rows_reduce_to_the_source(coin in pmf(6, "z"), target in pmf(6, "y"), inputs in pmf(4, "x"), g in -2.0f64..3.0) {
        let rows = |p: &Pmf| inputs.labels().iter().map(|x| (x.clone(), p.clone())).collect::<Vec<_>>();
        let chan = Channel::new(rows(&target)).unwrap();
        let coupling = CoinCoupling::new(rows(&coin)).unwrap();
        let ed = expected_deficiency(&inputs, &chan, &coupling, g).unwrap();
        let mu = deficiency_measure(&build_spectrum(&coin).unwrap(), &build_spectrum(&target).unwrap(), g)
            .unwrap().exact().unwrap();
        prop_assert!((ed - mu).abs() < 1e-12);
    }

    #[test]
    fn equal_components_make_a_plain_power(p in 0.01f64..0.49, alpha in 0.0f64..=0.5, n in 1u64..200) {
        let mix = mixture_spectrum(p, p, alpha, n).unwrap();
        let pure = bernoulli_power_spectrum(p, n).unwrap();
        for d in [0.0, 0.01, 0.25, 0.5, 0.75, 0.99] {
            let (a, b) = (mix.eval(d).unwrap(), pure.eval(d).unwrap());
            prop_assert!((a - b).abs() < 1e-9 * b.abs().max(1.0), "δ = {}: {} vs {}", d, a, b);
        }
    }

    #[test]
    fn materialized_power_matches_classes(p in 0.05f64..0.5, n in 1u64..=10) {
        let w = WeightClassPmf::bernoulli(p, n).unwrap();
        let full = build_spectrum(&w.to_pmf().unwrap()).unwrap();
        let classes = w.spectrum().unwrap();
        for d in [0.0, 0.1, 0.33, 0.5, 0.77, 0.999] {
            let (a, b) = (full.eval(d).unwrap(), classes.eval(d).unwrap());
            prop_assert!((a - b).abs() < 1e-9 * b.abs().max(1.0), "δ = {}: {} vs {}", d, a, b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // Well-separated parameters reach their asymptotic verdicts at moderate n.
    #[test]
    fn separated_examples_settle(
        q1 in 0.02f64..0.05, dp1 in 0.06f64..0.1, dq2 in 0.1f64..0.15, dp2 in 0.06f64..0.1,
        small in 0.0f64..0.1, big in 0.35f64..=0.5, n in prop::sample::select(vec![500u64, 1000, 2000]),
    ) {
        let p1 = q1 + dp1;
        let q2 = p1 + dq2;
        let p2 = q2 + dp2;
        let suff = ExampleParams::new(1, n).with_qp(q1, p1, q2, p2).with_weights(small, big);
        prop_assert_eq!(example_suite(&suff).unwrap().verdict, VERDICT_SUFFICIENT_TREND);
        let nec = ExampleParams::new(1, n).with_qp(q1, p1, q2, p2).with_weights(big, small);
        prop_assert_eq!(example_suite(&nec).unwrap().verdict, VERDICT_NECESSITY_VIOLATED);
        let nec2 = ExampleParams::new(2, n).with_qp(q1, p1, q2, p2).with_weights(big, small);
        let rep = example_suite(&nec2).unwrap();
        prop_assert_eq!(rep.verdict, VERDICT_NECESSITY_VIOLATED);
        prop_assert!(rep.quantity > 0.0);
    }
}

#[test]
fn normalized_spectrum_concentrates() {
    let p = 0.11;
    let h = specsim::product::binary_entropy(p).unwrap();
    let mut spread = Vec::new();
    for n in [500u64, 1000, 2000] {
        let s = bernoulli_power_spectrum(p, n).unwrap();
        let (a, b) = (s.eval(0.05).unwrap() / n as f64, s.eval(0.95).unwrap() / n as f64);
        assert!(a <= h && h <= b, "n = {n}: [{a}, {b}] misses {h}");
        spread.push(b - a);
    }
    assert!(spread.windows(2).all(|w| w[1] < w[0]), "{spread:?}");
}

#[test]
fn identity_map_pushes_forward_to_itself() {
    let p = pmf_from(&[0.5, 0.25, 0.125, 0.125], "a");
    assert_eq!(pushforward(&DeterministicMap::identity(&p), &p).unwrap(), p);
}
