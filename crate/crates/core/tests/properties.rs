use caplaw::expectation::{
    gaussian_family_log_upper_exp_moment_argmax, lower_capacity_exact, lower_expectation_exact,
    mc_upper_expectation, upper_expectation_exact, upper_probability_exact, DiscreteSampler,
};
use caplaw::nfunc::{numeric_conjugate, ConjugateQuery};
use caplaw::subgauss::{
    check_phi_subgaussian, chernoff_exponent, default_lambda_grid, tail_bound, tau_phi,
    GaussianOracle,
};
use caplaw::{
    DiscreteEvent, DiscreteModelFamily, DiscreteRandomVariable, GaussianMeanFamily, NFunction,
    SubGaussianParams,
};
use proptest::prelude::*;

fn power(q: f64, y: f64) -> f64 {
    let a = y.abs();
    if a <= 1.0 {
        a * a / 2.0
    } else {
        a.powf(q) / q - 1.0 / q + 0.5
    }
}

fn family_strategy() -> impl Strategy<Value = DiscreteModelFamily> {
    (1usize..=6, 1usize..=5).prop_flat_map(|(n, m)| {
        prop::collection::vec(prop::collection::vec(0.01f64..1.0, n), m).prop_map(move |raw| {
            let measures = raw
                .into_iter()
                .map(|w| {
                    let t: f64 = w.iter().sum();
                    w.into_iter().map(|v| v / t).collect()
                })
                .collect();
            DiscreteModelFamily::new(n, measures).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn conjugate_of_phi_p_is_phi_q(p in 1.2f64..4.0, y in -15.0f64..15.0) {
        let f = NFunction::phi_p(p).unwrap();
        let v = numeric_conjugate(&f, &ConjugateQuery::for_phi_p(p, y).unwrap()).unwrap();
        let q = p / (p - 1.0);
        prop_assert!(!v.truncated);
        prop_assert!((v.value - power(q, y)).abs() <= 1e-6 * (1.0 + power(q, y)));
    }

    #[test]
    fn conjugate_is_even(p in 1.2f64..4.0, y in 0.0f64..10.0) {
        let f = NFunction::phi_p(p).unwrap();
        let plus = numeric_conjugate(&f, &ConjugateQuery::for_phi_p(p, y).unwrap()).unwrap();
        let minus = numeric_conjugate(&f, &ConjugateQuery::for_phi_p(p, -y).unwrap()).unwrap();
        prop_assert_eq!(plus.value, minus.value);
    }

    #[test]
    fn fenchel_young(p in 1.2f64..4.0, x in -8.0f64..8.0, y in -8.0f64..8.0) {
        let f = NFunction::phi_p(p).unwrap();
        let conj = f.conjugate(y).unwrap();
        prop_assert!(x * y <= f.eval(x) + conj + 1e-12 * (1.0 + conj.abs()));
    }

    #[test]
    fn conjugation_reverses_order(a1 in 0.2f64..3.0, extra in 0.01f64..2.0, y in -6.0f64..6.0) {
        let small = NFunction::scaled(a1, 1.0, NFunction::phi_2()).unwrap();
        let large = NFunction::scaled(a1 + extra, 1.0, NFunction::phi_2()).unwrap();
        prop_assert!(small.conjugate(y).unwrap() >= large.conjugate(y).unwrap() - 1e-7);
    }

    #[test]
    fn scaling_identity(p in 1.3f64..3.5, a in 0.3f64..3.0, b in 0.3f64..3.0, y in -5.0f64..5.0) {
        let psi = NFunction::scaled(a, b, NFunction::phi_p(p).unwrap()).unwrap();
        let q = p / (p - 1.0);
        let expected = a * power(q, y / (a * b));
        prop_assert!((psi.conjugate(y).unwrap() - expected).abs() <= 1e-6 * (1.0 + expected));
    }

    #[test]
    fn lower_capacity_is_conjugate(fam in family_strategy(), mask in 0u32..64) {
        let n = fam.outcome_count();
        let members: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 1).collect();
        let a = DiscreteEvent::new(n, members.clone()).unwrap();
        let direct = fam
            .measures()
            .iter()
            .map(|q| members.iter().map(|&k| q[k]).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        let v = lower_capacity_exact(&fam, &a).unwrap();
        prop_assert!((v - direct).abs() <= 1e-12);
        prop_assert!(v <= upper_probability_exact(&fam, &a).unwrap() + 1e-12);
    }

    #[test]
    fn lower_expectation_is_negated_upper(fam in family_strategy(), seed in prop::collection::vec(-5.0f64..5.0, 6)) {
        let x = DiscreteRandomVariable::new(seed[..fam.outcome_count()].to_vec()).unwrap();
        let neg = x.map(|v| -v);
        let lower = lower_expectation_exact(&fam, &x).unwrap();
        prop_assert!((lower + upper_expectation_exact(&fam, &neg).unwrap()).abs() <= 1e-12);
        prop_assert!(lower <= upper_expectation_exact(&fam, &x).unwrap() + 1e-12);
    }

    #[test]
    fn tau_is_the_threshold(sigma in 0.2f64..3.0, spread in 0.0f64..1.0) {
        let fam = GaussianMeanFamily::new(vec![-spread, 0.0, spread], sigma).unwrap();
        let oracle = GaussianOracle::new(fam.clone());
        let grid = default_lambda_grid();
        let phi = NFunction::phi_2();
        let r = tau_phi(&oracle, &phi, fam.m_bar(), fam.m_under(), &grid, 4.0 * sigma, 1e-7).unwrap();
        for a in [r.tau, r.tau * 1.01, r.tau * 2.0] {
            let params = SubGaussianParams::new(a, fam.m_bar(), fam.m_under()).unwrap();
            prop_assert!(check_phi_subgaussian(&oracle, &phi, &params, &grid).unwrap().holds);
        }
        let below = SubGaussianParams::new(r.tau * 0.999, fam.m_bar(), fam.m_under()).unwrap();
        prop_assert!(!check_phi_subgaussian(&oracle, &phi, &below, &grid).unwrap().holds);
    }

    #[test]
    fn tail_exponent_dominates_chernoff(p in 1.3f64..4.0, a in 0.2f64..3.0, eps in 0.05f64..6.0, lambda in 0.001f64..20.0) {
        let phi = NFunction::phi_p(p).unwrap();
        let t = tail_bound(&phi, a, eps).unwrap();
        let c = chernoff_exponent(&phi, a, eps, lambda).unwrap();
        prop_assert!(t.exponent >= c - 1e-12 * (1.0 + c.abs()));
        let at_star = chernoff_exponent(&phi, a, eps, t.lambda_star).unwrap();
        prop_assert!((at_star - t.exponent).abs() <= 1e-9 * (1.0 + t.exponent));
    }

    #[test]
    fn gaussian_sup_sits_at_extreme_mean(means in prop::collection::vec(-2.0f64..2.0, 1..6), sigma in 0.1f64..3.0, lambda in 0.001f64..10.0, shift in -1.0f64..1.0) {
        let fam = GaussianMeanFamily::new(means, sigma).unwrap();
        let (_, up) = gaussian_family_log_upper_exp_moment_argmax(&fam, lambda, shift);
        let (_, down) = gaussian_family_log_upper_exp_moment_argmax(&fam, -lambda, shift);
        prop_assert_eq!(up, fam.m_bar());
        prop_assert_eq!(down, fam.m_under());
    }
}

#[test]
fn monte_carlo_agrees_with_exact_engine() {
    let fam = DiscreteModelFamily::new(
        4,
        vec![
            vec![0.1, 0.2, 0.3, 0.4],
            vec![0.4, 0.3, 0.2, 0.1],
            vec![0.25; 4],
        ],
    )
    .unwrap();
    let x = DiscreteRandomVariable::new(vec![-1.0, 0.5, 2.0, 3.0]).unwrap();
    let exact = upper_expectation_exact(&fam, &x).unwrap();
    let sampler = DiscreteSampler::new(&fam, &x).unwrap();
    let hits = (0..100u64)
        .filter(|&seed| {
            let est = mc_upper_expectation(&sampler, |v| v, 20_000, seed).unwrap();
            (est.estimate - exact).abs() <= 4.0 * est.std_error
        })
        .count();
    assert!(hits >= 99, "only {hits} of 100 seeds within 4 SE");
}
