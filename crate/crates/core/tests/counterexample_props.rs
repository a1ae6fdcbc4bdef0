use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use semsec_core::counterexample::{
    case1_attack, case2_audit, case2_leakage_bound, naive_identity_code, skewed_attack, strong_leakage_closed_form,
    theta_size, v_theta_channel, PartitionCode, ThetaSubset,
};

fn leakage(n: usize, theta: &ThetaSubset) -> f64 {
    naive_identity_code(n)
        .unwrap()
        .uniform_leakage(&v_theta_channel(theta).unwrap())
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leakage_depends_only_on_theta_size(n in 1usize..=6, f_frac in 0.0f64..1.0, seed in any::<u64>()) {
        let words = 1usize << n;
        let f = 1 + (f_frac * (words - 1) as f64) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<f64> = (0..6).map(|_| leakage(n, &ThetaSubset::random(n, f, &mut rng).unwrap())).collect();
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(hi - lo <= 1e-12, "spread {}", hi - lo);
        prop_assert!((values[0] - strong_leakage_closed_form(n, f).unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn skewed_exact_dominates_bound(n in 1usize..=7, f_frac in 0.0f64..1.0, seed in any::<u64>()) {
        let words = 1usize << n;
        let f = 1 + (f_frac * (words - 1) as f64) as usize;
        let theta = ThetaSubset::random_with_zero(n, f, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let res = skewed_attack(&theta).unwrap();
        prop_assert!(res.holds);
        prop_assert!(res.exact >= res.bound - 1e-12);
    }

    #[test]
    fn case1_chain_on_zero_error_codes(n in 2usize..=7, cell_bits in 0usize..=2, a in 0.3f64..0.9) {
        prop_assume!(cell_bits < n);
        let b = cell_bits as f64 / n as f64;
        prop_assume!(b < a && theta_size(n, a) >= 1 << cell_bits);
        let code = PartitionCode { n, cell_bits }.code().unwrap();
        let g = (-(n as f64)).exp2();
        let rep = match case1_attack(&code, n, a, g) {
            Ok(r) => r,
            // The covering sets may not fit inside Θ for coarse partitions.
            Err(_) => return Ok(()),
        };
        prop_assert_eq!(rep.legitimate_error, 0.0);
        prop_assert!(rep.success + rep.legitimate_error >= 1.0 - g - 1e-12);
        prop_assert!(rep.exact_normalized_leakage >= rep.fano_bound - 1e-9);
    }
}

#[test]
fn closed_form_decreases_along_the_theta_schedule() {
    for a in [0.25, 0.5] {
        let values: Vec<f64> = (4..=10)
            .map(|n| strong_leakage_closed_form(n, theta_size(n, a)).unwrap())
            .collect();
        for w in values.windows(2) {
            assert!(w[1] < w[0], "a = {a}: {values:?}");
        }
    }
}

#[test]
fn partition_code_stays_below_bound() {
    for (n, a, b) in [(4, 0.25, 0.5), (6, 1.0 / 6.0, 0.5), (6, 1.0 / 3.0, 2.0 / 3.0), (8, 0.25, 0.5)] {
        let audit = case2_audit(n, a, b, 32, 3).unwrap();
        assert!(audit.pass, "n={n} a={a} b={b}: {audit:?}");
        assert!(audit.worst_radius <= case2_leakage_bound(n, a, b).unwrap());
        assert_eq!(audit.thetas_checked, 40);
    }
}

#[test]
fn case1_on_a_two_word_partition() {
    let code = PartitionCode { n: 6, cell_bits: 1 }.code().unwrap();
    let rep = case1_attack(&code, 6, 0.5, 2f64.powi(-6)).unwrap();
    assert_eq!(rep.covered.len(), 4);
    assert_eq!(rep.theta.size(), 8);
    assert!(rep.success >= 1.0 - 2f64.powi(-6));
}
