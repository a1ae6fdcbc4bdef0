mod common;

use common::{channel, code, family, positive_channel};
use proptest::prelude::*;
use semsec_core::prob::{mutual_information, product_channel};
use semsec_core::{Distribution, GavwcInstance, Side, StateSequence};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn mean_leakage_is_uniform_mutual_information(
        (c, v) in (1usize..=5, 1usize..=4, 1usize..=5).prop_flat_map(|(j, x, z)| (code(j, x, 1), channel(x, z)))
    ) {
        let profile = c.leakage_profile(&v).unwrap();
        let mean = profile.iter().sum::<f64>() / profile.len() as f64;
        let induced = c.induced_message_channel(&v).unwrap();
        let mi = mutual_information(&Distribution::uniform(c.message_count()).unwrap(), &induced).unwrap();
        prop_assert!((mean - mi).abs() <= 1e-9);
        prop_assert!(profile.iter().all(|&d| d >= -1e-12));
    }

    #[test]
    fn profile_is_bounded_by_delta_for_positive_wiretaps(
        (c, taps) in (1usize..=5, 1usize..=4, 1usize..=5)
            .prop_flat_map(|(j, x, z)| (code(j, x, 1), prop::collection::vec(positive_channel(x, z), 1..=3)))
    ) {
        let x = taps[0].input_size();
        let g = GavwcInstance::new(1, vec![semsec_core::Channel::identity(x).unwrap()], taps.clone()).unwrap();
        let delta = g.uniform_delta_bound();
        for v in &taps {
            for d in c.leakage_profile(v).unwrap() {
                prop_assert!(d <= delta + 1e-9, "D = {d} > delta = {delta}");
            }
        }
    }

    #[test]
    fn profile_is_bounded_by_log_message_count(
        (c, v) in (1usize..=5, 1usize..=4, 1usize..=5).prop_flat_map(|(j, x, z)| (code(j, x, 1), channel(x, z)))
    ) {
        let cap = (c.message_count() as f64).log2();
        for d in c.leakage_profile(&v).unwrap() {
            prop_assert!(d <= cap + 1e-9, "D = {d} > log J = {cap}");
        }
    }

    #[test]
    fn average_error_never_exceeds_max_error(
        (c, w) in (1usize..=5, 1usize..=4, 1usize..=5).prop_flat_map(|(j, x, y)| (code(j, x, y), channel(x, y)))
    ) {
        let avg = c.average_error(&w).unwrap();
        let max = c.max_error(&w).unwrap();
        prop_assert!(avg <= max + 1e-15);
        prop_assert!((0.0..=1.0).contains(&avg) && (0.0..=1.0).contains(&max));
    }

    #[test]
    fn constant_sequence_is_a_product(
        (fam, state, n) in (1usize..=3, 1usize..=3, 1usize..=3)
            .prop_flat_map(|(s, x, y)| (family(s, x, y, 2), 0..s, 1usize..=3))
    ) {
        let seq = StateSequence::constant(state, n);
        for side in [Side::Main, Side::Wiretap] {
            let got = fam.state_sequence_channel(&seq, side).unwrap();
            let letter = fam.letter(state, side);
            let want = product_channel(&vec![letter; n]).unwrap();
            prop_assert_eq!(got.input_size(), want.input_size());
            for (a, b) in got.data().iter().zip(want.data()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn word_ids_round_trip(id in 0usize..729, radix in 2usize..=3) {
        let len = 6;
        let id = id % radix.pow(len as u32);
        let digits = semsec_core::model::word_digits(id, radix, len);
        prop_assert_eq!(semsec_core::model::word_id(&digits, radix), id);
    }
}
