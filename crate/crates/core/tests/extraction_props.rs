use proptest::prelude::*;
use semsec_core::counterexample::{naive_identity_code, seeded_thetas, v_theta_channel};
use semsec_core::extraction::{audit_extracted, extract, measure_base, ExtractionError, ExtractionParams, DEFAULT_RETRY_BUDGET};
use semsec_core::{Channel, RandomEncoderCode};

struct Setup {
    base: RandomEncoderCode,
    mains: Vec<Channel>,
    wiretaps: Vec<Channel>,
}

fn setup() -> Setup {
    let n = 6;
    let wiretaps = seeded_thetas(n, 8, 3, 5)
        .unwrap()
        .iter()
        .map(|t| v_theta_channel(t).unwrap())
        .collect();
    Setup {
        base: naive_identity_code(n).unwrap(),
        mains: vec![Channel::identity(1 << n).unwrap()],
        wiretaps,
    }
}

fn params(s: &Setup, j: usize, scale: f64, seed: u64) -> ExtractionParams {
    let stats = measure_base(&s.base, &s.mains, &s.wiretaps).unwrap();
    let k = 8;
    ExtractionParams {
        j,
        k,
        beta: 1.0 / 16.0,
        a_budget: scale * k as f64 * stats.mu,
        b_budget: 1.0,
        delta: stats.delta,
        lambda: stats.lambda,
        mu: stats.mu,
        retry_budget: DEFAULT_RETRY_BUDGET,
        seed,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn single_step_retries_are_monotone(seed in any::<u64>(), scale in 0.8f64..3.0, extra in 1.0f64..2.0) {
        let s = setup();
        let tight = params(&s, 1, scale, seed);
        let mut loose = tight;
        loose.a_budget *= extra;
        let Ok(t) = extract(&s.base, &s.mains, &s.wiretaps, &tight) else {
            return Ok(());
        };
        let l = extract(&s.base, &s.mains, &s.wiretaps, &loose).unwrap();
        prop_assert!(l.total_retries() <= t.total_retries());
    }

    #[test]
    fn accepted_clusters_satisfy_the_audit(seed in any::<u64>(), j in 1usize..=3, scale in 1.5f64..4.0) {
        let s = setup();
        let p = params(&s, j, scale, seed);
        let Ok(res) = extract(&s.base, &s.mains, &s.wiretaps, &p) else {
            return Ok(());
        };
        let audit = audit_extracted(&res, &s.base, &s.mains, &s.wiretaps, &p).unwrap();
        prop_assert!(audit.disjoint);
        prop_assert!(audit.sizes_ok);
        prop_assert!(audit.convexity_ok);
        prop_assert!(audit.pass, "{audit:?}");
        for (radius, leak) in audit.radii.iter().zip(&audit.uniform_leakage) {
            prop_assert!(*leak <= radius.value + 1e-9);
        }
        for c in &res.clusters {
            prop_assert!(c.len() as f64 >= p.min_cluster());
        }
    }

    #[test]
    fn identical_inputs_give_identical_results(seed in any::<u64>(), j in 1usize..=3) {
        let s = setup();
        let p = params(&s, j, 3.0, seed);
        let a = extract(&s.base, &s.mains, &s.wiretaps, &p);
        let b = extract(&s.base, &s.mains, &s.wiretaps, &p);
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a.canonical_json(), b.canonical_json()),
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            _ => prop_assert!(false, "runs disagree"),
        }
    }

    #[test]
    fn larger_budgets_never_need_more_attempts(seed in any::<u64>(), j in 1usize..=3, scale in 1.2f64..3.0, extra in 1.0f64..2.0) {
        let s = setup();
        let tight = params(&s, j, scale, seed);
        let mut loose = tight;
        loose.a_budget *= extra;
        loose.b_budget *= extra;
        let Ok(t) = extract(&s.base, &s.mains, &s.wiretaps, &tight) else {
            return Ok(());
        };
        // Each step draws from its own stream, so attempts compare directly
        // for as long as the earlier clusters (and hence collisions) agree.
        // Once a looser step accepts a different cluster, later steps see a
        // different used set and may even run out of retries.
        let l = match extract(&s.base, &s.mains, &s.wiretaps, &loose) {
            Ok(l) => l,
            Err(ExtractionError::RetriesExhausted { step, .. }) => {
                prop_assert!(step > 0, "the first step cannot regress");
                return Ok(());
            }
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        for step in 0..j {
            prop_assert!(l.step_log[step].attempts <= t.step_log[step].attempts);
            if l.clusters[step] != t.clusters[step] {
                break;
            }
        }
        if l.clusters == t.clusters {
            prop_assert!(l.total_retries() <= t.total_retries());
        }
    }
}
