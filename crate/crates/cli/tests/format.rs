use proptest::prelude::*;
use semsec_cli::fixtures::{identity_family, revealing_system, v_theta_example, xor_family};
use semsec_cli::format::v_theta_instance;
use semsec_cli::{load_str, save_code, save_model, save_system, save_v_theta, FormatError, Loaded, Model};
use semsec_core::counterexample::{v_theta_channel, ThetaSubset};
use semsec_core::{AvwcFamily, Channel, GavwcInstance, RandomEncoderCode, StatePair};

fn model(text: &str) -> Model {
    match load_str(text).unwrap() {
        Loaded::Model(m) => m,
        other => panic!("expected a model, got {other:?}"),
    }
}

#[test]
fn identity_family_round_trips_byte_identically() {
    let text = save_model(&Model::Family(identity_family().unwrap()));
    let again = save_model(&model(&text));
    assert_eq!(text, again);
}

#[test]
fn shipped_identity_fixture_round_trips() {
    let text = include_str!("../fixtures/identity_family.json");
    assert_eq!(save_model(&model(text)), text);
}

#[test]
fn row_sum_violation_names_the_row() {
    let text = r#"{
      "schema_version": "1.0",
      "kind": "avwc_family",
      "states": [{"main": [["1", "0"], ["0.51", "0.5"]], "wiretap": [["1", "0"], ["0", "1"]]}]
    }"#;
    let err = load_str(text).unwrap_err();
    let msg = err.to_string();
    assert!(matches!(err, FormatError::Model { .. }), "{err:?}");
    assert!(msg.contains("states[0].main"), "{msg}");
    assert!(msg.contains("row 1"), "{msg}");
    assert!(msg.contains("1.01"), "{msg}");
}

#[test]
fn syntax_errors_carry_line_and_column() {
    let err = load_str("{\n  \"schema_version\": \"1.0\",\n  \"kind\": oops\n}").unwrap_err();
    match err {
        FormatError::Syntax { line, column, .. } => assert_eq!((line, column), (3, 11)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn schema_errors_carry_the_field_path() {
    let text = r#"{"schema_version": "1.0", "kind": "avwc_family", "states": [{"main": [["1"]], "wiretap": 3}]}"#;
    match load_str(text).unwrap_err() {
        FormatError::Field { path, .. } => assert_eq!(path, "states[0].wiretap"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn non_decimal_probability_is_rejected() {
    let text = r#"{"schema_version": "1.0", "kind": "code", "encoder": [["one"]], "decoder": [0]}"#;
    match load_str(text).unwrap_err() {
        FormatError::Number { path, value } => {
            assert_eq!(path, "encoder[0][0]");
            assert_eq!(value, "one");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn future_major_version_is_rejected() {
    let text = save_model(&Model::Family(identity_family().unwrap())).replace("\"1.0\"", "\"2.0\"");
    assert!(matches!(load_str(&text), Err(FormatError::UnsupportedVersion { .. })));
}

#[test]
fn v_theta_shorthand_matches_programmatic_construction() {
    let (n, thetas) = v_theta_example();
    let loaded = model(&save_v_theta(n, &thetas));
    let wiretaps = thetas
        .iter()
        .map(|t| v_theta_channel(&ThetaSubset::new(n, t.iter().copied()).unwrap()).unwrap())
        .collect();
    let expected = GavwcInstance::new(n, vec![Channel::identity(1 << n).unwrap()], wiretaps).unwrap();
    assert_eq!(loaded, Model::Gavwc(expected.clone()));
    assert_eq!(v_theta_instance(n, &thetas).unwrap(), expected);
}

#[test]
fn system_round_trip_keeps_code_and_model() {
    let (code, m) = revealing_system().unwrap();
    match load_str(&save_system(&code, &m)).unwrap() {
        Loaded::System { code: c, model: mm } => {
            assert_eq!(c, code);
            assert_eq!(mm, m);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn family_channels_expand_to_block_length() {
    let fam = Model::Family(xor_family().unwrap());
    let (mains, taps) = fam.channels_for(8).unwrap();
    assert_eq!(mains.len(), 8);
    assert_eq!(taps.len(), 8);
    assert_eq!(mains[0].input_size(), 8);
    assert!(fam.channels_for(6).is_err());
}

#[test]
fn encoder_and_words_are_mutually_exclusive() {
    let both = r#"{"schema_version": "1.0", "kind": "code", "encoder": [["1"]], "words": [0], "input_size": 1, "decoder": [0]}"#;
    assert!(matches!(load_str(both), Err(FormatError::Field { .. })));
    let none = r#"{"schema_version": "1.0", "kind": "code", "decoder": [0]}"#;
    assert!(matches!(load_str(none), Err(FormatError::Field { .. })));
}

fn stochastic_row(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, len).prop_map(|mut r| {
        r[0] += 1e-3;
        let s: f64 = r.iter().sum();
        r.iter_mut().for_each(|v| *v /= s);
        r
    })
}

fn channel(x: usize, y: usize) -> impl Strategy<Value = Channel> {
    prop::collection::vec(stochastic_row(y), x).prop_map(|rows| Channel::new(rows).unwrap())
}

fn family() -> impl Strategy<Value = AvwcFamily> {
    (1usize..4, 1usize..4, 1usize..4, 1usize..4).prop_flat_map(|(s, x, y, z)| {
        prop::collection::vec((channel(x, y), channel(x, z)), s).prop_map(|pairs| {
            AvwcFamily::new(
                pairs
                    .into_iter()
                    .map(|(main, wiretap)| StatePair { main, wiretap })
                    .collect(),
            )
            .unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn family_round_trip(f in family()) {
        let m = Model::Family(f);
        let text = save_model(&m);
        prop_assert_eq!(model(&text), m);
    }

    #[test]
    fn gavwc_round_trip(mains in prop::collection::vec(channel(3, 2), 1..3), taps in prop::collection::vec(channel(3, 4), 1..3)) {
        let m = Model::Gavwc(GavwcInstance::new(2, mains, taps).unwrap());
        prop_assert_eq!(model(&save_model(&m)), m);
    }

    #[test]
    fn code_round_trip(enc in channel(3, 4), dec in prop::collection::vec(prop::option::of(0usize..3), 5)) {
        let code = RandomEncoderCode::new(enc, dec).unwrap();
        match load_str(&save_code(&code)).unwrap() {
            Loaded::Code(c) => prop_assert_eq!(c, code),
            other => prop_assert!(false, "{:?}", other),
        }
    }
}
