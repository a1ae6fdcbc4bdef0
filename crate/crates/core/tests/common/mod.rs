#![allow(dead_code)]

use proptest::prelude::*;
use semsec_core::{AvwcFamily, Channel, Distribution, RandomEncoderCode, StatePair};

/// Strictly positive probability vector of the given length.
pub fn positive_probs(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-3f64..1.0, len).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

/// Probability vector that may contain exact zeros.
pub fn probs(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.0f64..1.0], len).prop_map(move |mut v| {
        if v.iter().all(|&x| x == 0.0) {
            v[0] = 1.0;
        }
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

pub fn dist(len: usize) -> impl Strategy<Value = Distribution> {
    probs(len).prop_map(|p| Distribution::new(p).unwrap())
}

pub fn channel(inputs: usize, outputs: usize) -> impl Strategy<Value = Channel> {
    prop::collection::vec(probs(outputs), inputs).prop_map(|rows| Channel::new(rows).unwrap())
}

pub fn positive_channel(inputs: usize, outputs: usize) -> impl Strategy<Value = Channel> {
    prop::collection::vec(positive_probs(outputs), inputs).prop_map(|rows| Channel::new(rows).unwrap())
}

/// Random code with `j` messages over `x` inputs and a decoder on `y` outputs.
pub fn code(j: usize, x: usize, y: usize) -> impl Strategy<Value = RandomEncoderCode> {
    (channel(j, x), prop::collection::vec(prop::option::weighted(0.9, 0..j), y))
        .prop_map(|(enc, dec)| RandomEncoderCode::new(enc, dec).unwrap())
}

/// A code together with 1..=3 wiretaps on a shared output alphabet.
pub fn system() -> impl Strategy<Value = (RandomEncoderCode, Vec<Channel>)> {
    (1usize..=4, 1usize..=4, 1usize..=5).prop_flat_map(|(j, x, z)| {
        (code(j, x, 1), prop::collection::vec(channel(x, z), 1..=3))
    })
}

pub fn family(states: usize, x: usize, y: usize, z: usize) -> impl Strategy<Value = AvwcFamily> {
    prop::collection::vec((channel(x, y), channel(x, z)), states).prop_map(|pairs| {
        AvwcFamily::new(pairs.into_iter().map(|(main, wiretap)| StatePair { main, wiretap }).collect()).unwrap()
    })
}
