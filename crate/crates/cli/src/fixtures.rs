//! Shipped example inputs, rebuilt from code so the files never drift.

use semsec_core::counterexample::{naive_identity_code, seeded_thetas};
use semsec_core::{AvwcFamily, Channel, ModelError, RandomEncoderCode, StatePair};

use crate::format::{save_model, save_system, save_v_theta, save_v_theta_system, Model};

/// Block length, Θ size, wiretap count and seed of the toy extraction system.
pub const TOY_N: usize = 8;
pub const TOY_F: usize = 16;
pub const TOY_WIRETAPS: usize = 4;
pub const TOY_SEED: u64 = 7;

pub fn bsc(p: f64) -> Channel {
    Channel::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]]).expect("valid crossover")
}

pub fn identity_family() -> Result<AvwcFamily, ModelError> {
    let id = Channel::identity(2)?;
    AvwcFamily::new(vec![StatePair {
        main: id.clone(),
        wiretap: id,
    }])
}

/// Two messages sent in the clear over a noiseless wiretap.
pub fn revealing_system() -> Result<(RandomEncoderCode, Model), ModelError> {
    let code = RandomEncoderCode::deterministic(&[0, 1], 2, vec![Some(0), Some(1)])?;
    Ok((code, Model::Family(identity_family()?)))
}

pub fn toy_thetas() -> Result<Vec<Vec<usize>>, ModelError> {
    Ok(seeded_thetas(TOY_N, TOY_F, TOY_WIRETAPS, TOY_SEED)?
        .iter()
        .map(|t| t.members().collect())
        .collect())
}

/// Main channel `y = x XOR s`; the wiretap sees the input through BSC(0.25).
pub fn xor_family() -> Result<AvwcFamily, ModelError> {
    let states = (0..2)
        .map(|s| {
            let rows = (0..2)
                .map(|x| (0..2).map(|y| f64::from(u8::from(y == x ^ s))).collect())
                .collect();
            Ok(StatePair {
                main: Channel::new(rows)?,
                wiretap: bsc(0.25),
            })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    AvwcFamily::new(states)
}

/// Single-state degraded pair: BSC(0.1) to the receiver, BSC(0.3) to the eavesdropper.
pub fn bsc_family() -> Result<AvwcFamily, ModelError> {
    AvwcFamily::new(vec![StatePair {
        main: bsc(0.1),
        wiretap: bsc(0.3),
    }])
}

pub fn v_theta_example() -> (usize, Vec<Vec<usize>>) {
    (4, vec![vec![0, 3, 5, 14], vec![1, 2, 7, 8]])
}

/// File name and rendered contents of every shipped fixture.
pub fn all() -> Result<Vec<(&'static str, String)>, ModelError> {
    let (code, model) = revealing_system()?;
    let (n, thetas) = v_theta_example();
    Ok(vec![
        ("identity_family.json", save_model(&Model::Family(identity_family()?))),
        ("revealing_system.json", save_system(&code, &model)),
        (
            "toy_system.json",
            save_v_theta_system(&naive_identity_code(TOY_N)?, TOY_N, &toy_thetas()?),
        ),
        ("xor_family.json", save_model(&Model::Family(xor_family()?))),
        ("bsc_family.json", save_model(&Model::Family(bsc_family()?))),
        ("v_theta.json", save_v_theta(n, &thetas)),
    ])
}
