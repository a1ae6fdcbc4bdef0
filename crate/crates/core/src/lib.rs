//! Finite-blocklength toolkit for arbitrarily varying wiretap channels:
//! security advantages and their equivalence audit, symmetrizability,
//! randomized extraction of maximal-error semantically secure codes, and
//! the counterexample systems separating strong from semantic secrecy.

pub mod avc;
pub mod counterexample;
pub mod error;
pub mod extraction;
pub mod metrics;
pub mod model;
pub mod prob;
pub mod registry;
pub mod simplex;

pub use error::{ModelError, ProbError};
pub use model::{AvwcFamily, GavwcInstance, RandomEncoderCode, Side, StatePair, StateSequence};
pub use prob::{Channel, Distribution, Divergence};
pub use registry::{Registry, UnknownStrategy};
