//! Security advantages of a code against a set of wiretap channels.
//!
//! * strong leakage: max over wiretaps of I(U;Z) for a uniform message,
//! * mutual-information security (MIS): max over wiretaps and priors of I(U;Z),
//! * distinguishing advantage (DS): max over wiretaps and message pairs of the
//!   total variation between the two output laws,
//! * semantic advantage (SS): certified lower bound, see [`semantic`].

mod audit;
mod blahut;
pub mod semantic;
mod single_letter;

use serde::Serialize;
use thiserror::Error;

use crate::error::{ModelError, ProbError};
use crate::model::RandomEncoderCode;
use crate::prob::{tv_slices, Channel};

pub use audit::{audit_values, ds_to_mis_bound, equivalence_audit, pinsker_mis_floor, AuditCheck, EquivalenceAudit, AUDIT_SLACK};
pub use blahut::{blahut_arimoto, CapacityEstimate, DEFAULT_BA_MAX_ITER, DEFAULT_BA_TOL};
pub use semantic::{ss_advantage_lower, PriorLabel, SearchConfig, SsResult};
pub use single_letter::{
    optimize_single_letter, single_letter_objective, InnerMin, SingleLetterConfig, SingleLetterResult,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("at least one wiretap channel is required")]
    NoWiretaps,
    #[error("{0}")]
    Invalid(String),
}

impl From<ProbError> for MetricsError {
    fn from(e: ProbError) -> Self {
        MetricsError::Model(e.into())
    }
}

fn induced_all(code: &RandomEncoderCode, wiretaps: &[Channel]) -> Result<Vec<Channel>, MetricsError> {
    if wiretaps.is_empty() {
        return Err(MetricsError::NoWiretaps);
    }
    wiretaps
        .iter()
        .map(|v| code.induced_message_channel(v).map_err(MetricsError::from))
        .collect()
}

/// Value attained by a max over wiretap channels, with the maximizing index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorstCase {
    pub value: f64,
    pub wiretap: usize,
}

/// max over wiretaps of I(U;Z) for a uniform message.
pub fn strong_leakage(code: &RandomEncoderCode, wiretaps: &[Channel]) -> Result<WorstCase, MetricsError> {
    let mut best = WorstCase {
        value: f64::NEG_INFINITY,
        wiretap: 0,
    };
    if wiretaps.is_empty() {
        return Err(MetricsError::NoWiretaps);
    }
    for (i, v) in wiretaps.iter().enumerate() {
        let value = code.uniform_leakage(v)?;
        if value > best.value {
            best = WorstCase { value, wiretap: i };
        }
    }
    Ok(best)
}

/// MIS advantage: the largest capacity of an induced message channel.
#[derive(Debug, Clone, Serialize)]
pub struct MisResult {
    pub value: f64,
    pub wiretap: usize,
    pub prior: crate::prob::Distribution,
    pub converged: bool,
    pub tolerance: f64,
}

pub fn mis_advantage(
    code: &RandomEncoderCode,
    wiretaps: &[Channel],
    tol: f64,
    max_iter: usize,
) -> Result<MisResult, MetricsError> {
    let induced = induced_all(code, wiretaps)?;
    let mut best: Option<MisResult> = None;
    let mut all_converged = true;
    for (i, ch) in induced.iter().enumerate() {
        let est = blahut_arimoto(ch, tol, max_iter)?;
        all_converged &= est.converged;
        if best.as_ref().is_none_or(|b| est.capacity > b.value) {
            best = Some(MisResult {
                value: est.capacity,
                wiretap: i,
                prior: est.input,
                converged: true,
                tolerance: tol,
            });
        }
    }
    let mut best = best.expect("non-empty wiretap list");
    best.converged = all_converged;
    Ok(best)
}

/// DS advantage with the witnessing wiretap and message pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DsResult {
    pub value: f64,
    pub wiretap: usize,
    pub pair: (usize, usize),
}

pub fn ds_advantage(code: &RandomEncoderCode, wiretaps: &[Channel]) -> Result<DsResult, MetricsError> {
    let induced = induced_all(code, wiretaps)?;
    let mut best = DsResult {
        value: 0.0,
        wiretap: 0,
        pair: (0, 0),
    };
    for (i, ch) in induced.iter().enumerate() {
        let j = ch.input_size();
        for a in 0..j {
            for b in a + 1..j {
                let value = tv_slices(ch.row(a), ch.row(b)).min(1.0);
                if value > best.value {
                    best = DsResult {
                        value,
                        wiretap: i,
                        pair: (a, b),
                    };
                }
            }
        }
    }
    Ok(best)
}

/// All four advantages plus witnesses.
#[derive(Debug, Clone, Serialize)]
pub struct AdvantageReport {
    pub strong_leakage: WorstCase,
    pub mis: MisResult,
    pub ds: DsResult,
    pub ss: SsResult,
}

impl AdvantageReport {
    pub fn compute(
        code: &RandomEncoderCode,
        wiretaps: &[Channel],
        search: &SearchConfig,
        ba_tol: f64,
        ba_max_iter: usize,
    ) -> Result<Self, MetricsError> {
        Ok(Self {
            strong_leakage: strong_leakage(code, wiretaps)?,
            mis: mis_advantage(code, wiretaps, ba_tol, ba_max_iter)?,
            ds: ds_advantage(code, wiretaps)?,
            ss: ss_advantage_lower(code, wiretaps, search)?,
        })
    }
}
