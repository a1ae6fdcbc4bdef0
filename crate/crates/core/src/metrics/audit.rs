//! Numeric audit of the four reductions linking SS, DS and MIS.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::model::RandomEncoderCode;
use crate::prob::Channel;

use super::{ds_advantage, mis_advantage, ss_advantage_lower, MetricsError, SearchConfig};

/// Absolute slack allowed on every audited inequality.
pub const AUDIT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`; non-negative up to the allowed slack when the check holds.
    pub slack: f64,
    pub pass: bool,
}

impl AuditCheck {
    fn new(name: &'static str, lhs: f64, rhs: f64, allowance: f64) -> Self {
        Self {
            name,
            lhs,
            rhs,
            slack: rhs - lhs,
            pass: lhs <= rhs + allowance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceAudit {
    pub ss_lower: f64,
    pub ds: f64,
    pub mis: f64,
    pub wiretap_output_size: usize,
    /// ss ≤ ds, ds ≤ 2·ss, Pinsker, and the DS→MIS continuity bound, in that order.
    pub checks: Vec<AuditCheck>,
    /// Whether the linear reading `ds/2 ≤ mis` also holds. Reported only;
    /// the Pinsker chain supports the squared form.
    pub linear_pinsker_holds: bool,
}

impl EquivalenceAudit {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&AuditCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Largest I(U;Z) compatible with distinguishing advantage `ds` over an
/// output alphabet of `z_size` symbols: `2·ds·log₂(z_size/ds)`.
pub fn ds_to_mis_bound(ds: f64, z_size: usize) -> f64 {
    if ds <= 0.0 {
        0.0
    } else {
        2.0 * ds * (z_size as f64 / ds).log2()
    }
}

/// Pinsker lower bound on MIS in bits: the uniform prior on the witnessing
/// pair has joint-versus-product distance ds/2, hence I ≥ 2(ds/2)² nats.
pub fn pinsker_mis_floor(ds: f64) -> f64 {
    ds * ds / (2.0 * LN_2)
}

pub fn equivalence_audit(
    code: &RandomEncoderCode,
    wiretaps: &[Channel],
    search: &SearchConfig,
    ba_tol: f64,
    ba_max_iter: usize,
) -> Result<EquivalenceAudit, MetricsError> {
    let ss = ss_advantage_lower(code, wiretaps, search)?.value;
    let ds = ds_advantage(code, wiretaps)?.value;
    let mis = mis_advantage(code, wiretaps, ba_tol, ba_max_iter)?.value;
    let z = wiretaps[0].output_size();
    Ok(audit_values(ss, ds, mis, z, ba_tol))
}

/// Audit from precomputed advantages; `mis_tol` is the capacity solver's gap.
pub fn audit_values(ss: f64, ds: f64, mis: f64, z_size: usize, mis_tol: f64) -> EquivalenceAudit {
    let checks = vec![
        AuditCheck::new("ss_le_ds", ss, ds, AUDIT_SLACK),
        AuditCheck::new("ds_le_2ss", ds, 2.0 * ss, AUDIT_SLACK),
        AuditCheck::new("pinsker", pinsker_mis_floor(ds), mis, AUDIT_SLACK + mis_tol),
        AuditCheck::new("ds_to_mis", mis, ds_to_mis_bound(ds, z_size), AUDIT_SLACK),
    ];
    EquivalenceAudit {
        ss_lower: ss,
        ds,
        mis,
        wiretap_output_size: z_size,
        checks,
        linear_pinsker_holds: ds / 2.0 <= mis + AUDIT_SLACK + mis_tol,
    }
}
