//! Randomized extraction of a maximal-error, prior-free secure code from an
//! average-error, strongly secure base code.
//!
//! Each derived message `j` owns a cluster of base messages drawn uniformly
//! at random. A draw is kept only if its summed leakage and summed error stay
//! within the budgets `A` and `B` and few of its members were seen before.
//! The derived encoder mixes the cluster's base rows uniformly; the derived
//! decoder returns `j` when the base decoder lands in cluster `j`.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::error::ModelError;
use crate::model::RandomEncoderCode;
use crate::prob::{kl_slices, mutual_information_slice, output_slice, Channel, Divergence};
use crate::registry::Registry;

pub const DEFAULT_RETRY_BUDGET: usize = 64;

/// Slack on every budget comparison.
const BUDGET_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtractionError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("base code {what} is {measured}, above the allowed {limit}")]
    Refused {
        what: &'static str,
        measured: f64,
        limit: f64,
    },
    #[error("step {step} failed after {attempts} attempts (worst leakage sum {worst_leakage}, worst error sum {worst_error}, fewest collisions {fewest_collisions})")]
    RetriesExhausted {
        step: usize,
        attempts: usize,
        worst_leakage: f64,
        worst_error: f64,
        fewest_collisions: usize,
    },
    #[error("invalid parameters: {}", .0.join("; "))]
    Violations(Vec<String>),
}

/// `(J, K, β, A, B, δ)` plus the lemma-level `λ`, `μ` the base must meet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtractionParams {
    pub j: usize,
    pub k: usize,
    pub beta: f64,
    pub a_budget: f64,
    pub b_budget: f64,
    pub delta: f64,
    pub lambda: f64,
    pub mu: f64,
    pub retry_budget: usize,
    pub seed: u64,
}

impl ExtractionParams {
    pub fn collision_cap(&self) -> f64 {
        1.5 * self.k as f64 * self.beta
    }

    /// `K(1 − 3β/2)`, the guaranteed cluster size.
    pub fn min_cluster(&self) -> f64 {
        self.k as f64 * (1.0 - 1.5 * self.beta)
    }

    pub fn error_bound(&self) -> f64 {
        self.b_budget / self.min_cluster()
    }

    pub fn leakage_bound(&self) -> f64 {
        self.a_budget / self.min_cluster()
    }

    pub fn validate(&self) -> Result<(), ExtractionError> {
        let mut v = Vec::new();
        if self.j < 1 {
            v.push("J must be at least 1".to_owned());
        }
        if self.k < 1 {
            v.push("K must be at least 1".to_owned());
        }
        if !(0.0..0.25).contains(&self.beta) {
            v.push(format!("beta = {} must lie in [0, 1/4)", self.beta));
        }
        for (name, x) in [("A", self.a_budget), ("B", self.b_budget), ("delta", self.delta)] {
            if x.is_nan() || x < 0.0 {
                v.push(format!("{name} = {x} must be non-negative"));
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(ExtractionError::Violations(v))
        }
    }
}

/// Inputs to a parameter schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScheduleInput {
    pub n: usize,
    pub epsilon: f64,
    /// Target error and leakage of the derived code.
    pub lambda: f64,
    pub mu: f64,
    pub base_message_count: usize,
    pub delta: f64,
    /// Growth exponent of the family sizes; only the `theorem3` schedule reads it.
    pub a: f64,
    pub retry_budget: usize,
    pub seed: u64,
}

pub trait ParamSchedule: Send + Sync {
    /// `log₂ K` as a function of the inputs.
    fn log2_k(&self, inp: &ScheduleInput) -> f64;
    fn describe(&self) -> &'static str;

    /// `β = 1/n`, `J = ⌊β|U|/K⌋`, `A = Kμ/2`, `B = Kλ/2`; the base must meet
    /// `λ/8` and `μ/8`. A zero target gives a unit budget.
    fn derive(&self, inp: &ScheduleInput) -> Result<ExtractionParams, ExtractionError> {
        let mut v = Vec::new();
        if inp.n == 0 {
            v.push("n must be positive".to_owned());
        }
        for (name, x) in [("epsilon", inp.epsilon), ("lambda", inp.lambda), ("mu", inp.mu), ("delta", inp.delta)] {
            if !(x >= 0.0 && x.is_finite()) {
                v.push(format!("{name} = {x} must be finite and non-negative"));
            }
        }
        if !v.is_empty() {
            return Err(ExtractionError::Violations(v));
        }
        let k = (self.log2_k(inp).exp2().round() as usize).max(1);
        let beta = 1.0 / inp.n as f64;
        let j = (beta * inp.base_message_count as f64 / k as f64 + 1e-9).floor() as usize;
        if j < 1 {
            return Err(ExtractionError::Violations(vec![format!(
                "J = floor({} / ({} * {k})) is zero",
                inp.base_message_count, inp.n
            )]));
        }
        let budget = |target: f64| if target > 0.0 { k as f64 * target / 2.0 } else { 1.0 };
        let params = ExtractionParams {
            j,
            k,
            beta,
            a_budget: budget(inp.mu),
            b_budget: budget(inp.lambda),
            delta: inp.delta,
            lambda: inp.lambda / 8.0,
            mu: inp.mu / 8.0,
            retry_budget: inp.retry_budget,
            seed: inp.seed,
        };
        params.validate()?;
        Ok(params)
    }
}

struct Theorem1;
struct Theorem3;

impl ParamSchedule for Theorem1 {
    fn log2_k(&self, inp: &ScheduleInput) -> f64 {
        inp.n as f64 * inp.epsilon / 3.0
    }
    fn describe(&self) -> &'static str {
        "K = 2^(n eps / 3), beta = 1/n"
    }
}

impl ParamSchedule for Theorem3 {
    fn log2_k(&self, inp: &ScheduleInput) -> f64 {
        inp.n as f64 * (inp.a + inp.epsilon / 2.0)
    }
    fn describe(&self) -> &'static str {
        "K = 2^(n (a + eps / 2)), beta = 1/n; gives up rate a + eps"
    }
}

/// Built-in schedules: `theorem1`, `theorem3`.
pub fn schedules() -> Registry<dyn ParamSchedule> {
    let mut reg: Registry<dyn ParamSchedule> = Registry::new("schedule");
    reg.register("theorem1", Box::new(Theorem1)).register("theorem3", Box::new(Theorem3));
    reg
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Margin {
    pub name: &'static str,
    /// Natural log of the left-hand side.
    pub log_lhs: f64,
    /// `ln ¼ − log_lhs`; positive when the condition holds.
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreconditionReport {
    pub margins: Vec<Margin>,
    pub pass: bool,
}

/// The three sampling conditions, each compared with ¼ in the log domain:
/// `|V|·J·e^{−A/(4δ)}`, `|W|·J·e^{−B/4}`, `J·e^{−Kβ/32}`.
pub fn check_preconditions(params: &ExtractionParams, family_sizes: (usize, usize)) -> PreconditionReport {
    let (w, v) = family_sizes;
    let ln_j = (params.j as f64).ln();
    let leak_exp = if params.delta > 0.0 {
        params.a_budget / (4.0 * params.delta)
    } else if params.a_budget > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let raw = [
        ("leakage", (v as f64).ln() + ln_j - leak_exp),
        ("error", (w as f64).ln() + ln_j - params.b_budget / 4.0),
        ("collision", ln_j - params.k as f64 * params.beta / 32.0),
    ];
    let quarter = 0.25f64.ln();
    let margins: Vec<Margin> = raw
        .into_iter()
        .map(|(name, log_lhs)| Margin {
            name,
            log_lhs,
            margin: quarter - log_lhs,
            pass: log_lhs < quarter,
        })
        .collect();
    let pass = margins.iter().all(|m| m.pass);
    PreconditionReport { margins, pass }
}

/// Measured guarantees of a base code over the supplied families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BaseStats {
    /// Largest average error over the mains.
    pub lambda: f64,
    /// Largest uniform-message leakage over the wiretaps.
    pub mu: f64,
    /// Largest per-message divergence D_V(u).
    pub delta: f64,
}

struct Tables {
    /// `profiles[v][u]`: D_V(u) for wiretap v.
    profiles: Vec<Vec<f64>>,
    /// `errors[w][u]`: error of base message u over main w.
    errors: Vec<Vec<f64>>,
    stats: BaseStats,
}

fn tables(base: &RandomEncoderCode, mains: &[Channel], wiretaps: &[Channel]) -> Result<Tables, ExtractionError> {
    if mains.is_empty() || wiretaps.is_empty() {
        return Err(ModelError::EmptyChannelList.into());
    }
    let profiles: Vec<Vec<f64>> = wiretaps.iter().map(|v| base.leakage_profile(v)).collect::<Result<_, _>>()?;
    let errors: Vec<Vec<f64>> = mains.iter().map(|w| base.message_errors(w)).collect::<Result<_, _>>()?;
    let mean = |v: &Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
    let stats = BaseStats {
        lambda: errors.iter().map(mean).fold(0.0, f64::max),
        mu: profiles.iter().map(mean).fold(0.0, f64::max),
        delta: profiles.iter().flatten().copied().fold(0.0, f64::max),
    };
    Ok(Tables {
        profiles,
        errors,
        stats,
    })
}

pub fn measure_base(
    base: &RandomEncoderCode,
    mains: &[Channel],
    wiretaps: &[Channel],
) -> Result<BaseStats, ExtractionError> {
    Ok(tables(base, mains, wiretaps)?.stats)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepLog {
    pub step: usize,
    pub attempts: usize,
    pub leakage_sums: Vec<f64>,
    pub error_sums: Vec<f64>,
    pub collisions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractionResult {
    pub params: ExtractionParams,
    pub base_stats: BaseStats,
    pub clusters: Vec<Vec<usize>>,
    pub derived: RandomEncoderCode,
    pub step_log: Vec<StepLog>,
}

impl ExtractionResult {
    /// Stable JSON rendering; equal results give equal bytes.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("extraction results always serialize")
    }

    pub fn total_retries(&self) -> usize {
        self.step_log.iter().map(|s| s.attempts - 1).sum()
    }
}

/// Derived code for the given clusters of base messages.
pub fn derived_code(base: &RandomEncoderCode, clusters: &[Vec<usize>]) -> Result<RandomEncoderCode, ModelError> {
    let x = base.input_size();
    let mut data = vec![0.0; clusters.len() * x];
    let mut owner = vec![None; base.message_count()];
    for (j, cluster) in clusters.iter().enumerate() {
        if cluster.is_empty() {
            return Err(ModelError::invalid(format!("cluster {j} is empty")));
        }
        let w = 1.0 / cluster.len() as f64;
        for &u in cluster {
            if u >= base.message_count() {
                return Err(ModelError::invalid(format!("cluster {j} names unknown message {u}")));
            }
            owner[u] = Some(j);
            for (d, &e) in data[j * x..(j + 1) * x].iter_mut().zip(base.encoder().row(u)) {
                *d += w * e;
            }
        }
    }
    let decoder = base.decoder().iter().map(|d| d.and_then(|u| owner[u])).collect();
    RandomEncoderCode::new(Channel::from_computed(clusters.len(), x, data), decoder)
}

fn attempt_rng(seed: u64, step: usize, attempt: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((step as u64) << 32) | attempt as u64);
    rng
}

pub fn extract(
    base: &RandomEncoderCode,
    mains: &[Channel],
    wiretaps: &[Channel],
    params: &ExtractionParams,
) -> Result<ExtractionResult, ExtractionError> {
    params.validate()?;
    let t = tables(base, mains, wiretaps)?;
    let checks = [
        ("average error", t.stats.lambda, params.lambda),
        ("strong leakage", t.stats.mu, params.mu),
        ("per-message divergence", t.stats.delta, params.delta),
    ];
    for (what, measured, limit) in checks {
        if measured > limit + BUDGET_SLACK {
            return Err(ExtractionError::Refused { what, measured, limit });
        }
    }

    let total = base.message_count();
    let cap = params.collision_cap();
    let mut used: BTreeSet<usize> = BTreeSet::new();
    let mut clusters = Vec::with_capacity(params.j);
    let mut step_log = Vec::with_capacity(params.j);
    for step in 0..params.j {
        let mut worst = (f64::INFINITY, f64::INFINITY, usize::MAX);
        let mut accepted = None;
        for attempt in 0..params.retry_budget.max(1) {
            let mut rng = attempt_rng(params.seed, step, attempt);
            let draw: Vec<usize> = (0..params.k).map(|_| rng.random_range(0..total)).collect();
            let leakage_sums: Vec<f64> = t.profiles.iter().map(|p| draw.iter().map(|&u| p[u]).sum()).collect();
            let error_sums: Vec<f64> = t.errors.iter().map(|e| draw.iter().map(|&u| e[u]).sum()).collect();
            let mut seen = BTreeSet::new();
            let mut cluster = Vec::new();
            let mut collisions = 0;
            for &u in &draw {
                if used.contains(&u) || !seen.insert(u) {
                    collisions += 1;
                } else {
                    cluster.push(u);
                }
            }
            let max_leak = leakage_sums.iter().copied().fold(0.0, f64::max);
            let max_err = error_sums.iter().copied().fold(0.0, f64::max);
            let ok = max_leak <= params.a_budget + BUDGET_SLACK
                && max_err <= params.b_budget + BUDGET_SLACK
                && collisions as f64 <= cap + BUDGET_SLACK;
            worst = (worst.0.min(max_leak), worst.1.min(max_err), worst.2.min(collisions));
            if ok {
                cluster.sort_unstable();
                accepted = Some((
                    cluster,
                    StepLog {
                        step,
                        attempts: attempt + 1,
                        leakage_sums,
                        error_sums,
                        collisions,
                    },
                ));
                break;
            }
        }
        let Some((cluster, log)) = accepted else {
            return Err(ExtractionError::RetriesExhausted {
                step,
                attempts: params.retry_budget.max(1),
                worst_leakage: worst.0,
                worst_error: worst.1,
                fewest_collisions: worst.2,
            });
        };
        used.extend(cluster.iter().copied());
        clusters.push(cluster);
        step_log.push(log);
    }
    let derived = derived_code(base, &clusters)?;
    Ok(ExtractionResult {
        params: *params,
        base_stats: t.stats,
        clusters,
        derived,
        step_log,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelAudit {
    pub index: usize,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractionAudit {
    pub error_bound: f64,
    pub leakage_bound: f64,
    /// Largest per-message error of the derived code, per main channel.
    pub errors: Vec<ChannelAudit>,
    /// Information radius of the derived rows around the base uniform-prior
    /// marginal, per wiretap; bounds I(Ũ;Z̃) for every prior.
    pub radii: Vec<ChannelAudit>,
    /// Uniform-prior leakage of the derived code, per wiretap.
    pub uniform_leakage: Vec<f64>,
    pub disjoint: bool,
    pub sizes_ok: bool,
    /// Mixture divergence never exceeds the mean component divergence.
    pub convexity_ok: bool,
    pub pass: bool,
}

pub fn audit_extracted(
    result: &ExtractionResult,
    base: &RandomEncoderCode,
    mains: &[Channel],
    wiretaps: &[Channel],
    params: &ExtractionParams,
) -> Result<ExtractionAudit, ExtractionError> {
    let derived = derived_code(base, &result.clusters)?;
    let error_bound = params.error_bound();
    let leakage_bound = params.leakage_bound();

    let mut seen = BTreeSet::new();
    let disjoint = result.clusters.iter().flatten().all(|&u| seen.insert(u));
    let min = params.min_cluster();
    let sizes_ok = result
        .clusters
        .iter()
        .all(|c| c.len() as f64 >= min - BUDGET_SLACK && c.len() <= params.k);

    let errors = mains
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let value = derived.max_error(w)?;
            Ok(ChannelAudit {
                index: i,
                value,
                bound: error_bound,
                pass: value <= error_bound + BUDGET_SLACK,
            })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;

    let mut radii = Vec::new();
    let mut uniform_leakage = Vec::new();
    let mut convexity_ok = true;
    let base_uniform = vec![1.0 / base.message_count() as f64; base.message_count()];
    for (i, v) in wiretaps.iter().enumerate() {
        let base_induced = base.induced_message_channel(v)?;
        let reference = output_slice(&base_uniform, &base_induced);
        let induced = derived.induced_message_channel(v)?;
        let mut radius: f64 = 0.0;
        for (j, cluster) in result.clusters.iter().enumerate() {
            let d = match kl_slices(induced.row(j), &reference) {
                Divergence::Finite(d) => d,
                Divergence::Infinite => f64::INFINITY,
            };
            radius = radius.max(d);
            let mean: f64 = cluster
                .iter()
                .map(|&u| kl_slices(base_induced.row(u), &reference).finite().unwrap_or(f64::INFINITY))
                .sum::<f64>()
                / cluster.len() as f64;
            convexity_ok &= d <= mean + 1e-9;
        }
        radii.push(ChannelAudit {
            index: i,
            value: radius,
            bound: leakage_bound,
            pass: radius <= leakage_bound + BUDGET_SLACK,
        });
        let uniform = vec![1.0 / derived.message_count() as f64; derived.message_count()];
        uniform_leakage.push(mutual_information_slice(&uniform, &induced));
    }
    let pass = disjoint
        && sizes_ok
        && convexity_ok
        && errors.iter().all(|e| e.pass)
        && radii.iter().all(|r| r.pass);
    Ok(ExtractionAudit {
        error_bound,
        leakage_bound,
        errors,
        radii,
        uniform_leakage,
        disjoint,
        sizes_ok,
        convexity_ok,
        pass,
    })
}
