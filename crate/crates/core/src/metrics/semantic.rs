//! Certified lower bound on the semantic-security advantage.
//!
//! For a fixed prior, function `f` of the message and wiretap, the best
//! adversary is the MAP guess of `f(U)` from `Z` and the best simulator is
//! the constant MAP guess from the prior alone, so
//!
//! ```text
//! adv(prior, f, V) = Σ_z max_v Pr{f(U)=v, Z=z} − max_v Pr{f(U)=v}.
//! ```
//!
//! The value of `f` only matters through its level sets, so enumerating set
//! partitions of the message set covers every `f`. Priors are drawn from a
//! finite family (uniform, every two-point uniform prior, seeded flat
//! Dirichlet samples), which makes the maximum a lower bound.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Exp1};
use serde::Serialize;

use crate::model::RandomEncoderCode;
use crate::prob::{Channel, Distribution};

use super::{induced_all, MetricsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchConfig {
    pub dirichlet_samples: usize,
    pub partition_cap: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            dirichlet_samples: 256,
            partition_cap: 6,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriorLabel {
    Uniform,
    Pair { first: usize, second: usize },
    Dirichlet { sample: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct SsResult {
    pub value: f64,
    /// Set when the message count exceeds the partition cap and only the
    /// identity function with two-point priors was searched.
    pub restricted: bool,
    pub wiretap: usize,
    pub prior_label: PriorLabel,
    pub prior: Distribution,
    /// Block label of each message under the maximizing function.
    pub partition: Vec<usize>,
    pub partitions_searched: usize,
    pub priors_searched: usize,
}

/// All set partitions of `{0..n}` as restricted growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max + 1 {
            if i == 0 && b > 0 {
                break;
            }
            cur.push(b);
            rec(i + 1, n, if b > max || i == 0 { b } else { max }, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    rec(0, n, 0, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Advantage of the MAP adversary over the best simulator for one
/// (prior, partition, induced channel) triple.
pub fn map_advantage(prior: &[f64], partition: &[usize], induced: &Channel) -> f64 {
    let blocks = partition.iter().copied().max().map_or(0, |m| m + 1);
    let mut block_mass = vec![0.0; blocks];
    for (&p, &b) in prior.iter().zip(partition) {
        block_mass[b] += p;
    }
    let simulator = block_mass.iter().copied().fold(0.0, f64::max);
    let mut scratch = vec![0.0; blocks];
    let mut adversary = 0.0;
    for z in 0..induced.output_size() {
        scratch.iter_mut().for_each(|v| *v = 0.0);
        for (u, (&p, &b)) in prior.iter().zip(partition).enumerate() {
            if p > 0.0 {
                scratch[b] += p * induced.get(u, z);
            }
        }
        adversary += scratch.iter().copied().fold(0.0, f64::max);
    }
    (adversary - simulator).max(0.0)
}

fn candidate_priors(j: usize, search: &SearchConfig, restricted: bool) -> Vec<(PriorLabel, Vec<f64>)> {
    let mut out = Vec::new();
    if !restricted {
        out.push((PriorLabel::Uniform, vec![1.0 / j as f64; j]));
    }
    for a in 0..j {
        for b in a + 1..j {
            let mut p = vec![0.0; j];
            p[a] = 0.5;
            p[b] = 0.5;
            out.push((PriorLabel::Pair { first: a, second: b }, p));
        }
    }
    if !restricted {
        let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
        for sample in 0..search.dirichlet_samples {
            let mut p: Vec<f64> = (0..j).map(|_| Exp1.sample(&mut rng)).collect();
            let total: f64 = p.iter().sum();
            p.iter_mut().for_each(|v| *v /= total);
            out.push((PriorLabel::Dirichlet { sample }, p));
        }
    }
    out
}

pub fn ss_advantage_lower(
    code: &RandomEncoderCode,
    wiretaps: &[Channel],
    search: &SearchConfig,
) -> Result<SsResult, MetricsError> {
    let induced = induced_all(code, wiretaps)?;
    let j = code.message_count();
    let restricted = j > search.partition_cap;
    let partitions = if restricted {
        vec![(0..j).collect::<Vec<_>>()]
    } else {
        set_partitions(j)
    };
    let priors = candidate_priors(j, search, restricted);

    let mut best = SsResult {
        value: 0.0,
        restricted,
        wiretap: 0,
        prior_label: PriorLabel::Uniform,
        prior: Distribution::uniform(j)?,
        partition: vec![0; j],
        partitions_searched: partitions.len(),
        priors_searched: priors.len(),
    };
    if j < 2 {
        return Ok(best);
    }
    for (w, ch) in induced.iter().enumerate() {
        for (label, prior) in &priors {
            for part in &partitions {
                let value = map_advantage(prior, part, ch);
                if value > best.value {
                    best.value = value;
                    best.wiretap = w;
                    best.prior_label = *label;
                    best.prior = Distribution::from_computed(prior.clone());
                    best.partition = part.clone();
                }
            }
        }
    }
    Ok(best)
}
