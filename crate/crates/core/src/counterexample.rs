//! The Θ-indexed wiretap system that separates strong from semantic
//! secrecy, its codes and attacks, and the erasure family that separates
//! average from maximal error.
//!
//! Input and output words of length `n` are integer ids in `0..2^n`; the
//! all-zero word has id 0.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::ModelError;
use crate::model::RandomEncoderCode;
use crate::prob::{
    binary_entropy, channel_radius, entropy_slice, mutual_information_slice, Channel, DEFAULT_CELL_CAP,
};
use crate::registry::Registry;

/// Largest block length whose `2^n × 2^n` channels fit the default cell cap.
pub const MAX_BLOCK_LENGTH: usize = 10;

fn check_n(n: usize) -> Result<usize, ModelError> {
    if n == 0 {
        return Err(ModelError::ZeroBlockLength);
    }
    if n > MAX_BLOCK_LENGTH {
        return Err(ModelError::invalid(format!(
            "block length {n} exceeds {MAX_BLOCK_LENGTH} (cell cap {DEFAULT_CELL_CAP})"
        )));
    }
    Ok(1usize << n)
}

/// `f = ⌈2^{na}⌉`, clipped to `[1, 2^n]`.
pub fn theta_size(n: usize, a: f64) -> usize {
    let words = 1usize << n;
    (((n as f64 * a).exp2() - 1e-9).ceil() as usize).clamp(1, words)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThetaSubset {
    n: usize,
    members: BTreeSet<usize>,
}

impl ThetaSubset {
    pub fn new(n: usize, members: impl IntoIterator<Item = usize>) -> Result<Self, ModelError> {
        let words = check_n(n)?;
        let members: BTreeSet<usize> = members.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&m| m >= words) {
            return Err(ModelError::invalid(format!("word {bad} outside 0..{words}")));
        }
        Ok(Self { n, members })
    }

    pub fn random<R: Rng>(n: usize, f: usize, rng: &mut R) -> Result<Self, ModelError> {
        let words = check_n(n)?;
        if f > words {
            return Err(ModelError::invalid(format!("|Θ| = {f} exceeds {words} words")));
        }
        Self::new(n, sample(rng, words, f))
    }

    /// Random subset of size `f` that contains the all-zero word.
    pub fn random_with_zero<R: Rng>(n: usize, f: usize, rng: &mut R) -> Result<Self, ModelError> {
        let words = check_n(n)?;
        if f == 0 || f > words {
            return Err(ModelError::invalid(format!("|Θ| = {f} must lie in 1..={words}")));
        }
        let rest = sample(rng, words - 1, f - 1).into_iter().map(|w| w + 1);
        Self::new(n, std::iter::once(0).chain(rest))
    }

    /// `f` consecutive ids starting at `start`, wrapping around.
    pub fn contiguous(n: usize, start: usize, f: usize) -> Result<Self, ModelError> {
        let words = check_n(n)?;
        Self::new(n, (0..f.min(words)).map(|i| (start + i) % words))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, word: usize) -> bool {
        self.members.contains(&word)
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }
}

/// `count` independent random subsets of size `f` from one seeded stream.
pub fn seeded_thetas(n: usize, f: usize, count: usize, seed: u64) -> Result<Vec<ThetaSubset>, ModelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| ThetaSubset::random(n, f, &mut rng)).collect()
}

/// Identity on Θ, uniform over all `2^n` outputs elsewhere.
pub fn v_theta_channel(theta: &ThetaSubset) -> Result<Channel, ModelError> {
    let words = check_n(theta.n)?;
    let noise = 1.0 / words as f64;
    let mut data = vec![noise; words * words];
    for x in theta.members() {
        let row = &mut data[x * words..(x + 1) * words];
        row.iter_mut().for_each(|v| *v = 0.0);
        row[x] = 1.0;
    }
    Ok(Channel::from_computed(words, words, data))
}

/// Identity off Θ; inputs in Θ are erased to the extra output `2^n`.
pub fn gavc_erasure_channel(theta: &ThetaSubset) -> Result<Channel, ModelError> {
    let words = check_n(theta.n)?;
    let outputs = words + 1;
    let mut data = vec![0.0; words * outputs];
    for x in 0..words {
        let y = if theta.contains(x) { words } else { x };
        data[x * outputs + y] = 1.0;
    }
    Ok(Channel::from_computed(words, outputs, data))
}

/// Rate-one code: message `u` is sent as word `u` and decoded as itself.
pub fn naive_identity_code(n: usize) -> Result<RandomEncoderCode, ModelError> {
    let words = check_n(n)?;
    let ids: Vec<usize> = (0..words).collect();
    RandomEncoderCode::deterministic(&ids, words, ids.iter().copied().map(Some).collect())
}

/// The naive code with a decoder that also covers the erasure symbol.
pub fn naive_erasure_code(n: usize) -> Result<RandomEncoderCode, ModelError> {
    let words = check_n(n)?;
    let ids: Vec<usize> = (0..words).collect();
    let decoder = (0..=words).map(|y| (y < words).then_some(y)).collect();
    RandomEncoderCode::deterministic(&ids, words, decoder)
}

/// Uniform-message leakage of the naive code through any `V_Θ` with `|Θ| = f`.
pub fn strong_leakage_closed_form(n: usize, f: usize) -> Result<f64, ModelError> {
    let words = check_n(n)?;
    if f == 0 || f > words {
        return Err(ModelError::invalid(format!("f = {f} must lie in 1..={words}")));
    }
    let w = words as f64;
    let f = f as f64;
    let ratio = f / w;
    let first = f * n as f64 / w;
    let second = if f == w {
        0.0
    } else {
        (w - f).powi(2) / (w * w) * (1.0 - ratio).log2()
    };
    let third = (2.0 * w - f) * f / (w * w) * (2.0 - ratio).log2();
    Ok(first - second - third)
}

#[derive(Debug, Clone, Serialize)]
pub struct SkewedAttack {
    pub bound: f64,
    pub exact: f64,
    pub holds: bool,
}

/// Closed-form lower bound for the skewed prior (½ on the zero word).
pub fn skewed_bound(n: usize, f: usize) -> f64 {
    let w = (1usize << n) as f64;
    0.5 * (2.0 / (1.0 + (w - f as f64) / (w * (w - 1.0)))).log2()
}

/// Skewed prior: ½ on the zero word, the rest spread uniformly.
pub fn skewed_prior(n: usize) -> Vec<f64> {
    let words = 1usize << n;
    let mut p = vec![0.5 / (words - 1) as f64; words];
    p[0] = 0.5;
    p
}

pub fn skewed_attack(theta: &ThetaSubset) -> Result<SkewedAttack, ModelError> {
    if !theta.contains(0) {
        return Err(ModelError::invalid("the skewed attack needs the all-zero word in Θ"));
    }
    if theta.n < 1 {
        return Err(ModelError::ZeroBlockLength);
    }
    let ch = v_theta_channel(theta)?;
    let exact = mutual_information_slice(&skewed_prior(theta.n), &ch);
    let bound = skewed_bound(theta.n, theta.size());
    Ok(SkewedAttack {
        bound,
        exact,
        holds: exact >= bound - 1e-12,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Case1Report {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub g: f64,
    pub theta: ThetaSubset,
    /// Messages whose decoding sets Θ covers, smallest sets first.
    pub covered: Vec<usize>,
    pub prior: Vec<f64>,
    /// Probability the eavesdropper decodes correctly through `V_Θ` with the
    /// code's own decoding sets.
    pub success: f64,
    /// Error of the legitimate receiver over the noiseless main channel.
    pub legitimate_error: f64,
    pub message_entropy: f64,
    /// `(H(M) − h(P_e) − P_e·log₂(J−1)) / n`, a lower bound on `I(M;Y)/n`.
    pub fano_bound: f64,
    pub exact_normalized_leakage: f64,
}

/// Decoding-attack on a code of rate above `1 − a`.
pub fn case1_attack(code: &RandomEncoderCode, n: usize, a: f64, g: f64) -> Result<Case1Report, ModelError> {
    let words = check_n(n)?;
    if code.input_size() != words || code.decoder().len() != words {
        return Err(ModelError::invalid(format!("code must act on {words} words")));
    }
    if !(0.0..=1.0).contains(&g) {
        return Err(ModelError::invalid(format!("tail mass g = {g} outside [0, 1]")));
    }
    let j = code.message_count();
    let r = (j as f64).log2() / n as f64;
    let b = 1.0 - r;
    if b >= a {
        return Err(ModelError::invalid(format!("rate {r} does not exceed 1 - a = {}", 1.0 - a)));
    }
    let f = theta_size(n, a);
    let cover_count = (((n as f64 * (a - b)).exp2() + 1e-9).floor() as usize).clamp(1, j);

    let mut sets: Vec<Vec<usize>> = vec![Vec::new(); j];
    for (y, d) in code.decoder().iter().enumerate() {
        if let Some(m) = d {
            sets[*m].push(y);
        }
    }
    let mut order: Vec<usize> = (0..j).collect();
    order.sort_by_key(|&m| (sets[m].len(), sets[m].first().copied().unwrap_or(usize::MAX)));
    let covered: Vec<usize> = order[..cover_count].to_vec();
    let union: BTreeSet<usize> = covered.iter().flat_map(|&m| sets[m].iter().copied()).collect();
    if union.len() > f {
        return Err(ModelError::invalid(format!(
            "cover of the {cover_count} smallest decoding sets has {} words, more than |Θ| = {f}",
            union.len()
        )));
    }
    let mut members = union.clone();
    for w in 0..words {
        if members.len() >= f {
            break;
        }
        members.insert(w);
    }
    let theta = ThetaSubset::new(n, members)?;

    let mut prior = vec![0.0; j];
    let tail = j - cover_count;
    for &m in &covered {
        prior[m] = (1.0 - g) / cover_count as f64;
    }
    if tail > 0 {
        for (m, p) in prior.iter_mut().enumerate() {
            if !covered.contains(&m) {
                *p = g / tail as f64;
            }
        }
    }

    let v = v_theta_channel(&theta)?;
    let eve_errors = code.message_errors(&v)?;
    let success: f64 = prior.iter().zip(&eve_errors).map(|(p, e)| p * (1.0 - e)).sum();
    let main = Channel::identity(words)?;
    let legit = code.message_errors(&main)?;
    let legitimate_error: f64 = prior.iter().zip(&legit).map(|(p, e)| p * e).sum();

    let h = entropy_slice(&prior);
    let pe = (1.0 - success).clamp(0.0, 1.0);
    let fano = (h - binary_entropy(pe) - pe * ((j.max(2) - 1) as f64).log2()) / n as f64;
    let induced = code.induced_message_channel(&v)?;
    let exact = mutual_information_slice(&prior, &induced) / n as f64;
    Ok(Case1Report {
        n,
        a,
        b,
        g,
        theta,
        covered,
        prior,
        success,
        legitimate_error,
        message_entropy: h,
        fano_bound: fano,
        exact_normalized_leakage: exact,
    })
}

/// Equal contiguous cells `𝒜_i = [i·2^{nb}, (i+1)·2^{nb})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PartitionCode {
    pub n: usize,
    /// `n·b`, the number of bits each cell absorbs.
    pub cell_bits: usize,
}

impl PartitionCode {
    pub fn cells(&self) -> usize {
        1 << (self.n - self.cell_bits)
    }

    pub fn cell_size(&self) -> usize {
        1 << self.cell_bits
    }

    pub fn cell_of(&self, word: usize) -> usize {
        word >> self.cell_bits
    }

    /// Uniform encoder on each cell; the decoder returns the cell index.
    pub fn code(&self) -> Result<RandomEncoderCode, ModelError> {
        let words = 1usize << self.n;
        let size = self.cell_size();
        let mut data = vec![0.0; self.cells() * words];
        for c in 0..self.cells() {
            data[c * words + c * size..c * words + (c + 1) * size]
                .iter_mut()
                .for_each(|v| *v = 1.0 / size as f64);
        }
        let enc = Channel::from_computed(self.cells(), words, data);
        RandomEncoderCode::new(enc, (0..words).map(|y| Some(self.cell_of(y))).collect())
    }
}

pub fn case2_partition_code(n: usize, r: f64) -> Result<PartitionCode, ModelError> {
    check_n(n)?;
    if !(0.0..=1.0).contains(&r) {
        return Err(ModelError::invalid(format!("rate {r} outside [0, 1]")));
    }
    let nb = n as f64 * (1.0 - r);
    let cell_bits = nb.round();
    if (nb - cell_bits).abs() > 1e-9 {
        return Err(ModelError::invalid(format!("n(1 - r) = {nb} is not an integer")));
    }
    Ok(PartitionCode {
        n,
        cell_bits: cell_bits as usize,
    })
}

pub fn case2_leakage_bound(n: usize, a: f64, b: f64) -> Result<f64, ModelError> {
    if a >= b {
        return Err(ModelError::invalid(format!("need a < b, got a = {a}, b = {b}")));
    }
    let n = n as f64;
    let tail = (-n * (1.0 - b)).exp2();
    Ok((-n * (b - a)).exp2() * (1.0 + tail) * (n * (1.0 - b) + (1.0 + tail).log2()))
}

/// Prior-free leakage certificate of a code through `V_Θ`: the information
/// radius of its induced rows around the uniform output law.
pub fn theta_radius(code: &RandomEncoderCode, theta: &ThetaSubset) -> Result<f64, ModelError> {
    let v = v_theta_channel(theta)?;
    let induced = code.induced_message_channel(&v)?;
    let reference = vec![1.0 / v.output_size() as f64; v.output_size()];
    Ok(channel_radius(&induced, &reference)?
        .finite()
        .expect("uniform reference covers every output"))
}

/// Adversarial Θ for a partition code: concentrated in single cells, spread
/// one per cell, and straddling a cell boundary.
pub fn adversarial_thetas(code: &PartitionCode, f: usize) -> Result<Vec<ThetaSubset>, ModelError> {
    let n = code.n;
    let words = 1usize << n;
    let size = code.cell_size();
    let last = code.cells() - 1;
    let mid = code.cells() / 2;
    let spread = |offset: usize| {
        ThetaSubset::new(n, (0..f).map(|i| (offset + i * size + i / code.cells()) % words))
    };
    Ok(vec![
        ThetaSubset::contiguous(n, 0, f)?,
        ThetaSubset::contiguous(n, mid * size, f)?,
        ThetaSubset::contiguous(n, last * size, f)?,
        ThetaSubset::contiguous(n, (last * size + size).saturating_sub(f), f)?,
        spread(0)?,
        spread(size - 1)?,
        ThetaSubset::contiguous(n, size.saturating_sub(f / 2), f)?,
        ThetaSubset::contiguous(n, words - f / 2, f)?,
    ])
}

#[derive(Debug, Clone, Serialize)]
pub struct Case2Audit {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub bound: f64,
    pub thetas_checked: usize,
    pub worst_radius: f64,
    pub worst_theta: ThetaSubset,
    pub pass: bool,
}

pub fn case2_audit(n: usize, a: f64, b: f64, random: usize, seed: u64) -> Result<Case2Audit, ModelError> {
    let bound = case2_leakage_bound(n, a, b)?;
    let part = case2_partition_code(n, 1.0 - b)?;
    let code = part.code()?;
    let f = theta_size(n, a);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut thetas = adversarial_thetas(&part, f)?;
    for _ in 0..random {
        thetas.push(ThetaSubset::random(n, f, &mut rng)?);
    }
    let mut worst = (f64::NEG_INFINITY, thetas[0].clone());
    for t in &thetas {
        let r = theta_radius(&code, t)?;
        if r > worst.0 {
            worst = (r, t.clone());
        }
    }
    Ok(Case2Audit {
        n,
        a,
        b,
        bound,
        thetas_checked: thetas.len(),
        worst_radius: worst.0,
        worst_theta: worst.1,
        pass: worst.0 <= bound + 1e-9,
    })
}

/// Knobs shared by all scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub a: f64,
    /// Cell exponent for the partition code; ignored elsewhere.
    pub b: f64,
    /// Random Θ per block length.
    pub samples: usize,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_min: 2,
            n_max: 8,
            a: 0.5,
            b: 0.5,
            samples: 16,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    pub n: usize,
    pub leakage: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioOutput {
    pub scenario: &'static str,
    pub columns: [&'static str; 3],
    pub rows: Vec<CurveRow>,
    pub pass: bool,
    pub config: ScenarioConfig,
}

impl ScenarioOutput {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.n, r.leakage, r.bound));
        }
        out
    }
}

pub trait Scenario: Send + Sync {
    fn describe(&self) -> &'static str;
    /// Configuration used when the caller does not override it.
    fn defaults(&self) -> ScenarioConfig {
        ScenarioConfig::default()
    }
    fn run(&self, cfg: &ScenarioConfig) -> Result<ScenarioOutput, ModelError>;
}

fn rng_for(cfg: &ScenarioConfig, n: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ ((n as u64) << 32))
}

fn output(name: &'static str, columns: [&'static str; 3], rows: Vec<CurveRow>, pass: bool, cfg: &ScenarioConfig) -> ScenarioOutput {
    ScenarioOutput {
        scenario: name,
        columns,
        rows,
        pass,
        config: *cfg,
    }
}

struct NaiveStrong;
struct Skewed;
struct Case1;
struct Case2;
struct GavcErasure;

impl Scenario for NaiveStrong {
    fn describe(&self) -> &'static str {
        "naive rate-one code: brute-force uniform leakage against the closed form"
    }
    fn run(&self, cfg: &ScenarioConfig) -> Result<ScenarioOutput, ModelError> {
        let mut rows = Vec::new();
        let mut pass = true;
        for n in cfg.n_min..=cfg.n_max {
            let f = theta_size(n, cfg.a);
            let closed = strong_leakage_closed_form(n, f)?;
            let code = naive_identity_code(n)?;
            let mut rng = rng_for(cfg, n);
            let mut worst: f64 = 0.0;
            for _ in 0..cfg.samples.max(1) {
                let t = ThetaSubset::random(n, f, &mut rng)?;
                let v = code.uniform_leakage(&v_theta_channel(&t)?)?;
                pass &= (v - closed).abs() <= 1e-9;
                worst = worst.max(v);
            }
            rows.push(CurveRow {
                n,
                leakage: worst,
                bound: closed,
            });
        }
        Ok(output("naive-strong", ["n", "leakage", "closed_form"], rows, pass, cfg))
    }
}

impl Scenario for Skewed {
    fn describe(&self) -> &'static str {
        "naive code under the skewed prior: exact leakage against its lower bound"
    }
    fn run(&self, cfg: &ScenarioConfig) -> Result<ScenarioOutput, ModelError> {
        let mut rows = Vec::new();
        let mut pass = true;
        for n in cfg.n_min.max(1)..=cfg.n_max {
            let f = theta_size(n, cfg.a);
            let t = ThetaSubset::random_with_zero(n, f, &mut rng_for(cfg, n))?;
            let res = skewed_attack(&t)?;
            pass &= res.holds;
            rows.push(CurveRow {
                n,
                leakage: res.exact,
                bound: res.bound,
            });
        }
        Ok(output("skewed", ["n", "exact_leakage", "lower_bound"], rows, pass, cfg))
    }
}

impl Scenario for Case1 {
    fn describe(&self) -> &'static str {
        "rate above 1 - a: decoding attack with Fano-normalized leakage"
    }
    fn run(&self, cfg: &ScenarioConfig) -> Result<ScenarioOutput, ModelError> {
        let mut rows = Vec::new();
        let mut pass = true;
        for n in cfg.n_min.max(1)..=cfg.n_max {
            let g = (-(n as f64)).exp2();
            let rep = case1_attack(&naive_identity_code(n)?, n, cfg.a, g)?;
            pass &= rep.success + rep.legitimate_error >= 1.0 - g - 1e-12;
            pass &= rep.exact_normalized_leakage >= rep.fano_bound - 1e-9;
            rows.push(CurveRow {
                n,
                leakage: rep.exact_normalized_leakage,
                bound: rep.fano_bound,
            });
        }
        Ok(output("case1", ["n", "normalized_leakage", "fano_bound"], rows, pass, cfg))
    }
}

impl Scenario for Case2 {
    fn describe(&self) -> &'static str {
        "rate below 1 - a: partition code, prior-free leakage against its bound"
    }
    fn defaults(&self) -> ScenarioConfig {
        ScenarioConfig {
            a: 1.0 / 6.0,
            ..ScenarioConfig::default()
        }
    }
    fn run(&self, cfg: &ScenarioConfig) -> Result<ScenarioOutput, ModelError> {
        let mut rows = Vec::new();
        let mut pass = true;
        for n in cfg.n_min.max(1)..=cfg.n_max {
            let nb = n as f64 * cfg.b;
            if (nb - nb.round()).abs() > 1e-9 {
                continue;
            }
            let audit = case2_audit(n, cfg.a, cfg.b, cfg.samples, cfg.seed ^ n as u64)?;
            pass &= audit.pass;
            rows.push(CurveRow {
                n,
                leakage: audit.worst_radius,
                bound: audit.bound,
            });
        }
        Ok(output("case2", ["n", "radius_leakage", "bound"], rows, pass, cfg))
    }
}

impl Scenario for GavcErasure {
    fn describe(&self) -> &'static str {
        "naive code through the erasure family: maximal against average error"
    }
    fn run(&self, cfg: &ScenarioConfig) -> Result<ScenarioOutput, ModelError> {
        let mut rows = Vec::new();
        let mut pass = true;
        for n in cfg.n_min.max(1)..=cfg.n_max {
            let f = theta_size(n, cfg.a);
            let t = ThetaSubset::random(n, f, &mut rng_for(cfg, n))?;
            let code = naive_erasure_code(n)?;
            let w = gavc_erasure_channel(&t)?;
            let max = code.max_error(&w)?;
            let avg = code.average_error(&w)?;
            pass &= max == 1.0 && avg == f as f64 / (1usize << n) as f64;
            rows.push(CurveRow {
                n,
                leakage: max,
                bound: avg,
            });
        }
        Ok(output("gavc-erasure", ["n", "max_error", "average_error"], rows, pass, cfg))
    }
}

/// Built-in scenarios: `naive-strong`, `skewed`, `case1`, `case2`, `gavc-erasure`.
pub fn scenarios() -> Registry<dyn Scenario> {
    let mut reg: Registry<dyn Scenario> = Registry::new("scenario");
    reg.register("naive-strong", Box::new(NaiveStrong))
        .register("skewed", Box::new(Skewed))
        .register("case1", Box::new(Case1))
        .register("case2", Box::new(Case2))
        .register("gavc-erasure", Box::new(GavcErasure));
    reg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn v_theta_extremes() {
        let full = ThetaSubset::new(2, 0..4).unwrap();
        assert_eq!(v_theta_channel(&full).unwrap(), Channel::identity(4).unwrap());
        let empty = ThetaSubset::new(2, []).unwrap();
        let ch = v_theta_channel(&empty).unwrap();
        assert!(ch.data().iter().all(|&v| v == 0.25));
    }

    #[test]
    fn v_theta_entries_for_zero_word() {
        let t = ThetaSubset::new(2, [0]).unwrap();
        let ch = v_theta_channel(&t).unwrap();
        assert_eq!(ch.row(0), &[1.0, 0.0, 0.0, 0.0]);
        for x in 1..4 {
            assert_eq!(ch.row(x), &[0.25; 4]);
        }
    }

    #[test]
    fn closed_form_full_theta_is_n() {
        for n in 1..=6 {
            assert!((strong_leakage_closed_form(n, 1 << n).unwrap() - n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_small_case() {
        // Brute force I(M;Y) for n = 2, Θ = {00}, evaluated with mpmath.
        let v = strong_leakage_closed_form(2, 1).unwrap();
        assert!((v - 0.380_240_814_944_147_85).abs() < 1e-12, "{v}");
    }

    #[test]
    fn skewed_bound_values() {
        assert!((skewed_bound(2, 1) - 0.339_035_952_556_318_8).abs() < 1e-12);
        assert_eq!(skewed_bound(3, 8), 0.5);
        assert!((skewed_bound(8, 16) - 0.5).abs() < 0.02);
    }

    #[test]
    fn skewed_needs_zero_word() {
        let t = ThetaSubset::new(2, [1]).unwrap();
        assert!(skewed_attack(&t).is_err());
    }

    #[test]
    fn partition_code_shapes() {
        let p = case2_partition_code(6, 0.5).unwrap();
        assert_eq!((p.cells(), p.cell_size()), (8, 8));
        let code = p.code().unwrap();
        assert_eq!(code.max_error(&Channel::identity(64).unwrap()).unwrap(), 0.0);
        assert!(case2_partition_code(5, 0.5).is_err());
        let single = case2_partition_code(3, 0.0).unwrap();
        assert_eq!(single.cells(), 1);
    }

    #[test]
    fn case2_bound_guard_and_value() {
        assert!(case2_leakage_bound(6, 0.5, 0.5).is_err());
        let v = case2_leakage_bound(6, 1.0 / 6.0, 0.5).unwrap();
        assert!((v - 0.25 * 1.125 * 9f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn erasure_gap() {
        let t = ThetaSubset::new(3, [1, 5]).unwrap();
        let w = gavc_erasure_channel(&t).unwrap();
        assert_eq!(w.row(1)[8], 1.0);
        let code = naive_erasure_code(3).unwrap();
        assert_eq!(code.max_error(&w).unwrap(), 1.0);
        assert_eq!(code.average_error(&w).unwrap(), 0.25);
    }

    #[test]
    fn theta_size_rounds_up() {
        assert_eq!(theta_size(3, 0.5), 3);
        assert_eq!(theta_size(6, 1.0 / 6.0), 2);
        assert_eq!(theta_size(8, 0.5), 16);
    }

    #[test]
    fn scenario_registry_lists_all() {
        let names: Vec<_> = scenarios().names().collect();
        assert_eq!(names.len(), 5);
        assert!(scenarios().get("case3").is_err());
    }
}
