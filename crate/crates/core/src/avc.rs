//! Arbitrarily varying channel tools: symmetrizability, worst state
//! sequences, and a Monte Carlo check of the Chernoff tail bound.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution as _};
use serde::Serialize;

use crate::error::ModelError;
use crate::model::{AvwcFamily, RandomEncoderCode, Side, StateSequence};
use crate::prob::Channel;
use crate::registry::Registry;
use crate::simplex::{phase_one, PhaseOne};

/// Witness residuals above this are reported as a failed re-substitution.
pub const WITNESS_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "decision", rename_all = "snake_case")]
pub enum Symmetrizability {
    /// `t` maps inputs to states, one row per input symbol.
    Feasible { t: Vec<Vec<f64>>, residual: f64 },
    Infeasible { phase_one_objective: f64 },
}

impl Symmetrizability {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Symmetrizability::Feasible { .. })
    }

    /// A symmetrizable main family has zero deterministic-code capacity.
    pub fn zero_capacity_advisory(&self) -> bool {
        self.is_feasible()
    }
}

fn check_shared(mains: &[Channel]) -> Result<(usize, usize), ModelError> {
    let first = mains.first().ok_or(ModelError::NoStates)?;
    let (x, y) = (first.input_size(), first.output_size());
    for (s, w) in mains.iter().enumerate() {
        if w.input_size() != x || w.output_size() != y {
            return Err(ModelError::InconsistentState {
                state: s,
                what: "main",
                expected: (x, y),
                found: (w.input_size(), w.output_size()),
            });
        }
    }
    Ok((x, y))
}

/// Largest violation of `Σ_s W_s(y|x) T(s|x') = Σ_s W_s(y|x') T(s|x)`.
pub fn symmetrizer_residual(mains: &[Channel], t: &[Vec<f64>]) -> f64 {
    let xs = mains[0].input_size();
    let ys = mains[0].output_size();
    let mut worst: f64 = 0.0;
    for x in 0..xs {
        for xp in x + 1..xs {
            for y in 0..ys {
                let lhs: f64 = mains.iter().enumerate().map(|(s, w)| w.get(x, y) * t[xp][s]).sum();
                let rhs: f64 = mains.iter().enumerate().map(|(s, w)| w.get(xp, y) * t[x][s]).sum();
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    worst
}

/// Decides whether some row-stochastic `T: X → S` symmetrizes the family.
pub fn symmetrizability_check(mains: &[Channel]) -> Result<Symmetrizability, ModelError> {
    let (xs, ys) = check_shared(mains)?;
    let ss = mains.len();
    let var = |x: usize, s: usize| x * ss + s;
    let n = xs * ss;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for x in 0..xs {
        for xp in x + 1..xs {
            for y in 0..ys {
                let mut row = vec![0.0; n];
                for (s, w) in mains.iter().enumerate() {
                    row[var(xp, s)] += w.get(x, y);
                    row[var(x, s)] -= w.get(xp, y);
                }
                a.push(row);
                b.push(0.0);
            }
        }
    }
    for x in 0..xs {
        let mut row = vec![0.0; n];
        (0..ss).for_each(|s| row[var(x, s)] = 1.0);
        a.push(row);
        b.push(1.0);
    }
    match phase_one(&a, &b) {
        PhaseOne::Infeasible(obj) => Ok(Symmetrizability::Infeasible {
            phase_one_objective: obj,
        }),
        PhaseOne::Feasible(sol) => {
            let t: Vec<Vec<f64>> = (0..xs)
                .map(|x| {
                    let row: Vec<f64> = (0..ss).map(|s| sol[var(x, s)].max(0.0)).collect();
                    let total: f64 = row.iter().sum();
                    row.into_iter().map(|v| v / total).collect()
                })
                .collect();
            let residual = symmetrizer_residual(mains, &t);
            Ok(Symmetrizability::Feasible { t, residual })
        }
    }
}

/// A per-sequence quantity the jammer tries to maximize.
pub trait StateMetric: Send + Sync {
    /// Which channel of the family the metric reads.
    fn side(&self) -> Side;
    fn evaluate(&self, code: &RandomEncoderCode, ch: &Channel) -> Result<f64, ModelError>;
}

struct AvgError;
struct MaxError;
struct StrongLeakage;

impl StateMetric for AvgError {
    fn side(&self) -> Side {
        Side::Main
    }
    fn evaluate(&self, code: &RandomEncoderCode, ch: &Channel) -> Result<f64, ModelError> {
        code.average_error(ch)
    }
}

impl StateMetric for MaxError {
    fn side(&self) -> Side {
        Side::Main
    }
    fn evaluate(&self, code: &RandomEncoderCode, ch: &Channel) -> Result<f64, ModelError> {
        code.max_error(ch)
    }
}

impl StateMetric for StrongLeakage {
    fn side(&self) -> Side {
        Side::Wiretap
    }
    fn evaluate(&self, code: &RandomEncoderCode, ch: &Channel) -> Result<f64, ModelError> {
        code.uniform_leakage(ch)
    }
}

/// Built-in metrics: `avg_error`, `max_error`, `strong_leakage`.
pub fn state_metrics() -> Registry<dyn StateMetric> {
    let mut reg: Registry<dyn StateMetric> = Registry::new("state metric");
    reg.register("avg_error", Box::new(AvgError))
        .register("max_error", Box::new(MaxError))
        .register("strong_leakage", Box::new(StrongLeakage));
    reg
}

/// Sequence spaces at most this large are searched exhaustively.
pub const EXHAUSTIVE_SEQUENCE_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBudget {
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { restarts: 16, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WorstSequence {
    pub sequence: StateSequence,
    pub value: f64,
    pub exact: bool,
    pub evaluated: usize,
}

pub fn worst_state_sequence(
    code: &RandomEncoderCode,
    family: &AvwcFamily,
    n: usize,
    metric: &dyn StateMetric,
    budget: SearchBudget,
) -> Result<WorstSequence, ModelError> {
    if n == 0 {
        return Err(ModelError::ZeroBlockLength);
    }
    let sc = family.state_count();
    let mut cache: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut eval = |states: &[usize]| -> Result<f64, ModelError> {
        if let Some(&v) = cache.get(states) {
            return Ok(v);
        }
        let seq = StateSequence::new(states.to_vec(), sc)?;
        let ch = family.state_sequence_channel(&seq, metric.side())?;
        let v = metric.evaluate(code, &ch)?;
        cache.insert(states.to_vec(), v);
        Ok(v)
    };

    let total = StateSequence::count(sc, n);
    if total.is_some_and(|t| t <= EXHAUSTIVE_SEQUENCE_LIMIT) {
        let mut best: Option<(Vec<usize>, f64)> = None;
        for seq in StateSequence::enumerate(sc, n)? {
            let v = eval(seq.states())?;
            if best.as_ref().is_none_or(|(_, b)| v > *b) {
                best = Some((seq.states().to_vec(), v));
            }
        }
        let (states, value) = best.expect("at least one sequence");
        return Ok(WorstSequence {
            sequence: StateSequence::new(states, sc)?,
            value,
            exact: true,
            evaluated: total.unwrap_or(0),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut starts: Vec<Vec<usize>> = (0..sc).map(|s| vec![s; n]).collect();
    for _ in 0..budget.restarts {
        starts.push((0..n).map(|_| rng.random_range(0..sc)).collect());
    }
    for mut cur in starts {
        let mut value = eval(&cur)?;
        loop {
            let mut improved = false;
            for pos in 0..n {
                let keep = cur[pos];
                let mut chosen = keep;
                for s in (0..sc).filter(|&s| s != keep) {
                    cur[pos] = s;
                    let v = eval(&cur)?;
                    if v > value {
                        value = v;
                        chosen = s;
                        improved = true;
                    }
                }
                cur[pos] = chosen;
            }
            if !improved {
                break;
            }
        }
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((cur, value));
        }
    }
    let (states, value) = best.expect("at least one start");
    let evaluated = cache.len();
    Ok(WorstSequence {
        sequence: StateSequence::new(states, sc)?,
        value,
        exact: false,
        evaluated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChernoffReport {
    pub l: u64,
    pub p: f64,
    pub p1: f64,
    pub alpha: f64,
    pub trials: u64,
    pub threshold: f64,
    pub exceedances: u64,
    pub empirical: f64,
    pub bound: f64,
    pub standard_error: f64,
    pub pass: bool,
}

/// Estimates `Pr{Σ F_l > L·p1·(1+α)}` for i.i.d. Bernoulli(p) and compares it
/// with `exp(−α²·L·p1/8)`, allowing three binomial standard errors.
pub fn chernoff_tail_validate(
    l: u64,
    p: f64,
    p1: f64,
    alpha: f64,
    trials: u64,
    seed: u64,
) -> Result<ChernoffReport, ModelError> {
    if l == 0 || trials == 0 {
        return Err(ModelError::invalid("L and trials must be positive"));
    }
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&p1) || p > p1 {
        return Err(ModelError::invalid(format!("need 0 <= p <= p1 <= 1, got p={p}, p1={p1}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(ModelError::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let threshold = l as f64 * p1 * (1.0 + alpha);
    let binom = Binomial::new(l, p).map_err(|e| ModelError::invalid(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exceedances = (0..trials).filter(|_| binom.sample(&mut rng) as f64 > threshold).count() as u64;
    let empirical = exceedances as f64 / trials as f64;
    let standard_error = (empirical * (1.0 - empirical) / trials as f64).sqrt();
    let bound = (-alpha * alpha * l as f64 * p1 / 8.0).exp();
    Ok(ChernoffReport {
        l,
        p,
        p1,
        alpha,
        trials,
        threshold,
        exceedances,
        empirical,
        bound,
        standard_error,
        pass: empirical <= bound + 3.0 * standard_error,
    })
}

/// Block lengths, reference probabilities and deviations of the validation grid.
pub const CHERNOFF_GRID: ([u64; 3], [f64; 3], [f64; 3]) = ([50, 100, 400], [0.05, 0.1, 0.3], [0.25, 0.5, 0.9]);

/// Runs every cell of [`CHERNOFF_GRID`] at `p = p1`, the hardest admissible
/// case, with a per-cell seed derived from `seed`.
pub fn chernoff_grid(trials: u64, seed: u64) -> Result<Vec<ChernoffReport>, ModelError> {
    let (ls, p1s, alphas) = CHERNOFF_GRID;
    let mut out = Vec::with_capacity(27);
    for &l in &ls {
        for &p1 in &p1s {
            for &alpha in &alphas {
                let cell_seed = seed.wrapping_add(out.len() as u64);
                out.push(chernoff_tail_validate(l, p1, p1, alpha, trials, cell_seed)?);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::StatePair;
    use crate::prob::Distribution;

    fn xor_mains() -> Vec<Channel> {
        vec![
            Channel::identity(2).unwrap(),
            Channel::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
        ]
    }

    #[test]
    fn xor_family_is_symmetrizable() {
        let res = symmetrizability_check(&xor_mains()).unwrap();
        let Symmetrizability::Feasible { t, residual } = res else {
            panic!("xor family should be symmetrizable");
        };
        assert!(residual < WITNESS_TOL);
        for row in &t {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_state_distinct_rows_not_symmetrizable() {
        let w = Channel::new(vec![vec![0.9, 0.1], vec![0.3, 0.7]]).unwrap();
        assert!(!symmetrizability_check(&[w]).unwrap().is_feasible());
    }

    #[test]
    fn duplicate_state_keeps_feasibility() {
        let mut mains = xor_mains();
        mains.push(mains[0].clone());
        assert!(symmetrizability_check(&mains).unwrap().is_feasible());
    }

    fn noisy_family() -> AvwcFamily {
        let clean = Channel::identity(2).unwrap();
        let noisy = Channel::constant(2, &Distribution::uniform(2).unwrap()).unwrap();
        let tap = Channel::identity(2).unwrap();
        AvwcFamily::new(vec![
            StatePair {
                main: clean,
                wiretap: tap.clone(),
            },
            StatePair { main: noisy, wiretap: tap },
        ])
        .unwrap()
    }

    #[test]
    fn noisy_state_dominates_average_error() {
        let fam = noisy_family();
        let words: Vec<usize> = (0..4).collect();
        let code = RandomEncoderCode::deterministic(&words, 4, (0..4).map(Some).collect()).unwrap();
        let reg = state_metrics();
        let res = worst_state_sequence(&code, &fam, 2, reg.get("avg_error").unwrap(), SearchBudget::default()).unwrap();
        assert!(res.exact);
        assert_eq!(res.sequence.states(), &[1, 1]);
        assert!((res.value - 0.75).abs() < 1e-12);
    }

    #[test]
    fn unknown_metric_is_named() {
        let reg = state_metrics();
        let Err(err) = reg.get("capacity") else {
            panic!("lookup should fail");
        };
        assert!(err.to_string().contains("capacity"));
    }

    #[test]
    fn chernoff_zero_probability() {
        let r = chernoff_tail_validate(100, 0.0, 0.1, 0.5, 1000, 1).unwrap();
        assert_eq!(r.exceedances, 0);
        assert!(r.pass);
    }

    #[test]
    fn chernoff_rejects_bad_ranges() {
        assert!(chernoff_tail_validate(10, 0.3, 0.2, 0.5, 10, 0).is_err());
        assert!(chernoff_tail_validate(10, 0.1, 0.2, 1.0, 10, 0).is_err());
    }
}
