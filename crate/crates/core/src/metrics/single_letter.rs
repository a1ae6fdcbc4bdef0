//! Single-letter secrecy objective
//! `I(U;Y_q) − max_s I(U;Z_s)` and its max-min over input laws and state mixes.
//!
//! The inner minimum over state mixes `q` is convex in `q` (mutual
//! information is convex in the channel and the averaged main channel is
//! linear in `q`). It is searched on a simplex grid, polished by pattern
//! search, and certified with the Frank-Wolfe gap at the returned point.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Exp1};
use serde::Serialize;

use crate::model::AvwcFamily;
use crate::prob::{compose_channels, mutual_information_slice, Channel, Distribution};

use super::MetricsError;

/// Largest state count for which the inner grid is exhaustive.
pub const EXHAUSTIVE_STATE_LIMIT: usize = 3;

fn averaged_channel(parts: &[Channel], q: &[f64]) -> Channel {
    let (m, k) = (parts[0].input_size(), parts[0].output_size());
    let mut data = vec![0.0; m * k];
    for (ch, &w) in parts.iter().zip(q) {
        if w == 0.0 {
            continue;
        }
        for (d, &v) in data.iter_mut().zip(ch.data()) {
            *d += w * v;
        }
    }
    Channel::from_computed(m, k, data)
}

pub fn single_letter_objective(
    prior: &Distribution,
    cond: &Channel,
    family: &AvwcFamily,
    q: &Distribution,
) -> Result<f64, MetricsError> {
    check_shapes(prior, cond, family)?;
    if q.len() != family.state_count() {
        return Err(MetricsError::Invalid(format!(
            "state mix has {} entries for {} states",
            q.len(),
            family.state_count()
        )));
    }
    let ev = Evaluator::new(cond, family)?;
    Ok(ev.reliable(prior.probs(), q.probs()) - ev.secrecy(prior.probs()))
}

fn check_shapes(prior: &Distribution, cond: &Channel, family: &AvwcFamily) -> Result<(), MetricsError> {
    if prior.len() != cond.input_size() {
        return Err(MetricsError::Invalid(format!(
            "prior over {} symbols but conditional has {} rows",
            prior.len(),
            cond.input_size()
        )));
    }
    if cond.output_size() != family.input_size() {
        return Err(MetricsError::Invalid(format!(
            "conditional outputs {} symbols, family inputs {}",
            cond.output_size(),
            family.input_size()
        )));
    }
    Ok(())
}

/// Aux-to-output channels for one conditional law P_{X|U}.
struct Evaluator {
    mains: Vec<Channel>,
    wiretaps: Vec<Channel>,
}

impl Evaluator {
    fn new(cond: &Channel, family: &AvwcFamily) -> Result<Self, MetricsError> {
        let mains = family
            .mains()
            .into_iter()
            .map(|w| compose_channels(cond, w))
            .collect::<Result<_, _>>()?;
        let wiretaps = family
            .wiretaps()
            .into_iter()
            .map(|v| compose_channels(cond, v))
            .collect::<Result<_, _>>()?;
        Ok(Self { mains, wiretaps })
    }

    fn reliable(&self, prior: &[f64], q: &[f64]) -> f64 {
        mutual_information_slice(prior, &averaged_channel(&self.mains, q))
    }

    fn secrecy(&self, prior: &[f64]) -> f64 {
        self.wiretaps
            .iter()
            .map(|v| mutual_information_slice(prior, v))
            .fold(0.0, f64::max)
    }

    /// Frank-Wolfe gap of `q ↦ I(U;Y_q)` at `q`, in bits; `None` if a
    /// directional derivative is unbounded.
    fn fw_gap(&self, prior: &[f64], q: &[f64]) -> Option<f64> {
        let mix = averaged_channel(&self.mains, q);
        let k = mix.output_size();
        let mut out = vec![0.0; k];
        for (u, &p) in prior.iter().enumerate() {
            for (o, &m) in out.iter_mut().zip(mix.row(u)) {
                *o += p * m;
            }
        }
        let mut grad = vec![0.0; self.mains.len()];
        for (s, g) in grad.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (u, &p) in prior.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                for ((&w, &m), &o) in self.mains[s].row(u).iter().zip(mix.row(u)).zip(&out) {
                    if w == 0.0 {
                        continue;
                    }
                    if m == 0.0 {
                        return None;
                    }
                    acc += p * w * (m / o).log2();
                }
            }
            *g = acc;
        }
        let at: f64 = grad.iter().zip(q).map(|(g, w)| g * w).sum();
        let lowest = grad.iter().copied().fold(f64::INFINITY, f64::min);
        Some((at - lowest).max(0.0))
    }
}

/// Inner minimum of the reliability term over state mixes.
#[derive(Debug, Clone, Serialize)]
pub struct InnerMin {
    pub q: Distribution,
    pub value: f64,
    /// Frank-Wolfe certificate: the true minimum is at least `value - gap`.
    pub gap: f64,
    /// True when the grid covered the whole simplex at the requested resolution.
    pub exhaustive: bool,
}

fn compositions(parts: usize, total: usize) -> Vec<Vec<usize>> {
    fn rec(parts: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for v in 0..=left {
            cur.push(v);
            rec(parts - 1, left - v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(parts, total, &mut Vec::new(), &mut out);
    out
}

fn pattern_refine<F: Fn(&[f64]) -> f64>(f: &F, start: Vec<f64>, mut value: f64, step0: f64) -> (Vec<f64>, f64) {
    let mut q = start;
    let mut step = step0;
    let s = q.len();
    while step > 1e-7 {
        let mut improved = false;
        for from in 0..s {
            for to in 0..s {
                if from == to || q[from] <= 0.0 {
                    continue;
                }
                let mv = step.min(q[from]);
                let mut cand = q.clone();
                cand[from] -= mv;
                cand[to] += mv;
                let v = f(&cand);
                if v < value - 1e-15 {
                    q = cand;
                    value = v;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (q, value)
}

fn inner_min_with(ev: &Evaluator, prior: &[f64], grid: f64, rng: &mut ChaCha8Rng) -> InnerMin {
    let s = ev.mains.len();
    let f = |q: &[f64]| ev.reliable(prior, q);
    let exhaustive = s <= EXHAUSTIVE_STATE_LIMIT;
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    if exhaustive {
        let steps = (1.0 / grid).round().max(1.0) as usize;
        for c in compositions(s, steps) {
            candidates.push(c.iter().map(|&v| v as f64 / steps as f64).collect());
        }
    } else {
        for v in 0..s {
            let mut e = vec![0.0; s];
            e[v] = 1.0;
            candidates.push(e);
        }
        candidates.push(vec![1.0 / s as f64; s]);
        for _ in 0..64 {
            let mut p: Vec<f64> = (0..s).map(|_| Exp1.sample(rng)).collect();
            let t: f64 = p.iter().sum();
            p.iter_mut().for_each(|v| *v /= t);
            candidates.push(p);
        }
    }
    let (mut best_q, mut best) = (candidates[0].clone(), f64::INFINITY);
    for c in candidates {
        let v = f(&c);
        if v < best {
            best = v;
            best_q = c;
        }
    }
    let (q, value) = pattern_refine(&f, best_q, best, grid / 2.0);
    let gap = ev.fw_gap(prior, &q).unwrap_or(value);
    InnerMin {
        q: Distribution::from_computed(q),
        value,
        gap: gap.min(value),
        exhaustive,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingleLetterConfig {
    /// Inner simplex grid resolution.
    pub grid: f64,
    /// Auxiliary alphabet size; `None` means `|X| + 1`.
    pub aux_cap: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SingleLetterConfig {
    fn default() -> Self {
        Self {
            grid: 1e-2,
            aux_cap: None,
            restarts: 8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SingleLetterResult {
    /// Best max-min value found; a lower bound on the true optimum up to the
    /// inner certificate `inner.gap`.
    pub value: f64,
    pub reliable: f64,
    pub secrecy: f64,
    pub prior: Distribution,
    pub cond: Vec<Vec<f64>>,
    pub inner: InnerMin,
    /// Inner minimum found by sampling rather than an exhaustive grid.
    pub heuristic_inner: bool,
    pub evaluations: usize,
}

fn random_simplex(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut p: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let t: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= t);
    p
}

struct Candidate {
    prior: Vec<f64>,
    cond: Vec<Vec<f64>>,
}

impl Candidate {
    fn cond_channel(&self) -> Channel {
        let (k, x) = (self.cond.len(), self.cond[0].len());
        Channel::from_computed(k, x, self.cond.concat())
    }
}

pub fn optimize_single_letter(
    family: &AvwcFamily,
    cfg: &SingleLetterConfig,
) -> Result<SingleLetterResult, MetricsError> {
    if !(cfg.grid > 0.0 && cfg.grid <= 1.0) {
        return Err(MetricsError::Invalid(format!("grid resolution {} outside (0, 1]", cfg.grid)));
    }
    let xs = family.input_size();
    let k = cfg.aux_cap.unwrap_or(xs + 1).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let coarse = cfg.grid.max(0.1);
    let mut evaluations = 0usize;

    let mut score = |c: &Candidate, rng: &mut ChaCha8Rng| -> Result<f64, MetricsError> {
        evaluations += 1;
        let ev = Evaluator::new(&c.cond_channel(), family)?;
        let inner = inner_min_with(&ev, &c.prior, coarse, rng);
        Ok(inner.value - ev.secrecy(&c.prior))
    };

    let mut starts = Vec::new();
    if k >= xs {
        let mut prior = vec![0.0; k];
        prior[..xs].iter_mut().for_each(|p| *p = 1.0 / xs as f64);
        let cond = (0..k)
            .map(|u| {
                if u < xs {
                    let mut r = vec![0.0; xs];
                    r[u] = 1.0;
                    r
                } else {
                    vec![1.0 / xs as f64; xs]
                }
            })
            .collect();
        starts.push(Candidate { prior, cond });
    }
    for _ in 0..cfg.restarts {
        let prior = random_simplex(&mut rng, k);
        let cond = (0..k).map(|_| random_simplex(&mut rng, xs)).collect();
        starts.push(Candidate { prior, cond });
    }

    let mut best: Option<(Candidate, f64)> = None;
    for mut cand in starts {
        let mut value = score(&cand, &mut rng)?;
        let mut step: f64 = 0.2;
        while step > 1e-4 {
            let mut improved = false;
            // Vector 0 is the prior, vectors 1..=k the conditional rows.
            for vec_idx in 0..=k {
                let len = if vec_idx == 0 { k } else { xs };
                for from in 0..len {
                    for to in 0..len {
                        let src = if vec_idx == 0 { &cand.prior } else { &cand.cond[vec_idx - 1] };
                        if from == to || src[from] <= 0.0 {
                            continue;
                        }
                        let mv = step.min(src[from]);
                        let mut trial = Candidate {
                            prior: cand.prior.clone(),
                            cond: cand.cond.clone(),
                        };
                        let target = if vec_idx == 0 {
                            &mut trial.prior
                        } else {
                            &mut trial.cond[vec_idx - 1]
                        };
                        target[from] -= mv;
                        target[to] += mv;
                        let v = score(&trial, &mut rng)?;
                        if v > value + 1e-12 {
                            cand = trial;
                            value = v;
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((cand, value));
        }
    }

    let heuristic_inner = family.state_count() > EXHAUSTIVE_STATE_LIMIT;
    let (cand, _) = best.expect("at least one start");
    let ev = Evaluator::new(&cand.cond_channel(), family)?;
    let inner = inner_min_with(&ev, &cand.prior, cfg.grid, &mut rng);
    let secrecy = ev.secrecy(&cand.prior);
    let value = inner.value - secrecy;

    if value <= 0.0 {
        // A constant auxiliary variable attains exactly zero.
        let mut prior = vec![0.0; k];
        prior[0] = 1.0;
        let q = vec![1.0 / family.state_count() as f64; family.state_count()];
        return Ok(SingleLetterResult {
            value: 0.0,
            reliable: 0.0,
            secrecy: 0.0,
            prior: Distribution::from_computed(prior),
            cond: vec![vec![1.0 / xs as f64; xs]; k],
            inner: InnerMin {
                q: Distribution::from_computed(q),
                value: 0.0,
                gap: 0.0,
                exhaustive: !heuristic_inner,
            },
            heuristic_inner,
            evaluations,
        });
    }
    Ok(SingleLetterResult {
        value,
        reliable: inner.value,
        secrecy,
        prior: Distribution::from_computed(cand.prior),
        cond: cand.cond,
        inner,
        heuristic_inner,
        evaluations,
    })
}
