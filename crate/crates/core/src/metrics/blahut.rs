use std::f64::consts::{LN_2, LOG2_E};

use serde::Serialize;

use crate::prob::{Channel, Distribution};

use super::MetricsError;

pub const DEFAULT_BA_TOL: f64 = 1e-9;
pub const DEFAULT_BA_MAX_ITER: usize = 100_000;

/// Outcome of a Blahut-Arimoto run.
///
/// `capacity` is I(input; output) evaluated exactly at `input`, so it is a
/// lower bound on the true capacity; `upper_bound` is the dual value
/// max_x D(W_x ‖ input·W), an upper bound on it.
#[derive(Debug, Clone, Serialize)]
pub struct CapacityEstimate {
    pub capacity: f64,
    pub upper_bound: f64,
    pub input: Distribution,
    pub iterations: usize,
    pub converged: bool,
    /// Lower-bound value at each iteration.
    #[serde(skip)]
    pub history: Vec<f64>,
}

impl CapacityEstimate {
    pub fn gap(&self) -> f64 {
        self.upper_bound - self.capacity
    }
}

/// Divergences D(W_x ‖ q) in nats; rows escaping q's support get a huge
/// finite value so the multiplicative update drives them up instead of NaN.
fn row_divergences(ch: &Channel, q: &[f64], out: &mut [f64]) {
    for (x, d) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (&w, &qy) in ch.row(x).iter().zip(q) {
            if w > 0.0 {
                if qy <= 0.0 {
                    acc = 700.0;
                    break;
                }
                acc += w * (w / qy).ln();
            }
        }
        *d = acc.max(0.0);
    }
}

/// Capacity of `ch` by Blahut-Arimoto from the uniform input, stopping when
/// the duality gap drops below `tol` bits.
pub fn blahut_arimoto(ch: &Channel, tol: f64, max_iter: usize) -> Result<CapacityEstimate, MetricsError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(MetricsError::InvalidTolerance(tol));
    }
    let m = ch.input_size();
    let mut p = vec![1.0 / m as f64; m];
    let mut q = vec![0.0; ch.output_size()];
    let mut d = vec![0.0; m];
    let mut history = Vec::new();
    let tol_nats = tol * LN_2;
    let mut iterations = 0;
    loop {
        q.iter_mut().for_each(|v| *v = 0.0);
        for (x, &px) in p.iter().enumerate() {
            for (qy, &w) in q.iter_mut().zip(ch.row(x)) {
                *qy += px * w;
            }
        }
        row_divergences(ch, &q, &mut d);
        let lower: f64 = p.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>().max(0.0);
        let upper = d.iter().copied().fold(0.0, f64::max);
        history.push(lower * LOG2_E);
        let converged = upper - lower < tol_nats;
        if converged || iterations >= max_iter {
            return Ok(CapacityEstimate {
                capacity: lower * LOG2_E,
                upper_bound: upper * LOG2_E,
                input: Distribution::from_computed(p),
                iterations,
                converged,
                history,
            });
        }
        let shift = upper;
        let mut total = 0.0;
        for (px, &dx) in p.iter_mut().zip(&d) {
            *px *= (dx - shift).exp();
            total += *px;
        }
        p.iter_mut().for_each(|px| *px /= total);
        iterations += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{binary_entropy, mutual_information};

    fn bsc(p: f64) -> Channel {
        Channel::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]]).unwrap()
    }

    #[test]
    fn identical_rows_have_zero_capacity() {
        let ch = Channel::constant(3, &Distribution::new(vec![0.2, 0.8]).unwrap()).unwrap();
        let est = blahut_arimoto(&ch, 1e-9, 100).unwrap();
        assert!(est.converged);
        assert!(est.capacity.abs() < 1e-15);
    }

    #[test]
    fn identity_capacity_is_log_size() {
        let est = blahut_arimoto(&Channel::identity(5).unwrap(), 1e-9, 100).unwrap();
        assert!((est.capacity - 5f64.log2()).abs() < 1e-12);
        for &p in est.input.probs() {
            assert!((p - 0.2).abs() < 1e-12);
        }
    }

    #[test]
    fn bsc_matches_closed_form() {
        let est = blahut_arimoto(&bsc(0.25), DEFAULT_BA_TOL, DEFAULT_BA_MAX_ITER).unwrap();
        assert!((est.capacity - (1.0 - binary_entropy(0.25))).abs() < 1e-6);
    }

    #[test]
    fn reported_input_achieves_reported_value() {
        let ch = Channel::new(vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.1, 0.8], vec![0.3, 0.4, 0.3]]).unwrap();
        let est = blahut_arimoto(&ch, 1e-10, DEFAULT_BA_MAX_ITER).unwrap();
        assert!(est.converged);
        let at = mutual_information(&est.input, &ch).unwrap();
        assert!((at - est.capacity).abs() < 1e-12);
        assert!(est.gap() < 1e-10);
    }

    #[test]
    fn non_convergence_is_flagged() {
        let ch = Channel::new(vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.1, 0.8], vec![0.3, 0.4, 0.3]]).unwrap();
        let est = blahut_arimoto(&ch, 1e-15, 2).unwrap();
        assert!(!est.converged);
        assert_eq!(est.iterations, 2);
        assert!(matches!(blahut_arimoto(&ch, 0.0, 10), Err(MetricsError::InvalidTolerance(_))));
    }
}
