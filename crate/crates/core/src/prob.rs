//! Exact finite-alphabet probability kernel.
//!
//! Every information quantity is reported in bits. Sums are accumulated with
//! natural logarithms and converted once at the end. `0 · log 0` is taken to
//! be `0`, and a divergence against a reference that misses part of the
//! support comes back as [`Divergence::Infinite`] rather than a non-finite
//! float.

use std::f64::consts::LOG2_E;

use serde::{Deserialize, Serialize};

use crate::error::ProbError;

/// Ingestion tolerance on row sums.
pub const PROB_TOL: f64 = 1e-9;

/// Default limit on `input_size * output_size` for constructed channels.
pub const DEFAULT_CELL_CAP: usize = 1 << 20;

/// Finite probability vector over an indexed alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Distribution {
    probs: Vec<f64>,
}

impl TryFrom<Vec<f64>> for Distribution {
    type Error = ProbError;
    fn try_from(v: Vec<f64>) -> Result<Self, ProbError> {
        Distribution::new(v)
    }
}

impl From<Distribution> for Vec<f64> {
    fn from(d: Distribution) -> Self {
        d.probs
    }
}

/// Checks a probability vector and renormalizes it when the sum is off by
/// more than rounding noise but still within [`PROB_TOL`].
fn validate_probs(probs: &mut [f64]) -> Result<(), ProbError> {
    if probs.is_empty() {
        return Err(ProbError::Empty);
    }
    for (index, &value) in probs.iter().enumerate() {
        if !value.is_finite() {
            return Err(ProbError::NonFinite { index });
        }
        if value < 0.0 {
            return Err(ProbError::Negative { index, value });
        }
    }
    let sum: f64 = probs.iter().sum();
    let dev = (sum - 1.0).abs();
    if dev > PROB_TOL {
        return Err(ProbError::NotNormalized {
            sum,
            tolerance: PROB_TOL,
        });
    }
    // Leave sums that only carry summation rounding untouched so that
    // re-loading a saved model is idempotent.
    if dev > 4.0 * f64::EPSILON * probs.len() as f64 {
        probs.iter_mut().for_each(|p| *p /= sum);
    }
    Ok(())
}

impl Distribution {
    pub fn new(mut probs: Vec<f64>) -> Result<Self, ProbError> {
        validate_probs(&mut probs)?;
        Ok(Self { probs })
    }

    pub fn uniform(size: usize) -> Result<Self, ProbError> {
        if size == 0 {
            return Err(ProbError::Empty);
        }
        Ok(Self {
            probs: vec![1.0 / size as f64; size],
        })
    }

    pub fn point_mass(size: usize, at: usize) -> Result<Self, ProbError> {
        if at >= size {
            return Err(ProbError::OutOfRange { index: at, size });
        }
        let mut probs = vec![0.0; size];
        probs[at] = 1.0;
        Ok(Self { probs })
    }

    /// Internal constructor for vectors produced by stochastic arithmetic.
    pub(crate) fn from_computed(probs: Vec<f64>) -> Self {
        debug_assert!(!probs.is_empty());
        debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-6);
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.probs.iter().filter(|&&p| p > 0.0).count()
    }
}

/// Row-stochastic matrix: one row per input symbol, stored row-major.
/// Serializes as a list of rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "Vec<Vec<f64>>")]
pub struct Channel {
    input_size: usize,
    output_size: usize,
    data: Vec<f64>,
}

impl From<Channel> for Vec<Vec<f64>> {
    fn from(ch: Channel) -> Self {
        ch.to_rows()
    }
}

impl Channel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, ProbError> {
        let input_size = rows.len();
        if input_size == 0 {
            return Err(ProbError::Empty);
        }
        let output_size = rows[0].len();
        let mut data = Vec::with_capacity(input_size * output_size);
        for (row, mut values) in rows.into_iter().enumerate() {
            if values.len() != output_size {
                return Err(ProbError::Row {
                    row,
                    source: Box::new(ProbError::DimensionMismatch {
                        expected: output_size,
                        found: values.len(),
                    }),
                });
            }
            validate_probs(&mut values).map_err(|e| ProbError::Row {
                row,
                source: Box::new(e),
            })?;
            data.extend_from_slice(&values);
        }
        Ok(Self {
            input_size,
            output_size,
            data,
        })
    }

    pub fn from_flat(input_size: usize, output_size: usize, data: Vec<f64>) -> Result<Self, ProbError> {
        if data.len() != input_size * output_size {
            return Err(ProbError::DimensionMismatch {
                expected: input_size * output_size,
                found: data.len(),
            });
        }
        let rows = data.chunks(output_size.max(1)).map(<[f64]>::to_vec).collect();
        Self::new(rows)
    }

    pub(crate) fn from_computed(input_size: usize, output_size: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), input_size * output_size);
        Self {
            input_size,
            output_size,
            data,
        }
    }

    pub fn from_distributions(rows: &[Distribution]) -> Result<Self, ProbError> {
        let first = rows.first().ok_or(ProbError::EmptyList)?;
        let output_size = first.len();
        let mut data = Vec::with_capacity(rows.len() * output_size);
        for (row, d) in rows.iter().enumerate() {
            if d.len() != output_size {
                return Err(ProbError::Row {
                    row,
                    source: Box::new(ProbError::DimensionMismatch {
                        expected: output_size,
                        found: d.len(),
                    }),
                });
            }
            data.extend_from_slice(d.probs());
        }
        Ok(Self::from_computed(rows.len(), output_size, data))
    }

    pub fn identity(size: usize) -> Result<Self, ProbError> {
        if size == 0 {
            return Err(ProbError::Empty);
        }
        let mut data = vec![0.0; size * size];
        for i in 0..size {
            data[i * size + i] = 1.0;
        }
        Ok(Self::from_computed(size, size, data))
    }

    /// Channel whose every row equals `row`.
    pub fn constant(input_size: usize, row: &Distribution) -> Result<Self, ProbError> {
        if input_size == 0 {
            return Err(ProbError::Empty);
        }
        let data = row.probs().repeat(input_size);
        Ok(Self::from_computed(input_size, row.len(), data))
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.output_size..(x + 1) * self.output_size]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks(self.output_size)
    }

    pub fn row_distribution(&self, x: usize) -> Distribution {
        Distribution::from_computed(self.row(x).to_vec())
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.output_size + y]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// Smallest strictly positive entry.
    pub fn min_positive(&self) -> f64 {
        self.data
            .iter()
            .copied()
            .filter(|&p| p > 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest absolute deviation of any row sum from one.
    pub fn max_row_deviation(&self) -> f64 {
        self.rows()
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// KL divergence outcome: finite bits, or the +∞ sentinel for a support escape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Divergence {
    Finite(f64),
    Infinite,
}

impl Divergence {
    pub fn finite(self) -> Option<f64> {
        match self {
            Divergence::Finite(v) => Some(v),
            Divergence::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Divergence::Infinite)
    }

    /// Whether this divergence is at most `bound` (never true for +∞).
    pub fn le(self, bound: f64) -> bool {
        self.finite().is_some_and(|v| v <= bound)
    }

    pub fn max(self, other: Divergence) -> Divergence {
        match (self, other) {
            (Divergence::Finite(a), Divergence::Finite(b)) => Divergence::Finite(a.max(b)),
            _ => Divergence::Infinite,
        }
    }
}

fn check_dims(expected: usize, found: usize) -> Result<(), ProbError> {
    if expected != found {
        return Err(ProbError::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub(crate) fn kl_slices(p: &[f64], q: &[f64]) -> Divergence {
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Divergence::Infinite;
            }
            acc += pi * (pi / qi).ln();
        }
    }
    Divergence::Finite((acc * LOG2_E).max(0.0))
}

pub(crate) fn tv_slices(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Shannon entropy of raw probabilities, in bits.
pub(crate) fn entropy_slice(p: &[f64]) -> f64 {
    let h: f64 = p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum();
    (h * LOG2_E).max(0.0)
}

/// Binary entropy function h(p) in bits.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_slice(&[p, 1.0 - p])
}

pub fn entropy(p: &Distribution) -> f64 {
    entropy_slice(p.probs())
}

pub fn kl_divergence(p: &Distribution, q: &Distribution) -> Result<Divergence, ProbError> {
    check_dims(p.len(), q.len())?;
    Ok(kl_slices(p.probs(), q.probs()))
}

pub fn total_variation(p: &Distribution, q: &Distribution) -> Result<f64, ProbError> {
    check_dims(p.len(), q.len())?;
    Ok(tv_slices(p.probs(), q.probs()).min(1.0))
}

pub(crate) fn output_slice(input: &[f64], ch: &Channel) -> Vec<f64> {
    let mut out = vec![0.0; ch.output_size()];
    for (x, &px) in input.iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        for (o, &w) in out.iter_mut().zip(ch.row(x)) {
            *o += px * w;
        }
    }
    out
}

pub fn output_distribution(input: &Distribution, ch: &Channel) -> Result<Distribution, ProbError> {
    check_dims(ch.input_size(), input.len())?;
    Ok(Distribution::from_computed(output_slice(input.probs(), ch)))
}

/// I(X;Y) in bits for raw input weights; the marginal always covers each
/// used row, so the result is finite.
pub(crate) fn mutual_information_slice(input: &[f64], ch: &Channel) -> f64 {
    let marginal = output_slice(input, ch);
    let mut acc = 0.0;
    for (x, &px) in input.iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        for (&w, &q) in ch.row(x).iter().zip(&marginal) {
            if w > 0.0 {
                acc += px * w * (w / q).ln();
            }
        }
    }
    (acc * LOG2_E).max(0.0)
}

pub fn mutual_information(input: &Distribution, ch: &Channel) -> Result<f64, ProbError> {
    check_dims(ch.input_size(), input.len())?;
    Ok(mutual_information_slice(input.probs(), ch))
}

/// Channel `first` followed by `second`.
pub fn compose_channels(first: &Channel, second: &Channel) -> Result<Channel, ProbError> {
    check_dims(first.output_size(), second.input_size())?;
    let (m, k) = (first.input_size(), second.output_size());
    let mut data = vec![0.0; m * k];
    for x in 0..m {
        let out = &mut data[x * k..(x + 1) * k];
        for (z, &w) in first.row(x).iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (o, &v) in out.iter_mut().zip(second.row(z)) {
                *o += w * v;
            }
        }
    }
    Ok(Channel::from_computed(m, k, data))
}

/// Memoryless product of `factors` with the default cell cap.
pub fn product_channel(factors: &[&Channel]) -> Result<Channel, ProbError> {
    product_channel_capped(factors, DEFAULT_CELL_CAP)
}

/// Product channel over Cartesian alphabets. Words are little-endian
/// mixed-radix ids: the first factor's symbol is the least significant digit.
pub fn product_channel_capped(factors: &[&Channel], cap: usize) -> Result<Channel, ProbError> {
    let first = factors.first().ok_or(ProbError::EmptyList)?;
    let (mut ins, mut outs) = (1u128, 1u128);
    for f in factors {
        ins *= f.input_size() as u128;
        outs *= f.output_size() as u128;
        if ins.saturating_mul(outs) > cap as u128 {
            return Err(ProbError::SizeCap {
                cells: ins.saturating_mul(outs),
                cap,
            });
        }
    }
    let mut acc: Channel = (*first).clone();
    for f in &factors[1..] {
        // New factor becomes the more significant digit.
        let (ai, ao) = (acc.input_size(), acc.output_size());
        let (bi, bo) = (f.input_size(), f.output_size());
        let (ni, no) = (ai * bi, ao * bo);
        let mut data = vec![0.0; ni * no];
        for xb in 0..bi {
            for xa in 0..ai {
                let x = xa + ai * xb;
                let row = &mut data[x * no..(x + 1) * no];
                for (yb, &wb) in f.row(xb).iter().enumerate() {
                    if wb == 0.0 {
                        continue;
                    }
                    for (ya, &wa) in acc.row(xa).iter().enumerate() {
                        row[ya + ao * yb] = wa * wb;
                    }
                }
            }
        }
        acc = Channel::from_computed(ni, no, data);
    }
    Ok(acc)
}

/// max over rows of KL(row ‖ reference): a prior-free upper bound on the
/// mutual information of the channel formed by `rows`.
pub fn information_radius_bound(rows: &[Distribution], reference: &Distribution) -> Result<Divergence, ProbError> {
    let mut worst = Divergence::Finite(0.0);
    for row in rows {
        worst = worst.max(kl_divergence(row, reference)?);
    }
    Ok(worst)
}

/// Same bound evaluated over the rows of a channel.
pub fn channel_radius(ch: &Channel, reference: &[f64]) -> Result<Divergence, ProbError> {
    check_dims(ch.output_size(), reference.len())?;
    Ok(ch
        .rows()
        .map(|r| kl_slices(r, reference))
        .fold(Divergence::Finite(0.0), Divergence::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(v: &[f64]) -> Distribution {
        Distribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&d(&[1.0, 0.0])), 0.0);
        assert!((entropy(&d(&[0.5, 0.5])) - 1.0).abs() < 1e-15);
        // mpmath, 50 digits: -0.25*log2(0.25) - 0.75*log2(0.75)
        assert!((entropy(&d(&[0.25, 0.75])) - 0.811_278_124_459_132_8).abs() < 1e-14);
    }

    #[test]
    fn kl_examples() {
        let p = d(&[0.3, 0.7]);
        assert_eq!(kl_divergence(&p, &p).unwrap(), Divergence::Finite(0.0));
        let one = kl_divergence(&d(&[1.0, 0.0]), &d(&[0.5, 0.5])).unwrap();
        assert!((one.finite().unwrap() - 1.0).abs() < 1e-15);
        // mpmath, 50 digits: 0.3*log2(0.3/0.6) + 0.7*log2(0.7/0.4)
        let v = kl_divergence(&p, &d(&[0.6, 0.4])).unwrap().finite().unwrap();
        assert!((v - 0.265_148_445_440_322_9).abs() < 1e-14, "{v}");
        let inf = kl_divergence(&d(&[0.5, 0.5]), &d(&[1.0, 0.0])).unwrap();
        assert!(inf.is_infinite());
        assert!(matches!(
            kl_divergence(&d(&[1.0]), &d(&[0.5, 0.5])),
            Err(ProbError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn total_variation_examples() {
        let p = d(&[0.2, 0.8]);
        assert_eq!(total_variation(&p, &p).unwrap(), 0.0);
        assert_eq!(total_variation(&d(&[1.0, 0.0]), &d(&[0.0, 1.0])).unwrap(), 1.0);
        assert!((total_variation(&p, &d(&[0.5, 0.5])).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn mutual_information_examples() {
        let id = Channel::identity(4).unwrap();
        let u = Distribution::uniform(4).unwrap();
        assert!((mutual_information(&u, &id).unwrap() - 2.0).abs() < 1e-14);
        let flat = Channel::constant(4, &d(&[0.1, 0.9])).unwrap();
        assert_eq!(mutual_information(&u, &flat).unwrap(), 0.0);
        let bsc = Channel::new(vec![vec![0.75, 0.25], vec![0.25, 0.75]]).unwrap();
        let u2 = Distribution::uniform(2).unwrap();
        // 1 - h(0.25), h evaluated by mpmath
        let expect = 1.0 - 0.811_278_124_459_132_8;
        assert!((mutual_information(&u2, &bsc).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn output_distribution_examples() {
        let ds = Channel::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let u = Distribution::uniform(2).unwrap();
        assert_eq!(output_distribution(&u, &ds).unwrap().probs(), &[0.5, 0.5]);
        let ch = Channel::new(vec![vec![0.1, 0.9], vec![0.6, 0.4]]).unwrap();
        let pm = Distribution::point_mass(2, 1).unwrap();
        assert_eq!(output_distribution(&pm, &ch).unwrap().probs(), ch.row(1));
    }

    #[test]
    fn ingestion_rejects_and_renormalizes() {
        assert!(matches!(Distribution::new(vec![]), Err(ProbError::Empty)));
        assert!(matches!(
            Distribution::new(vec![0.6, 0.41]),
            Err(ProbError::NotNormalized { .. })
        ));
        assert!(matches!(
            Distribution::new(vec![1.5, -0.5]),
            Err(ProbError::Negative { index: 1, .. })
        ));
        let near = Distribution::new(vec![0.5, 0.5 + 5e-10]).unwrap();
        assert!((near.probs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let err = Channel::new(vec![vec![1.0, 0.0], vec![0.5, 0.51]]).unwrap_err();
        assert!(matches!(err, ProbError::Row { row: 1, .. }));
    }

    #[test]
    fn compose_examples() {
        let ch = Channel::new(vec![vec![0.2, 0.8], vec![0.7, 0.3]]).unwrap();
        let id = Channel::identity(2).unwrap();
        assert_eq!(compose_channels(&ch, &id).unwrap(), ch);
        let flat = Channel::constant(2, &d(&[0.25, 0.25, 0.5])).unwrap();
        let c = compose_channels(&ch, &flat).unwrap();
        assert_eq!(c.row(0), c.row(1));
        assert!(compose_channels(&flat, &ch).is_err());
    }

    #[test]
    fn product_examples() {
        let ch = Channel::new(vec![vec![0.2, 0.8], vec![0.7, 0.3]]).unwrap();
        assert_eq!(product_channel(&[&ch]).unwrap(), ch);
        let id = Channel::identity(2).unwrap();
        let id3 = Channel::identity(3).unwrap();
        assert_eq!(product_channel(&[&id, &id3]).unwrap(), Channel::identity(6).unwrap());
        assert!(matches!(product_channel(&[]), Err(ProbError::EmptyList)));
        assert!(matches!(
            product_channel_capped(&[&id, &id, &id], 63),
            Err(ProbError::SizeCap { cells: 64, cap: 63 })
        ));
    }

    #[test]
    fn radius_examples() {
        let r = d(&[0.25, 0.75]);
        assert_eq!(
            information_radius_bound(&[r.clone(), r.clone()], &r).unwrap(),
            Divergence::Finite(0.0)
        );
        let row = d(&[0.5, 0.5]);
        assert_eq!(
            information_radius_bound(std::slice::from_ref(&row), &r).unwrap(),
            kl_divergence(&row, &r).unwrap()
        );
    }
}
