//! Batch timing metrics.
//!
//! Non-causal indexing: for window start `n`,
//!
//! * `P(n)   = Σ_{m<L} conj(r[n+m]) · r[n+m+L]`
//! * `R(n)   = Σ_{m<L} |r[n+m+L]|²` (energy of the later half)
//! * `R(n-L) = Σ_{m<L} |r[n+m]|²` (energy of the earlier half)
//!
//! defined for `n = 0 ..= len - 2L`. The causal convention shifts every index
//! by `2L`, so causal index `n` covers samples `n-2L .. n`.
//!
//! These are computed by direct summation and serve as the reference for the
//! recursive [`DetectorState`](crate::DetectorState).

use std::ops::Range;

use num_complex::Complex64;

use crate::error::{Error, Result};

fn window_count(len: usize, half_len: usize) -> Result<usize> {
    if half_len == 0 {
        return Err(Error::ZeroHalfLength);
    }
    let needed = 2 * half_len;
    if len < needed {
        return Err(Error::StreamTooShort { len, needed });
    }
    Ok(len - needed + 1)
}

fn energy(samples: &[Complex64]) -> f64 {
    samples.iter().map(|x| x.norm_sqr()).sum()
}

/// Lag-`L` correlation `P(n)`.
pub fn sliding_correlation(stream: &[Complex64], half_len: usize) -> Result<Vec<Complex64>> {
    let count = window_count(stream.len(), half_len)?;
    Ok((0..count)
        .map(|n| {
            let early = &stream[n..n + half_len];
            let late = &stream[n + half_len..n + 2 * half_len];
            early.iter().zip(late).map(|(a, b)| a.conj() * b).sum()
        })
        .collect())
}

/// Later-half energy `R(n)`, aligned with [`sliding_correlation`].
pub fn sliding_energy(stream: &[Complex64], half_len: usize) -> Result<Vec<f64>> {
    let count = window_count(stream.len(), half_len)?;
    Ok((0..count)
        .map(|n| energy(&stream[n + half_len..n + 2 * half_len]))
        .collect())
}

/// Earlier-half energy `R(n-L)`, aligned with [`sliding_correlation`].
pub fn lagged_energy(stream: &[Complex64], half_len: usize) -> Result<Vec<f64>> {
    let count = window_count(stream.len(), half_len)?;
    Ok((0..count)
        .map(|n| energy(&stream[n..n + half_len]))
        .collect())
}

/// `(P(n), R(n), R(n-L))` at one non-causal index.
pub fn window_sums_at(
    stream: &[Complex64],
    half_len: usize,
    n: usize,
) -> Result<(Complex64, f64, f64)> {
    let count = window_count(stream.len(), half_len)?;
    if n >= count {
        return Err(Error::StreamTooShort {
            len: stream.len(),
            needed: n + 2 * half_len,
        });
    }
    let early = &stream[n..n + half_len];
    let late = &stream[n + half_len..n + 2 * half_len];
    let p = early.iter().zip(late).map(|(a, b)| a.conj() * b).sum();
    Ok((p, energy(late), energy(early)))
}

/// `num / den`, or 0 when the denominator vanishes.
#[inline]
pub(crate) fn guarded_ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::LengthMismatch { expected, actual });
    }
    Ok(())
}

/// Classic metric `|P(n)|² / R(n)²`. Not bounded by one.
pub fn metric_classic(p: &[Complex64], r: &[f64]) -> Result<Vec<f64>> {
    check_len(p.len(), r.len())?;
    Ok(p.iter()
        .zip(r)
        .map(|(p, &r)| guarded_ratio(p.norm_sqr(), r * r))
        .collect())
}

/// Normalized metric `|P(n)|² / (R(n) · R(n-L))`, always in `[0, 1]` up to
/// rounding.
pub fn metric_modified(p: &[Complex64], r: &[f64], r_lagged: &[f64]) -> Result<Vec<f64>> {
    check_len(p.len(), r.len())?;
    check_len(p.len(), r_lagged.len())?;
    Ok(p.iter()
        .zip(r.iter().zip(r_lagged))
        .map(|(p, (&r, &rl))| guarded_ratio(p.norm_sqr(), r * rl))
        .collect())
}

/// Classic metric with the energy term delayed by `L`: `|P(n)|² / R(n-L)²`.
pub fn metric_delayed_r(p: &[Complex64], r_lagged: &[f64]) -> Result<Vec<f64>> {
    check_len(p.len(), r_lagged.len())?;
    Ok(p.iter()
        .zip(r_lagged)
        .map(|(p, &rl)| guarded_ratio(p.norm_sqr(), rl * rl))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexConvention {
    /// Element `i` is window start `n = i`.
    NonCausal,
    /// Element `i` is causal index `n = i + 2L`.
    Causal,
}

/// All metric components over a stream.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTrace {
    pub p: Vec<Complex64>,
    pub r: Vec<f64>,
    pub r_lagged: Vec<f64>,
    pub m_old: Vec<f64>,
    pub m_new: Vec<f64>,
    pub m_delayed_r: Vec<f64>,
    pub convention: IndexConvention,
    pub half_len: usize,
}

impl MetricTrace {
    /// Non-causal trace.
    pub fn compute(stream: &[Complex64], half_len: usize) -> Result<Self> {
        let p = sliding_correlation(stream, half_len)?;
        let r = sliding_energy(stream, half_len)?;
        let r_lagged = lagged_energy(stream, half_len)?;
        let m_old = metric_classic(&p, &r)?;
        let m_new = metric_modified(&p, &r, &r_lagged)?;
        let m_delayed_r = metric_delayed_r(&p, &r_lagged)?;
        Ok(MetricTrace {
            p,
            r,
            r_lagged,
            m_old,
            m_new,
            m_delayed_r,
            convention: IndexConvention::NonCausal,
            half_len,
        })
    }

    /// Trace in causal indexing.
    pub fn causal(stream: &[Complex64], half_len: usize) -> Result<Self> {
        Ok(MetricTrace {
            convention: IndexConvention::Causal,
            ..Self::compute(stream, half_len)?
        })
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// Index of the first element under this trace's convention.
    pub fn first_index(&self) -> usize {
        match self.convention {
            IndexConvention::NonCausal => 0,
            IndexConvention::Causal => 2 * self.half_len,
        }
    }

    pub fn indices(&self) -> Range<usize> {
        self.first_index()..self.first_index() + self.len()
    }

    /// Vector position holding `index`, if it is covered.
    pub fn position(&self, index: usize) -> Option<usize> {
        index
            .checked_sub(self.first_index())
            .filter(|&i| i < self.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn alternating() -> Vec<Complex64> {
        vec![c(1.0, 0.0), c(0.0, 1.0), c(1.0, 0.0), c(0.0, 1.0)]
    }

    fn two_two_one_one() -> Vec<Complex64> {
        vec![c(2.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]
    }

    #[test]
    fn alternating_stream_examples() {
        let r = alternating();
        let p = sliding_correlation(&r, 2).unwrap();
        let e = sliding_energy(&r, 2).unwrap();
        let el = lagged_energy(&r, 2).unwrap();
        assert_eq!(p, vec![c(2.0, 0.0)]);
        assert_eq!(e, vec![2.0]);
        assert_eq!(el, vec![2.0]);
        assert_eq!(metric_classic(&p, &e).unwrap(), vec![1.0]);
        assert_eq!(metric_modified(&p, &e, &el).unwrap(), vec![1.0]);
    }

    #[test]
    fn classic_metric_exceeds_one() {
        let r = two_two_one_one();
        let p = sliding_correlation(&r, 2).unwrap();
        let e = sliding_energy(&r, 2).unwrap();
        let el = lagged_energy(&r, 2).unwrap();
        assert_eq!(p, vec![c(4.0, 0.0)]);
        assert_eq!(e, vec![2.0]);
        assert_eq!(el, vec![8.0]);
        assert_eq!(metric_classic(&p, &e).unwrap(), vec![4.0]);
        assert_eq!(metric_modified(&p, &e, &el).unwrap(), vec![1.0]);
    }

    #[test]
    fn constant_stream() {
        let cst = c(0.3, -1.2);
        let r = vec![cst; 20];
        let p = sliding_correlation(&r, 4).unwrap();
        let el = lagged_energy(&r, 4).unwrap();
        assert_eq!(p.len(), 13);
        for v in &p {
            assert!((v - 4.0 * cst.norm_sqr()).norm() < 1e-12);
        }
        for v in metric_delayed_r(&p, &el).unwrap() {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_stream_is_guarded() {
        let r = vec![Complex64::default(); 12];
        let t = MetricTrace::compute(&r, 3).unwrap();
        assert!(t.p.iter().all(|v| *v == Complex64::default()));
        assert!(t.r.iter().all(|v| *v == 0.0));
        assert!(t.m_old.iter().all(|v| *v == 0.0));
        assert!(t.m_new.iter().all(|v| *v == 0.0));
        assert!(t.m_delayed_r.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn zero_energy_classic_is_zero() {
        let p = vec![c(1.0, 1.0); 5];
        assert_eq!(metric_classic(&p, &[0.0; 5]).unwrap(), vec![0.0; 5]);
    }

    #[test]
    fn delayed_r_onset_spike() {
        // zeros, a weak first sample, then a unit plateau
        let l = 4;
        let mut r = vec![Complex64::default(); 8];
        r.push(c(0.1, 0.0));
        r.extend(std::iter::repeat_n(c(1.0, 0.0), 12));
        let t = MetricTrace::compute(&r, l).unwrap();

        // window start 5: earlier half [0, 0, 0, 0.1], later half [1, 1, 1, 1]
        // P = 0.1, R(n-L) = 0.01 → 0.01 / 1e-4 = 100
        let spike = t.m_delayed_r[5];
        assert!((spike - 100.0).abs() < 1e-9, "{spike}");
        // window start 4: earlier half all zero → guarded
        assert_eq!(t.m_delayed_r[4], 0.0);
        assert!(t.m_new.iter().all(|&v| v <= 1.0 + 1e-12));
    }

    #[test]
    fn length_errors() {
        assert_eq!(
            sliding_correlation(&[Complex64::default(); 3], 2),
            Err(Error::StreamTooShort { len: 3, needed: 4 })
        );
        assert_eq!(
            sliding_energy(&[Complex64::default(); 3], 0),
            Err(Error::ZeroHalfLength)
        );
        assert!(metric_classic(&[Complex64::default(); 2], &[1.0]).is_err());
        assert!(metric_modified(&[Complex64::default(); 2], &[1.0; 2], &[1.0]).is_err());
        assert!(metric_delayed_r(&[Complex64::default(); 2], &[1.0; 3]).is_err());
    }

    #[test]
    fn causal_positions() {
        let r = vec![c(1.0, 0.0); 10];
        let t = MetricTrace::causal(&r, 2).unwrap();
        assert_eq!(t.len(), 7);
        assert_eq!(t.indices(), 4..11);
        assert_eq!(t.position(3), None);
        assert_eq!(t.position(4), Some(0));
        assert_eq!(t.position(10), Some(6));
        assert_eq!(t.position(11), None);
    }

    #[test]
    fn window_sums_match_trace() {
        let r: Vec<Complex64> = (0..30)
            .map(|i| c((i as f64).sin(), (i as f64 * 0.7).cos()))
            .collect();
        let t = MetricTrace::compute(&r, 5).unwrap();
        for n in 0..t.len() {
            let (p, e, el) = window_sums_at(&r, 5, n).unwrap();
            assert_eq!(p, t.p[n]);
            assert_eq!(e, t.r[n]);
            assert_eq!(el, t.r_lagged[n]);
        }
        assert!(window_sums_at(&r, 5, t.len()).is_err());
    }

    fn stream() -> impl Strategy<Value = (usize, Vec<Complex64>)> {
        (1usize..8).prop_flat_map(|l| {
            let len = 2 * l..6 * l + 4;
            (
                Just(l),
                prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), len)
                    .prop_map(|v| v.into_iter().map(|(a, b)| c(a, b)).collect()),
            )
        })
    }

    proptest! {
        #[test]
        fn modified_metric_is_bounded((l, r) in stream()) {
            let t = MetricTrace::compute(&r, l).unwrap();
            for &v in &t.m_new {
                prop_assert!((0.0..=1.0 + 1e-9).contains(&v));
            }
            prop_assert!(t.r.iter().all(|&e| e >= 0.0));
            prop_assert!(t.r_lagged.iter().all(|&e| e >= 0.0));
        }

        #[test]
        fn metrics_are_scale_invariant((l, r) in stream(), mag in 0.01f64..100.0, phase in 0.0f64..6.3) {
            let k = Complex64::from_polar(mag, phase);
            let scaled: Vec<Complex64> = r.iter().map(|x| x * k).collect();
            let a = MetricTrace::compute(&r, l).unwrap();
            let b = MetricTrace::compute(&scaled, l).unwrap();
            let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1e-300);
            for i in 0..a.len() {
                prop_assert!(close(a.m_old[i], b.m_old[i]));
                prop_assert!(close(a.m_new[i], b.m_new[i]));
                prop_assert!(close(a.m_delayed_r[i], b.m_delayed_r[i]));
            }
        }
    }
}
